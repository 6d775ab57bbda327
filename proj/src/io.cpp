#include "pmeobst/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pmeobst/errors.hpp"

namespace pmeobst {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fnv1a_hex(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  const auto res = std::to_chars(buf, buf + sizeof(buf), h, 16);
  std::string hex(buf, res.ptr);
  return std::string(16 - hex.size(), '0') + hex;
}

nlohmann::json grid_to_json(const SpaceTimeGrid& grid) {
  nlohmann::json domain = nlohmann::json::array();
  nlohmann::json nsp = nlohmann::json::array();
  for (int a = 0; a < grid.spatial_dim(); ++a) {
    domain.push_back({grid.axis(a).lo, grid.axis(a).hi});
    nsp.push_back(grid.n_space(a));
  }
  return nlohmann::json{{"domain", domain},
                        {"n_space", nsp},
                        {"n_time", grid.n_time()},
                        {"T", grid.final_time()}};
}

SpaceTimeGrid grid_from_json(const nlohmann::json& j) {
  try {
    std::vector<Interval> domain;
    for (const auto& iv : j.at("domain")) {
      domain.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    }
    std::vector<int> nsp;
    for (const auto& n : j.at("n_space")) nsp.push_back(n.get<int>());
    return SpaceTimeGrid::create(std::move(domain), std::move(nsp),
                                 j.at("n_time").get<int>(),
                                 j.at("T").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid: malformed JSON (") + e.what() + ")");
  }
}

void write_field_csv(const ScalarField& f, const std::filesystem::path& path) {
  const auto& g = f.grid();
  std::ostringstream out;
  out << (g.spatial_dim() == 1 ? "x,t,u\n" : "x,y,t,u\n");
  std::array<int, 2> ix{};
  for (int k = 0; k < g.n_time(); ++k) {
    for (long flat = 0; flat < g.n_space_total(); ++flat) {
      g.unflatten(flat, ix);
      out << format_double(g.coord(0, ix[0]));
      if (g.spatial_dim() == 2) out << ',' << format_double(g.coord(1, ix[1]));
      out << ',' << format_double(g.time(k)) << ','
          << format_double(f.at(flat, k)) << '\n';
    }
  }
  write_text_file(path, out.str());
}

void write_meta_json(const ScalarField& f, const std::filesystem::path& path,
                     const std::string& config_hash,
                     const nlohmann::json& extra) {
  nlohmann::json j{{"grid", grid_to_json(f.grid())},
                   {"sup", f.sup()},
                   {"min", f.min()},
                   {"config_hash", config_hash},
                   {"version", kVersion}};
  if (!extra.is_null()) {
    for (auto it = extra.begin(); it != extra.end(); ++it) {
      j[it.key()] = it.value();
    }
  }
  write_text_file(path, j.dump(2) + "\n");
}

ScalarField read_field_csv(const std::filesystem::path& csv_path) {
  const auto meta_path = csv_path.parent_path() / "meta.json";
  std::ifstream meta(meta_path);
  if (!meta) {
    throw ConfigError("cannot open metadata sidecar " + meta_path.string());
  }
  nlohmann::json mj;
  meta >> mj;
  const SpaceTimeGrid grid = grid_from_json(mj.at("grid"));

  std::ifstream in(csv_path);
  if (!in) throw ConfigError("cannot open field CSV " + csv_path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> values;
  values.reserve(static_cast<size_t>(grid.n_nodes()));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto pos = line.rfind(',');
    if (pos == std::string::npos) {
      throw ConfigError("malformed field CSV row: " + line);
    }
    double v = 0.0;
    const char* first = line.data() + pos + 1;
    const char* last = line.data() + line.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{}) {
      throw ConfigError("malformed field CSV value: " + line);
    }
    values.push_back(v);
  }
  if (static_cast<long>(values.size()) != grid.n_nodes()) {
    throw ConfigError("field CSV row count does not match grid");
  }
  return ScalarField::from_values(grid, std::move(values));
}

void write_boxes_csv(const std::vector<EnumeratedBox>& boxes, int dim,
                     const std::filesystem::path& path) {
  std::ostringstream out;
  if (dim == 1) {
    out << "level,box_id,lo0,hi0,t_start_index\n";
  } else {
    out << "level,box_id,lo0,lo1,hi0,hi1,t_start_index\n";
  }
  for (const auto& eb : boxes) {
    out << eb.level << ',' << eb.ordinal << ',' << eb.box.lo[0];
    if (dim == 2) out << ',' << eb.box.lo[1];
    out << ',' << eb.box.hi[0];
    if (dim == 2) out << ',' << eb.box.hi[1];
    out << ',' << eb.box.t_start << '\n';
  }
  write_text_file(path, out.str());
}

void write_trace_csv(const IterationTrace& trace, int dim,
                     const std::filesystem::path& path) {
  std::ostringstream out;
  if (dim == 1) {
    out << "sweep,level,box_id,lo0,hi0,t_start_index,increment,newton_iters\n";
  } else {
    out << "sweep,level,box_id,lo0,lo1,hi0,hi1,t_start_index,increment,"
           "newton_iters\n";
  }
  for (const auto& r : trace.boxes) {
    out << r.sweep << ',' << r.level << ',' << r.ordinal << ',' << r.box.lo[0];
    if (dim == 2) out << ',' << r.box.lo[1];
    out << ',' << r.box.hi[0];
    if (dim == 2) out << ',' << r.box.hi[1];
    out << ',' << r.box.t_start << ',' << format_double(r.increment) << ','
        << r.newton_iters << '\n';
  }
  write_text_file(path, out.str());
}

nlohmann::json trace_summary_json(const IterationTrace& trace) {
  nlohmann::json sweeps = nlohmann::json::array();
  for (const auto& s : trace.sweeps) {
    sweeps.push_back({{"sweep", s.sweep},
                      {"depth", s.depth},
                      {"max_increment", s.max_increment}});
  }
  long total_newton = 0;
  double min_increment = 0.0;
  for (const auto& b : trace.boxes) {
    total_newton += b.newton_iters;
    min_increment = std::min(min_increment, b.increment);
  }
  return nlohmann::json{
      {"sweeps", sweeps},
      {"sweep_count", trace.sweeps.size()},
      {"box_solves", trace.boxes.size()},
      {"boxes_per_sweep", trace.box_count_per_sweep},
      {"total_newton_iters", total_newton},
      {"min_increment", min_increment},
      {"stop", trace.stop == StopReason::kConverged ? "converged"
                                                    : "sweep_budget"}};
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

}  // namespace pmeobst

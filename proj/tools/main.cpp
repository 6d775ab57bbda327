#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "pmeobst/approximation.hpp"
#include "pmeobst/harnack.hpp"
#include "pmeobst/io.hpp"
#include "pmeobst/obstacle.hpp"
#include "pmeobst/runconfig.hpp"
#include "pmeobst/solver.hpp"
#include "pmeobst/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pmeobst;

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

struct GridFlags {
  std::vector<std::string> domain;  // one "lo,hi" per axis
  std::vector<int> n_space;
  int n_time = 0;
  double T = 0.0;

  SpaceTimeGrid build() const {
    std::vector<Interval> dom;
    for (const auto& d : domain) {
      const auto v = parse_list(d);
      if (v.size() != 2) throw ConfigError("domain: expected 'lo,hi'");
      dom.push_back({v[0], v[1]});
    }
    return SpaceTimeGrid::create(dom, n_space, n_time, T);
  }

  json to_json() const {
    json dom = json::array();
    for (const auto& d : domain) {
      const auto v = parse_list(d);
      dom.push_back(v);
    }
    return json{{"domain", dom},
                {"n_space", n_space},
                {"n_time", n_time},
                {"T", T}};
  }
};

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
  cmd->add_option("--domain", g.domain, "axis interval 'lo,hi' (repeatable)")
      ->required();
  cmd->add_option("--n-space", g.n_space, "nodes per axis (repeatable)")
      ->required();
  cmd->add_option("--n-time", g.n_time, "time levels")->required();
  cmd->add_option("--T", g.T, "final time")->required();
}

int cmd_barenblatt(const GridFlags& gf, double m, int n, double C,
                   double t_offset, const std::string& out_dir) {
  const auto grid = gf.build();
  if (grid.spatial_dim() != n) {
    throw ConfigError("n: dimension does not match the grid");
  }
  if (!(t_offset > 0.0)) {
    throw ConfigError("t-offset: must be positive (profile needs t > 0)");
  }
  const auto field = barenblatt_field(grid, m, C, t_offset);
  const fs::path out(out_dir);
  // the time column carries the evaluated (offset) time for this sampler
  {
    std::ostringstream csv;
    csv << (grid.spatial_dim() == 1 ? "x,t,u\n" : "x,y,t,u\n");
    std::array<int, 2> ix{};
    for (int k = 0; k < grid.n_time(); ++k) {
      for (long f = 0; f < grid.n_space_total(); ++f) {
        grid.unflatten(f, ix);
        csv << format_double(grid.coord(0, ix[0]));
        if (grid.spatial_dim() == 2) {
          csv << ',' << format_double(grid.coord(1, ix[1]));
        }
        csv << ',' << format_double(grid.time(k) + t_offset) << ','
            << format_double(field.at(f, k)) << '\n';
      }
    }
    write_text_file(out / "field.csv", csv.str());
  }
  json cfg = gf.to_json();
  cfg["m"] = m;
  cfg["n"] = n;
  cfg["C"] = C;
  cfg["t_offset"] = t_offset;
  write_meta_json(field, out / "meta.json", fnv1a_hex(cfg.dump()),
                  json{{"m", m}, {"t_offset", t_offset}});
  std::cout << "barenblatt: wrote " << grid.n_nodes() << " nodes, sup="
            << format_double(field.sup()) << "\n";
  return 0;
}

int cmd_enumerate(const GridFlags& gf, int level, const std::string& order,
                  const std::string& out_dir) {
  const auto grid = gf.build();
  const BoxOrder ord = order == "reversed" ? BoxOrder::kReversedWithinLevel
                                           : BoxOrder::kLexicographic;
  const int depth = level >= 0 ? level : enumeration_depth(grid);
  const auto boxes = enumerate_boxes(grid, depth, ord);
  const fs::path out(out_dir);
  write_boxes_csv(boxes, grid.spatial_dim(), out / "boxes.csv");
  json cfg = gf.to_json();
  cfg["level"] = depth;
  cfg["order"] = order;
  json meta{{"grid", grid_to_json(grid)},
            {"level", depth},
            {"boxes", boxes.size()},
            {"config_hash", fnv1a_hex(cfg.dump())},
            {"version", kVersion}};
  write_text_file(out / "meta.json", meta.dump(2) + "\n");
  std::cout << "enumerate-boxes: level " << depth << ", " << boxes.size()
            << " boxes\n";
  return 0;
}

int cmd_solve_bvp(const std::string& config_path, const std::string& out_dir) {
  const auto rc = load_run_config(config_path);
  if (!rc.bvp_data) {
    throw ConfigError("solve-bvp: config needs a 'boundary' section");
  }
  const auto box = SpaceTimeBox::full_cylinder(rc.grid);
  const auto u = solve_box(*rc.bvp_data, box, rc.obstacle_cfg.solver);
  const fs::path out(out_dir);
  write_field_csv(u, out / "field.csv");
  write_meta_json(u, out / "meta.json", rc.config_hash,
                  json{{"m", rc.obstacle_cfg.solver.m}, {"run", "solve-bvp"}});
  std::cout << "solve-bvp: u in [" << format_double(u.min()) << ", "
            << format_double(u.sup()) << "]\n";
  return 0;
}

int cmd_solve_obstacle(const std::string& config_path,
                       const std::string& out_dir) {
  const auto rc = load_run_config(config_path);
  const auto art = run_case(rc);
  const fs::path out(out_dir);
  write_field_csv(art.u, out / "field.csv");
  write_meta_json(art.u, out / "meta.json", rc.config_hash,
                  json{{"m", rc.obstacle_cfg.solver.m},
                       {"run", "solve-obstacle"}});
  write_trace_csv(art.trace, rc.grid.spatial_dim(), out / "trace.csv");

  double min_over_psi = 0.0;
  {
    const auto a = art.u.values();
    const auto b = art.psi_samples.values();
    for (size_t i = 0; i < a.size(); ++i) {
      min_over_psi = std::min(min_over_psi, a[i] - b[i]);
    }
  }
  double min_increment = 0.0;
  for (const auto& b : art.trace.boxes) {
    min_increment = std::min(min_increment, b.increment);
  }
  json report{{"summary", trace_summary_json(art.trace)},
              {"stop_tol", art.stop_tol},
              {"sweeps", art.sweeps},
              {"sup", art.u.sup()},
              {"invariants",
               {{"increments_nonnegative", min_increment >= 0.0},
                {"dominates_obstacle", min_over_psi >= 0.0},
                {"uniform_bound",
                 art.u.sup() <= art.psi_samples.sup() + 1e-6}}},
              {"config_hash", rc.config_hash},
              {"version", kVersion}};
  if (!art.lsc_stages.empty()) {
    json stages = json::array();
    for (const auto& st : art.lsc_stages) {
      stages.push_back({{"k", st.k},
                        {"delta_from_prev", st.delta_from_prev},
                        {"min_gap_from_prev", st.min_gap_from_prev}});
    }
    report["lsc_stages"] = stages;
  }
  write_text_file(out / "report.json", report.dump(2) + "\n");
  std::cout << "solve-obstacle: u in [" << format_double(art.u.min()) << ", "
            << format_double(art.u.sup()) << "], sweeps=" << art.sweeps
            << "\n";
  return 0;
}

int cmd_approx_eps(const std::string& base_path, const std::string& schedule_s,
                   double q, double p, double t0, double m_override,
                   const std::string& out_dir) {
  const ScalarField base = read_field_csv(base_path);
  double m = m_override;
  if (m <= 0.0) {
    std::ifstream meta(fs::path(base_path).parent_path() / "meta.json");
    json mj;
    meta >> mj;
    if (!mj.contains("m")) {
      throw ConfigError("approx-eps: pass --m or store m in meta.json");
    }
    m = mj.at("m").get<double>();
  }
  const auto schedule = parse_list(schedule_s);
  ObstacleConfig cfg;
  cfg.solver.m = m;
  const auto family = build_eps_family(base, schedule, cfg);
  const auto report = convergence_report(family, q, p, t0);

  const fs::path out(out_dir);
  std::ostringstream csv;
  csv << "eps,max_gap,lp_gap,slice_lp_gap,pairing_gap,grad_gap_max,"
         "grad_gap_mean\n";
  for (const auto& r : report.rows) {
    csv << format_double(r.eps) << ',' << format_double(r.max_gap) << ','
        << format_double(r.lp_gap) << ',' << format_double(r.slice_lp_gap)
        << ',' << format_double(r.pairing_gap) << ','
        << format_double(r.grad_gap_max) << ','
        << format_double(r.grad_gap_mean) << '\n';
  }
  write_text_file(out / "report.csv", csv.str());

  bool lower = true;
  bool monotone = true;
  for (size_t i = 0; i < family.members.size(); ++i) {
    lower = lower && family.members[i].min() >= family.schedule[i];
    if (i > 0) {
      const auto a = family.members[i].values();
      const auto b = family.members[i - 1].values();
      for (size_t n = 0; n < a.size(); ++n) {
        monotone = monotone && a[n] <= b[n] + 2.0 * family.stop_tol;
      }
    }
  }
  json cfg_json{{"base", base_path}, {"schedule", schedule},
                {"q", q},           {"p", p},
                {"t0", t0},         {"m", m}};
  json summary{{"rows", report.rows.size()},
               {"eps_lower_bound_exact", lower},
               {"monotone_in_eps", monotone},
               {"stop_tol", family.stop_tol},
               {"config_hash", fnv1a_hex(cfg_json.dump())},
               {"version", kVersion}};
  write_text_file(out / "report.json", summary.dump(2) + "\n");
  std::cout << "approx-eps: " << report.rows.size()
            << " family members, lower bound "
            << (lower ? "holds" : "VIOLATED") << "\n";
  return lower && monotone ? 0 : 1;
}

int cmd_check_harnack(const std::string& field_path, const std::string& x0_s,
                      const std::string& rho_s, const std::string& t0_s,
                      double c1, double c2, bool fit, double m,
                      const std::string& out_dir) {
  const ScalarField u = read_field_csv(field_path);
  const auto x0v = parse_list(x0_s);
  const auto rhos = parse_list(rho_s);
  const auto t0s = parse_list(t0_s);
  if (x0v.empty() || rhos.empty() || t0s.empty()) {
    throw ConfigError("check-harnack: x0, rho and t0 must be non-empty");
  }
  const int dim = u.grid().spatial_dim();
  if (static_cast<int>(x0v.size()) % dim != 0) {
    throw ConfigError("check-harnack: x0 must list dim coordinates per center");
  }
  std::vector<HarnackGeometry> geoms;
  for (size_t c = 0; c + dim <= x0v.size(); c += dim) {
    for (double rho : rhos) {
      for (double t0 : t0s) {
        HarnackGeometry g;
        g.x0.assign(x0v.begin() + static_cast<long>(c),
                    x0v.begin() + static_cast<long>(c) + dim);
        g.rho = rho;
        g.t0 = t0;
        geoms.push_back(std::move(g));
      }
    }
  }

  json out_json;
  int exit_code = 0;
  if (fit) {
    std::vector<HarnackCase> cases;
    for (size_t i = 0; i < geoms.size(); ++i) {
      cases.push_back({&u, geoms[i], "case" + std::to_string(i)});
    }
    const auto res = fit_constants(cases, m);
    out_json["fit"] = {{"feasible", res.feasible},
                       {"C1", res.c1},
                       {"C2", res.c2},
                       {"binding_case", res.binding_case},
                       {"worst_ratio", res.worst_ratio}};
    exit_code = res.feasible ? 0 : 1;
    std::cout << "check-harnack: fit "
              << (res.feasible ? "C1=" + format_double(res.c1) +
                                     " C2=" + format_double(res.c2)
                               : "INFEASIBLE")
              << "\n";
  } else {
    json rows = json::array();
    bool all = true;
    for (const auto& g : geoms) {
      const auto qd = harnack_quantities(u, g, c1, m);
      const bool ok = qd.inequality_holds(c1, c2);
      all = all && ok;
      rows.push_back({{"x0", g.x0},
                      {"rho", g.rho},
                      {"t0", g.t0},
                      {"avg", qd.avg},
                      {"tau", qd.tau_wait},
                      {"essinf", qd.essinf},
                      {"tail", qd.tail},
                      {"holds", ok}});
    }
    out_json["cases"] = rows;
    out_json["all_hold"] = all;
    exit_code = all ? 0 : 1;
    std::cout << "check-harnack: " << geoms.size() << " cases, "
              << (all ? "all hold" : "VIOLATIONS") << "\n";
  }
  json cfg{{"field", field_path}, {"x0", x0v},   {"rho", rhos},
           {"t0", t0s},           {"fit", fit},  {"C1", c1},
           {"C2", c2},            {"m", m}};
  out_json["config_hash"] = fnv1a_hex(cfg.dump());
  out_json["version"] = kVersion;
  write_text_file(fs::path(out_dir) / "report.json", out_json.dump(2) + "\n");
  return exit_code;
}

int cmd_verify(const std::vector<std::string>& suites,
               const std::string& cases_dir, const std::string& out_dir) {
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(cases_dir)) {
    if (e.path().extension() == ".json") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<RunConfig> cases;
  for (const auto& p : paths) cases.push_back(load_run_config(p));

  const auto verdicts = run_suite(cases, suites);
  for (const auto& row : verdicts.rows) {
    const char* status = row.status == VerdictStatus::kPass   ? "pass"
                         : row.status == VerdictStatus::kFail ? "FAIL"
                                                              : "skip";
    std::cout << row.case_name << "  " << row.suite << "  " << status << "  "
              << row.detail << "\n";
  }
  write_text_file(fs::path(out_dir) / "report.json",
                  verdicts.to_json().dump(2) + "\n");
  std::cout << "verify: " << verdicts.rows.size() << " verdicts, "
            << (verdicts.all_pass ? "all pass" : "FAILURES") << "\n";
  return verdicts.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"porous-medium obstacle toolbox"};
  app.require_subcommand(1);

  GridFlags gf;
  double m = 2.0;
  int bb_n = 1;
  double bb_C = 1.0;
  double t_offset = 0.25;
  int level = -1;
  std::string order = "lex";
  std::string out_dir = "out";
  std::string config_path;
  std::string base_path;
  std::string schedule = "0.4,0.2,0.1,0.05";
  double q = 1.0, p = 2.0, t0 = 0.5;
  std::string field_path, x0_s = "0", rho_s = "0.1", t0_s = "0.5";
  double c1 = 1.0, c2 = 2.0;
  bool fit = false;
  std::vector<std::string> suites{"all"};
  std::string cases_dir;

  auto* bb = app.add_subcommand("barenblatt", "sample the closed-form profile");
  add_grid_flags(bb, gf);
  bb->add_option("--m", m, "exponent");
  bb->add_option("--n", bb_n, "spatial dimension");
  bb->add_option("--C", bb_C, "profile constant");
  bb->add_option("--t-offset", t_offset, "evaluation time of grid t=0 (> 0)");
  bb->add_option("--out", out_dir, "output directory");

  auto* en = app.add_subcommand("enumerate-boxes", "dyadic box enumeration");
  add_grid_flags(en, gf);
  en->add_option("--level", level, "enumeration level (-1: auto depth)");
  en->add_option("--order", order, "lex | reversed");
  en->add_option("--out", out_dir, "output directory");

  auto* sb = app.add_subcommand("solve-bvp", "full-cylinder boundary value run");
  sb->add_option("--config", config_path, "run config JSON")->required();
  sb->add_option("--out", out_dir, "output directory");

  auto* so = app.add_subcommand("solve-obstacle", "minimal supersolution run");
  so->add_option("--config", config_path, "run config JSON")->required();
  so->add_option("--out", out_dir, "output directory");

  auto* ae = app.add_subcommand("approx-eps", "eps-approximation family");
  ae->add_option("--base", base_path, "base field CSV")->required();
  ae->add_option("--schedule", schedule, "decreasing eps list");
  ae->add_option("--q", q, "power");
  ae->add_option("--p", p, "norm exponent");
  ae->add_option("--t0", t0, "slice time");
  double m_override = 0.0;
  ae->add_option("--m", m_override, "exponent override");
  ae->add_option("--out", out_dir, "output directory");

  auto* ch = app.add_subcommand("check-harnack", "weak Harnack quantities");
  ch->add_option("--field", field_path, "field CSV")->required();
  ch->add_option("--x0", x0_s, "center coordinates (comma list)");
  ch->add_option("--rho", rho_s, "radii (comma list)");
  ch->add_option("--t0", t0_s, "base times (comma list)");
  ch->add_option("--C1", c1, "constant C1");
  ch->add_option("--C2", c2, "constant C2");
  ch->add_flag("--fit", fit, "fit constants on the half-octave lattice");
  ch->add_option("--m", m, "exponent");
  ch->add_option("--out", out_dir, "output directory");

  auto* ve = app.add_subcommand("verify", "run invariant suites over cases");
  ve->add_option("--suite", suites, "suite ids or 'all'");
  ve->add_option("--cases", cases_dir, "directory of case configs")
      ->required();
  ve->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
    if (bb->parsed()) return cmd_barenblatt(gf, m, bb_n, bb_C, t_offset, out_dir);
    if (en->parsed()) return cmd_enumerate(gf, level, order, out_dir);
    if (sb->parsed()) return cmd_solve_bvp(config_path, out_dir);
    if (so->parsed()) return cmd_solve_obstacle(config_path, out_dir);
    if (ae->parsed()) {
      return cmd_approx_eps(base_path, schedule, q, p, t0, m_override, out_dir);
    }
    if (ch->parsed()) {
      return cmd_check_harnack(field_path, x0_s, rho_s, t0_s, c1, c2, fit, m,
                               out_dir);
    }
    if (ve->parsed()) return cmd_verify(suites, cases_dir, out_dir);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

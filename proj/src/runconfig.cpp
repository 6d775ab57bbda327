#include "pmeobst/runconfig.hpp"

#include <fstream>

#include "pmeobst/errors.hpp"
#include "pmeobst/io.hpp"

namespace pmeobst {

SolverConfig solver_from_json(const nlohmann::json& j) {
  SolverConfig cfg;
  if (j.contains("m")) cfg.m = j.at("m").get<double>();
  if (j.contains("newton_tol")) cfg.newton_tol = j.at("newton_tol").get<double>();
  if (j.contains("newton_max_iter")) {
    cfg.newton_max_iter = j.at("newton_max_iter").get<int>();
  }
  if (j.contains("jacobian_floor")) {
    cfg.jacobian_floor = j.at("jacobian_floor").get<double>();
  }
  if (j.contains("positivity_clamp")) {
    cfg.positivity_clamp = j.at("positivity_clamp").get<bool>();
  }
  if (j.contains("cg_rel_tol")) cfg.cg_rel_tol = j.at("cg_rel_tol").get<double>();
  cfg.validate();
  return cfg;
}

ObstacleConfig obstacle_cfg_from_json(const nlohmann::json& j) {
  ObstacleConfig cfg;
  cfg.solver = solver_from_json(j);
  if (j.contains("stop_tol")) cfg.stop_tol = j.at("stop_tol").get<double>();
  if (j.contains("max_sweeps")) cfg.max_sweeps = j.at("max_sweeps").get<int>();
  if (j.contains("level")) cfg.level = j.at("level").get<int>();
  if (j.contains("lsc_max_stages")) {
    cfg.lsc_max_stages = j.at("lsc_max_stages").get<int>();
  }
  if (j.contains("order")) {
    const auto s = j.at("order").get<std::string>();
    if (s == "lex") {
      cfg.order = BoxOrder::kLexicographic;
    } else if (s == "reversed") {
      cfg.order = BoxOrder::kReversedWithinLevel;
    } else {
      throw ConfigError("order: expected 'lex' or 'reversed', got '" + s + "'");
    }
  }
  return cfg;
}

namespace {

Regularity regularity_from_json(const nlohmann::json& j, Regularity fallback) {
  if (!j.contains("regularity")) return fallback;
  const auto s = j.at("regularity").get<std::string>();
  if (s == "continuous") return Regularity::kContinuous;
  if (s == "lower_semicontinuous" || s == "lsc") {
    return Regularity::kLowerSemicontinuous;
  }
  throw ConfigError("regularity: expected 'continuous' or "
                    "'lower_semicontinuous', got '" + s + "'");
}

}  // namespace

ScalarField boundary_data_from_json(const nlohmann::json& j,
                                    const SpaceTimeGrid& grid,
                                    const std::filesystem::path& base_dir) {
  const auto type = j.at("type").get<std::string>();
  if (type == "constant") {
    return ScalarField::constant(grid, j.at("value").get<double>());
  }
  if (type == "barenblatt") {
    std::vector<double> center(static_cast<size_t>(grid.spatial_dim()), 0.0);
    if (j.contains("center")) {
      center = j.at("center").get<std::vector<double>>();
    }
    const double m =
        j.contains("m") ? j.at("m").get<double>() : 2.0;
    return barenblatt_field(grid, m, j.at("C").get<double>(),
                            j.at("t_offset").get<double>(), center);
  }
  if (type == "table") {
    const auto path = base_dir / j.at("path").get<std::string>();
    ScalarField f = read_field_csv(path);
    if (!(f.grid() == grid)) {
      throw ConfigError("table: field grid does not match the run grid");
    }
    return f;
  }
  throw ConfigError("boundary: unknown type '" + type + "'");
}

Obstacle obstacle_from_json(const nlohmann::json& j, const SpaceTimeGrid& grid,
                            const SolverConfig& solver,
                            const std::filesystem::path& base_dir) {
  const auto type = j.at("type").get<std::string>();
  if (type == "constant") {
    return Obstacle::constant(j.at("value").get<double>());
  }
  if (type == "barenblatt") {
    std::vector<double> center(static_cast<size_t>(grid.spatial_dim()), 0.0);
    if (j.contains("center")) {
      center = j.at("center").get<std::vector<double>>();
    }
    const double m = j.contains("m") ? j.at("m").get<double>() : solver.m;
    ScalarField f = barenblatt_field(grid, m, j.at("C").get<double>(),
                                     j.at("t_offset").get<double>(), center);
    return Obstacle::from_table(std::move(f),
                                regularity_from_json(j, Regularity::kContinuous));
  }
  if (type == "bump") {
    // base + amplitude * separable C^2 bump, evaluated analytically
    const double base = j.contains("base") ? j.at("base").get<double>() : 0.0;
    const double amp = j.at("amplitude").get<double>();
    const auto center = j.at("center").get<std::vector<double>>();
    const auto radii = j.at("radii").get<std::vector<double>>();
    const double tc = j.at("t_center").get<double>();
    const double tr = j.at("t_radius").get<double>();
    if (static_cast<int>(center.size()) != grid.spatial_dim() ||
        radii.size() != center.size()) {
      throw ConfigError("bump: center/radii dimension mismatch");
    }
    auto eval = [=](std::span<const double> x, double t) {
      double v = 1.0;
      const double st = (t - tc) / tr;
      const double qt = 1.0 - st * st;
      v *= qt > 0.0 ? qt * qt * qt : 0.0;
      for (size_t a = 0; a < center.size(); ++a) {
        const double s = (x[a] - center[a]) / radii[a];
        const double q = 1.0 - s * s;
        v *= q > 0.0 ? q * q * q : 0.0;
      }
      return base + amp * v;
    };
    return Obstacle::from_function(
        eval, base + amp, regularity_from_json(j, Regularity::kContinuous));
  }
  if (type == "indicator") {
    std::vector<Interval> box;
    for (const auto& iv : j.at("box")) {
      box.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    }
    if (static_cast<int>(box.size()) != grid.spatial_dim()) {
      throw ConfigError("indicator: box dimension does not match the grid");
    }
    return Obstacle::indicator(j.at("value").get<double>(),
                               j.at("t_from").get<double>(), std::move(box));
  }
  if (type == "table") {
    const auto path = base_dir / j.at("path").get<std::string>();
    ScalarField f = read_field_csv(path);
    if (!(f.grid() == grid)) {
      throw ConfigError("table: field grid does not match the run grid");
    }
    return Obstacle::from_table(
        std::move(f), regularity_from_json(j, Regularity::kContinuous));
  }
  if (type == "bvp_solution") {
    // the discrete solution with the given boundary data, used as a table
    ScalarField data =
        boundary_data_from_json(j.at("boundary"), grid, base_dir);
    ScalarField sol =
        solve_box(data, SpaceTimeBox::full_cylinder(grid), solver);
    return Obstacle::from_table(std::move(sol), Regularity::kContinuous);
  }
  throw ConfigError("obstacle: unknown type '" + type + "'");
}

RunConfig parse_run_config(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir) {
  RunConfig rc;
  try {
    rc.raw = doc;
    rc.config_hash = fnv1a_hex(doc.dump());
    if (doc.contains("name")) rc.name = doc.at("name").get<std::string>();
    rc.grid = grid_from_json(doc.at("grid"));
    rc.obstacle_cfg = doc.contains("solver")
                          ? obstacle_cfg_from_json(doc.at("solver"))
                          : ObstacleConfig{};
    if (doc.contains("obstacle")) {
      rc.obstacle = obstacle_from_json(doc.at("obstacle"), rc.grid,
                                       rc.obstacle_cfg.solver, base_dir);
    }
    if (doc.contains("boundary")) {
      rc.bvp_data =
          boundary_data_from_json(doc.at("boundary"), rc.grid, base_dir);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: malformed JSON (") + e.what() +
                      ")");
  }
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": parse error (" +
                      e.what() + ")");
  }
  auto rc = parse_run_config(doc, path.parent_path());
  if (rc.name.empty()) rc.name = path.stem().string();
  return rc;
}

}  // namespace pmeobst

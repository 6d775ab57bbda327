#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "pmeobst/field.hpp"
#include "pmeobst/obstacle.hpp"
#include "pmeobst/solver.hpp"

namespace pmeobst {

/// One auditable run: grid, solver/iteration knobs and the obstacle or
/// boundary data, parsed from a single JSON document.
struct RunConfig {
  SpaceTimeGrid grid;
  ObstacleConfig obstacle_cfg;
  std::optional<Obstacle> obstacle;       // solve-obstacle runs
  std::optional<ScalarField> bvp_data;    // solve-bvp runs
  std::string name;
  std::string config_hash;                // of the canonical document
  nlohmann::json raw;
};

/// Parses a config document. `base_dir` resolves relative table paths.
RunConfig parse_run_config(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

SolverConfig solver_from_json(const nlohmann::json& j);
ObstacleConfig obstacle_cfg_from_json(const nlohmann::json& j);

/// Builds the obstacle described by an {type, params...} object on a grid.
Obstacle obstacle_from_json(const nlohmann::json& j, const SpaceTimeGrid& grid,
                            const SolverConfig& solver,
                            const std::filesystem::path& base_dir);

/// Builds boundary data for solve-bvp runs ({type: constant|barenblatt|table}).
ScalarField boundary_data_from_json(const nlohmann::json& j,
                                    const SpaceTimeGrid& grid,
                                    const std::filesystem::path& base_dir);

}  // namespace pmeobst

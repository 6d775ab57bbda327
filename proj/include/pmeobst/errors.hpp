#pragma once

#include <stdexcept>
#include <string>

namespace pmeobst {

/// Invalid configuration: bad grid sizes, malformed run configs, unknown ids.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometry violation: boxes or supports escaping the grid, mismatched grids.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value-domain violation: negative data, out-of-range parameters.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton failed to reach the residual tolerance within its iteration budget.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_residual, int time_level)
      : std::runtime_error(what),
        last_residual_(last_residual),
        time_level_(time_level) {}

  double last_residual() const { return last_residual_; }
  int time_level() const { return time_level_; }

 private:
  double last_residual_;
  int time_level_;
};

}  // namespace pmeobst

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pmeobst/field.hpp"
#include "pmeobst/grid.hpp"

namespace pmeobst {

/// Knobs of the implicit time stepper. Fields left at zero are resolved per
/// solve from the boundary data scale:
///   newton_tol     -> 1e-13 * (1 + sup data) / tau   (sup-norm of the
///                     nonlinear residual (u - u_prev)/tau - Lap_h(u^m))
///   jacobian_floor -> 1e-10 * (1 + sup data)^(m-1)
/// The floor enters the Jacobian only; converged residuals are unregularized.
struct SolverConfig {
  double m = 2.0;
  double newton_tol = 0.0;
  int newton_max_iter = 100;
  double jacobian_floor = 0.0;
  bool positivity_clamp = true;
  double cg_rel_tol = 1e-12;

  void validate() const;
};

/// Boundary value problem on a box: march the implicit scheme from the
/// initial slice of the parabolic boundary, with Dirichlet lateral values.
struct BVPSpec {
  SpaceTimeBox box;
  ScalarField boundary_data;  // read on the parabolic boundary of `box` only
  double m = 2.0;
};

/// One backward Euler step on the box interior at time level k.
///
/// `field` supplies the previous level k-1 on the closed spatial box and the
/// lateral values at level k. Returns the solved interior values in the order
/// produced by for_each_interior_spatial. The nonlinear residual sup-norm of
/// the returned values is at most the (resolved) Newton tolerance.
std::vector<double> step_backward_euler(const ScalarField& field,
                                        const SpaceTimeBox& box, int k,
                                        const SolverConfig& config,
                                        int* newton_iters = nullptr);

/// Solves the box BVP with data taken from `data` on the parabolic boundary.
/// Returns a copy of `data` with the box interior (times > t_start) replaced
/// by the marched solution; all parabolic-boundary nodes keep their data
/// values, so the result agrees with the data on the whole of it.
ScalarField solve_box(const ScalarField& data, const SpaceTimeBox& box,
                      const SolverConfig& config, long* newton_iters = nullptr);

/// Public BVP entry point.
ScalarField solve_bvp(const BVPSpec& spec, const SolverConfig& config);

/// Closed-form source-type solution of the porous medium equation:
///   t^(-alpha) * (C - kappa |x|^2 t^(-2 beta))_+^(1/(m-1))
/// with alpha = n/(n(m-1)+2), beta = alpha/n, kappa = alpha(m-1)/(2mn).
/// Requires t > 0, C > 0, m > 1.
double barenblatt(std::span<const double> x, double t, double m, int n,
                  double C);

/// Samples the closed form on a grid, shifting evaluation time by t_offset
/// and the profile center by `center` (optional).
ScalarField barenblatt_field(const SpaceTimeGrid& grid, double m, double C,
                             double t_offset,
                             std::span<const double> center = {});

struct ComparisonReport {
  double min_gap = 0.0;  // min over the closed box of (u - w)
  NodeIndex argmin;
  bool pass = false;
  double tol = 0.0;
};

/// Solves the box BVP with boundary data u itself and reports how far u dips
/// below that solution. A non-negative (within tol) minimum certifies the
/// comparison-principle behavior of u on this box.
ComparisonReport check_comparison(const ScalarField& u, const SpaceTimeBox& box,
                                  const SolverConfig& config, double tol);

/// Runs check_comparison over an enumerated box list; returns the worst
/// report (smallest min_gap), with pass = all passed.
ComparisonReport check_comparison_all(const ScalarField& u,
                                      const std::vector<EnumeratedBox>& boxes,
                                      const SolverConfig& config, double tol);

}  // namespace pmeobst

#pragma once

#include <vector>

#include "pmeobst/field.hpp"
#include "pmeobst/obstacle.hpp"

namespace pmeobst {

/// Lifted obstacle (u^m + eps^m)^(1/m), clamped into its provable envelope
/// max(u, eps) <= psi_eps <= u + eps so the bounds hold verbatim in floating
/// point. Requires 0 < eps < 1.
Obstacle lift_obstacle(const ScalarField& u, double eps, double m);

/// Family of supersolutions above lifted obstacles, one per epsilon in a
/// decreasing schedule. Members dominate their epsilon exactly and are
/// nondecreasing in epsilon.
struct EpsFamily {
  std::vector<double> schedule;       // strictly decreasing, in (0,1)
  std::vector<ScalarField> members;   // one per schedule entry
  ScalarField base;
  double m = 2.0;
  double stop_tol = 0.0;
};

/// Builds the family by solving the obstacle problem per lifted obstacle.
/// The base must pass a comparison precheck on the level<=2 boxes.
EpsFamily build_eps_family(const ScalarField& u,
                           const std::vector<double>& schedule,
                           const ObstacleConfig& cfg);

struct ConvergenceRow {
  double eps = 0.0;
  double max_gap = 0.0;        // sup |u_eps - u|
  double lp_gap = 0.0;         // || u_eps^q - u^q ||_Lp(cylinder)
  double slice_lp_gap = 0.0;   // same on the t0 slice
  double pairing_gap = 0.0;    // max over the battery of weak-pairing gaps
  double grad_gap_max = 0.0;   // sup nodewise |grad_h u_eps^m - grad_h u^m|
  double grad_gap_mean = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // schedule order (decreasing eps)
  double q = 1.0;
  double p = 2.0;
  int t0_index = 0;
};

/// Gap diagnostics per epsilon: nodewise, L^p, slice, a weak-gradient proxy
/// (pairings of grad_h u^m against a fixed battery of ten smooth bumps), and
/// nodewise gradient statistics. Requires q > 0, p >= 1 and an interior t0.
ConvergenceReport convergence_report(const EpsFamily& family, double q,
                                     double p, double t0);

struct OleinikResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// Pairing bound for BVP solutions u (data g) and u_eps (data lifted g):
/// integral of (u_eps - u)(u_eps^m - u^m) against the closed-form bound
/// eps^m |cyl| (M+1) + eps |cyl| (M+1)^m. Requires sup g <= M.
OleinikResult oleinik_pairing(const ScalarField& u_eps, const ScalarField& u,
                              double eps, double m, double M,
                              double rel_tol = 1e-9);

/// Solves the two boundary value problems of the pairing lemma on the full
/// cylinder: data g and (g^m + eps^m)^(1/m).
std::pair<ScalarField, ScalarField> oleinik_solve_pair(
    const ScalarField& g, double eps, const SolverConfig& config);

/// End-to-end pairing check for data g: validates sup g <= M, solves the
/// pair and evaluates the bound.
OleinikResult oleinik_bound_check(const ScalarField& g, double eps, double M,
                                  const SolverConfig& config,
                                  double rel_tol = 1e-9);

}  // namespace pmeobst

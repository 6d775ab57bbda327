#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmeobst/field.hpp"

namespace pmeobst {

/// Geometry of one weak-Harnack evaluation: ball center, radius and base
/// time. Requires B(x0, 8 rho) x (0,T) inside the cylinder.
struct HarnackGeometry {
  std::vector<double> x0;
  double rho = 0.0;
  double t0 = 0.0;  // snapped to the nearest interior time level
};

/// Quantities of the weak Harnack estimate
///   mean_{B(x0,rho)} u(.,t0) <= (C1 rho^2 / (T-t0))^(1/(m-1)) + C2 essinf_V u
/// with V = B(x0,4rho) x (t0+tau/2, t0+tau] and the waiting time
/// tau = min(T-t0, C1 rho^2 mean^-(m-1)).
struct HarnackQuantities {
  double avg = 0.0;      // midpoint-quadrature spatial mean over the rho-ball
  double tau_wait = 0.0;
  double essinf = 0.0;   // grid-node minimum over V
  double tail = 0.0;     // (rho^2/(T-t0))^(1/(m-1)), unit-C1 evaluation
  int t0_index = 0;
  int window_k_lo = 0;
  int window_k_hi = 0;
  double m = 2.0;

  double rhs(double c1, double c2) const;
  bool inequality_holds(double c1, double c2) const {
    return avg <= rhs(c1, c2);
  }
};

HarnackQuantities harnack_quantities(const ScalarField& u,
                                     const HarnackGeometry& geom, double C1,
                                     double m);

/// Half-octave logarithmic lattice for the constant search: 2^(k/2),
/// k = -10..20.
std::vector<double> harnack_lattice();

struct HarnackCase {
  const ScalarField* field = nullptr;
  HarnackGeometry geom;
  std::string name;
};

struct FitResult {
  bool feasible = false;
  double c1 = 0.0;
  double c2 = 0.0;
  std::string binding_case;   // the case forcing C2 at the fitted point
  double worst_ratio = 0.0;   // on failure: best achievable lhs/rhs ratio
};

/// Smallest lattice pair (lexicographic in C1, then C2) satisfying the
/// inequality for all cases. Lattice points whose waiting-time window misses
/// every grid level for some case are skipped as unresolvable.
FitResult fit_constants(const std::vector<HarnackCase>& cases, double m);

}  // namespace pmeobst

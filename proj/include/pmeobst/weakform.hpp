#pragma once

#include <span>
#include <vector>

#include "pmeobst/field.hpp"
#include "pmeobst/grid.hpp"

namespace pmeobst {

/// Separable polynomial bump centered at (center, t_center) with per-axis
/// radii: phi = prod_a B((x_a-c_a)/r_a) * B((t-ct)/rt), B(s) = ((1-s^2)_+)^3.
/// B is C^2 with closed-form derivatives, which is all the first-order weak
/// pairing needs. Non-negative, compactly supported.
class TestFunction {
 public:
  TestFunction(std::vector<double> center, std::vector<double> radii,
               double t_center, double t_radius);

  double value(std::span<const double> x, double t) const;
  double dt(std::span<const double> x, double t) const;
  double dx(int axis, std::span<const double> x, double t) const;

  int dim() const { return static_cast<int>(center_.size()); }
  double center(int a) const { return center_[static_cast<size_t>(a)]; }
  double radius(int a) const { return radii_[static_cast<size_t>(a)]; }
  double t_center() const { return t_center_; }
  double t_radius() const { return t_radius_; }

  /// True iff the closed support box lies strictly inside the open cylinder.
  bool supported_inside(const SpaceTimeGrid& grid) const;

  /// Closed-form W^{1,1} norm: integral of |phi| + |dphi/dt| + sum |dphi/dx|.
  double w11_norm() const;

 private:
  std::vector<double> center_;
  std::vector<double> radii_;
  double t_center_;
  double t_radius_;
};

/// Midpoint-quadrature approximation of the weak pairing
///   integral of (-u dphi/dt + grad_h(u^m) . grad phi)  over the cylinder,
/// with phi and its derivatives evaluated analytically at cell midpoints and
/// u^m differenced across each cell. A value >= -tol certifies supersolution
/// behavior against phi; <= +tol subsolution behavior.
/// Throws GeometryError when the support leaves the open cylinder.
double residual_weak_form(const ScalarField& u, const TestFunction& phi,
                          double m);

/// Quadrature of grad_h(u^pw) component `axis` paired with the scalar bump.
double gradient_pairing(const ScalarField& u, double pw, int axis,
                        const TestFunction& phi);

/// Deterministic bump battery: two radius scales, centers on sub-lattices
/// spaced at most one radius apart, so at battery_size >= 3 every interior
/// node lies inside some bump support. An optional third finer scale is used
/// by region-masked certifications.
std::vector<TestFunction> bump_battery(const SpaceTimeGrid& grid,
                                       int battery_size,
                                       bool include_fine_scale = false);

/// Consistency-scaled acceptance tolerance for weak residuals of solved
/// fields: kcal * (h + tau) * (1 + sup u)^m * ||phi||_W11. The constant is
/// calibrated once against exact constant solutions (see the calibration
/// test), so quadrature noise cannot masquerade as a violated inequality.
double residual_tolerance(const ScalarField& u, const TestFunction& phi,
                          double m);

}  // namespace pmeobst

#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "pmeobst/grid.hpp"

namespace pmeobst {

/// Non-negative gridded function u(x_i, t_k) on a space-time grid. The
/// universal carrier for solutions, obstacles and iterates.
///
/// Values are stored time-major: index = k * n_space_total + flat_space.
/// All values must be finite and >= 0; the supremum is cached and recomputed
/// lazily after mutation.
class ScalarField {
 public:
  ScalarField() = default;

  static ScalarField zeros(const SpaceTimeGrid& grid);
  static ScalarField constant(const SpaceTimeGrid& grid, double c);
  /// Samples f(x, t) at every node. Throws DomainError on negative or
  /// non-finite samples.
  static ScalarField from_function(
      const SpaceTimeGrid& grid,
      const std::function<double(std::span<const double>, double)>& f);
  /// Adopts a raw value vector (time-major layout); validates sign and size.
  static ScalarField from_values(const SpaceTimeGrid& grid,
                                 std::vector<double> values);

  const SpaceTimeGrid& grid() const { return grid_; }

  double at(long flat_space, int k) const {
    return values_[static_cast<size_t>(k) * nsp_ + static_cast<size_t>(flat_space)];
  }
  void set(long flat_space, int k, double v) {
    values_[static_cast<size_t>(k) * nsp_ + static_cast<size_t>(flat_space)] = v;
    sup_valid_ = false;
  }

  std::span<const double> values() const { return values_; }
  /// Mutable access invalidates the cached supremum.
  std::span<double> mutable_values() {
    sup_valid_ = false;
    return values_;
  }

  std::span<const double> slice(int k) const {
    return {values_.data() + static_cast<size_t>(k) * nsp_, nsp_};
  }

  double sup() const;
  double min() const;

  long n_space_total() const { return static_cast<long>(nsp_); }

  bool same_grid(const ScalarField& other) const {
    return grid_ == other.grid_;
  }

 private:
  explicit ScalarField(SpaceTimeGrid grid);

  SpaceTimeGrid grid_;
  size_t nsp_ = 0;
  std::vector<double> values_;
  mutable double sup_ = 0.0;
  mutable double min_ = 0.0;
  mutable bool sup_valid_ = false;
};

/// Trapezoidal quadrature weight of a node (product over axes and time).
double node_weight(const SpaceTimeGrid& grid, long flat_space, int k);
/// Trapezoidal quadrature weight of a spatial node (no time factor).
double spatial_node_weight(const SpaceTimeGrid& grid, long flat_space);

/// Discrete L^p norm over the space-time cylinder with trapezoidal weights.
double lp_norm(const ScalarField& f, double p);
/// Discrete L^p norm of a transformed difference a^q - b^q over the cylinder.
double lp_gap(const ScalarField& a, const ScalarField& b, double q, double p);
/// Same on a single time slice.
double slice_lp_gap(const ScalarField& a, const ScalarField& b, double q,
                    double p, int k);
/// Space-time integral of (a-b)(a^m - b^m) with trapezoidal weights.
double pairing_integral(const ScalarField& a, const ScalarField& b, double m);

/// Nodal discrete gradient of f^power along one axis: centered differences at
/// interior nodes, one-sided at the walls.
std::vector<double> nodal_gradient(const ScalarField& f, double power,
                                   int axis, int k);

/// Largest nodewise |a - b|.
double sup_gap(const ScalarField& a, const ScalarField& b);

}  // namespace pmeobst

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pmeobst/errors.hpp"

namespace pmeobst {

/// Closed coordinate interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double extent() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// Uniform tensor grid on a space-time cylinder: a product of spatial
/// intervals (1 or 2 axes) times [0, T].
///
/// Node coordinates are always recomputed from indices (lo + i*h), never
/// accumulated, so repeated queries are bit-identical.
class SpaceTimeGrid {
 public:
  /// Empty placeholder grid; all real grids come from create().
  SpaceTimeGrid() = default;

  /// Builds a grid, validating resolution and domain.
  /// Requires n_space >= 3 per axis, n_time >= 2, T > 0 and a nondegenerate
  /// domain; violations raise ConfigError naming the offending field.
  static SpaceTimeGrid create(std::vector<Interval> domain,
                              std::vector<int> n_space, int n_time, double T);

  int spatial_dim() const { return static_cast<int>(n_space_.size()); }
  int n_space(int axis) const { return n_space_[static_cast<size_t>(axis)]; }
  int n_time() const { return n_time_; }
  double h(int axis) const { return h_[static_cast<size_t>(axis)]; }
  double tau() const { return tau_; }
  double final_time() const { return T_; }
  const Interval& axis(int a) const { return domain_[static_cast<size_t>(a)]; }

  double coord(int axis, int i) const {
    return domain_[static_cast<size_t>(axis)].lo +
           static_cast<double>(i) * h_[static_cast<size_t>(axis)];
  }
  double time(int k) const { return static_cast<double>(k) * tau_; }

  /// Total spatial nodes per time level.
  long n_space_total() const {
    long n = 1;
    for (int v : n_space_) n *= v;
    return n;
  }
  long n_nodes() const { return n_space_total() * n_time_; }

  /// Spatial measure of the domain and of the full cylinder.
  double domain_measure() const {
    double v = 1.0;
    for (const auto& iv : domain_) v *= iv.extent();
    return v;
  }
  double cylinder_measure() const { return domain_measure() * T_; }

  long flatten(std::span<const int> ix) const {
    long f = ix[0];
    if (spatial_dim() == 2) f += static_cast<long>(n_space_[0]) * ix[1];
    return f;
  }
  void unflatten(long flat, std::span<int> ix) const {
    if (spatial_dim() == 1) {
      ix[0] = static_cast<int>(flat);
    } else {
      ix[0] = static_cast<int>(flat % n_space_[0]);
      ix[1] = static_cast<int>(flat / n_space_[0]);
    }
  }

  bool operator==(const SpaceTimeGrid&) const = default;

 private:
  std::vector<Interval> domain_;
  std::vector<int> n_space_;
  int n_time_ = 0;
  std::vector<double> h_;
  double tau_ = 0.0;
  double T_ = 0.0;
};

/// Space-time box: a per-axis closed node-index range times the time levels
/// [t_start, last]. Boxes always extend to the final time level.
///
/// A box whose index range stays strictly inside the spatial index range is
/// "interior"; otherwise it touches the lateral domain boundary. The
/// alternating construction enumerates interior boxes only; full-cylinder
/// solves use a boundary-touching box explicitly.
struct SpaceTimeBox {
  std::array<int, 2> lo{0, 0};
  std::array<int, 2> hi{0, 0};
  int t_start = 0;
  int dim = 1;

  static SpaceTimeBox full_cylinder(const SpaceTimeGrid& grid);

  /// Throws GeometryError if the box does not fit the grid or is degenerate.
  void validate(const SpaceTimeGrid& grid) const;

  bool is_spatially_interior(const SpaceTimeGrid& grid) const;
  bool touches_lateral_boundary(const SpaceTimeGrid& grid) const {
    return !is_spatially_interior(grid);
  }

  /// Node counts of the closed spatial box and its strict interior.
  long closed_spatial_count() const;
  long interior_spatial_count() const;

  bool contains_spatial(std::span<const int> ix) const;
  bool spatial_strictly_inside(std::span<const int> ix) const;

  bool operator==(const SpaceTimeBox&) const = default;
};

/// One node of the space-time grid: flattened spatial index plus time level.
struct NodeIndex {
  long space = 0;
  int k = 0;
  bool operator==(const NodeIndex&) const = default;
};

/// Index sets of the parabolic boundary of a box: the lateral walls over
/// times (t_start, last] and the initial slice at t_start over the closed
/// spatial box.
struct ParabolicBoundary {
  std::vector<NodeIndex> lateral;
  std::vector<NodeIndex> initial;
};

ParabolicBoundary parabolic_boundary(const SpaceTimeBox& box,
                                     const SpaceTimeGrid& grid);

/// Visits flattened spatial indices of the closed box in ascending order.
void for_each_closed_spatial(const SpaceTimeGrid& grid, const SpaceTimeBox& box,
                             const std::function<void(long)>& fn);
/// Visits flattened spatial indices strictly inside the box.
void for_each_interior_spatial(const SpaceTimeGrid& grid,
                               const SpaceTimeBox& box,
                               const std::function<void(long)>& fn);
/// Visits flattened spatial indices on the boundary of the box (the spatial
/// perimeter in 2D, the two endpoints in 1D).
void for_each_perimeter_spatial(const SpaceTimeGrid& grid,
                                const SpaceTimeBox& box,
                                const std::function<void(long)>& fn);

enum class BoxOrder {
  kLexicographic,
  kReversedWithinLevel,
};

struct EnumeratedBox {
  SpaceTimeBox box;
  int level = 0;
  int ordinal = 0;  // position in the enumeration
};

/// Dyadic enumeration of interior boxes ending at the final time level.
///
/// Level 0 contributes the full interior box starting at t=0. Level L adds,
/// per axis, sub-ranges of roughly 1/2^L of the interior extent placed at
/// half-width strides (so neighbours overlap by half their width), crossed
/// with the 2^L dyadic start-time levels. The returned list at level L is a
/// prefix-extension of the list at level L-1; duplicates arising from index
/// rounding are dropped. The result is deterministic: identical arguments
/// produce identical lists.
std::vector<EnumeratedBox> enumerate_boxes(
    const SpaceTimeGrid& grid, int level,
    BoxOrder order = BoxOrder::kLexicographic);

/// Smallest level whose dyadic refinement adds no further boxes on this grid.
int enumeration_depth(const SpaceTimeGrid& grid);

}  // namespace pmeobst

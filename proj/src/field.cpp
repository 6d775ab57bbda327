#include "pmeobst/field.hpp"

#include <algorithm>
#include <cmath>

#include "pmeobst/errors.hpp"

namespace pmeobst {

ScalarField::ScalarField(SpaceTimeGrid grid)
    : grid_(std::move(grid)),
      nsp_(static_cast<size_t>(grid_.n_space_total())),
      values_(nsp_ * static_cast<size_t>(grid_.n_time()), 0.0) {}

ScalarField ScalarField::zeros(const SpaceTimeGrid& grid) {
  return ScalarField(grid);
}

ScalarField ScalarField::constant(const SpaceTimeGrid& grid, double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw DomainError("field values must be finite and non-negative");
  }
  ScalarField f(grid);
  std::fill(f.values_.begin(), f.values_.end(), c);
  return f;
}

ScalarField ScalarField::from_function(
    const SpaceTimeGrid& grid,
    const std::function<double(std::span<const double>, double)>& f) {
  ScalarField out(grid);
  const int dim = grid.spatial_dim();
  std::array<double, 2> x{};
  std::array<int, 2> ix{};
  const long nsp = grid.n_space_total();
  for (int k = 0; k < grid.n_time(); ++k) {
    const double t = grid.time(k);
    for (long flat = 0; flat < nsp; ++flat) {
      grid.unflatten(flat, ix);
      for (int a = 0; a < dim; ++a) {
        x[static_cast<size_t>(a)] = grid.coord(a, ix[static_cast<size_t>(a)]);
      }
      const double v = f(std::span<const double>(x.data(), dim), t);
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError("field values must be finite and non-negative");
      }
      out.set(flat, k, v);
    }
  }
  return out;
}

ScalarField ScalarField::from_values(const SpaceTimeGrid& grid,
                                     std::vector<double> values) {
  ScalarField out(grid);
  if (values.size() != out.values_.size()) {
    throw DomainError("value vector size does not match grid node count");
  }
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError("field values must be finite and non-negative");
    }
  }
  out.values_ = std::move(values);
  return out;
}

double ScalarField::sup() const {
  if (!sup_valid_) {
    double s = 0.0;
    double m = std::numeric_limits<double>::infinity();
    for (double v : values_) {
      s = std::max(s, v);
      m = std::min(m, v);
    }
    sup_ = s;
    min_ = values_.empty() ? 0.0 : m;
    sup_valid_ = true;
  }
  return sup_;
}

double ScalarField::min() const {
  sup();
  return min_;
}

namespace {

double axis_weight(int i, int n, double h) {
  return (i == 0 || i == n - 1) ? 0.5 * h : h;
}

}  // namespace

double spatial_node_weight(const SpaceTimeGrid& grid, long flat_space) {
  std::array<int, 2> ix{};
  grid.unflatten(flat_space, ix);
  double w = 1.0;
  for (int a = 0; a < grid.spatial_dim(); ++a) {
    w *= axis_weight(ix[static_cast<size_t>(a)], grid.n_space(a), grid.h(a));
  }
  return w;
}

double node_weight(const SpaceTimeGrid& grid, long flat_space, int k) {
  return spatial_node_weight(grid, flat_space) *
         axis_weight(k, grid.n_time(), grid.tau());
}

double lp_norm(const ScalarField& f, double p) {
  const auto& g = f.grid();
  double acc = 0.0;
  for (int k = 0; k < g.n_time(); ++k) {
    for (long flat = 0; flat < g.n_space_total(); ++flat) {
      acc += node_weight(g, flat, k) * std::pow(std::abs(f.at(flat, k)), p);
    }
  }
  return std::pow(acc, 1.0 / p);
}

double lp_gap(const ScalarField& a, const ScalarField& b, double q, double p) {
  if (!a.same_grid(b)) throw GeometryError("mismatched grids in lp_gap");
  const auto& g = a.grid();
  double acc = 0.0;
  for (int k = 0; k < g.n_time(); ++k) {
    for (long flat = 0; flat < g.n_space_total(); ++flat) {
      const double d =
          std::pow(a.at(flat, k), q) - std::pow(b.at(flat, k), q);
      acc += node_weight(g, flat, k) * std::pow(std::abs(d), p);
    }
  }
  return std::pow(acc, 1.0 / p);
}

double slice_lp_gap(const ScalarField& a, const ScalarField& b, double q,
                    double p, int k) {
  if (!a.same_grid(b)) throw GeometryError("mismatched grids in slice_lp_gap");
  const auto& g = a.grid();
  double acc = 0.0;
  for (long flat = 0; flat < g.n_space_total(); ++flat) {
    const double d = std::pow(a.at(flat, k), q) - std::pow(b.at(flat, k), q);
    acc += spatial_node_weight(g, flat) * std::pow(std::abs(d), p);
  }
  return std::pow(acc, 1.0 / p);
}

double pairing_integral(const ScalarField& a, const ScalarField& b, double m) {
  if (!a.same_grid(b)) {
    throw GeometryError("mismatched grids in pairing_integral");
  }
  const auto& g = a.grid();
  double acc = 0.0;
  for (int k = 0; k < g.n_time(); ++k) {
    for (long flat = 0; flat < g.n_space_total(); ++flat) {
      const double av = a.at(flat, k);
      const double bv = b.at(flat, k);
      acc += node_weight(g, flat, k) * (av - bv) *
             (std::pow(av, m) - std::pow(bv, m));
    }
  }
  return acc;
}

std::vector<double> nodal_gradient(const ScalarField& f, double power,
                                   int axis, int k) {
  const auto& g = f.grid();
  const long nsp = g.n_space_total();
  std::vector<double> out(static_cast<size_t>(nsp), 0.0);
  const long stride = (axis == 0) ? 1 : g.n_space(0);
  const int n = g.n_space(axis);
  const double inv_h = 1.0 / g.h(axis);
  std::array<int, 2> ix{};
  auto w = [&](long flat) { return std::pow(f.at(flat, k), power); };
  for (long flat = 0; flat < nsp; ++flat) {
    g.unflatten(flat, ix);
    const int i = ix[static_cast<size_t>(axis)];
    double d = 0.0;
    if (i == 0) {
      d = (w(flat + stride) - w(flat)) * inv_h;
    } else if (i == n - 1) {
      d = (w(flat) - w(flat - stride)) * inv_h;
    } else {
      d = (w(flat + stride) - w(flat - stride)) * (0.5 * inv_h);
    }
    out[static_cast<size_t>(flat)] = d;
  }
  return out;
}

double sup_gap(const ScalarField& a, const ScalarField& b) {
  if (!a.same_grid(b)) throw GeometryError("mismatched grids in sup_gap");
  double s = 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  for (size_t i = 0; i < va.size(); ++i) {
    s = std::max(s, std::abs(va[i] - vb[i]));
  }
  return s;
}

}  // namespace pmeobst

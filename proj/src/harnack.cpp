#include "pmeobst/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pmeobst/errors.hpp"
#include "pmeobst/verify.hpp"

namespace pmeobst {

double HarnackQuantities::rhs(double c1, double c2) const {
  return std::pow(c1, 1.0 / (m - 1.0)) * tail + c2 * essinf;
}

namespace {

// Midpoint-quadrature mean of u(., t0) over the rho-ball: cells whose
// midpoints fall inside the ball, each contributing its corner average.
double ball_mean(const ScalarField& u, const HarnackGeometry& geom, int k0) {
  const auto& g = u.grid();
  const int dim = g.spatial_dim();
  double acc = 0.0;
  double measure = 0.0;
  if (dim == 1) {
    for (int i = 0; i + 1 < g.n_space(0); ++i) {
      const double xm = g.coord(0, i) + 0.5 * g.h(0);
      if (std::abs(xm - geom.x0[0]) >= geom.rho) continue;
      acc += 0.5 * (u.at(i, k0) + u.at(i + 1, k0)) * g.h(0);
      measure += g.h(0);
    }
  } else {
    const long nx = g.n_space(0);
    const double cell = g.h(0) * g.h(1);
    for (int j = 0; j + 1 < g.n_space(1); ++j) {
      const double ym = g.coord(1, j) + 0.5 * g.h(1);
      for (int i = 0; i + 1 < g.n_space(0); ++i) {
        const double xm = g.coord(0, i) + 0.5 * g.h(0);
        const double dx = xm - geom.x0[0];
        const double dy = ym - geom.x0[1];
        if (dx * dx + dy * dy >= geom.rho * geom.rho) continue;
        const long f = i + nx * j;
        acc += 0.25 *
               (u.at(f, k0) + u.at(f + 1, k0) + u.at(f + nx, k0) +
                u.at(f + nx + 1, k0)) *
               cell;
        measure += cell;
      }
    }
  }
  if (measure == 0.0) {
    throw GeometryError("harnack: rho-ball contains no grid cell midpoint");
  }
  return acc / measure;
}

void validate_geometry(const SpaceTimeGrid& g, const HarnackGeometry& geom) {
  if (static_cast<int>(geom.x0.size()) != g.spatial_dim()) {
    throw GeometryError("harnack: center dimension mismatch");
  }
  if (!(geom.rho > 0.0)) throw GeometryError("harnack: rho must be positive");
  for (int a = 0; a < g.spatial_dim(); ++a) {
    const double lo = geom.x0[static_cast<size_t>(a)] - 8.0 * geom.rho;
    const double hi = geom.x0[static_cast<size_t>(a)] + 8.0 * geom.rho;
    if (lo < g.axis(a).lo || hi > g.axis(a).hi) {
      throw GeometryError("harnack: the 8*rho ball escapes the domain");
    }
  }
}

}  // namespace

HarnackQuantities harnack_quantities(const ScalarField& u,
                                     const HarnackGeometry& geom, double C1,
                                     double m) {
  const auto& g = u.grid();
  validate_geometry(g, geom);
  if (!(C1 > 0.0)) throw DomainError("harnack: C1 must be positive");
  if (!(m > 1.0)) throw DomainError("harnack: requires m > 1");

  HarnackQuantities q;
  q.m = m;
  q.t0_index = static_cast<int>(std::llround(geom.t0 / g.tau()));
  if (q.t0_index < 1 || q.t0_index > g.n_time() - 2) {
    throw GeometryError("harnack: t0 must snap to an interior time level");
  }
  const double t0 = g.time(q.t0_index);
  const double horizon = g.final_time() - t0;

  q.avg = ball_mean(u, geom, q.t0_index);
  q.tail = std::pow(geom.rho * geom.rho / horizon, 1.0 / (m - 1.0));
  q.tau_wait = (q.avg > 0.0)
                   ? std::min(horizon, C1 * geom.rho * geom.rho *
                                           std::pow(q.avg, -(m - 1.0)))
                   : horizon;

  // grid levels inside (t0 + tau/2, t0 + tau]
  const double wlo = t0 + 0.5 * q.tau_wait;
  const double whi = t0 + q.tau_wait;
  int klo = static_cast<int>(std::floor(wlo / g.tau())) + 1;
  int khi = static_cast<int>(std::floor(whi / g.tau()));
  klo = std::max(klo, 0);
  khi = std::min(khi, g.n_time() - 1);
  if (klo > khi) {
    throw GeometryError(
        "harnack: waiting-time window contains no grid time level");
  }
  q.window_k_lo = klo;
  q.window_k_hi = khi;

  const int dim = g.spatial_dim();
  double inf_v = std::numeric_limits<double>::infinity();
  std::array<int, 2> ix{};
  for (int k = klo; k <= khi; ++k) {
    for (long f = 0; f < g.n_space_total(); ++f) {
      g.unflatten(f, ix);
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double d = g.coord(a, ix[static_cast<size_t>(a)]) -
                         geom.x0[static_cast<size_t>(a)];
        r2 += d * d;
      }
      if (r2 > 16.0 * geom.rho * geom.rho) continue;
      inf_v = std::min(inf_v, u.at(f, k));
    }
  }
  if (!std::isfinite(inf_v)) {
    throw GeometryError("harnack: forward cylinder contains no grid node");
  }
  q.essinf = inf_v;
  return q;
}

std::vector<double> harnack_lattice() {
  std::vector<double> out;
  for (int k = -10; k <= 20; ++k) {
    out.push_back(std::pow(2.0, static_cast<double>(k) / 2.0));
  }
  return out;
}

FitResult fit_constants(const std::vector<HarnackCase>& cases, double m) {
  if (cases.size() < 3) {
    throw ConfigError("fit_constants: needs at least 3 cases");
  }
  {
    std::set<const ScalarField*> fields;
    for (const auto& c : cases) fields.insert(c.field);
    for (const ScalarField* f : fields) {
      if (!certify_supersolution(*f, m).pass) {
        throw DomainError(
            "fit_constants: a case field fails the supersolution precheck");
      }
    }
  }
  const auto lattice = harnack_lattice();
  FitResult best;
  best.worst_ratio = std::numeric_limits<double>::infinity();

  for (double c1 : lattice) {
    std::vector<HarnackQuantities> qs;
    bool resolvable = true;
    for (const auto& c : cases) {
      try {
        qs.push_back(harnack_quantities(*c.field, c.geom, c1, m));
      } catch (const GeometryError&) {
        resolvable = false;
        break;
      }
    }
    if (!resolvable) continue;

    // smallest lattice C2 covering every case at this C1
    double needed = 0.0;
    size_t binding = 0;
    bool possible = true;
    for (size_t i = 0; i < qs.size(); ++i) {
      const auto& q = qs[i];
      const double head = std::pow(c1, 1.0 / (m - 1.0)) * q.tail;
      const double residual_avg = q.avg - head;
      if (residual_avg <= 0.0) continue;
      if (q.essinf <= 0.0) {
        possible = false;
        break;
      }
      const double need = residual_avg / q.essinf;
      if (need > needed) {
        needed = need;
        binding = i;
      }
    }
    if (possible) {
      for (double c2 : lattice) {
        if (c2 >= needed) {
          FitResult res;
          res.feasible = true;
          res.c1 = c1;
          res.c2 = c2;
          res.binding_case = cases[binding].name;
          return res;
        }
      }
    }
    // track the least-violating configuration for the failure report
    const double c2max = lattice.back();
    double worst = 0.0;
    size_t worst_case = 0;
    for (size_t i = 0; i < qs.size(); ++i) {
      const double rhs = qs[i].rhs(c1, c2max);
      const double ratio =
          rhs > 0.0 ? qs[i].avg / rhs : std::numeric_limits<double>::infinity();
      if (ratio > worst) {
        worst = ratio;
        worst_case = i;
      }
    }
    if (worst < best.worst_ratio) {
      best.worst_ratio = worst;
      best.binding_case = cases[worst_case].name;
    }
  }
  best.feasible = false;
  return best;
}

}  // namespace pmeobst

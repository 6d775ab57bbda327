#include "pmeobst/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pmeobst/errors.hpp"

namespace pmeobst {

void SolverConfig::validate() const {
  if (!(m > 1.0)) throw ConfigError("m: degenerate regime requires m > 1");
  if (newton_tol < 0.0) throw ConfigError("newton_tol: must be >= 0");
  if (newton_max_iter < 1) throw ConfigError("newton_max_iter: must be >= 1");
  if (jacobian_floor < 0.0) throw ConfigError("jacobian_floor: must be >= 0");
  if (!(cg_rel_tol > 0.0)) throw ConfigError("cg_rel_tol: must be > 0");
}

namespace {

double upow(double v, double p) { return std::pow(std::max(v, 0.0), p); }

// Workspace for Newton solves on the interior of one spatial box. Neighbor
// links are local indices when the neighbor is interior, or ~flat (negative)
// when it lies on the box boundary and carries Dirichlet data.
struct BoxStencil {
  std::vector<long> interior;            // flat spatial indices
  std::vector<std::array<long, 4>> nbr;  // [axis*2 + side], side 0 = minus
  std::array<double, 2> inv_h2{0.0, 0.0};
  int dim = 1;

  BoxStencil(const SpaceTimeGrid& grid, const SpaceTimeBox& box) {
    dim = grid.spatial_dim();
    for_each_interior_spatial(grid, box,
                              [&](long f) { interior.push_back(f); });
    std::vector<long> local_of(static_cast<size_t>(grid.n_space_total()), -1);
    for (size_t j = 0; j < interior.size(); ++j) {
      local_of[static_cast<size_t>(interior[j])] = static_cast<long>(j);
    }
    for (int a = 0; a < dim; ++a) {
      inv_h2[static_cast<size_t>(a)] = 1.0 / (grid.h(a) * grid.h(a));
    }
    nbr.resize(interior.size());
    const long stride0 = 1;
    const long stride1 = grid.n_space(0);
    for (size_t j = 0; j < interior.size(); ++j) {
      const long f = interior[j];
      for (int a = 0; a < dim; ++a) {
        const long stride = (a == 0) ? stride0 : stride1;
        const long fm = f - stride;
        const long fp = f + stride;
        const long lm = local_of[static_cast<size_t>(fm)];
        const long lp = local_of[static_cast<size_t>(fp)];
        nbr[j][static_cast<size_t>(2 * a)] = (lm >= 0) ? lm : ~fm;
        nbr[j][static_cast<size_t>(2 * a + 1)] = (lp >= 0) ? lp : ~fp;
      }
    }
  }
};

// Residual of the implicit step: R_j = (v_j - prev_j)/tau - Lap_h(v^m)_j,
// with boundary neighbor powers supplied in bpow (indexed by flat via the
// encoded link). Returns the sup norm.
double residual(const BoxStencil& st, std::span<const double> v,
                std::span<const double> prev, std::span<const double> wm,
                const std::vector<double>& bpow_flat, double inv_tau,
                std::span<double> out) {
  double rmax = 0.0;
  for (size_t j = 0; j < st.interior.size(); ++j) {
    double lap = 0.0;
    for (int a = 0; a < st.dim; ++a) {
      const long lm = st.nbr[j][static_cast<size_t>(2 * a)];
      const long lp = st.nbr[j][static_cast<size_t>(2 * a + 1)];
      const double wmm =
          (lm >= 0) ? wm[static_cast<size_t>(lm)] : bpow_flat[static_cast<size_t>(~lm)];
      const double wmp =
          (lp >= 0) ? wm[static_cast<size_t>(lp)] : bpow_flat[static_cast<size_t>(~lp)];
      lap += st.inv_h2[static_cast<size_t>(a)] *
             (wmm - 2.0 * wm[j] + wmp);
    }
    const double r = (v[j] - prev[j]) * inv_tau - lap;
    out[j] = r;
    rmax = std::max(rmax, std::abs(r));
  }
  return rmax;
}

// Thomas elimination for the 1D Newton system
//   s_j/tau - d/dx( D * d/dx s ) = rhs, zero Dirichlet at the box walls.
void solve_tridiag(const BoxStencil& st, std::span<const double> D,
                   double inv_tau, std::span<const double> rhs,
                   std::span<double> s) {
  const size_t n = st.interior.size();
  const double ih2 = st.inv_h2[0];
  std::vector<double> c(n), dvec(n);
  // row j: a_j s_{j-1} + b_j s_j + cc_j s_{j+1} = rhs_j
  double b0 = inv_tau + 2.0 * ih2 * D[0];
  c[0] = (n > 1) ? (-ih2 * D[1]) / b0 : 0.0;
  dvec[0] = rhs[0] / b0;
  for (size_t j = 1; j < n; ++j) {
    const double aj = -ih2 * D[j - 1];
    const double bj = inv_tau + 2.0 * ih2 * D[j];
    const double ccj = (j + 1 < n) ? -ih2 * D[j + 1] : 0.0;
    const double denom = bj - aj * c[j - 1];
    c[j] = ccj / denom;
    dvec[j] = (rhs[j] - aj * dvec[j - 1]) / denom;
  }
  s[n - 1] = dvec[n - 1];
  for (size_t j = n - 1; j-- > 0;) {
    s[j] = dvec[j] - c[j] * s[j + 1];
  }
}

// Diagonally preconditioned conjugate gradients on the symmetrized system
//   B y = rhs,  B = diag(1/(tau D)) - Lap_h  (zero Dirichlet),  s = y / D.
void solve_cg(const BoxStencil& st, std::span<const double> D, double inv_tau,
              double cg_rel_tol, std::span<const double> rhs,
              std::span<double> s, int time_level) {
  const size_t n = st.interior.size();
  std::vector<double> y(n, 0.0), r(rhs.begin(), rhs.end()), z(n), p(n), Ap(n);
  std::vector<double> diag(n);
  double sum_ih2 = 0.0;
  for (int a = 0; a < st.dim; ++a) sum_ih2 += st.inv_h2[static_cast<size_t>(a)];
  for (size_t j = 0; j < n; ++j) {
    diag[j] = inv_tau / D[j] + 2.0 * sum_ih2;
  }
  auto matvec = [&](std::span<const double> x, std::span<double> out) {
    for (size_t j = 0; j < n; ++j) {
      double acc = inv_tau / D[j] * x[j];
      for (int a = 0; a < st.dim; ++a) {
        const long lm = st.nbr[j][static_cast<size_t>(2 * a)];
        const long lp = st.nbr[j][static_cast<size_t>(2 * a + 1)];
        const double xm = (lm >= 0) ? x[static_cast<size_t>(lm)] : 0.0;
        const double xp = (lp >= 0) ? x[static_cast<size_t>(lp)] : 0.0;
        acc += st.inv_h2[static_cast<size_t>(a)] * (2.0 * x[j] - xm - xp);
      }
      out[j] = acc;
    }
  };

  double bnorm = 0.0;
  for (size_t j = 0; j < n; ++j) bnorm += rhs[j] * rhs[j];
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) {
    std::fill(s.begin(), s.end(), 0.0);
    return;
  }
  double rz = 0.0;
  for (size_t j = 0; j < n; ++j) {
    z[j] = r[j] / diag[j];
    p[j] = z[j];
    rz += r[j] * z[j];
  }
  const int max_iter = 200 + 10 * static_cast<int>(n);
  for (int it = 0; it < max_iter; ++it) {
    matvec(p, Ap);
    double pAp = 0.0;
    for (size_t j = 0; j < n; ++j) pAp += p[j] * Ap[j];
    const double alpha = rz / pAp;
    double rnorm = 0.0;
    for (size_t j = 0; j < n; ++j) {
      y[j] += alpha * p[j];
      r[j] -= alpha * Ap[j];
      rnorm += r[j] * r[j];
    }
    if (std::sqrt(rnorm) <= cg_rel_tol * bnorm) {
      for (size_t j = 0; j < n; ++j) s[j] = y[j] / D[j];
      return;
    }
    double rz_next = 0.0;
    for (size_t j = 0; j < n; ++j) {
      z[j] = r[j] / diag[j];
      rz_next += r[j] * z[j];
    }
    const double beta = rz_next / rz;
    rz = rz_next;
    for (size_t j = 0; j < n; ++j) p[j] = z[j] + beta * p[j];
  }
  throw SolverError("conjugate gradients failed to converge", bnorm,
                    time_level);
}

struct ResolvedTols {
  double newton_tol;
  double delta;
};

ResolvedTols resolve_tols(const SolverConfig& cfg, double data_scale,
                          double tau) {
  ResolvedTols t{};
  t.newton_tol =
      cfg.newton_tol > 0.0 ? cfg.newton_tol : 1e-13 * (1.0 + data_scale) / tau;
  t.delta = cfg.jacobian_floor > 0.0
                ? cfg.jacobian_floor
                : 1e-10 * std::pow(1.0 + data_scale, cfg.m - 1.0);
  return t;
}

// Newton solve of one step on a prepared stencil. `prev` is the previous
// level on interior nodes; `bpow_flat` carries boundary u^m values at the
// current level indexed by flat spatial index.
void newton_step(const BoxStencil& st, const SpaceTimeGrid& grid,
                 const SolverConfig& cfg, const ResolvedTols& tols,
                 std::span<const double> prev,
                 const std::vector<double>& bpow_flat, int k,
                 std::span<double> v, int* iters_out) {
  const size_t n = st.interior.size();
  const double inv_tau = 1.0 / grid.tau();
  const double m = cfg.m;
  std::vector<double> wm(n), R(n), D(n), s(n), vtry(n), Rtry(n);

  auto clamp = [&](double x) {
    return cfg.positivity_clamp ? std::max(x, 0.0) : x;
  };
  for (size_t j = 0; j < n; ++j) {
    v[j] = clamp(prev[j]);
    wm[j] = upow(v[j], m);
  }
  double rmax = residual(st, v, prev, wm, bpow_flat, inv_tau, R);
  int it = 0;
  while (rmax > tols.newton_tol) {
    if (it >= cfg.newton_max_iter) {
      throw SolverError("Newton did not converge at time level " +
                            std::to_string(k) + " (residual " +
                            std::to_string(rmax) + ")",
                        rmax, k);
    }
    ++it;
    for (size_t j = 0; j < n; ++j) {
      D[j] = m * std::max(upow(v[j], m - 1.0), tols.delta);
    }
    for (size_t j = 0; j < n; ++j) R[j] = -R[j];
    if (st.dim == 1) {
      solve_tridiag(st, D, inv_tau, R, s);
    } else {
      solve_cg(st, D, inv_tau, cfg.cg_rel_tol, R, s, k);
    }
    // Damped update: halve the step until the residual no longer grows.
    double alpha = 1.0;
    double best = rmax;
    for (int ls = 0; ls < 40; ++ls) {
      for (size_t j = 0; j < n; ++j) {
        vtry[j] = clamp(v[j] + alpha * s[j]);
        wm[j] = upow(vtry[j], m);
      }
      const double rtry =
          residual(st, vtry, prev, wm, bpow_flat, inv_tau, Rtry);
      if (rtry < best || alpha <= 0x1p-30) {
        best = rtry;
        break;
      }
      alpha *= 0.5;
    }
    std::copy(vtry.begin(), vtry.end(), v.begin());
    std::copy(Rtry.begin(), Rtry.end(), R.begin());
    rmax = best;
  }
  if (iters_out) *iters_out += it;
}

double parabolic_boundary_sup(const ScalarField& data,
                              const SpaceTimeBox& box) {
  const auto& grid = data.grid();
  double s = 0.0;
  for_each_closed_spatial(grid, box, [&](long f) {
    s = std::max(s, data.at(f, box.t_start));
  });
  std::vector<long> peri;
  for_each_perimeter_spatial(grid, box, [&](long f) { peri.push_back(f); });
  for (int k = box.t_start + 1; k < grid.n_time(); ++k) {
    for (long f : peri) s = std::max(s, data.at(f, k));
  }
  return s;
}

void gather_boundary_powers(const ScalarField& field, const BoxStencil& st,
                            int k, double m, std::vector<double>& bpow_flat) {
  for (size_t j = 0; j < st.interior.size(); ++j) {
    for (int a = 0; a < 2 * st.dim; ++a) {
      const long link = st.nbr[j][static_cast<size_t>(a)];
      if (link < 0) {
        const long flat = ~link;
        bpow_flat[static_cast<size_t>(flat)] = upow(field.at(flat, k), m);
      }
    }
  }
}

}  // namespace

std::vector<double> step_backward_euler(const ScalarField& field,
                                        const SpaceTimeBox& box, int k,
                                        const SolverConfig& config,
                                        int* newton_iters) {
  config.validate();
  const auto& grid = field.grid();
  box.validate(grid);
  if (k <= box.t_start || k > grid.n_time() - 1) {
    throw GeometryError("time level outside the box range");
  }
  BoxStencil st(grid, box);
  std::vector<double> v(st.interior.size(), 0.0);
  if (st.interior.empty()) return v;
  std::vector<double> prev(st.interior.size());
  for (size_t j = 0; j < st.interior.size(); ++j) {
    prev[j] = field.at(st.interior[j], k - 1);
  }
  std::vector<double> bpow_flat(static_cast<size_t>(grid.n_space_total()),
                                0.0);
  gather_boundary_powers(field, st, k, config.m, bpow_flat);
  const auto tols =
      resolve_tols(config, parabolic_boundary_sup(field, box), grid.tau());
  int iters = 0;
  newton_step(st, grid, config, tols, prev, bpow_flat, k, v, &iters);
  if (newton_iters) *newton_iters += iters;
  return v;
}

ScalarField solve_box(const ScalarField& data, const SpaceTimeBox& box,
                      const SolverConfig& config, long* newton_iters) {
  config.validate();
  const auto& grid = data.grid();
  box.validate(grid);
  ScalarField out = data;
  BoxStencil st(grid, box);
  const int klast = grid.n_time() - 1;
  if (st.interior.empty() || box.t_start >= klast) return out;

  const auto tols =
      resolve_tols(config, parabolic_boundary_sup(data, box), grid.tau());
  SolverConfig resolved = config;
  resolved.newton_tol = tols.newton_tol;
  resolved.jacobian_floor = tols.delta;

  const size_t n = st.interior.size();
  std::vector<double> prev(n), v(n);
  for (size_t j = 0; j < n; ++j) prev[j] = out.at(st.interior[j], box.t_start);
  std::vector<double> bpow_flat(static_cast<size_t>(grid.n_space_total()),
                                0.0);
  int iters = 0;
  for (int k = box.t_start + 1; k <= klast; ++k) {
    gather_boundary_powers(out, st, k, config.m, bpow_flat);
    newton_step(st, grid, resolved, tols, prev, bpow_flat, k, v, &iters);
    for (size_t j = 0; j < n; ++j) out.set(st.interior[j], k, v[j]);
    std::swap(prev, v);
  }
  if (newton_iters) *newton_iters += iters;
  return out;
}

ScalarField solve_bvp(const BVPSpec& spec, const SolverConfig& config) {
  SolverConfig cfg = config;
  cfg.m = spec.m;
  return solve_box(spec.boundary_data, spec.box, cfg);
}

double barenblatt(std::span<const double> x, double t, double m, int n,
                  double C) {
  if (!(t > 0.0)) throw DomainError("barenblatt: requires t > 0");
  if (!(C > 0.0)) throw DomainError("barenblatt: requires C > 0");
  if (!(m > 1.0)) throw DomainError("barenblatt: requires m > 1");
  if (n < 1 || static_cast<size_t>(n) != x.size()) {
    throw DomainError("barenblatt: dimension mismatch");
  }
  const double nd = static_cast<double>(n);
  const double alpha = nd / (nd * (m - 1.0) + 2.0);
  const double beta = alpha / nd;
  const double kappa = alpha * (m - 1.0) / (2.0 * m * nd);
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  const double profile = C - kappa * r2 * std::pow(t, -2.0 * beta);
  if (profile <= 0.0) return 0.0;
  return std::pow(t, -alpha) * std::pow(profile, 1.0 / (m - 1.0));
}

ScalarField barenblatt_field(const SpaceTimeGrid& grid, double m, double C,
                             double t_offset, std::span<const double> center) {
  if (!(t_offset > 0.0)) {
    throw DomainError("barenblatt_field: t_offset must be > 0");
  }
  const int n = grid.spatial_dim();
  std::array<double, 2> c{0.0, 0.0};
  for (size_t a = 0; a < center.size(); ++a) c[a] = center[a];
  return ScalarField::from_function(
      grid, [&](std::span<const double> x, double t) {
        std::array<double, 2> xs{};
        for (int a = 0; a < n; ++a) {
          xs[static_cast<size_t>(a)] =
              x[static_cast<size_t>(a)] - c[static_cast<size_t>(a)];
        }
        return barenblatt(std::span<const double>(xs.data(), n), t + t_offset,
                          m, n, C);
      });
}

ComparisonReport check_comparison(const ScalarField& u, const SpaceTimeBox& box,
                                  const SolverConfig& config, double tol) {
  const ScalarField w = solve_box(u, box, config);
  ComparisonReport rep;
  rep.tol = tol;
  rep.min_gap = std::numeric_limits<double>::infinity();
  const auto& grid = u.grid();
  for (int k = box.t_start; k < grid.n_time(); ++k) {
    for_each_closed_spatial(grid, box, [&](long f) {
      const double gap = u.at(f, k) - w.at(f, k);
      if (gap < rep.min_gap) {
        rep.min_gap = gap;
        rep.argmin = {f, k};
      }
    });
  }
  rep.pass = rep.min_gap >= -tol;
  return rep;
}

ComparisonReport check_comparison_all(const ScalarField& u,
                                      const std::vector<EnumeratedBox>& boxes,
                                      const SolverConfig& config, double tol) {
  ComparisonReport worst;
  worst.tol = tol;
  worst.min_gap = std::numeric_limits<double>::infinity();
  worst.pass = true;
  for (const auto& eb : boxes) {
    const auto rep = check_comparison(u, eb.box, config, tol);
    if (rep.min_gap < worst.min_gap) {
      worst.min_gap = rep.min_gap;
      worst.argmin = rep.argmin;
    }
    worst.pass = worst.pass && rep.pass;
  }
  return worst;
}

}  // namespace pmeobst

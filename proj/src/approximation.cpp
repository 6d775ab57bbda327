#include "pmeobst/approximation.hpp"

#include <algorithm>
#include <cmath>

#include "pmeobst/errors.hpp"
#include "pmeobst/weakform.hpp"

namespace pmeobst {

Obstacle lift_obstacle(const ScalarField& u, double eps, double m) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw DomainError("lift_obstacle: requires 0 < eps < 1");
  }
  ScalarField lifted = u;
  auto v = lifted.mutable_values();
  const double em = std::pow(eps, m);
  for (auto& x : v) {
    const double raw = std::pow(std::pow(x, m) + em, 1.0 / m);
    x = std::min(std::max(raw, std::max(x, eps)), x + eps);
  }
  return Obstacle::from_table(std::move(lifted), Regularity::kContinuous);
}

EpsFamily build_eps_family(const ScalarField& u,
                           const std::vector<double>& schedule,
                           const ObstacleConfig& cfg) {
  if (schedule.empty()) throw ConfigError("schedule: must not be empty");
  for (size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0 && schedule[i] < 1.0)) {
      throw DomainError("schedule: entries must lie in (0,1)");
    }
    if (i > 0 && !(schedule[i] < schedule[i - 1])) {
      throw DomainError("schedule: must be strictly decreasing");
    }
  }
  const auto& grid = u.grid();
  const double stop = cfg.resolved_stop_tol(u.sup());
  {
    const int depth = std::min(2, enumeration_depth(grid));
    const auto boxes = enumerate_boxes(grid, depth, cfg.order);
    const auto rep = check_comparison_all(u, boxes, cfg.solver, 5.0 * stop);
    if (!rep.pass) {
      throw DomainError(
          "build_eps_family: base field fails the comparison precheck "
          "(worst gap " +
          std::to_string(rep.min_gap) + ")");
    }
  }
  EpsFamily family;
  family.schedule = schedule;
  family.base = u;
  family.m = cfg.solver.m;
  family.stop_tol = stop;
  for (double eps : schedule) {
    const Obstacle psi_eps = lift_obstacle(u, eps, cfg.solver.m);
    auto res = solve_obstacle_continuous(psi_eps, grid, cfg);
    family.members.push_back(std::move(res.u));
  }
  return family;
}

namespace {

// Fixed battery of ten smooth bumps paired against grad_h(u^m); positions
// and radii are deterministic fractions of the cylinder.
std::vector<std::pair<TestFunction, int>> pairing_battery(
    const SpaceTimeGrid& grid) {
  std::vector<std::pair<TestFunction, int>> out;
  const int dim = grid.spatial_dim();
  for (int j = 0; j < 10; ++j) {
    const double fx = 0.20 + 0.60 * static_cast<double>((j * 7) % 10) / 9.0;
    const double ft = 0.25 + 0.50 * static_cast<double>((j * 3) % 10) / 9.0;
    const double fr = 0.12 + 0.04 * static_cast<double>(j % 3);
    std::vector<double> c, r;
    for (int a = 0; a < dim; ++a) {
      const auto& iv = grid.axis(a);
      c.push_back(iv.lo + fx * iv.extent());
      r.push_back(fr * iv.extent());
    }
    const double ct = ft * grid.final_time();
    const double rt = fr * grid.final_time();
    out.emplace_back(TestFunction(c, r, ct, rt), j % dim);
  }
  return out;
}

}  // namespace

ConvergenceReport convergence_report(const EpsFamily& family, double q,
                                     double p, double t0) {
  if (!(q > 0.0)) throw DomainError("convergence_report: requires q > 0");
  if (!(p >= 1.0)) throw DomainError("convergence_report: requires p >= 1");
  const auto& grid = family.base.grid();
  const int k0 = static_cast<int>(std::llround(t0 / grid.tau()));
  if (k0 < 1 || k0 > grid.n_time() - 2) {
    throw GeometryError("convergence_report: t0 must be an interior level");
  }
  const auto battery = pairing_battery(grid);
  const double m = family.m;

  std::vector<double> base_pairings;
  for (const auto& [phi, axis] : battery) {
    base_pairings.push_back(gradient_pairing(family.base, m, axis, phi));
  }

  ConvergenceReport report;
  report.q = q;
  report.p = p;
  report.t0_index = k0;
  for (size_t i = 0; i < family.members.size(); ++i) {
    const auto& ue = family.members[i];
    ConvergenceRow row;
    row.eps = family.schedule[i];
    row.max_gap = sup_gap(ue, family.base);
    row.lp_gap = lp_gap(ue, family.base, q, p);
    row.slice_lp_gap = slice_lp_gap(ue, family.base, q, p, k0);
    for (size_t b = 0; b < battery.size(); ++b) {
      const double pe =
          gradient_pairing(ue, m, battery[b].second, battery[b].first);
      row.pairing_gap = std::max(row.pairing_gap,
                                 std::abs(pe - base_pairings[b]));
    }
    double gmax = 0.0;
    double gsum = 0.0;
    long count = 0;
    for (int k = 0; k < grid.n_time(); ++k) {
      for (int a = 0; a < grid.spatial_dim(); ++a) {
        const auto ge = nodal_gradient(ue, m, a, k);
        const auto gb = nodal_gradient(family.base, m, a, k);
        for (size_t n = 0; n < ge.size(); ++n) {
          const double d = std::abs(ge[n] - gb[n]);
          gmax = std::max(gmax, d);
          gsum += d;
          ++count;
        }
      }
    }
    row.grad_gap_max = gmax;
    row.grad_gap_mean = count > 0 ? gsum / static_cast<double>(count) : 0.0;
    report.rows.push_back(row);
  }
  return report;
}

OleinikResult oleinik_pairing(const ScalarField& u_eps, const ScalarField& u,
                              double eps, double m, double M, double rel_tol) {
  if (!u_eps.same_grid(u)) {
    throw GeometryError("oleinik_pairing: mismatched grids");
  }
  const double cyl = u.grid().cylinder_measure();
  OleinikResult res;
  res.lhs = pairing_integral(u_eps, u, m);
  res.rhs = std::pow(eps, m) * cyl * (M + 1.0) +
            eps * cyl * std::pow(M + 1.0, m);
  res.pass = res.lhs <= res.rhs * (1.0 + rel_tol);
  return res;
}

OleinikResult oleinik_bound_check(const ScalarField& g, double eps, double M,
                                  const SolverConfig& config, double rel_tol) {
  if (M < g.sup()) {
    throw DomainError("oleinik: bound M is smaller than sup of the data");
  }
  auto [u_eps, u] = oleinik_solve_pair(g, eps, config);
  return oleinik_pairing(u_eps, u, eps, config.m, M, rel_tol);
}

std::pair<ScalarField, ScalarField> oleinik_solve_pair(
    const ScalarField& g, double eps, const SolverConfig& config) {
  if (!(eps > 0.0)) throw DomainError("oleinik pair: eps must be positive");
  const auto box = SpaceTimeBox::full_cylinder(g.grid());
  ScalarField lifted = g;
  {
    auto v = lifted.mutable_values();
    const double em = std::pow(eps, config.m);
    for (auto& x : v) {
      const double raw = std::pow(std::pow(x, config.m) + em, 1.0 / config.m);
      x = std::min(std::max(raw, std::max(x, eps)), x + eps);
    }
  }
  ScalarField u = solve_box(g, box, config);
  ScalarField u_eps = solve_box(lifted, box, config);
  return {std::move(u_eps), std::move(u)};
}

}  // namespace pmeobst

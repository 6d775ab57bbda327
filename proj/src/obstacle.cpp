#include "pmeobst/obstacle.hpp"

#include <algorithm>
#include <cmath>

#include "pmeobst/errors.hpp"
#include "pmeobst/weakform.hpp"

namespace pmeobst {

Obstacle Obstacle::constant(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw DomainError("obstacle: constant must be finite and >= 0");
  }
  return Obstacle([c](std::span<const double>, double) { return c; }, c,
                  Regularity::kContinuous);
}

Obstacle Obstacle::from_function(Evaluator f, double bound, Regularity reg) {
  if (!(bound >= 0.0) || !std::isfinite(bound)) {
    throw DomainError("obstacle: bound must be finite and >= 0");
  }
  return Obstacle(std::move(f), bound, reg);
}

Obstacle Obstacle::from_table(ScalarField table, Regularity reg) {
  const double bound = table.sup();
  auto shared = std::make_shared<ScalarField>(std::move(table));
  auto eval = [shared](std::span<const double> x, double t) {
    const auto& g = shared->grid();
    const int dim = g.spatial_dim();
    // clamped cell location per axis and in time
    std::array<int, 2> i0{};
    std::array<double, 2> wx{};
    for (int a = 0; a < dim; ++a) {
      const double s = (x[static_cast<size_t>(a)] - g.axis(a).lo) / g.h(a);
      const double sc = std::clamp(s, 0.0, static_cast<double>(g.n_space(a) - 1));
      int i = std::min(static_cast<int>(std::floor(sc)), g.n_space(a) - 2);
      i0[static_cast<size_t>(a)] = i;
      wx[static_cast<size_t>(a)] = sc - static_cast<double>(i);
    }
    const double st =
        std::clamp(t / g.tau(), 0.0, static_cast<double>(g.n_time() - 1));
    const int k0 = std::min(static_cast<int>(std::floor(st)), g.n_time() - 2);
    const double wt = st - static_cast<double>(k0);

    auto corner = [&](int dx0, int dx1, int dk) {
      std::array<int, 2> ix{i0[0] + dx0, i0[1] + dx1};
      return shared->at(g.flatten(std::span<const int>(ix.data(), dim)),
                        k0 + dk);
    };
    double v = 0.0;
    if (dim == 1) {
      for (int dk = 0; dk <= 1; ++dk) {
        const double tw = dk ? wt : 1.0 - wt;
        v += tw * ((1.0 - wx[0]) * corner(0, 0, dk) + wx[0] * corner(1, 0, dk));
      }
    } else {
      for (int dk = 0; dk <= 1; ++dk) {
        const double tw = dk ? wt : 1.0 - wt;
        v += tw * ((1.0 - wx[0]) * (1.0 - wx[1]) * corner(0, 0, dk) +
                   wx[0] * (1.0 - wx[1]) * corner(1, 0, dk) +
                   (1.0 - wx[0]) * wx[1] * corner(0, 1, dk) +
                   wx[0] * wx[1] * corner(1, 1, dk));
      }
    }
    return v;
  };
  return Obstacle(std::move(eval), bound, reg);
}

Obstacle Obstacle::indicator(double c, double t_from,
                             std::vector<Interval> spatial_box) {
  if (!(c >= 0.0)) throw DomainError("obstacle: indicator level must be >= 0");
  auto eval = [c, t_from, box = std::move(spatial_box)](
                  std::span<const double> x, double t) {
    if (t < t_from) return 0.0;
    for (size_t a = 0; a < box.size(); ++a) {
      if (x[a] < box[a].lo || x[a] > box[a].hi) return 0.0;
    }
    return c;
  };
  return Obstacle(std::move(eval), c, Regularity::kLowerSemicontinuous);
}

ScalarField Obstacle::sample(const SpaceTimeGrid& grid) const {
  return ScalarField::from_function(grid, eval_);
}

Obstacle inf_convolution(const Obstacle& psi, double k,
                         const SpaceTimeGrid& grid) {
  if (!(k >= 1.0)) throw DomainError("inf_convolution: requires k >= 1");
  auto samples = std::make_shared<ScalarField>(psi.sample(grid));
  const int dim = grid.spatial_dim();
  auto eval = [samples, k, dim](std::span<const double> x, double t) {
    const auto& g = samples->grid();
    double best = std::numeric_limits<double>::infinity();
    std::array<int, 2> ix{};
    for (int kk = 0; kk < g.n_time(); ++kk) {
      const double dt = std::abs(t - g.time(kk));
      for (long f = 0; f < g.n_space_total(); ++f) {
        g.unflatten(f, ix);
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) {
          const double d =
              x[static_cast<size_t>(a)] - g.coord(a, ix[static_cast<size_t>(a)]);
          r2 += d * d;
        }
        const double cand = samples->at(f, kk) + k * (std::sqrt(r2) + dt);
        best = std::min(best, cand);
      }
    }
    return best;
  };
  return Obstacle::from_function(std::move(eval), psi.bound(),
                                 Regularity::kContinuous);
}

ScalarField poisson_modify(const ScalarField& u, const SpaceTimeBox& box,
                           const SolverConfig& config) {
  return solve_box(u, box, config);
}

ConstructStepResult construct_step(const ScalarField& f,
                                   const SpaceTimeBox& box,
                                   const ScalarField& psi_samples,
                                   const SolverConfig& config) {
  if (!f.same_grid(psi_samples)) {
    throw GeometryError("iterate and obstacle live on different grids");
  }
  {
    const auto fv = f.values();
    const auto pv = psi_samples.values();
    for (size_t i = 0; i < fv.size(); ++i) {
      if (fv[i] < pv[i]) {
        throw DomainError("construct_step: iterate dips below the obstacle");
      }
    }
  }
  ConstructStepResult out;
  ScalarField g = solve_box(f, box, config, &out.newton_iters);
  // g equals f outside the solved region, so the box-local maximum is the
  // global elementwise maximum.
  auto gv = g.mutable_values();
  const auto fv = f.values();
  double inc = 0.0;
  for (size_t i = 0; i < gv.size(); ++i) {
    const double d = gv[i] - fv[i];
    if (d > 0.0) {
      inc = std::max(inc, d);
    } else {
      gv[i] = fv[i];
    }
  }
  out.increment = inc;
  out.f_next = std::move(g);
  return out;
}

ObstacleSolveResult solve_obstacle_continuous(
    const Obstacle& psi, const SpaceTimeGrid& grid, const ObstacleConfig& cfg,
    const std::function<void(const ScalarField&, int)>& on_sweep) {
  cfg.solver.validate();
  ScalarField psi_field = psi.sample(grid);
  const double bound = std::max(psi.bound(), psi_field.sup());
  const double stop = cfg.resolved_stop_tol(bound);
  const int depth = cfg.level >= 0 ? cfg.level : enumeration_depth(grid);
  const auto boxes = enumerate_boxes(grid, depth, cfg.order);

  ObstacleSolveResult result;
  result.stop_tol = stop;
  result.trace.box_count_per_sweep = static_cast<int>(boxes.size());
  ScalarField f = psi_field;

  // Sweeping stops only once increments undershoot the reported tolerance
  // by a solid factor; the terminal state then sits well within every
  // stop_tol-scaled property bound instead of straddling it.
  const double stop_internal = stop / 8.0;
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double max_inc = 0.0;
    for (const auto& eb : boxes) {
      auto step = construct_step(f, eb.box, psi_field, cfg.solver);
      f = std::move(step.f_next);
      result.trace.boxes.push_back({sweep, eb.level, eb.ordinal, eb.box,
                                    step.increment, step.newton_iters});
      max_inc = std::max(max_inc, step.increment);
    }
    result.trace.sweeps.push_back({sweep, depth, max_inc});
    if (on_sweep) on_sweep(f, sweep);
    if (max_inc <= stop_internal) {
      result.trace.stop = StopReason::kConverged;
      result.u = std::move(f);
      result.sweeps = sweep;
      return result;
    }
  }
  result.trace.stop = StopReason::kSweepBudget;
  throw ConvergenceError(
      "obstacle iteration: sweep budget exhausted before the stop tolerance",
      std::move(result.trace));
}

LscSolveResult solve_obstacle_lsc(const Obstacle& psi,
                                  const SpaceTimeGrid& grid,
                                  const ObstacleConfig& cfg) {
  const double bound = psi.bound();
  double hmin = grid.tau();
  for (int a = 0; a < grid.spatial_dim(); ++a) hmin = std::min(hmin, grid.h(a));
  const double stop = cfg.resolved_stop_tol(bound);

  LscSolveResult out;
  out.stop_tol = stop;
  std::optional<ScalarField> prev;
  for (int j = 0; j < cfg.lsc_max_stages; ++j) {
    const double k = std::ldexp(1.0 + bound, j) / hmin;
    const Obstacle psik = inf_convolution(psi, k, grid);
    auto stage_res = solve_obstacle_continuous(psik, grid, cfg);
    LscStage stage;
    stage.k = k;
    stage.trace = std::move(stage_res.trace);
    if (prev) {
      double delta = 0.0;
      double min_gap = 0.0;
      const auto a = stage_res.u.values();
      const auto b = prev->values();
      for (size_t i = 0; i < a.size(); ++i) {
        delta = std::max(delta, std::abs(a[i] - b[i]));
        min_gap = std::min(min_gap, a[i] - b[i]);
      }
      stage.delta_from_prev = delta;
      stage.min_gap_from_prev = min_gap;
      out.stages.push_back(std::move(stage));
      if (delta <= stop) {
        out.u = std::move(stage_res.u);
        return out;
      }
    } else {
      out.stages.push_back(std::move(stage));
    }
    prev = std::move(stage_res.u);
  }
  IterationTrace last =
      out.stages.empty() ? IterationTrace{} : std::move(out.stages.back().trace);
  throw ConvergenceError(
      "lsc obstacle: approximation stages did not settle within the budget",
      std::move(last));
}

MinimalityReport verify_minimality(
    const ScalarField& u, const ScalarField& psi_samples,
    const std::vector<std::pair<std::string, ScalarField>>& competitors,
    const ObstacleConfig& cfg, int precheck_level) {
  if (!u.same_grid(psi_samples)) {
    throw GeometryError("solution and obstacle live on different grids");
  }
  const auto& grid = u.grid();
  const double stop = cfg.resolved_stop_tol(
      std::max(psi_samples.sup(), u.sup()));
  const double tol_cmp = 5.0 * stop;
  const double tol_min = 2.0 * stop;
  const int depth = std::min(precheck_level, enumeration_depth(grid));
  const auto boxes = enumerate_boxes(grid, depth, cfg.order);

  MinimalityReport report;
  report.tol = tol_min;
  report.all_pass = true;
  for (const auto& [name, v] : competitors) {
    CompetitorVerdict cv;
    cv.name = name;
    if (!v.same_grid(u)) {
      throw GeometryError("competitor grid mismatch: " + name);
    }
    double below_psi = 0.0;
    {
      const auto vv = v.values();
      const auto pv = psi_samples.values();
      for (size_t i = 0; i < vv.size(); ++i) {
        below_psi = std::min(below_psi, vv[i] - pv[i]);
      }
    }
    if (below_psi < 0.0) {
      cv.accepted = false;
      cv.rejection = "competitor dips below the obstacle";
      report.competitors.push_back(std::move(cv));
      continue;
    }
    const auto cmp = check_comparison_all(v, boxes, cfg.solver, tol_cmp);
    if (!cmp.pass) {
      cv.accepted = false;
      cv.rejection = "competitor fails the box comparison precheck";
      report.competitors.push_back(std::move(cv));
      continue;
    }
    cv.accepted = true;
    cv.min_margin = std::numeric_limits<double>::infinity();
    const auto vv = v.values();
    const auto uv = u.values();
    const long nsp = grid.n_space_total();
    for (size_t i = 0; i < vv.size(); ++i) {
      const double margin = vv[i] - uv[i];
      if (margin < cv.min_margin) {
        cv.min_margin = margin;
        cv.worst = {static_cast<long>(i) % nsp,
                    static_cast<int>(static_cast<long>(i) / nsp)};
      }
    }
    cv.pass = cv.min_margin >= -tol_min;
    report.all_pass = report.all_pass && cv.pass;
    report.competitors.push_back(std::move(cv));
  }
  return report;
}

InactiveSetReport inactive_set_residual(const ScalarField& u,
                                        const ScalarField& psi_samples,
                                        const ObstacleConfig& cfg,
                                        int battery_size) {
  if (!u.same_grid(psi_samples)) {
    throw GeometryError("solution and obstacle live on different grids");
  }
  const auto& grid = u.grid();
  const double stop = cfg.resolved_stop_tol(
      std::max(psi_samples.sup(), u.sup()));
  const double margin = cfg.contact_margin_factor * stop;

  const long nsp = grid.n_space_total();
  std::vector<char> mask(static_cast<size_t>(nsp) *
                         static_cast<size_t>(grid.n_time()));
  bool any = false;
  for (int k = 0; k < grid.n_time(); ++k) {
    for (long f = 0; f < nsp; ++f) {
      const bool inactive = u.at(f, k) > psi_samples.at(f, k) + margin;
      mask[static_cast<size_t>(k) * static_cast<size_t>(nsp) +
           static_cast<size_t>(f)] = inactive ? 1 : 0;
      any = any || inactive;
    }
  }
  InactiveSetReport report;
  if (!any) {
    report.vacuous = true;
    report.pass = true;
    return report;
  }

  const auto battery = bump_battery(grid, battery_size, true);
  std::array<double, 2> x{};
  std::array<int, 2> ix{};
  const int dim = grid.spatial_dim();
  report.pass = true;
  for (const auto& phi : battery) {
    bool all_inside = true;
    bool any_inside = false;
    for (int k = 0; k < grid.n_time(); ++k) {
      const double t = grid.time(k);
      for (long f = 0; f < nsp; ++f) {
        grid.unflatten(f, ix);
        for (int a = 0; a < dim; ++a) {
          x[static_cast<size_t>(a)] = grid.coord(a, ix[static_cast<size_t>(a)]);
        }
        if (phi.value(std::span<const double>(x.data(), dim), t) <= 0.0) {
          continue;
        }
        const bool in = mask[static_cast<size_t>(k) * static_cast<size_t>(nsp) +
                             static_cast<size_t>(f)] != 0;
        all_inside = all_inside && in;
        any_inside = any_inside || in;
      }
    }
    if (!any_inside) continue;
    InactiveBumpRow row;
    row.inside = all_inside;
    row.residual = residual_weak_form(u, phi, cfg.solver.m);
    row.tol = residual_tolerance(u, phi, cfg.solver.m);
    row.center0 = phi.center(0);
    row.t_center = phi.t_center();
    if (all_inside) {
      row.pass = std::abs(row.residual) <= row.tol;
      report.bumps_inside += 1;
      report.worst_inside_ratio = std::max(
          report.worst_inside_ratio, std::abs(row.residual) / row.tol);
    } else {
      row.pass = row.residual >= -row.tol;
      report.bumps_straddling += 1;
    }
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace pmeobst

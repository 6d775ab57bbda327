#include "pmeobst/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "pmeobst/errors.hpp"

namespace pmeobst {

namespace {

CertReport certify(const ScalarField& u, double m, int battery_size,
                   const std::function<bool(long, int)>& mask,
                   bool supersolution_side) {
  const auto& grid = u.grid();
  const auto battery = bump_battery(grid, battery_size, mask != nullptr);
  CertReport report;
  report.pass = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::array<double, 2> x{};
  std::array<int, 2> ix{};
  const int dim = grid.spatial_dim();
  for (const auto& phi : battery) {
    if (mask) {
      bool inside = true;
      for (int k = 0; k < grid.n_time() && inside; ++k) {
        const double t = grid.time(k);
        for (long f = 0; f < grid.n_space_total(); ++f) {
          grid.unflatten(f, ix);
          for (int a = 0; a < dim; ++a) {
            x[static_cast<size_t>(a)] =
                grid.coord(a, ix[static_cast<size_t>(a)]);
          }
          if (phi.value(std::span<const double>(x.data(), dim), t) > 0.0 &&
              !mask(f, k)) {
            inside = false;
            break;
          }
        }
      }
      if (!inside) continue;
    }
    CertRow row;
    row.center0 = phi.center(0);
    row.t_center = phi.t_center();
    row.radius0 = phi.radius(0);
    row.residual = residual_weak_form(u, phi, m);
    row.tol = residual_tolerance(u, phi, m);
    const double margin = supersolution_side ? row.residual + row.tol
                                             : row.tol - row.residual;
    row.pass = margin >= 0.0;
    report.pass = report.pass && row.pass;
    report.bumps += 1;
    if (margin < worst_margin) {
      worst_margin = margin;
      report.worst = row;
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace

CertReport certify_supersolution(const ScalarField& u, double m,
                                 int battery_size) {
  return certify(u, m, battery_size, nullptr, true);
}

CertReport certify_subsolution(const ScalarField& u, double m,
                               int battery_size,
                               const std::function<bool(long, int)>& mask) {
  return certify(u, m, battery_size, mask ? mask : [](long, int) {
    return true;
  }, false);
}

CaseArtifacts run_case(const RunConfig& rc) {
  if (!rc.obstacle) {
    throw ConfigError("case '" + rc.name + "': no obstacle section");
  }
  CaseArtifacts art;
  art.config = rc;
  art.psi_samples = rc.obstacle->sample(rc.grid);
  if (rc.obstacle->regularity() == Regularity::kLowerSemicontinuous) {
    auto res = solve_obstacle_lsc(*rc.obstacle, rc.grid, rc.obstacle_cfg);
    art.u = std::move(res.u);
    art.stop_tol = res.stop_tol;
    art.lsc_stages = std::move(res.stages);
    if (!art.lsc_stages.empty()) {
      art.trace = art.lsc_stages.back().trace;
      art.sweeps = static_cast<int>(art.trace.sweeps.size());
    }
  } else {
    std::optional<ScalarField> snapshot;
    auto res = solve_obstacle_continuous(
        *rc.obstacle, rc.grid, rc.obstacle_cfg,
        [&](const ScalarField& f, int sweep) {
          if (sweep == 1) snapshot = f;
        });
    art.u = std::move(res.u);
    art.trace = std::move(res.trace);
    art.stop_tol = res.stop_tol;
    art.sweeps = res.sweeps;
    art.first_sweep = std::move(snapshot);
  }
  return art;
}

namespace {

using SuiteFn = std::function<VerdictRow(CaseArtifacts&)>;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

VerdictRow verdict(const CaseArtifacts& art, const std::string& suite,
                   bool pass, const std::string& detail) {
  return {art.config.name, suite,
          pass ? VerdictStatus::kPass : VerdictStatus::kFail, detail};
}

VerdictRow skip(const CaseArtifacts& art, const std::string& suite,
                const std::string& why) {
  return {art.config.name, suite, VerdictStatus::kSkip, why};
}

const EpsFamily& eps_family_of(CaseArtifacts& art) {
  if (!art.eps_family) {
    art.eps_family =
        build_eps_family(art.u, {0.4, 0.2}, art.config.obstacle_cfg);
  }
  return *art.eps_family;
}

ScalarField solve_with_obstacle(const Obstacle& psi, const CaseArtifacts& art,
                                BoxOrder order) {
  ObstacleConfig cfg = art.config.obstacle_cfg;
  cfg.order = order;
  if (psi.regularity() == Regularity::kLowerSemicontinuous) {
    return solve_obstacle_lsc(psi, art.config.grid, cfg).u;
  }
  return solve_obstacle_continuous(psi, art.config.grid, cfg).u;
}

// Continuous space-time bump sampled against the case grid, used to raise
// obstacles for the comparison and minimality suites.
ScalarField bump_samples(const SpaceTimeGrid& grid, double amplitude) {
  std::vector<double> c, r;
  for (int a = 0; a < grid.spatial_dim(); ++a) {
    c.push_back(grid.axis(a).lo + 0.5 * grid.axis(a).extent());
    r.push_back(0.35 * grid.axis(a).extent());
  }
  const TestFunction phi(c, r, 0.5 * grid.final_time(),
                         0.35 * grid.final_time());
  return ScalarField::from_function(
      grid, [&](std::span<const double> x, double t) {
        return amplitude * phi.value(x, t);
      });
}

std::map<std::string, SuiteFn> make_registry() {
  std::map<std::string, SuiteFn> reg;

  reg["L2.6"] = [](CaseArtifacts& art) {
    const double M = std::max(art.psi_samples.sup(), 0.0);
    const auto res = oleinik_bound_check(art.psi_samples, 0.1, M,
                                         art.config.obstacle_cfg.solver);
    return verdict(art, "L2.6", res.pass,
                   "lhs=" + fmt(res.lhs) + " rhs=" + fmt(res.rhs));
  };

  reg["R2.7"] = [](CaseArtifacts& art) {
    auto [ueps, u] = oleinik_solve_pair(art.psi_samples, 0.1,
                                        art.config.obstacle_cfg.solver);
    const double m = art.config.obstacle_cfg.solver.m;
    const auto a = ueps.values();
    const auto b = u.values();
    bool ok = true;
    double worst = 0.0;
    for (size_t i = 0; i < a.size() && ok; ++i) {
      const double lhs = std::pow(std::abs(a[i] - b[i]), m + 1.0);
      const double rhs =
          (a[i] - b[i]) * (std::pow(a[i], m) - std::pow(b[i], m));
      if (lhs > rhs) {
        ok = false;
        worst = lhs - rhs;
      }
    }
    return verdict(art, "R2.7", ok,
                   ok ? "nodewise power gap bound holds"
                      : "violated by " + fmt(worst));
  };

  reg["L2.8"] = [](CaseArtifacts& art) {
    const auto boxes = enumerate_boxes(art.config.grid, 0);
    if (boxes.empty()) return skip(art, "L2.8", "no interior boxes");
    const auto up =
        poisson_modify(art.u, boxes[0].box, art.config.obstacle_cfg.solver);
    double worst = 0.0;
    const auto a = up.values();
    const auto b = art.u.values();
    for (size_t i = 0; i < a.size(); ++i) {
      worst = std::max(worst, a[i] - b[i]);
    }
    const bool ok = worst <= 5.0 * art.stop_tol;
    return verdict(art, "L2.8", ok,
                   "max(u_P - u)=" + fmt(worst));
  };

  reg["L2.9"] = [](CaseArtifacts& art) {
    const auto rep =
        inactive_set_residual(art.u, art.psi_samples, art.config.obstacle_cfg);
    if (rep.vacuous) return skip(art, "L2.9", "vacuous: empty inactive set");
    return verdict(art, "L2.9", rep.pass,
                   "inside=" + std::to_string(rep.bumps_inside) +
                       " straddling=" + std::to_string(rep.bumps_straddling) +
                       " worst=" + fmt(rep.worst_inside_ratio));
  };

  reg["L3.2.i"] = [](CaseArtifacts& art) {
    double min_inc = 0.0;
    for (const auto& b : art.trace.boxes) {
      min_inc = std::min(min_inc, b.increment);
    }
    return verdict(art, "L3.2.i", min_inc >= 0.0,
                   "min increment=" + fmt(min_inc));
  };

  reg["L3.2.ii"] = [](CaseArtifacts& art) {
    const double bound = art.psi_samples.sup() + 1e-6;
    const bool ok = art.u.sup() <= bound;
    return verdict(art, "L3.2.ii", ok,
                   "sup u=" + fmt(art.u.sup()) + " bound=" + fmt(bound));
  };

  reg["L3.2.iv"] = [](CaseArtifacts& art) {
    const double margin =
        art.config.obstacle_cfg.contact_margin_factor * art.stop_tol;
    auto check = [&](const ScalarField& f) {
      auto mask = [&](long flat, int k) {
        return f.at(flat, k) > art.psi_samples.at(flat, k) + margin;
      };
      return certify_subsolution(f, art.config.obstacle_cfg.solver.m, 3, mask);
    };
    const auto final_rep = check(art.u);
    bool ok = final_rep.pass;
    int bumps = final_rep.bumps;
    if (art.first_sweep) {
      const auto snap_rep = check(*art.first_sweep);
      ok = ok && snap_rep.pass;
      bumps += snap_rep.bumps;
    }
    if (bumps == 0) return skip(art, "L3.2.iv", "no bump fits the active gap");
    return verdict(art, "L3.2.iv", ok, "bumps=" + std::to_string(bumps));
  };

  reg["L3.3.i"] = [](CaseArtifacts& art) {
    double worst = 0.0;
    const auto a = art.u.values();
    const auto b = art.psi_samples.values();
    for (size_t i = 0; i < a.size(); ++i) {
      worst = std::min(worst, a[i] - b[i]);
    }
    return verdict(art, "L3.3.i", worst >= 0.0, "min(u-psi)=" + fmt(worst));
  };

  reg["L3.3.ii"] = [](CaseArtifacts& art) {
    const double amp = 0.1 * (1.0 + art.psi_samples.sup());
    ScalarField raised = art.u;
    {
      auto rv = raised.mutable_values();
      const auto bump = bump_samples(art.config.grid, amp);
      const auto bv = bump.values();
      for (size_t i = 0; i < rv.size(); ++i) rv[i] += bv[i];
    }
    const ScalarField competitor = solve_with_obstacle(
        Obstacle::from_table(raised, Regularity::kContinuous), art,
        art.config.obstacle_cfg.order);
    std::vector<std::pair<std::string, ScalarField>> comps;
    comps.emplace_back("solution_itself", art.u);
    comps.emplace_back("raised_resolved", competitor);
    const auto rep = verify_minimality(art.u, art.psi_samples, comps,
                                       art.config.obstacle_cfg);
    bool ok = true;
    std::string detail;
    for (const auto& cv : rep.competitors) {
      ok = ok && cv.accepted && cv.pass;
      detail += cv.name + (cv.accepted ? (cv.pass ? ":pass " : ":fail ")
                                       : ":rejected ");
    }
    return verdict(art, "L3.3.ii", ok, detail);
  };

  reg["L3.4"] = [](CaseArtifacts& art) {
    const auto boxes =
        enumerate_boxes(art.config.grid, enumeration_depth(art.config.grid),
                        art.config.obstacle_cfg.order);
    const auto rep = check_comparison_all(
        art.u, boxes, art.config.obstacle_cfg.solver, 5.0 * art.stop_tol);
    return verdict(art, "L3.4", rep.pass, "min gap=" + fmt(rep.min_gap));
  };

  reg["L3.5"] = [](CaseArtifacts& art) {
    const ScalarField other = solve_with_obstacle(
        *art.config.obstacle, art, BoxOrder::kReversedWithinLevel);
    const double gap = sup_gap(art.u, other);
    return verdict(art, "L3.5", gap <= 5.0 * art.stop_tol,
                   "enumeration gap=" + fmt(gap));
  };

  reg["L3.6"] = [](CaseArtifacts& art) {
    const double amp = 0.25 * (1.0 + art.psi_samples.sup());
    const auto bump = bump_samples(art.config.grid, amp);
    const Obstacle& psi = *art.config.obstacle;
    auto raised_eval = [psi, bump](std::span<const double> x, double t) {
      const auto& g = bump.grid();
      // nearest-node bump sample keeps the raised obstacle exactly >= psi
      std::array<int, 2> ix{};
      for (int a = 0; a < g.spatial_dim(); ++a) {
        const double s = (x[static_cast<size_t>(a)] - g.axis(a).lo) / g.h(a);
        ix[static_cast<size_t>(a)] = std::clamp(
            static_cast<int>(std::llround(s)), 0, g.n_space(a) - 1);
      }
      const int k = std::clamp(static_cast<int>(std::llround(t / g.tau())), 0,
                               g.n_time() - 1);
      return psi(x, t) +
             bump.at(g.flatten(std::span<const int>(
                         ix.data(), static_cast<size_t>(g.spatial_dim()))),
                     k);
    };
    const Obstacle psi2 = Obstacle::from_function(
        raised_eval, psi.bound() + amp, psi.regularity());
    const ScalarField u2 =
        solve_with_obstacle(psi2, art, art.config.obstacle_cfg.order);
    double worst = 0.0;
    const auto a = art.u.values();
    const auto b = u2.values();
    for (size_t i = 0; i < a.size(); ++i) {
      worst = std::max(worst, a[i] - b[i]);
    }
    return verdict(art, "L3.6", worst <= 2.0 * art.stop_tol,
                   "max(u1-u2)=" + fmt(worst));
  };

  reg["T4.1"] = [](CaseArtifacts& art) {
    if (art.lsc_stages.empty()) {
      return skip(art, "T4.1", "continuous path: no approximation stages");
    }
    bool ok = art.lsc_stages.size() >= 2;
    double worst = 0.0;
    for (const auto& st : art.lsc_stages) {
      worst = std::min(worst, st.min_gap_from_prev);
    }
    ok = ok && worst >= -2.0 * art.stop_tol;
    double below = 0.0;
    const auto a = art.u.values();
    const auto b = art.psi_samples.values();
    for (size_t i = 0; i < a.size(); ++i) {
      below = std::min(below, a[i] - b[i]);
    }
    ok = ok && below >= 0.0;
    return verdict(art, "T4.1", ok,
                   "stage monotone dip=" + fmt(worst) +
                       " min(u-psi)=" + fmt(below));
  };

  reg["T5.1.lower-bound"] = [](CaseArtifacts& art) {
    const auto& fam = eps_family_of(art);
    bool ok = true;
    for (size_t i = 0; i < fam.members.size(); ++i) {
      ok = ok && fam.members[i].min() >= fam.schedule[i];
    }
    return verdict(art, "T5.1.lower-bound", ok,
                   ok ? "members dominate their eps" : "lower bound violated");
  };

  reg["T5.1.monotone"] = [](CaseArtifacts& art) {
    const auto& fam = eps_family_of(art);
    double worst = 0.0;
    for (size_t i = 1; i < fam.members.size(); ++i) {
      const auto a = fam.members[i].values();      // smaller eps
      const auto b = fam.members[i - 1].values();  // larger eps
      for (size_t n = 0; n < a.size(); ++n) {
        worst = std::max(worst, a[n] - b[n]);
      }
    }
    return verdict(art, "T5.1.monotone", worst <= 2.0 * art.stop_tol,
                   "max overshoot=" + fmt(worst));
  };

  reg["T5.1.convergence"] = [](CaseArtifacts& art) {
    const auto& fam = eps_family_of(art);
    const double t0 = 0.5 * art.config.grid.final_time();
    const auto rep = convergence_report(fam, 1.0, 2.0, t0);
    bool ok = true;
    for (size_t i = 1; i < rep.rows.size(); ++i) {
      ok = ok && rep.rows[i].max_gap <= rep.rows[i - 1].max_gap + art.stop_tol;
      ok = ok && rep.rows[i].lp_gap <= rep.rows[i - 1].lp_gap + art.stop_tol;
      ok = ok && rep.rows[i].slice_lp_gap <=
                     rep.rows[i - 1].slice_lp_gap + art.stop_tol;
    }
    return verdict(art, "T5.1.convergence", ok,
                   ok ? "gap diagnostics nonincreasing" : "gap increased");
  };

  reg["OBS.idem"] = [](CaseArtifacts& art) {
    const ScalarField again = solve_with_obstacle(
        Obstacle::from_table(art.u, Regularity::kContinuous), art,
        art.config.obstacle_cfg.order);
    const double gap = sup_gap(again, art.u);
    return verdict(art, "OBS.idem", gap <= art.stop_tol,
                   "rerun gap=" + fmt(gap));
  };

  return reg;
}

}  // namespace

std::vector<std::string> suite_catalogue() {
  return {"L2.6",    "R2.7",   "L2.8",   "L2.9",   "L3.2.i",
          "L3.2.ii", "L3.2.iv", "L3.3.i", "L3.3.ii", "L3.4",
          "L3.5",    "L3.6",   "T4.1",   "T5.1.lower-bound",
          "T5.1.monotone", "T5.1.convergence", "OBS.idem"};
}

nlohmann::json SuiteVerdicts::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    const char* status = r.status == VerdictStatus::kPass   ? "pass"
                         : r.status == VerdictStatus::kFail ? "fail"
                                                            : "skip";
    rows_json.push_back({{"case", r.case_name},
                         {"suite", r.suite},
                         {"status", status},
                         {"detail", r.detail}});
  }
  return nlohmann::json{{"verdicts", rows_json}, {"all_pass", all_pass}};
}

SuiteVerdicts run_suite(const std::vector<RunConfig>& cases,
                        const std::vector<std::string>& suites) {
  const auto registry = make_registry();
  std::vector<std::string> expanded;
  for (const auto& s : suites) {
    if (s == "all") {
      const auto all = suite_catalogue();
      expanded.insert(expanded.end(), all.begin(), all.end());
    } else if (registry.count(s) == 0) {
      throw ConfigError("unknown suite id '" + s + "'");
    } else {
      expanded.push_back(s);
    }
  }

  SuiteVerdicts out;
  for (const auto& rc : cases) {
    CaseArtifacts art = run_case(rc);
    for (const auto& sid : expanded) {
      VerdictRow row = registry.at(sid)(art);
      out.all_pass = out.all_pass && row.status != VerdictStatus::kFail;
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace pmeobst

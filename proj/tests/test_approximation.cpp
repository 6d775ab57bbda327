#include <doctest.h>

#include <cmath>
#include <random>

#include "pmeobst/approximation.hpp"

using namespace pmeobst;

namespace {

SpaceTimeGrid grid_1d(int n_space, int n_time, double lo = 0.0,
                      double hi = 1.0, double T = 1.0) {
  return SpaceTimeGrid::create({{lo, hi}}, {n_space}, n_time, T);
}

}  // namespace

TEST_SUITE("approximation") {

TEST_CASE("lift obstacle closed forms") {
  const auto g = grid_1d(9, 5);
  {
    const auto psi = lift_obstacle(ScalarField::zeros(g), 0.5, 2.0).sample(g);
    CHECK(psi.sup() == 0.5);
    CHECK(psi.min() == 0.5);
  }
  {
    const auto u = ScalarField::constant(g, 1.0);
    const auto psi = lift_obstacle(u, 1.0 - 1e-12, 2.0).sample(g);
    CHECK(psi.sup() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(lift_obstacle(ScalarField::zeros(g), 1.5, 2.0), DomainError);
  CHECK_THROWS_AS(lift_obstacle(ScalarField::zeros(g), 0.0, 2.0), DomainError);
}

TEST_CASE("lift envelope and monotonicity in eps") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  const auto g = grid_1d(11, 7);
  auto u = ScalarField::zeros(g);
  {
    auto v = u.mutable_values();
    for (auto& x : v) x = unif(rng);
  }
  const double m = 2.5;
  const auto a = lift_obstacle(u, 0.2, m).sample(g);
  const auto b = lift_obstacle(u, 0.4, m).sample(g);
  for (long f = 0; f < g.n_space_total(); ++f) {
    for (int k = 0; k < g.n_time(); ++k) {
      const double uv = u.at(f, k);
      // envelope: max(u, eps) <= lift <= u + eps, exactly
      CHECK(a.at(f, k) >= std::max(uv, 0.2));
      CHECK(a.at(f, k) <= uv + 0.2);
      // smaller eps lifts less
      CHECK(a.at(f, k) <= b.at(f, k));
    }
  }
}

TEST_CASE("family above the zero base is exactly the eps constants") {
  const auto g = grid_1d(17, 9);
  const auto fam = build_eps_family(ScalarField::zeros(g), {0.4, 0.2}, {});
  REQUIRE(fam.members.size() == 2);
  CHECK(fam.members[0].sup() == 0.4);
  CHECK(fam.members[0].min() == 0.4);
  CHECK(fam.members[1].sup() == 0.2);
}

TEST_CASE("constant base gives the lifted constants") {
  const auto g = grid_1d(17, 9);
  const double c = 1.0;
  const auto fam =
      build_eps_family(ScalarField::constant(g, c), {0.3}, {});
  const double expect = std::sqrt(c * c + 0.09);
  CHECK(fam.members[0].sup() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(fam.members[0].min() == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("schedules must decrease inside the unit interval") {
  const auto g = grid_1d(9, 5);
  const auto u = ScalarField::zeros(g);
  CHECK_THROWS_AS(build_eps_family(u, {0.2, 0.4}, {}), DomainError);
  CHECK_THROWS_AS(build_eps_family(u, {1.2}, {}), DomainError);
  CHECK_THROWS_AS(build_eps_family(u, {}, {}), ConfigError);
}

TEST_CASE("convergence report closed forms for constants") {
  const auto g = grid_1d(11, 11, 0.0, 2.0, 1.5);  // |cyl| = 3
  const double c = 1.0;
  const double m = 2.0;
  ObstacleConfig cfg;
  cfg.solver.m = m;
  const auto fam =
      build_eps_family(ScalarField::constant(g, c), {0.4, 0.2}, cfg);
  const double q = 1.0, p = 2.0;
  const auto rep = convergence_report(fam, q, p, 0.75);
  REQUIRE(rep.rows.size() == 2);
  for (size_t i = 0; i < 2; ++i) {
    const double eps = fam.schedule[i];
    const double lifted = std::pow(std::pow(c, m) + std::pow(eps, m), 1.0 / m);
    const double gap = std::pow(lifted, q) - std::pow(c, q);
    CHECK(rep.rows[i].max_gap == doctest::Approx(gap).epsilon(1e-9));
    // Lp of a constant gap: gap * |cyl|^(1/p)
    CHECK(rep.rows[i].lp_gap ==
          doctest::Approx(gap * std::pow(3.0, 1.0 / p)).epsilon(1e-9));
    CHECK(rep.rows[i].slice_lp_gap ==
          doctest::Approx(gap * std::pow(2.0, 1.0 / p)).epsilon(1e-9));
    // constant gaps have no gradient signature
    CHECK(rep.rows[i].grad_gap_max < 1e-9);
    CHECK(rep.rows[i].pairing_gap < 1e-9);
  }
}

TEST_CASE("zero base, q=m, p=1: the L1 gap is eps^m |cyl|") {
  const auto g = grid_1d(11, 11);  // |cyl| = 1
  const double m = 2.0;
  ObstacleConfig cfg;
  cfg.solver.m = m;
  const auto fam = build_eps_family(ScalarField::zeros(g), {0.1}, cfg);
  const auto rep = convergence_report(fam, m, 1.0, 0.5);
  CHECK(rep.rows[0].lp_gap ==
        doctest::Approx(std::pow(0.1, m) * 1.0).epsilon(1e-9));
}

TEST_CASE("pairing bound: closed-form rhs") {
  // unit cylinder, M=1, eps=0.1, m=2: rhs = 0.01*2 + 0.1*4 = 0.42
  const auto g = grid_1d(11, 11);
  const auto u = ScalarField::zeros(g);
  const auto res = oleinik_pairing(u, u, 0.1, 2.0, 1.0);
  CHECK(res.rhs == doctest::Approx(0.42).epsilon(1e-12));
  CHECK(res.pass);
}

TEST_CASE("pairing for zero data: lhs = eps^(m+1) |cyl|") {
  const auto g = grid_1d(21, 21);
  const double eps = 0.25;
  const double m = 2.0;
  SolverConfig cfg;
  cfg.m = m;
  auto [ueps, u] = oleinik_solve_pair(ScalarField::zeros(g), eps, cfg);
  CHECK(u.sup() == 0.0);
  CHECK(ueps.sup() == eps);
  CHECK(ueps.min() == eps);
  const auto res = oleinik_pairing(ueps, u, eps, m, 0.0);
  CHECK(res.lhs == doctest::Approx(std::pow(eps, m + 1.0)).epsilon(1e-12));
  CHECK(res.pass);
}

TEST_CASE("pairing bound holds for solved pairs") {
  const auto g = grid_1d(41, 41, -1.0, 1.0, 0.2);
  const auto data = barenblatt_field(g, 2.0, 1.0, 0.3);
  SolverConfig cfg;
  for (double eps : {0.4, 0.2, 0.1, 0.05}) {
    const auto res = oleinik_bound_check(data, eps, data.sup(), cfg);
    CHECK(res.pass);
    CHECK(res.lhs >= 0.0);
    CHECK(res.lhs < res.rhs);
  }
  CHECK_THROWS_AS(oleinik_bound_check(data, 0.1, 0.5 * data.sup(), cfg),
                  DomainError);
}

TEST_CASE("power-gap inequality holds nodewise for solved pairs") {
  const auto g = grid_1d(31, 31);
  const auto data = ScalarField::from_function(
      g, [](std::span<const double> x, double t) {
        return 0.5 + 0.4 * std::sin(3.0 * x[0]) * std::sin(3.0 * x[0]) +
               0.1 * t;
      });
  for (double m : {2.0, 2.5, 3.0}) {
    SolverConfig cfg;
    cfg.m = m;
    auto [ueps, u] = oleinik_solve_pair(data, 0.2, cfg);
    const auto a = ueps.values();
    const auto b = u.values();
    for (size_t i = 0; i < a.size(); ++i) {
      const double lhs = std::pow(std::abs(a[i] - b[i]), m + 1.0);
      const double rhs =
          (a[i] - b[i]) * (std::pow(a[i], m) - std::pow(b[i], m));
      CHECK(lhs <= rhs);
    }
  }
}

TEST_CASE("elementary power-gap inequality on random pairs") {
  std::mt19937 rng(2718);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  for (double m : {1.5, 2.0, 2.7}) {
    for (int trial = 0; trial < 200; ++trial) {
      const double a = unif(rng);
      const double b = (trial % 7 == 0) ? a : unif(rng);
      const double lhs = std::pow(std::abs(a - b), m + 1.0);
      const double rhs = (a - b) * (std::pow(a, m) - std::pow(b, m));
      CHECK(lhs <= rhs + 1e-15);
    }
  }
}

}  // TEST_SUITE

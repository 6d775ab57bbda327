#include <doctest.h>

#include <cmath>

#include "pmeobst/harnack.hpp"
#include "pmeobst/solver.hpp"
#include "pmeobst/verify.hpp"

using namespace pmeobst;

namespace {

SpaceTimeGrid harnack_grid(int n_space = 101, int n_time = 2001) {
  return SpaceTimeGrid::create({{-2.0, 2.0}}, {n_space}, n_time, 0.5);
}

}  // namespace

TEST_SUITE("harnack") {

TEST_CASE("constants satisfy the inequality with C2 = 1") {
  const auto g = harnack_grid();
  const auto u = ScalarField::constant(g, 2.0);
  HarnackGeometry geom{{0.0}, 0.2, 0.25};
  const auto q = harnack_quantities(u, geom, 1.0, 2.0);
  CHECK(q.avg == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(q.essinf == 2.0);
  CHECK(q.inequality_holds(1.0, 1.0));
  CHECK(q.inequality_holds(0.03125, 1.0));
}

TEST_CASE("zero fields satisfy the inequality trivially") {
  const auto g = harnack_grid();
  const auto u = ScalarField::zeros(g);
  HarnackGeometry geom{{0.0}, 0.1, 0.25};
  const auto q = harnack_quantities(u, geom, 1.0, 2.0);
  CHECK(q.avg == 0.0);
  CHECK(q.tau_wait == doctest::Approx(0.25));  // capped by the horizon
  CHECK(q.inequality_holds(0.03125, 0.03125));
}

TEST_CASE("geometry violations raise errors") {
  const auto g = harnack_grid();
  const auto u = ScalarField::constant(g, 1.0);
  // 8 rho escapes the domain
  CHECK_THROWS_AS(
      harnack_quantities(u, HarnackGeometry{{0.0}, 0.3, 0.25}, 1.0, 2.0),
      GeometryError);
  // t0 at the boundary
  CHECK_THROWS_AS(
      harnack_quantities(u, HarnackGeometry{{0.0}, 0.1, 0.0}, 1.0, 2.0),
      GeometryError);
}

TEST_CASE("coarse time grids cannot resolve tiny waiting windows") {
  const auto g = SpaceTimeGrid::create({{-2.0, 2.0}}, {101}, 11, 0.5);
  const auto u = ScalarField::constant(g, 2.0);
  HarnackGeometry geom{{0.0}, 0.05, 0.25};
  // tau = C1 rho^2 / avg = 1e-4 * C1; window misses every level
  CHECK_THROWS_AS(harnack_quantities(u, geom, 0.03125, 2.0), GeometryError);
}

TEST_CASE("closed-form field passes with moderate constants") {
  const auto g = harnack_grid(201, 2001);
  const auto u = barenblatt_field(g, 2.0, 0.5, 0.7);
  CHECK(u.min() > 0.0);  // support covers the domain
  HarnackGeometry geom{{0.0}, 0.1, 0.25};
  const auto q = harnack_quantities(u, geom, 1.0, 2.0);
  CHECK(q.avg > 0.0);
  CHECK(q.essinf > 0.0);
  CHECK(q.inequality_holds(1.0, 2.0));
}

TEST_CASE("all-constant fit lands on the lattice floor") {
  const auto g = harnack_grid(101, 4001);
  const auto u1 = ScalarField::constant(g, 0.5);
  const auto u2 = ScalarField::constant(g, 1.0);
  const auto u3 = ScalarField::constant(g, 2.0);
  std::vector<HarnackCase> cases{
      {&u1, {{0.0}, 0.2, 0.25}, "c05"},
      {&u2, {{0.0}, 0.2, 0.25}, "c10"},
      {&u3, {{0.0}, 0.2, 0.25}, "c20"},
  };
  const auto fit = fit_constants(cases, 2.0);
  CHECK(fit.feasible);
  CHECK(fit.c1 == doctest::Approx(std::pow(2.0, -5.0)));
  CHECK(fit.c2 == doctest::Approx(1.0));
}

TEST_CASE("fit requires at least three cases") {
  const auto g = harnack_grid();
  const auto u = ScalarField::constant(g, 1.0);
  std::vector<HarnackCase> cases{{&u, {{0.0}, 0.2, 0.25}, "only"}};
  CHECK_THROWS_AS(fit_constants(cases, 2.0), ConfigError);
}

TEST_CASE("fit rejects fields failing the supersolution precheck") {
  const auto g = SpaceTimeGrid::create({{0.0, 1.0}}, {31}, 31, 1.0);
  auto u = solve_box(ScalarField::constant(g, 1.0),
                     SpaceTimeBox::full_cylinder(g), {});
  for (long f = 13; f <= 17; ++f) {
    for (int k = 14; k <= 16; ++k) u.set(f, k, 0.55);
  }
  REQUIRE_FALSE(certify_supersolution(u, 2.0).pass);
  std::vector<HarnackCase> cases{{&u, {{0.5}, 0.05, 0.4}, "a"},
                                 {&u, {{0.5}, 0.05, 0.5}, "b"},
                                 {&u, {{0.5}, 0.05, 0.6}, "c"}};
  CHECK_THROWS_AS(fit_constants(cases, 2.0), DomainError);
}

TEST_CASE("enlarging C1 never shrinks the feasible C2 set (constants)") {
  const auto g = harnack_grid(101, 4001);
  const auto u = ScalarField::constant(g, 1.5);
  HarnackGeometry geom{{0.3}, 0.2, 0.3};
  const auto lattice = harnack_lattice();
  for (size_t i = 0; i + 1 < lattice.size(); ++i) {
    const auto qa = harnack_quantities(u, geom, lattice[i], 2.0);
    const auto qb = harnack_quantities(u, geom, lattice[i + 1], 2.0);
    for (double c2 : lattice) {
      if (qa.inequality_holds(lattice[i], c2)) {
        CHECK(qb.inequality_holds(lattice[i + 1], c2));
      }
    }
  }
}

TEST_CASE("fitted constants are stable across rho (small closed-form case)") {
  const auto g = harnack_grid(201, 4001);
  const auto u = barenblatt_field(g, 2.0, 0.5, 0.7);
  auto fit_at = [&](double rho) {
    std::vector<HarnackCase> cases;
    for (double t0 : {0.2, 0.25, 0.3}) {
      cases.push_back({&u, {{0.0}, rho, t0}, "t" + std::to_string(t0)});
    }
    return fit_constants(cases, 2.0);
  };
  const auto f1 = fit_at(0.1);
  const auto f2 = fit_at(0.2);
  REQUIRE(f1.feasible);
  REQUIRE(f2.feasible);
  CHECK(std::abs(std::log2(f1.c2 / f2.c2)) <= 0.5 + 1e-12);
}

}  // TEST_SUITE

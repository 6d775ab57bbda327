#include <doctest.h>

#include <cmath>

#include "pmeobst/verify.hpp"

using namespace pmeobst;

namespace {

SpaceTimeGrid grid_1d(int n_space, int n_time, double lo = 0.0,
                      double hi = 1.0, double T = 1.0) {
  return SpaceTimeGrid::create({{lo, hi}}, {n_space}, n_time, T);
}

RunConfig bump_case(const char* name = "bump_case") {
  nlohmann::json doc{
      {"name", name},
      {"grid",
       {{"domain", {{0.0, 1.0}}}, {"n_space", {25}}, {"n_time", 25}, {"T", 1.0}}},
      {"solver", {{"m", 2.0}}},
      {"obstacle",
       {{"type", "indicator"},
        {"value", 0.8},
        {"t_from", 0.4},
        {"box", {{0.4, 0.6}}}}}};
  return parse_run_config(doc, ".");
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("constants certify as supersolutions") {
  const auto g = grid_1d(21, 21);
  const auto rep = certify_supersolution(ScalarField::constant(g, 2.0), 2.0);
  CHECK(rep.pass);
  CHECK(rep.bumps > 0);
  // pure quadrature noise, far below the calibrated tolerance
  CHECK(std::abs(rep.worst.residual) < 1e-3 * rep.worst.tol);
}

TEST_CASE("obstacle solutions certify as supersolutions") {
  const auto g = grid_1d(31, 31);
  const auto psi = Obstacle::from_function(
      [](std::span<const double> x, double t) {
        const double sx = (x[0] - 0.5) / 0.3;
        const double st = (t - 0.4) / 0.3;
        const double q = (1.0 - sx * sx) * (1.0 - st * st);
        return (sx * sx < 1.0 && st * st < 1.0) ? 0.7 * q : 0.0;
      },
      0.7, Regularity::kContinuous);
  const auto res = solve_obstacle_continuous(psi, g, {});
  const auto rep = certify_supersolution(res.u, 2.0);
  CHECK(rep.pass);
}

TEST_CASE("an interior dent breaks the supersolution certificate") {
  const auto g = grid_1d(31, 31);
  auto u = solve_box(ScalarField::constant(g, 1.0),
                     SpaceTimeBox::full_cylinder(g), {});
  // carve a dent over a few interior nodes mid-time
  for (long f = 13; f <= 17; ++f) {
    for (int k = 14; k <= 16; ++k) {
      u.set(f, k, 0.55);
    }
  }
  const auto rep = certify_supersolution(u, 2.0);
  CHECK_FALSE(rep.pass);
  CHECK(rep.worst.residual < 0.0);
  // the worst bump sits near the dent
  CHECK(std::abs(rep.worst.center0 - 0.5) < 0.35);
}

TEST_CASE("constants certify as subsolutions on the full mask") {
  const auto g = grid_1d(21, 21);
  const auto rep =
      certify_subsolution(ScalarField::constant(g, 1.5), 2.0, 3, nullptr);
  CHECK(rep.pass);
}

TEST_CASE("strict supersolutions fail the subsolution certificate") {
  const auto g = grid_1d(41, 41);
  // a static ridge is strictly supercaloric near its crest
  const auto u = ScalarField::from_function(
      g, [](std::span<const double> x, double) {
        const double s = (x[0] - 0.5) / 0.3;
        const double q = 1.0 - s * s;
        return 1.0 + (q > 0.0 ? 4.0 * q * q * q : 0.0);
      });
  auto mask = [&](long f, int) {
    return std::abs(g.coord(0, f) - 0.5) < 0.12;
  };
  const auto rep = certify_subsolution(u, 2.0, 3, mask);
  CHECK(rep.bumps > 0);
  CHECK_FALSE(rep.pass);
  CHECK(rep.worst.residual > rep.worst.tol);
}

TEST_CASE("certification reports are deterministic") {
  const auto g = grid_1d(21, 17);
  const auto u = solve_box(ScalarField::constant(g, 1.0),
                           SpaceTimeBox::full_cylinder(g), {});
  const auto a = certify_supersolution(u, 2.0);
  const auto b = certify_supersolution(u, 2.0);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].residual == b.rows[i].residual);
    CHECK(a.rows[i].tol == b.rows[i].tol);
  }
}

TEST_CASE("run_suite: empty case list yields no verdicts") {
  const auto v = run_suite({}, {"all"});
  CHECK(v.rows.empty());
  CHECK(v.all_pass);
}

TEST_CASE("run_suite rejects unknown suite ids") {
  CHECK_THROWS_AS(run_suite({}, {"L99.9"}), ConfigError);
}

TEST_CASE("recorded traces pass the monotonicity suite") {
  const auto rc = bump_case();
  const auto v = run_suite({rc}, {"L3.2.i", "L3.2.ii", "L3.3.i"});
  REQUIRE(v.rows.size() == 3);
  for (const auto& row : v.rows) {
    CHECK(row.status == VerdictStatus::kPass);
  }
}

TEST_CASE("suite verdict json carries one row per case and suite") {
  const auto rc = bump_case("json_case");
  const auto v = run_suite({rc}, {"L3.2.i"});
  const auto j = v.to_json();
  CHECK(j.at("verdicts").size() == 1);
  CHECK(j.at("verdicts")[0].at("case") == "json_case");
  CHECK(j.at("all_pass").get<bool>());
}

}  // TEST_SUITE

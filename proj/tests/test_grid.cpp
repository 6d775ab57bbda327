#include <doctest.h>

#include <set>

#include "pmeobst/grid.hpp"

using namespace pmeobst;

namespace {

SpaceTimeGrid grid_1d(int n_space, int n_time, double lo = 0.0,
                      double hi = 1.0, double T = 1.0) {
  return SpaceTimeGrid::create({{lo, hi}}, {n_space}, n_time, T);
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("build_grid spacing fields") {
  const auto g = grid_1d(11, 11);
  CHECK(g.h(0) == 0.1);
  CHECK(g.tau() == 0.1);
  CHECK(g.n_space_total() == 11);
  CHECK(g.n_nodes() == 121);

  const auto g2 = SpaceTimeGrid::create({{-1.0, 1.0}}, {21}, 6, 0.5);
  CHECK(g2.h(0) == 0.1);
  CHECK(g2.tau() == 0.1);
  CHECK(g2.coord(0, 0) == -1.0);
  CHECK(g2.coord(0, 20) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("build_grid rejects degenerate input") {
  CHECK_THROWS_WITH_AS(grid_1d(2, 11),
                       doctest::Contains("insufficient spatial resolution"),
                       ConfigError);
  CHECK_THROWS_AS(grid_1d(11, 1), ConfigError);
  CHECK_THROWS_AS(SpaceTimeGrid::create({{1.0, 1.0}}, {11}, 11, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(SpaceTimeGrid::create({{0.0, 1.0}}, {11}, 11, 0.0),
                  ConfigError);
}

TEST_CASE("node coordinates reproducible from indices") {
  const auto g = SpaceTimeGrid::create({{-0.3, 0.7}}, {41}, 17, 2.0);
  for (int i = 0; i < 41; ++i) {
    CHECK(g.coord(0, i) == -0.3 + i * g.h(0));
  }
  for (int k = 0; k < 17; ++k) {
    CHECK(g.time(k) == k * g.tau());
  }
}

TEST_CASE("parabolic boundary of a 1d box") {
  const auto g = grid_1d(11, 11);
  SpaceTimeBox box;
  box.dim = 1;
  box.lo = {2, 0};
  box.hi = {8, 0};
  box.t_start = 3;
  const auto pb = parabolic_boundary(box, g);

  std::set<std::pair<long, int>> lateral;
  for (const auto& n : pb.lateral) lateral.insert({n.space, n.k});
  std::set<std::pair<long, int>> expected_lateral;
  for (int k = 4; k <= 10; ++k) {
    expected_lateral.insert({2, k});
    expected_lateral.insert({8, k});
  }
  CHECK(lateral == expected_lateral);

  std::set<std::pair<long, int>> initial;
  for (const auto& n : pb.initial) initial.insert({n.space, n.k});
  std::set<std::pair<long, int>> expected_initial;
  for (long i = 2; i <= 8; ++i) expected_initial.insert({i, 3});
  CHECK(initial == expected_initial);

  // interior nodes of the box are in neither set
  for (long i = 3; i <= 7; ++i) {
    for (int k = 4; k <= 10; ++k) {
      CHECK(lateral.count({i, k}) == 0);
      CHECK(initial.count({i, k}) == 0);
    }
  }
}

TEST_CASE("parabolic boundary spans the initial level for full-time boxes") {
  const auto g = grid_1d(11, 11);
  SpaceTimeBox box;
  box.dim = 1;
  box.lo = {1, 0};
  box.hi = {9, 0};
  box.t_start = 0;
  const auto pb = parabolic_boundary(box, g);
  for (const auto& n : pb.initial) CHECK(n.k == 0);
  CHECK(pb.initial.size() == 9);
}

TEST_CASE("full-cylinder parabolic boundary is walls plus initial slice") {
  const auto g = grid_1d(11, 6);
  const auto box = SpaceTimeBox::full_cylinder(g);
  CHECK(box.touches_lateral_boundary(g));
  const auto pb = parabolic_boundary(box, g);
  CHECK(pb.initial.size() == 11);
  CHECK(pb.lateral.size() == 2 * 5);
  for (const auto& n : pb.lateral) {
    CHECK((n.space == 0 || n.space == 10));
    CHECK(n.k >= 1);
  }
}

TEST_CASE("2d lateral cardinality matches the enumeration oracle") {
  const auto g =
      SpaceTimeGrid::create({{0.0, 1.0}, {0.0, 1.0}}, {11, 11}, 11, 1.0);
  SpaceTimeBox box;
  box.dim = 2;
  box.lo = {2, 3};
  box.hi = {5, 6};
  box.t_start = 2;
  const auto pb = parabolic_boundary(box, g);

  // oracle: brute-force scan of the closed box for perimeter nodes
  long perimeter = 0;
  for (int j = 3; j <= 6; ++j) {
    for (int i = 2; i <= 5; ++i) {
      if (i == 2 || i == 5 || j == 3 || j == 6) ++perimeter;
    }
  }
  CHECK(perimeter == 12);
  CHECK(pb.lateral.size() == static_cast<size_t>(perimeter) * (10 - 2));
  CHECK(pb.initial.size() == 16);
}

TEST_CASE("box exceeding the grid raises a geometry error") {
  const auto g = grid_1d(11, 11);
  SpaceTimeBox box;
  box.dim = 1;
  box.lo = {2, 0};
  box.hi = {12, 0};
  box.t_start = 0;
  CHECK_THROWS_AS(parabolic_boundary(box, g), GeometryError);
}

TEST_CASE("enumeration level 0 is the full interior box") {
  const auto g = grid_1d(11, 11);
  const auto boxes = enumerate_boxes(g, 0);
  REQUIRE(boxes.size() == 1);
  CHECK(boxes[0].box.lo[0] == 1);
  CHECK(boxes[0].box.hi[0] == 9);
  CHECK(boxes[0].box.t_start == 0);
  CHECK(boxes[0].box.is_spatially_interior(g));
}

TEST_CASE("enumeration level 1 halves extents and start times") {
  const auto g = grid_1d(11, 11);
  const auto boxes = enumerate_boxes(g, 1);
  REQUIRE(boxes.size() == 7);  // level-0 box + 3 spatial halves x 2 starts
  CHECK(boxes[0].level == 0);
  std::set<int> starts;
  std::set<std::pair<int, int>> spans;
  for (size_t i = 1; i < boxes.size(); ++i) {
    CHECK(boxes[i].level == 1);
    starts.insert(boxes[i].box.t_start);
    spans.insert({boxes[i].box.lo[0], boxes[i].box.hi[0]});
  }
  CHECK(starts == std::set<int>{0, 5});
  CHECK(spans == std::set<std::pair<int, int>>{{1, 5}, {3, 7}, {5, 9}});

  // every strictly interior node with t past the midpoint is inside a
  // late-start level-1 box
  for (int i = 2; i <= 8; ++i) {
    bool covered = false;
    for (size_t b = 1; b < boxes.size(); ++b) {
      const auto& bx = boxes[b].box;
      if (bx.t_start < 5) continue;
      if (i > bx.lo[0] && i < bx.hi[0]) covered = true;
    }
    CHECK(covered);
  }
}

TEST_CASE("enumeration is deterministic and prefix-extending") {
  const auto g = grid_1d(41, 41);
  const auto a = enumerate_boxes(g, 3);
  const auto b = enumerate_boxes(g, 3);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].box == b[i].box);
    CHECK(a[i].level == b[i].level);
  }
  const auto shorter = enumerate_boxes(g, 2);
  REQUIRE(shorter.size() <= a.size());
  for (size_t i = 0; i < shorter.size(); ++i) {
    CHECK(shorter[i].box == a[i].box);
  }
}

TEST_CASE("enumerated boxes are interior and land inside the grid") {
  const auto g =
      SpaceTimeGrid::create({{0.0, 1.0}, {-1.0, 1.0}}, {13, 17}, 9, 1.0);
  const auto boxes = enumerate_boxes(g, enumeration_depth(g));
  CHECK(boxes.size() > 1);
  for (const auto& eb : boxes) {
    CHECK(eb.box.is_spatially_interior(g));
    CHECK(eb.box.t_start <= g.n_time() - 2);
    CHECK(eb.box.interior_spatial_count() >= 1);
  }
}

TEST_CASE("every interior node of the level-0 box is eventually covered") {
  const auto g = grid_1d(19, 9);
  const auto boxes = enumerate_boxes(g, enumeration_depth(g));
  // density relative to the enumerated interior family: nodes strictly
  // inside the level-0 box and any t > 0 level
  for (int i = 2; i <= 16; ++i) {
    for (int k = 1; k <= 8; ++k) {
      bool covered = false;
      for (const auto& eb : boxes) {
        if (i > eb.box.lo[0] && i < eb.box.hi[0] && k > eb.box.t_start) {
          covered = true;
          break;
        }
      }
      CHECK_MESSAGE(covered, "node (", i, ",", k, ") uncovered");
    }
  }
}

TEST_CASE("reversed order reverses within each level block") {
  const auto g = grid_1d(21, 21);
  const auto lex = enumerate_boxes(g, 2, BoxOrder::kLexicographic);
  const auto rev = enumerate_boxes(g, 2, BoxOrder::kReversedWithinLevel);
  REQUIRE(lex.size() == rev.size());
  std::multiset<int> lex_levels, rev_levels;
  for (size_t i = 0; i < lex.size(); ++i) {
    lex_levels.insert(lex[i].level);
    rev_levels.insert(rev[i].level);
  }
  CHECK(lex_levels == rev_levels);
  // same boxes per level, reversed order
  for (int lvl = 0; lvl <= 2; ++lvl) {
    std::vector<SpaceTimeBox> a, b;
    for (const auto& eb : lex) {
      if (eb.level == lvl) a.push_back(eb.box);
    }
    for (const auto& eb : rev) {
      if (eb.level == lvl) b.push_back(eb.box);
    }
    std::reverse(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("deep levels stop adding boxes") {
  const auto g = grid_1d(9, 5);
  const int depth = enumeration_depth(g);
  const auto at_depth = enumerate_boxes(g, depth);
  const auto beyond = enumerate_boxes(g, depth + 2);
  CHECK(at_depth.size() == beyond.size());
}

}  // TEST_SUITE

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pmeobst/io.hpp"
#include "pmeobst/solver.hpp"

using namespace pmeobst;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
  const auto dir = fs::temp_directory_path() /
                   (std::string("pmeobst_test_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("doubles round-trip through the shortest representation") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double v = std::ldexp(unif(rng), static_cast<int>(rng() % 64) - 32);
    const auto s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("field csv round-trips bit-exactly") {
  const auto g = SpaceTimeGrid::create({{-1.0, 2.0}}, {13}, 9, 0.7);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> unif(0.0, 5.0);
  auto f = ScalarField::zeros(g);
  {
    auto v = f.mutable_values();
    for (auto& x : v) x = unif(rng);
  }
  const auto dir = temp_dir("roundtrip");
  write_field_csv(f, dir / "field.csv");
  write_meta_json(f, dir / "meta.json", "cafebabe");
  const auto back = read_field_csv(dir / "field.csv");
  CHECK(back.grid() == g);
  const auto a = f.values();
  const auto b = back.values();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("config hash is stable and content-sensitive") {
  CHECK(fnv1a_hex("abc") == fnv1a_hex("abc"));
  CHECK(fnv1a_hex("abc") != fnv1a_hex("abd"));
  CHECK(fnv1a_hex("").size() == 16);
}

TEST_CASE("grid json round-trip") {
  const auto g =
      SpaceTimeGrid::create({{0.0, 1.0}, {-2.0, 2.0}}, {11, 21}, 7, 0.25);
  const auto back = grid_from_json(grid_to_json(g));
  CHECK(back == g);
}

TEST_CASE("box csv layout") {
  const auto g = SpaceTimeGrid::create({{0.0, 1.0}}, {11}, 11, 1.0);
  const auto boxes = enumerate_boxes(g, 0);
  const auto dir = temp_dir("boxes");
  write_boxes_csv(boxes, 1, dir / "boxes.csv");
  const auto text = slurp(dir / "boxes.csv");
  CHECK(text == "level,box_id,lo0,hi0,t_start_index\n0,0,1,9,0\n");
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("barenblatt subcommand emits the closed form") {
  const auto dir = temp_dir("cli_bb");
  std::ostringstream cmd;
  cmd << PMEOBST_CLI_PATH
      << " barenblatt --domain -1,1 --n-space 21 --n-time 6 --T 0.5"
      << " --m 2 --n 1 --C 1 --t-offset 0.5 --out " << dir.string();
  REQUIRE(std::system(cmd.str().c_str()) == 0);
  const auto text = slurp(dir / "field.csv");
  // the final level is evaluated at t = 1: the center value is exactly 1
  CHECK(text.find("\n0,1,1\n") != std::string::npos);
}

TEST_CASE("unknown flags exit with the usage code") {
  std::ostringstream cmd;
  cmd << PMEOBST_CLI_PATH << " barenblatt --definitely-not-a-flag 2>/dev/null";
  const int rc = std::system(cmd.str().c_str());
  CHECK(WEXITSTATUS(rc) == 2);
}

TEST_CASE("solve-obstacle on a constant config reports one sweep") {
  const auto dir = temp_dir("cli_so");
  {
    std::ofstream cfg(dir / "case.json");
    cfg << R"({"name": "constant",
               "grid": {"domain": [[0,1]], "n_space": [21], "n_time": 21, "T": 1.0},
               "solver": {"m": 2.0},
               "obstacle": {"type": "constant", "value": 3.0}})";
  }
  std::ostringstream cmd;
  cmd << PMEOBST_CLI_PATH << " solve-obstacle --config "
      << (dir / "case.json").string() << " --out " << (dir / "out").string()
      << " > " << (dir / "stdout.txt").string();
  REQUIRE(std::system(cmd.str().c_str()) == 0);
  const auto summary = slurp(dir / "stdout.txt");
  CHECK(summary.find("u in [3, 3]") != std::string::npos);
  CHECK(summary.find("sweeps=1") != std::string::npos);
  CHECK(fs::exists(dir / "out/field.csv"));
  CHECK(fs::exists(dir / "out/trace.csv"));
  CHECK(fs::exists(dir / "out/meta.json"));
  CHECK(fs::exists(dir / "out/report.json"));
}

TEST_CASE("identical configs produce byte-identical outputs") {
  const auto dir = temp_dir("cli_det");
  {
    std::ofstream cfg(dir / "case.json");
    cfg << R"({"name": "det",
               "grid": {"domain": [[0,1]], "n_space": [17], "n_time": 13, "T": 1.0},
               "solver": {"m": 2.0},
               "obstacle": {"type": "indicator", "value": 0.6,
                            "t_from": 0.5, "box": [[0.4, 0.7]]}})";
  }
  for (const char* out : {"out1", "out2"}) {
    std::ostringstream cmd;
    cmd << PMEOBST_CLI_PATH << " solve-obstacle --config "
        << (dir / "case.json").string() << " --out " << (dir / out).string()
        << " > /dev/null";
    REQUIRE(std::system(cmd.str().c_str()) == 0);
  }
  for (const char* name : {"field.csv", "trace.csv", "meta.json",
                           "report.json"}) {
    CHECK(slurp(dir / "out1" / name) == slurp(dir / "out2" / name));
  }
}

}  // TEST_SUITE

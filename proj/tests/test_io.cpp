#include <doctest.h>

#include "pbt/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <stdexcept>

using namespace pbt;
using namespace pbt::io;

namespace {

std::filesystem::path scenario_dir() {
  const char* dir = std::getenv("PBT_SCENARIO_DIR");
  return dir ? dir : "scenarios";
}

}  // namespace

TEST_CASE("default chain") {
  const auto spec = default_chain();
  REQUIRE(spec.size() == 2);
  CHECK(spec.units[0].l == 0.16);
  CHECK(spec.units[1].l == 0.10);
  CHECK(spec.units[0].t == 0.05);
  CHECK(spec.units[1].t == 0.04);
}

TEST_CASE("shipped scenarios load") {
  for (const char* name : {"freespace.json", "tunnel.json", "cluttered.json"}) {
    CAPTURE(name);
    const auto s = load_scenario(scenario_dir() / name);
    CHECK_FALSE(s.description.empty());
    CHECK(s.chain.units[0].l == 0.16);
    CHECK(s.chain.units[1].t == 0.04);
  }
  const auto tunnel = load_scenario(scenario_dir() / "tunnel.json");
  CHECK(tunnel.obstacles.size() == 3);
  CHECK(tunnel.analysis.n == 30000);
  const auto clutter = load_scenario(scenario_dir() / "cluttered.json");
  CHECK(clutter.region_of_interest.has_value());
  const auto chain = chain_from_json(read_json_file(scenario_dir() / "default_chain.json"));
  CHECK(chain.units[0].link_radius == 0.02);
}

TEST_CASE("scenario JSON round trips") {
  auto s = load_scenario(scenario_dir() / "cluttered.json");
  s.obstacles.push_back(Sphere{{0.1, 0.2, 0.3}, 0.05});
  s.obstacles.push_back(ConvexHull({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  s.chain.base_pose = pose_from_xyz_rpy({0.1, -0.2, 0.3}, {0.1, 0.2, 0.3});
  s.analysis.conv = BendConvention::ExcludeProximal;
  const json j = scenario_to_json(s);
  const auto back = scenario_from_json(j);
  auto again = scenario_to_json(back);
  CHECK(back.chain.base_pose.isApprox(s.chain.base_pose, 1e-12));
  // The pose goes through a matrix and back, so compare it numerically.
  for (int k = 0; k < 3; ++k)
    CHECK(again["chain"]["base_pose"]["rpy"][k].get<double>() ==
          doctest::Approx(j["chain"]["base_pose"]["rpy"][k].get<double>()).epsilon(1e-12));
  again["chain"]["base_pose"]["rpy"] = j["chain"]["base_pose"]["rpy"];
  CHECK(again == j);
  CHECK(back.obstacles.size() == s.obstacles.size());
  CHECK(back.analysis.conv == BendConvention::ExcludeProximal);
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(scenario_from_json(json::parse(R"({"bogus": 1})")), std::invalid_argument);
  CHECK_THROWS_AS(obstacle_from_json(json::parse(R"({"type": "cone"})")), std::invalid_argument);
  CHECK_THROWS_AS(obstacle_from_json(json::parse(R"({"type": "sphere", "center": [0,0], "radius": 1})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(obstacle_from_json(json::parse(R"({"type": "sphere", "center": [0,0,0], "radius": -1})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(chain_from_json(json::parse(R"({"units": [{"size": "huge"}]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(chain_from_json(json::parse(R"({"units": [{"l": 0.1}]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(chain_from_json(json::parse(R"({"units": []})")), std::invalid_argument);
  CHECK_THROWS_AS(scenario_from_json(json::parse(R"({"analysis": {"n": 0}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), std::invalid_argument);
}

TEST_CASE("number formatting") {
  CHECK(fmt9(0.1) == "0.1");
  CHECK(fmt9(-0.0) == "0");
  CHECK(fmt9(1.0 / 3.0) == "0.333333333");
  CHECK(fmt9(123456789012.0) == "1.23456789e+11");
}

TEST_CASE("sample CSV") {
  const auto spec = default_chain();
  const auto set = sample_workspace(spec, parse_modes("BP"), 50, 1, {},
                                    BendConvention::IncludeProximal);
  std::ostringstream a, b;
  write_samples_csv(a, set);
  write_samples_csv(b, set);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("x,y,z,sigma,mode,phi1,theta1,phi2,theta2\n", 0) == 0);

  std::istringstream in(a.str());
  const auto pts = read_sample_positions_csv(in);
  REQUIRE(pts.size() == 50);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK((pts[i] - set.samples[i].position).norm() < 1e-8);

  std::istringstream bad("x,y,z\n1,2\n");
  CHECK_THROWS_AS(read_sample_positions_csv(bad), std::invalid_argument);
}

TEST_CASE("report JSON") {
  const auto cat = catalog_to_json();
  REQUIRE(cat.size() == 3);
  CHECK(cat[0]["link1_length"] == 0.16);

  const auto spec = default_chain();
  IkQuery q;
  q.target = {0, 0, 0.45};
  const auto rep = solve(spec, q);
  const auto j = solve_report_to_json(rep);
  CHECK(j["ok"] == true);
  CHECK(j["mode"] == "PB");

  const auto cmp = compare_modes(spec, {}, 500, 0, 0.02);
  const auto cj = compare_to_json(cmp);
  CHECK(cj["modes"].size() == 4);
  CHECK(cj.dump() == compare_to_json(compare_modes(spec, {}, 500, 0, 0.02)).dump());
}

TEST_CASE("write failures raise IoError") {
  CHECK_THROWS_AS(write_file("/nonexistent/dir/out.csv", "x"), IoError);
}

#include <doctest.h>

#include "oracles.hpp"
#include "pbt/geometry.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace pbt;
using pbt::testing::two_unit_chain;

namespace {

Point3 random_point(std::mt19937_64& rng, double lo, double hi) {
  return {testing::uniform(rng, lo, hi), testing::uniform(rng, lo, hi),
          testing::uniform(rng, lo, hi)};
}

AxisBox random_box(std::mt19937_64& rng) {
  const Point3 c = random_point(rng, -0.5, 0.5);
  const Point3 h = random_point(rng, 0.02, 0.3);
  return {c - h, c + h};
}

ConvexHull cube_hull(const AxisBox& b) {
  std::vector<Point3> v;
  for (int i = 0; i < 8; ++i)
    v.emplace_back(i & 1 ? b.max.x() : b.min.x(), i & 2 ? b.max.y() : b.min.y(),
                   i & 4 ? b.max.z() : b.min.z());
  return ConvexHull(v);
}

}  // namespace

TEST_CASE("point clearance") {
  CHECK(clearance_point(Sphere{{0, 0, 0}, 0.1}, {0.3, 0, 0}) == doctest::Approx(0.2));
  const AxisBox unit{{0, 0, 0}, {1, 1, 1}};
  CHECK(clearance_point(unit, {0.5, 0.5, 0.5}) == doctest::Approx(-0.5));
  CHECK(std::abs(clearance_point(unit, {2, 2, 1}) - 1.4142135623730951) < 1e-15);
  CHECK(clearance_point(unit, {1, 0.5, 0.5}) == 0.0);
}

TEST_CASE("obstacle validation") {
  CHECK_THROWS_AS(validate_obstacle(Sphere{{0, 0, 0}, 0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_obstacle(AxisBox{{1, 0, 0}, {0, 1, 1}}), std::invalid_argument);
  CHECK_NOTHROW(validate_obstacle(AxisBox{{0, 0, 0}, {1, 1, 1}}));
  CHECK_THROWS_AS(ConvexHull({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(ConvexHull({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}), std::invalid_argument);
}

TEST_CASE("hull of a cube matches the box distance") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 10; ++k) {
    const AxisBox box = random_box(rng);
    const ConvexHull hull = cube_hull(box);
    for (int i = 0; i < 200; ++i) {
      const Point3 p = random_point(rng, -1, 1);
      CHECK(std::abs(hull.signed_distance(p) - clearance_point(box, p)) < 1e-12);
    }
  }
}

TEST_CASE("hull of a tetrahedron") {
  const ConvexHull t({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.1, 0.1, 0.1}});
  CHECK(t.signed_distance({-1, 0, 0}) == doctest::Approx(1.0));
  CHECK(t.signed_distance({2, 0, 0}) == doctest::Approx(1.0));
  CHECK(t.signed_distance({0.1, 0.1, 0.1}) == doctest::Approx(-0.1));
  CHECK(t.signed_distance({1, 1, 1}) == doctest::Approx(2 / std::sqrt(3.0)));
}

TEST_CASE("capsule clearance against spheres") {
  const Capsule c{{0, 0, 0}, {0, 0, 0.5}, 0.05};
  CHECK(clearance_capsule(Sphere{{1, 1, 1}, 0.1}, c) == doctest::Approx(1.5 - 0.15));
  CHECK(clearance_capsule(Sphere{{0, 0, 0.25}, 0.1}, c) == doctest::Approx(-0.15));
}

TEST_CASE("capsule clearance against boxes matches dense sampling") {
  const AxisBox box{{0.2, -0.1, 0.3}, {0.5, 0.4, 0.6}};
  const Capsule oblique{{-0.3, -0.4, 0.0}, {0.9, 0.6, 0.2}, 0.01};
  const double dense = testing::dense_segment_clearance(box, oblique, 100000);
  CHECK(std::abs(clearance_capsule(box, oblique) - dense) < 1e-6);

  // Sampling only overestimates; a penetrating segment has a kink at its
  // minimum, so the sampled value is coarser there.
  const Capsule piercing{{-0.3, -0.4, 0.0}, {0.9, 0.6, 1.1}, 0.01};
  const double exact = clearance_capsule(box, piercing);
  const double sampled = testing::dense_segment_clearance(box, piercing, 100000);
  CHECK(exact <= sampled + 1e-12);
  CHECK(sampled - exact < 2e-5);

  std::mt19937_64 rng(43);
  for (int i = 0; i < 30; ++i) {
    const AxisBox b = random_box(rng);
    const Capsule c{random_point(rng, -1, 1), random_point(rng, -1, 1), 0.02};
    const double d = testing::dense_segment_clearance(b, c, 100000);
    CHECK(clearance_capsule(b, c) <= d + 1e-12);
    CHECK(d - clearance_capsule(b, c) < 2e-5);
    const ConvexHull h = cube_hull(b);
    CHECK(std::abs(clearance_capsule(h, c) - clearance_capsule(b, c)) < 1e-9);
  }
}

TEST_CASE("capsule clearance Lipschitz bound") {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 100; ++i) {
    const AxisBox b = random_box(rng);
    const Capsule c{random_point(rng, -1, 1), random_point(rng, -1, 1), 0.02};
    const Point3 mid = (c.a + c.b) / 2;
    CHECK(clearance_capsule(b, c) <=
          clearance_point(b, mid) - c.radius + (c.b - c.a).norm() / 2 + 1e-12);
  }
}

TEST_CASE("chain capsules") {
  const auto spec = two_unit_chain();
  const auto pp = chain_capsules(spec, ChainState::zeros(parse_modes("PP")),
                                 BendConvention::IncludeProximal);
  CHECK(pp.size() == 4);
  for (const auto& c : pp) {
    CHECK(std::hypot(c.a.x(), c.a.y()) < 1e-15);
    CHECK(std::hypot(c.b.x(), c.b.y()) < 1e-15);
  }
  CHECK(chain_capsules(spec, ChainState::zeros(parse_modes("BB")),
                       BendConvention::IncludeProximal)
            .size() == 6);

  for (const char* m : {"PP", "BB"}) {
    const auto caps = chain_capsules(spec, ChainState::zeros(parse_modes(m)),
                                     BendConvention::IncludeProximal);
    double lo = 1e9, hi = -1e9, total = 0;
    for (const auto& c : caps) {
      lo = std::min({lo, c.a.z(), c.b.z()});
      hi = std::max({hi, c.a.z(), c.b.z()});
      total += (c.b - c.a).norm();
    }
    CHECK(lo == doctest::Approx(0.0));
    CHECK(hi == doctest::Approx(0.61));
    CHECK(total == doctest::Approx(0.61));
  }

  // The last capsule ends at the end effector.
  std::mt19937_64 rng(53);
  for (int i = 0; i < 20; ++i) {
    const auto q = testing::random_state(rng, spec, parse_modes("BP"));
    const auto caps = chain_capsules(spec, q, BendConvention::IncludeProximal);
    CHECK((caps.back().b - fk_generic(spec, q, BendConvention::IncludeProximal).translation())
              .norm() < 1e-14);
  }
}

TEST_CASE("chain clearance") {
  const auto spec = two_unit_chain();
  const auto q = ChainState::from_flat(parse_modes("BB"), {0.3, 0.8, -0.5, -0.6});
  const auto conv = BendConvention::IncludeProximal;
  CHECK(chain_clearance(spec, q, {}, conv) == kClearanceSentinel);

  const Sphere far{{5, 5, 5}, 0.1};
  double single = 1e300;
  for (const auto& c : chain_capsules(spec, q, conv))
    single = std::min(single, clearance_capsule(far, c));
  CHECK(chain_clearance(spec, q, {far}, conv) == single);

  std::mt19937_64 rng(59);
  for (int k = 0; k < 20; ++k) {
    std::vector<ConvexObstacle> obs;
    for (int i = 0; i < 4; ++i) {
      if (i % 2)
        obs.emplace_back(random_box(rng));
      else
        obs.emplace_back(Sphere{random_point(rng, -0.6, 0.6), testing::uniform(rng, 0.02, 0.2)});
    }
    const auto s = testing::random_state(rng, spec, parse_modes("BB"));
    double brute = 1e300;
    for (const auto& c : chain_capsules(spec, s, conv))
      for (const auto& o : obs) brute = std::min(brute, clearance_capsule(o, c));
    CHECK(chain_clearance(spec, s, obs, conv) == brute);
  }
}

TEST_CASE("collision predicate") {
  auto spec = two_unit_chain();
  const auto conv = BendConvention::IncludeProximal;
  const auto q = ChainState::zeros(parse_modes("PP"));
  CHECK_FALSE(in_collision(spec, q, {}, conv));
  CHECK(in_collision(spec, q, {AxisBox{{-1, -1, -1}, {1, 1, 1}}}, conv));

  // Exact contact: capsule radius 0.125, sphere surface 0.125 from the axis.
  for (auto& u : spec.units) u.link_radius = 0.125;
  const Sphere touching{{1, 0, 0.25}, 0.875};
  CHECK(chain_clearance(spec, q, {touching}, conv) == 0.0);
  CHECK_FALSE(in_collision(spec, q, {touching}, conv));
}

TEST_CASE("clearance is invariant under a rigid motion of the whole scene") {
  auto spec = two_unit_chain();
  const auto conv = BendConvention::IncludeProximal;
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.rotate(Eigen::AngleAxisd(1.1, Eigen::Vector3d(0.2, -1, 0.4).normalized()));
  t.pretranslate(Eigen::Vector3d(0.5, 0.1, -0.3));

  std::mt19937_64 rng(61);
  for (int i = 0; i < 30; ++i) {
    const Sphere s{random_point(rng, -0.4, 0.4), testing::uniform(rng, 0.02, 0.1)};
    const AxisBox b = random_box(rng);
    const ConvexHull h = cube_hull(b);
    std::vector<Point3> moved_vertices;
    for (const auto& v : h.vertices()) moved_vertices.push_back(t * v);
    const auto q = testing::random_state(rng, spec, parse_modes("BB"));

    spec.base_pose = Eigen::Isometry3d::Identity();
    const double before_s = chain_clearance(spec, q, {s}, conv);
    const double before_h = chain_clearance(spec, q, {h}, conv);
    spec.base_pose = t;
    CHECK(std::abs(chain_clearance(spec, q, {Sphere{t * s.center, s.radius}}, conv) - before_s) <
          1e-12);
    CHECK(std::abs(chain_clearance(spec, q, {ConvexHull(moved_vertices)}, conv) - before_h) <
          1e-9);
  }
}

TEST_CASE("growing an obstacle never clears a collision") {
  const auto spec = two_unit_chain();
  const auto conv = BendConvention::IncludeProximal;
  std::mt19937_64 rng(67);
  for (int i = 0; i < 200; ++i) {
    const auto q = testing::random_state(rng, spec, parse_modes("BB"));
    AxisBox b = random_box(rng);
    Sphere s{random_point(rng, -0.4, 0.4), testing::uniform(rng, 0.01, 0.2)};
    bool hit_b = in_collision(spec, q, {b}, conv);
    bool hit_s = in_collision(spec, q, {s}, conv);
    for (int g = 0; g < 5; ++g) {
      b.min.array() -= 0.02;
      b.max.array() += 0.02;
      s.radius += 0.02;
      const bool nb = in_collision(spec, q, {b}, conv);
      const bool ns = in_collision(spec, q, {s}, conv);
      CHECK((!hit_b || nb));
      CHECK((!hit_s || ns));
      hit_b = nb;
      hit_s = ns;
    }
  }
}

TEST_CASE("segment point distance") {
  CHECK(segment_point_distance({0, 0, 0}, {0, 0, 1}, {1, 0, 0.5}) == doctest::Approx(1.0));
  CHECK(segment_point_distance({0, 0, 0}, {0, 0, 1}, {0, 0, 3}) == doctest::Approx(2.0));
  CHECK(segment_point_distance({0, 0, 0}, {0, 0, 0}, {0, 3, 4}) == doctest::Approx(5.0));
}

#include <doctest.h>

#include "oracles.hpp"
#include "pbt/kinematics.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace pbt;
using pbt::testing::two_unit_chain;

namespace {

ChainState make(const char* modes, double phi1, double th1, double phi2, double th2) {
  return ChainState::from_flat(parse_modes(modes), {phi1, th1, phi2, th2});
}

void check_point(const Point3& got, const Point3& want, double tol = 1e-12) {
  CHECK((got - want).norm() < tol);
}

}  // namespace

TEST_CASE("extension length") {
  CHECK(extension_length(0.16, 0) == doctest::Approx(0.32).epsilon(1e-15));
  CHECK(std::abs(extension_length(0.16, kPi / 2) - 0.22627416997969524) < 1e-15);
  const double near_folded = extension_length(0.16, kPi - 1e-9);
  CHECK(near_folded > 0);
  CHECK(near_folded < 1e-9);
  CHECK_THROWS_AS(extension_length(0.16, kPi), std::domain_error);
  CHECK_THROWS_AS(extension_length(0.16, -0.01), std::domain_error);
}

TEST_CASE("fk_pp") {
  const auto spec = two_unit_chain();
  check_point(fk_pp(spec, make("PP", 0, 0, 0, 0)), {0, 0, 0.61});
  check_point(fk_pp(spec, make("PP", 1.3, 0, -2.1, 0)), {0, 0, 0.61});
  check_point(fk_pp(spec, make("PP", 0, kPi / 2, 0, 0)), {0, 0, 0.5162741699796952});

  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto q = testing::random_state(rng, spec, parse_modes("PP"));
    const Point3 p = fk_pp(spec, q);
    CHECK(p.x() * p.x() + p.y() * p.y() < 1e-18);
  }
  CHECK_THROWS(fk_pp(spec, make("PB", 0, 0, 0, 0)));
}

TEST_CASE("fk_pb closed form") {
  const auto spec = two_unit_chain();
  check_point(fk_pb_closed_form(spec, make("PB", 0.7, 0, -0.2, 0)), {0, 0, 0.51});
  check_point(fk_pb_closed_form(spec, make("PB", 0.4, kPi / 2, -0.4, kPi / 2)),
              {0.1, 0, 0.31627416997969526});
  check_point(fk_pb_closed_form(spec, make("PB", 0.5, 0, kPi / 2 - 0.5, kPi / 6)),
              {0, 0.05, 0.4966025403784439});
  CHECK_THROWS(fk_pb_closed_form(spec, make("BP", 0, 0, 0, 0)));
}

TEST_CASE("fk_bp closed form") {
  const auto spec = two_unit_chain();
  check_point(fk_bp_closed_form(spec, make("BP", 0, 0, 0, 0)), {0, 0, 0.61});
  check_point(fk_bp_closed_form(spec, make("BP", 0, kPi / 2, 0, 0)), {0.40, 0, 0.21});
  check_point(fk_bp_closed_form(spec, make("BP", kPi / 2, kPi / 2, 0, 0)), {0, 0.40, 0.21});
}

TEST_CASE("closed forms match the written-out oracle") {
  const auto spec = two_unit_chain();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const auto pb = testing::random_state(rng, spec, parse_modes("PB"));
    check_point(fk_pb_closed_form(spec, pb), testing::pb_position(spec, pb), 1e-14);
    const auto bp = testing::random_state(rng, spec, parse_modes("BP"));
    check_point(fk_bp_closed_form(spec, bp), testing::bp_position(spec, bp), 1e-14);
  }
}

TEST_CASE("generic chain agrees with each closed form under its convention") {
  const auto spec = two_unit_chain();
  CHECK(default_convention(parse_modes("PB")) == BendConvention::ExcludeProximal);
  CHECK(default_convention(parse_modes("BP")) == BendConvention::IncludeProximal);
  CHECK(default_convention(parse_modes("BB")) == BendConvention::IncludeProximal);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto bp = testing::random_state(rng, spec, parse_modes("BP"));
    check_point(fk_generic(spec, bp, BendConvention::IncludeProximal).translation(),
                testing::bp_position(spec, bp));
    const auto pb = testing::random_state(rng, spec, parse_modes("PB"));
    check_point(fk_generic(spec, pb, BendConvention::ExcludeProximal).translation(),
                testing::pb_position(spec, pb));
    const auto pp = testing::random_state(rng, spec, parse_modes("PP"));
    check_point(fk_generic(spec, pp, BendConvention::IncludeProximal).translation(),
                fk_pp(spec, pp));
  }
}

TEST_CASE("conventions differ by the proximal segment") {
  const auto spec = two_unit_chain();
  const auto q = make("PB", 0.2, 0.3, 0.1, 0.4);
  const Point3 inc = fk_generic(spec, q, BendConvention::IncludeProximal).translation();
  const Point3 exc = fk_generic(spec, q, BendConvention::ExcludeProximal).translation();
  CHECK((inc - exc).norm() == doctest::Approx(spec.units[1].l));
}

TEST_CASE("straight chain") {
  const auto spec = two_unit_chain();
  for (const char* m : {"PP", "PB", "BP", "BB"}) {
    const auto q = ChainState::zeros(parse_modes(m));
    const auto t = fk_generic(spec, q, BendConvention::IncludeProximal);
    check_point(t.translation(), {0, 0, 0.61});
    CHECK(t.rotation().isApprox(Eigen::Matrix3d::Identity(), 1e-15));
  }
  const auto pp = fk_generic(spec, ChainState::zeros(parse_modes("PP")),
                             BendConvention::ExcludeProximal);
  check_point(pp.translation(), {0, 0, 0.61});
}

TEST_CASE("generic chain is equivariant under the base pose") {
  auto spec = two_unit_chain();
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.rotate(Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()));
  t.pretranslate(Eigen::Vector3d(0.3, -0.2, 0.1));

  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const auto q = testing::random_state(rng, spec, parse_modes("BB"));
    spec.base_pose = Eigen::Isometry3d::Identity();
    const auto plain = fk_generic(spec, q, BendConvention::IncludeProximal);
    spec.base_pose = t;
    const auto moved = fk_generic(spec, q, BendConvention::IncludeProximal);
    CHECK((moved.matrix() - (t * plain).matrix()).norm() < 1e-12);
  }
}

TEST_CASE("three unit chain composes") {
  auto spec = two_unit_chain();
  spec.units.push_back(spec.units[1]);
  const auto q = ChainState::zeros(parse_modes("PBP"));
  check_point(fk_generic(spec, q, BendConvention::IncludeProximal).translation(), {0, 0, 0.85});
  CHECK(chain_frames(spec, q, BendConvention::IncludeProximal).units.size() == 3);
}

TEST_CASE("jacobian matches finite differences") {
  const auto spec = two_unit_chain();
  std::mt19937_64 rng(23);
  for (const char* m : {"BB", "BP", "PB", "PP"}) {
    const auto modes = parse_modes(m);
    for (auto conv : {BendConvention::IncludeProximal, BendConvention::ExcludeProximal}) {
      for (int i = 0; i < 50; ++i) {
        const auto q = testing::random_state(rng, spec, modes, 1e-3);
        const auto j = jacobian(spec, q, conv);
        const auto fd = testing::fd_jacobian(spec, q, conv);
        const double scale = std::max(1.0, fd.norm());
        CHECK((j - fd).norm() / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("jacobian structure") {
  const auto spec = two_unit_chain();
  std::mt19937_64 rng(29);
  for (int i = 0; i < 50; ++i) {
    const auto pp = testing::random_state(rng, spec, parse_modes("PP"));
    const auto j = jacobian(spec, pp, BendConvention::IncludeProximal);
    CHECK(j.col(0).norm() < 1e-15);
    CHECK(j.col(2).norm() < 1e-15);

    const auto bb = testing::random_state(rng, spec, parse_modes("BB"));
    const auto jb = jacobian(spec, bb, BendConvention::IncludeProximal);
    CHECK(std::abs(jb(2, 0)) < 1e-15);  // phi1 column lies in the base xy-plane
  }

  const auto straight = ChainState::zeros(parse_modes("BB"));
  const auto js = jacobian(spec, straight, BendConvention::IncludeProximal);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(js);
  svd.setThreshold(1e-12);
  CHECK(svd.rank() <= 2);
}

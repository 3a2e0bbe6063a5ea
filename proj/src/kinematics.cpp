#include "pbt/kinematics.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pbt {

namespace {

// Built by hand so the z column stays exactly (0, 0, 1).
Eigen::Matrix3d rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

Eigen::Matrix3d rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d r;
  r << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
  return r;
}

void advance_z(RigidTransform& frame, double d) {
  frame.translation() += frame.linear().col(2) * d;
}

void require_modes(const ChainState& state, std::string_view expected) {
  if (state.size() != expected.size() || to_string(state.modes()) != expected)
    throw std::invalid_argument("mode mismatch: expected " + std::string(expected) + ", got " +
                                to_string(state.modes()));
}

}  // namespace

BendConvention default_convention(const ModeString& modes) {
  return to_string(modes) == "PB" ? BendConvention::ExcludeProximal
                                  : BendConvention::IncludeProximal;
}

BendConvention parse_convention(std::string_view text) {
  std::string s(text);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "include" || s == "include_proximal") return BendConvention::IncludeProximal;
  if (s == "exclude" || s == "exclude_proximal") return BendConvention::ExcludeProximal;
  throw std::invalid_argument("unknown bend convention '" + std::string(text) + "'");
}

std::string to_string(BendConvention conv) {
  return conv == BendConvention::IncludeProximal ? "include" : "exclude";
}

double extension_length(double l, double theta) {
  if (!(theta >= 0.0 && theta < kPi))
    throw std::domain_error("extension_length: theta must lie in [0, pi)");
  return 2.0 * l * std::cos(theta / 2.0);
}

Point3 fk_pp(const ChainSpec& spec, const ChainState& state) {
  require_valid_state(spec, state);
  for (const auto& u : state.units)
    if (u.mode != Mode::P) throw std::invalid_argument("fk_pp: every unit must be in P mode");
  double z = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i)
    z += spec.units[i].t + extension_length(spec.units[i].l, state.units[i].theta);
  return spec.base_pose * Point3(0.0, 0.0, z);
}

Point3 fk_pb_closed_form(const ChainSpec& spec, const ChainState& state) {
  if (spec.size() != 2) throw std::invalid_argument("fk_pb_closed_form needs a two-unit chain");
  require_modes(state, "PB");
  require_valid_state(spec, state);
  const double l1 = spec.units[0].l, l2 = spec.units[1].l;
  const double t1 = spec.units[0].t, t2 = spec.units[1].t;
  const double phi1 = state.units[0].phi, phi2 = state.units[1].phi;
  const double th1 = state.units[0].theta, th2 = state.units[1].theta;
  const Point3 p(l2 * std::sin(th2) * std::cos(phi1 + phi2),
                 l2 * std::sin(th2) * std::sin(phi1 + phi2),
                 t1 + t2 + 2.0 * l1 * std::cos(th1 / 2.0) + l2 * std::cos(th2));
  return spec.base_pose * p;
}

Point3 fk_bp_closed_form(const ChainSpec& spec, const ChainState& state) {
  if (spec.size() != 2) throw std::invalid_argument("fk_bp_closed_form needs a two-unit chain");
  require_modes(state, "BP");
  require_valid_state(spec, state);
  const double l1 = spec.units[0].l, l2 = spec.units[1].l;
  const double t1 = spec.units[0].t, t2 = spec.units[1].t;
  const double phi1 = state.units[0].phi;
  const double th1 = state.units[0].theta, th2 = state.units[1].theta;
  const double reach = l1 + t2 + 2.0 * l2 * std::cos(th2 / 2.0);
  const Point3 p(reach * std::sin(th1) * std::cos(phi1), reach * std::sin(th1) * std::sin(phi1),
                 t1 + l1 + reach * std::cos(th1));
  return spec.base_pose * p;
}

ChainFrames chain_frames(const ChainSpec& spec, const ChainState& state, BendConvention conv) {
  require_valid_state(spec, state);
  ChainFrames out;
  out.units.reserve(spec.size());
  RigidTransform frame = spec.base_pose;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& p = spec.units[i];
    const auto& u = state.units[i];
    UnitFrames f;
    f.base = frame;
    frame.linear() = frame.linear() * rot_z(u.phi);
    advance_z(frame, p.t);
    f.body = frame;
    if (u.mode == Mode::P) {
      f.pivot = frame;
      advance_z(frame, extension_length(p.l, u.theta));
    } else {
      if (conv == BendConvention::IncludeProximal) advance_z(frame, p.l);
      f.pivot = frame;
      frame.linear() = frame.linear() * rot_y(u.theta);
      advance_z(frame, p.l);
    }
    f.tip = frame;
    out.units.push_back(f);
  }
  out.end = frame;
  return out;
}

RigidTransform fk_generic(const ChainSpec& spec, const ChainState& state, BendConvention conv) {
  return chain_frames(spec, state, conv).end;
}

Eigen::Matrix<double, 3, Eigen::Dynamic> jacobian(const ChainSpec& spec, const ChainState& state,
                                                  BendConvention conv) {
  const ChainFrames frames = chain_frames(spec, state, conv);
  const Point3 p_end = frames.end.translation();
  Eigen::Matrix<double, 3, Eigen::Dynamic> j(3, 2 * spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& f = frames.units[i];
    const Eigen::Vector3d z_axis = f.base.linear().col(2);
    j.col(2 * i) = z_axis.cross(p_end - f.base.translation());
    const auto& u = state.units[i];
    if (u.mode == Mode::P) {
      const double rate = -spec.units[i].l * std::sin(u.theta / 2.0);
      j.col(2 * i + 1) = f.body.linear().col(2) * rate;
    } else {
      const Eigen::Vector3d y_axis = f.pivot.linear().col(1);
      j.col(2 * i + 1) = y_axis.cross(p_end - f.pivot.translation());
    }
  }
  return j;
}

}  // namespace pbt

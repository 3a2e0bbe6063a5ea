#include "pbt/chain_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pbt {

namespace {

constexpr UnitSizeSpec kCatalog[] = {
    {SizeName::Large, 3.0, 2.0, 0.16, 0.20, 5.0, 9.0},
    {SizeName::Medium, 3.0, 2.0, 0.10, 0.12, 2.2, 4.0},
    {SizeName::Small, 2.0, 1.0, 0.05, 0.07, 0.5, 0.8},
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

SizeName parse_size_name(std::string_view name) {
  const std::string n = lower(name);
  if (n == "large") return SizeName::Large;
  if (n == "medium") return SizeName::Medium;
  if (n == "small") return SizeName::Small;
  throw std::invalid_argument("unknown size name '" + std::string(name) +
                              "' (expected large, medium or small)");
}

std::string to_string(SizeName size) {
  switch (size) {
    case SizeName::Large: return "large";
    case SizeName::Medium: return "medium";
    case SizeName::Small: return "small";
  }
  return "?";
}

UnitSizeSpec catalog_lookup(SizeName size) {
  for (const auto& row : kCatalog) {
    if (row.name == size) return row;
  }
  throw std::invalid_argument("size missing from catalog");
}

UnitSizeSpec catalog_lookup(std::string_view size_name) {
  return catalog_lookup(parse_size_name(size_name));
}

std::vector<UnitSizeSpec> catalog() { return {std::begin(kCatalog), std::end(kCatalog)}; }

double default_base_thickness(SizeName size) {
  switch (size) {
    case SizeName::Large: return 0.05;
    case SizeName::Medium: return 0.04;
    case SizeName::Small: return 0.02;
  }
  return 0.0;
}

void UnitParams::validate() const {
  if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("unit l must be > 0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("unit t must be >= 0");
  if (!(theta_p_max > 0.0 && theta_p_max < kPi))
    throw std::invalid_argument("theta_p_max must lie in (0, pi)");
  if (!(theta_b_range.lo <= 0.0 && theta_b_range.hi >= 0.0))
    throw std::invalid_argument("theta_b_range must be a closed interval containing 0");
  if (!(link_radius > 0.0) || !std::isfinite(link_radius))
    throw std::invalid_argument("link_radius must be > 0");
}

UnitParams unit_params_from_spec(const UnitSizeSpec& spec, const UnitOverrides& overrides) {
  UnitParams p;
  p.l = overrides.l.value_or(spec.link1_length);
  p.t = overrides.t.value_or(default_base_thickness(spec.name));
  p.theta_p_max = overrides.theta_p_max.value_or(kPi - 1e-3);
  p.theta_b_range = overrides.theta_b_range.value_or(Interval{-kPi / 2, kPi / 2});
  p.link_radius = overrides.link_radius.value_or(p.l / 8.0);
  p.validate();
  return p;
}

void ChainSpec::validate() const {
  if (units.empty()) throw std::invalid_argument("chain needs at least one unit");
  for (std::size_t i = 0; i < units.size(); ++i) {
    try {
      units[i].validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("unit " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  const Eigen::Matrix3d r = base_pose.linear();
  if ((r * r.transpose() - Eigen::Matrix3d::Identity()).norm() > 1e-9 ||
      std::abs(r.determinant() - 1.0) > 1e-9)
    throw std::invalid_argument("base_pose rotation is not a proper rotation");
}

ModeString parse_modes(std::string_view text) {
  ModeString out;
  for (char c : text) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
      case 'P': out.push_back(Mode::P); break;
      case 'B': out.push_back(Mode::B); break;
      default: throw std::invalid_argument("invalid mode string '" + std::string(text) + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("empty mode string");
  return out;
}

std::string to_string(const ModeString& modes) {
  std::string s;
  for (Mode m : modes) s.push_back(static_cast<char>(m));
  return s;
}

ModeString ChainState::modes() const {
  ModeString m;
  for (const auto& u : units) m.push_back(u.mode);
  return m;
}

ChainState ChainState::zeros(const ModeString& modes) {
  ChainState s;
  for (Mode m : modes) s.units.push_back({m, 0.0, 0.0});
  return s;
}

ChainState ChainState::from_flat(const ModeString& modes, const std::vector<double>& values) {
  if (values.size() != 2 * modes.size())
    throw std::invalid_argument("state needs " + std::to_string(2 * modes.size()) +
                                " values (phi, theta per unit), got " +
                                std::to_string(values.size()));
  ChainState s;
  for (std::size_t i = 0; i < modes.size(); ++i)
    s.units.push_back({modes[i], values[2 * i], values[2 * i + 1]});
  return s;
}

std::vector<double> ChainState::flat() const {
  std::vector<double> v;
  v.reserve(2 * units.size());
  for (const auto& u : units) {
    v.push_back(u.phi);
    v.push_back(u.theta);
  }
  return v;
}

std::vector<Violation> validate_state(const ChainSpec& spec, const ChainState& state) {
  std::vector<Violation> out;
  if (state.size() != spec.size()) {
    out.push_back({0, "state has " + std::to_string(state.size()) + " units, chain has " +
                          std::to_string(spec.size())});
    return out;
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& u = state.units[i];
    const auto& p = spec.units[i];
    std::ostringstream msg;
    if (!std::isfinite(u.phi) || !std::isfinite(u.theta)) {
      out.push_back({i, "non-finite joint value"});
      continue;
    }
    if (u.phi < -kPi || u.phi >= kPi) {
      msg << "phi " << u.phi << " outside [-pi, pi)";
      out.push_back({i, msg.str()});
      msg.str("");
    }
    if (u.mode == Mode::P) {
      if (u.theta < 0.0) {
        msg << "prismatic theta " << u.theta << " is negative";
        out.push_back({i, msg.str()});
      } else if (u.theta > p.theta_p_max) {
        msg << "prismatic theta " << u.theta << " exceeds theta_p_max " << p.theta_p_max;
        out.push_back({i, msg.str()});
      }
    } else if (!p.theta_b_range.contains(u.theta)) {
      msg << "bending theta " << u.theta << " outside [" << p.theta_b_range.lo << ", "
          << p.theta_b_range.hi << "]";
      out.push_back({i, msg.str()});
    }
  }
  return out;
}

void require_valid_state(const ChainSpec& spec, const ChainState& state) {
  const auto v = validate_state(spec, state);
  if (v.empty()) return;
  std::string msg = "invalid state:";
  for (const auto& e : v) msg += " [unit " + std::to_string(e.unit + 1) + "] " + e.message + ";";
  throw std::invalid_argument(msg);
}

bool can_switch_mode(const ChainSpec& spec, const ChainState& state, std::size_t unit_index,
                     Mode new_mode, double tolerance) {
  if (unit_index >= state.size() || unit_index >= spec.size())
    throw std::out_of_range("unit index out of range");
  const auto& u = state.units[unit_index];
  if (u.mode == new_mode) return true;
  return std::abs(u.theta) <= tolerance;
}

double motor_to_joint(double motor_angle, double linear_reduction, double theta_max,
                      ClampPolicy policy) {
  if (!(linear_reduction >= 1.0)) throw std::invalid_argument("linear_reduction must be >= 1");
  const double alpha = motor_angle / linear_reduction;
  const double theta = kPi - 2.0 * alpha;
  if (theta >= 0.0 && theta <= theta_max) return theta;
  if (policy == ClampPolicy::Error)
    throw std::domain_error("motor angle maps to theta outside [0, theta_max]");
  return std::clamp(theta, 0.0, theta_max);
}

double wrap_angle(double a) {
  double w = a - 2.0 * kPi * std::floor((a + kPi) / (2.0 * kPi));
  if (w >= kPi) w -= 2.0 * kPi;
  if (w < -kPi) w = -kPi;
  return w;
}

}  // namespace pbt

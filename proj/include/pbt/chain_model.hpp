#pragma once

#include <Eigen/Geometry>

#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pbt {

inline constexpr double kPi = std::numbers::pi;

// Tolerance on |theta| for a unit to count as fully extended (mode switch point).
inline constexpr double kTransitionTolerance = 1e-6;

enum class SizeName { Large, Medium, Small };

SizeName parse_size_name(std::string_view name);
std::string to_string(SizeName size);

/// One row of the module size catalog (link lengths in meters, masses in kg).
struct UnitSizeSpec {
  SizeName name;
  double linear_reduction;
  double revolute_reduction;
  double link1_length;
  double link3_length;
  double self_weight;
  double linear_payload;
};

UnitSizeSpec catalog_lookup(SizeName size);
UnitSizeSpec catalog_lookup(std::string_view size_name);
std::vector<UnitSizeSpec> catalog();

// Base revolute motor thickness used when a chain file names a size but no "t".
// These are not catalog data; they are the defaults of the shipped desk-scale chain.
double default_base_thickness(SizeName size);

struct Interval {
  double lo;
  double hi;
  bool contains(double v) const { return v >= lo && v <= hi; }
  double width() const { return hi - lo; }
};

/// Kinematic and collision parameters of a single unit.
///
/// `l` is the scissor arm length (stroke 2l at full extension), `t` the
/// thickness of the base revolute motor below the scissor. Prismatic-mode
/// theta lives in [0, theta_p_max]; bending-mode theta in theta_b_range.
struct UnitParams {
  double l = 0.0;
  double t = 0.0;
  double theta_p_max = kPi - 1e-3;
  Interval theta_b_range{-kPi / 2, kPi / 2};
  double link_radius = 0.0;

  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
};

struct UnitOverrides {
  std::optional<double> l;
  std::optional<double> t;
  std::optional<double> theta_p_max;
  std::optional<Interval> theta_b_range;
  std::optional<double> link_radius;
};

UnitParams unit_params_from_spec(const UnitSizeSpec& spec, const UnitOverrides& overrides = {});

struct ChainSpec {
  std::vector<UnitParams> units;
  Eigen::Isometry3d base_pose = Eigen::Isometry3d::Identity();

  std::size_t size() const { return units.size(); }
  void validate() const;
};

enum class Mode : char { P = 'P', B = 'B' };

using ModeString = std::vector<Mode>;

/// Parses "PB", "bb", ... Throws std::invalid_argument on any other symbol.
ModeString parse_modes(std::string_view text);
std::string to_string(const ModeString& modes);

struct UnitState {
  Mode mode = Mode::P;
  double phi = 0.0;
  double theta = 0.0;
};

struct ChainState {
  std::vector<UnitState> units;

  std::size_t size() const { return units.size(); }
  ModeString modes() const;

  static ChainState zeros(const ModeString& modes);
  /// Builds a state from a flat (phi1, theta1, phi2, theta2, ...) vector.
  static ChainState from_flat(const ModeString& modes, const std::vector<double>& values);
  std::vector<double> flat() const;
};

struct Violation {
  std::size_t unit;  // 0-based
  std::string message;
};

/// Every broken ChainState invariant, in unit order. Empty means valid.
std::vector<Violation> validate_state(const ChainSpec& spec, const ChainState& state);

/// Throws std::invalid_argument listing all violations, if any.
void require_valid_state(const ChainSpec& spec, const ChainState& state);

bool can_switch_mode(const ChainSpec& spec, const ChainState& state, std::size_t unit_index,
                     Mode new_mode, double tolerance = kTransitionTolerance);

enum class ClampPolicy { Clamp, Error };

/// Central scissor angle produced by a linear-drive motor angle.
///
/// The arm half-angle is motor_angle / linear_reduction and theta = pi - 2*alpha,
/// so with reduction 1 a quarter turn sweeps the full stroke.
double motor_to_joint(double motor_angle, double linear_reduction, double theta_max = kPi,
                      ClampPolicy policy = ClampPolicy::Clamp);

/// Wraps an angle into [-pi, pi).
double wrap_angle(double a);

}  // namespace pbt

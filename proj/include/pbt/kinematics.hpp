#pragma once

#include "pbt/chain_model.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <vector>

namespace pbt {

using Point3 = Eigen::Vector3d;
using RigidTransform = Eigen::Isometry3d;

/// Whether a bending unit carries a straight proximal segment of length l
/// below its bend pivot. The closed-form PB position equation is written
/// without it, the BP equation with it.
enum class BendConvention { IncludeProximal, ExcludeProximal };

/// Convention under which the mode's closed form and the generic chain agree.
/// PB uses ExcludeProximal; every other mode string uses IncludeProximal.
BendConvention default_convention(const ModeString& modes);

BendConvention parse_convention(std::string_view text);
std::string to_string(BendConvention conv);

/// Axial stroke of a prismatic unit: 2 l cos(theta/2), in (0, 2l] for theta in [0, pi).
double extension_length(double l, double theta);

Point3 fk_pp(const ChainSpec& spec, const ChainState& state);

// Closed forms for the two-unit chain, evaluated literally.
Point3 fk_pb_closed_form(const ChainSpec& spec, const ChainState& state);
Point3 fk_bp_closed_form(const ChainSpec& spec, const ChainState& state);

/// World-frame joint frames of one unit, base to tip.
struct UnitFrames {
  RigidTransform base;   // below the phi joint; phi axis is base z
  RigidTransform body;   // after phi and the motor thickness t
  RigidTransform pivot;  // bend pivot (B mode); bend axis is pivot y. Equals body for P mode
  RigidTransform tip;
};

struct ChainFrames {
  std::vector<UnitFrames> units;
  RigidTransform end;
};

ChainFrames chain_frames(const ChainSpec& spec, const ChainState& state, BendConvention conv);

/// Product-of-transforms forward kinematics for any unit count and mode string.
RigidTransform fk_generic(const ChainSpec& spec, const ChainState& state, BendConvention conv);

/// Translational Jacobian, columns ordered (phi1, theta1, phi2, theta2, ...).
Eigen::Matrix<double, 3, Eigen::Dynamic> jacobian(const ChainSpec& spec, const ChainState& state,
                                                  BendConvention conv);

}  // namespace pbt

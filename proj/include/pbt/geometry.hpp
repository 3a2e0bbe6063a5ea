#pragma once

#include "pbt/kinematics.hpp"

#include <array>
#include <variant>
#include <vector>

namespace pbt {

// Reported clearance when there is nothing to collide with.
inline constexpr double kClearanceSentinel = 1e9;

struct Sphere {
  Point3 center;
  double radius;
};

struct AxisBox {
  Point3 min;
  Point3 max;
  bool contains(const Point3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

/// Convex hull of a point set. Boundary triangles and supporting planes are
/// extracted once at construction; vertices strictly inside are kept but unused.
class ConvexHull {
 public:
  explicit ConvexHull(std::vector<Point3> vertices);

  const std::vector<Point3>& vertices() const { return vertices_; }
  double signed_distance(const Point3& p) const;

 private:
  struct Plane {
    Eigen::Vector3d normal;  // outward, unit length
    double offset;           // normal . x <= offset inside
  };
  std::vector<Point3> vertices_;
  std::vector<Plane> planes_;
  std::vector<std::array<int, 3>> triangles_;
};

using ConvexObstacle = std::variant<Sphere, AxisBox, ConvexHull>;

/// Throws std::invalid_argument for a non-positive radius or an inverted box.
void validate_obstacle(const ConvexObstacle& obstacle);

struct Capsule {
  Point3 a;
  Point3 b;
  double radius;
};

/// Centerline capsules of the chain: per unit the motor segment, then one
/// scissor segment (P) or proximal + distal segments (B, include convention).
std::vector<Capsule> chain_capsules(const ChainSpec& spec, const ChainState& state,
                                    BendConvention conv);

/// Signed distance from p to the obstacle surface, negative inside.
double clearance_point(const ConvexObstacle& obstacle, const Point3& p);

/// Distance between capsule and obstacle, negative on penetration.
double clearance_capsule(const ConvexObstacle& obstacle, const Capsule& capsule);

double chain_clearance(const ChainSpec& spec, const ChainState& state,
                       const std::vector<ConvexObstacle>& obstacles, BendConvention conv);

/// Strict: a clearance of exactly zero is contact, not collision.
bool in_collision(const ChainSpec& spec, const ChainState& state,
                  const std::vector<ConvexObstacle>& obstacles, BendConvention conv);

double segment_point_distance(const Point3& a, const Point3& b, const Point3& p);

}  // namespace pbt

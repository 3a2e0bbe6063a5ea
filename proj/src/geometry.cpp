#include "pbt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pbt {

namespace {

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
Point3 closest_on_triangle(const Point3& p, const Point3& a, const Point3& b, const Point3& c) {
  const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Eigen::Vector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
  const Eigen::Vector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

double box_signed_distance(const AxisBox& box, const Point3& p) {
  const Eigen::Vector3d q = (box.min - p).cwiseMax(p - box.max);
  return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

// Minimizes a convex function of t over [0, 1] by golden-section search.
template <typename F>
double minimize_on_segment(F&& f) {
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = 0.0, hi = 1.0;
  double best = std::min(f(0.0), f(1.0));
  double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 90 && hi - lo > 1e-15; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min({best, f1, f2});
}

}  // namespace

ConvexHull::ConvexHull(std::vector<Point3> vertices) : vertices_(std::move(vertices)) {
  const auto n = static_cast<int>(vertices_.size());
  if (n < 4) throw std::invalid_argument("convex hull needs at least 4 vertices");
  Eigen::AlignedBox3d bounds;
  for (const auto& v : vertices_) bounds.extend(v);
  const double scale = bounds.diagonal().norm();
  const double eps = 1e-9 * std::max(scale, 1e-12);

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Eigen::Vector3d normal =
            (vertices_[j] - vertices_[i]).cross(vertices_[k] - vertices_[i]);
        const double len = normal.norm();
        if (len <= 1e-12 * scale * scale) continue;
        normal /= len;
        double offset = normal.dot(vertices_[i]);
        bool above = false, below = false;
        for (const auto& v : vertices_) {
          const double s = normal.dot(v) - offset;
          if (s > eps) above = true;
          if (s < -eps) below = true;
        }
        if (above && below) continue;
        if (!above && !below) continue;  // all coplanar
        if (above) {
          normal = -normal;
          offset = -offset;
        }
        planes_.push_back({normal, offset});
        triangles_.push_back({i, j, k});
      }
  if (planes_.empty()) throw std::invalid_argument("convex hull vertices are coplanar");
}

double ConvexHull::signed_distance(const Point3& p) const {
  double inside = -std::numeric_limits<double>::infinity();
  for (const auto& pl : planes_) inside = std::max(inside, pl.normal.dot(p) - pl.offset);
  if (inside <= 0.0) return inside;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : triangles_) {
    const Point3 c = closest_on_triangle(p, vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
    best = std::min(best, (p - c).norm());
  }
  return best;
}

void validate_obstacle(const ConvexObstacle& obstacle) {
  if (const auto* s = std::get_if<Sphere>(&obstacle)) {
    if (!(s->radius > 0.0)) throw std::invalid_argument("sphere radius must be > 0");
  } else if (const auto* b = std::get_if<AxisBox>(&obstacle)) {
    if (!(b->min.array() < b->max.array()).all())
      throw std::invalid_argument("box min must be < max componentwise");
  }
}

double segment_point_distance(const Point3& a, const Point3& b, const Point3& p) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

std::vector<Capsule> chain_capsules(const ChainSpec& spec, const ChainState& state,
                                    BendConvention conv) {
  const ChainFrames frames = chain_frames(spec, state, conv);
  std::vector<Capsule> out;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& f = frames.units[i];
    const double r = spec.units[i].link_radius;
    out.push_back({f.base.translation(), f.body.translation(), r});
    if (state.units[i].mode == Mode::B && conv == BendConvention::IncludeProximal)
      out.push_back({f.body.translation(), f.pivot.translation(), r});
    out.push_back({f.pivot.translation(), f.tip.translation(), r});
  }
  return out;
}

double clearance_point(const ConvexObstacle& obstacle, const Point3& p) {
  return std::visit(
      [&](const auto& o) -> double {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return (p - o.center).norm() - o.radius;
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return box_signed_distance(o, p);
        } else {
          return o.signed_distance(p);
        }
      },
      obstacle);
}

double clearance_capsule(const ConvexObstacle& obstacle, const Capsule& capsule) {
  if (const auto* s = std::get_if<Sphere>(&obstacle))
    return segment_point_distance(capsule.a, capsule.b, s->center) - s->radius - capsule.radius;
  const Eigen::Vector3d ab = capsule.b - capsule.a;
  const double d = minimize_on_segment(
      [&](double t) { return clearance_point(obstacle, capsule.a + t * ab); });
  return d - capsule.radius;
}

double chain_clearance(const ChainSpec& spec, const ChainState& state,
                       const std::vector<ConvexObstacle>& obstacles, BendConvention conv) {
  if (obstacles.empty()) {
    require_valid_state(spec, state);
    return kClearanceSentinel;
  }
  double best = kClearanceSentinel;
  for (const auto& c : chain_capsules(spec, state, conv))
    for (const auto& o : obstacles) best = std::min(best, clearance_capsule(o, c));
  return best;
}

bool in_collision(const ChainSpec& spec, const ChainState& state,
                  const std::vector<ConvexObstacle>& obstacles, BendConvention conv) {
  return chain_clearance(spec, state, obstacles, conv) < 0.0;
}

}  // namespace pbt

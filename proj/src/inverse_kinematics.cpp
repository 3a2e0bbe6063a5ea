#include "pbt/inverse_kinematics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pbt {

namespace {

// Rounding can push an exact boundary target a few ulps past +-1.
bool in_acos_domain(double arg) { return std::abs(arg) <= 1.0 + 1e-12; }

IkResult fail(std::string reason) {
  IkResult r;
  r.failure = std::move(reason);
  return r;
}

Point3 to_base_frame(const ChainSpec& spec, const Point3& target) {
  return spec.base_pose.inverse() * target;
}

Interval theta_limits(const UnitParams& p, Mode mode) {
  return mode == Mode::P ? Interval{0.0, p.theta_p_max} : p.theta_b_range;
}

// Snaps thetas lying within rounding noise of a limit onto it, then checks.
bool within_limits(const ChainSpec& spec, ChainState& state) {
  constexpr double slack = 1e-12;
  for (std::size_t i = 0; i < state.size(); ++i) {
    auto& u = state.units[i];
    const Interval lim = theta_limits(spec.units[i], u.mode);
    if (u.theta < lim.lo && u.theta >= lim.lo - slack) u.theta = lim.lo;
    if (u.theta > lim.hi && u.theta <= lim.hi + slack) u.theta = lim.hi;
  }
  return validate_state(spec, state).empty();
}

double angular_distance(const ChainState& a, const ChainState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(wrap_angle(a.units[i].phi - b.units[i].phi)));
    d = std::max(d, std::abs(a.units[i].theta - b.units[i].theta));
  }
  return d;
}

}  // namespace

double grid_angle(std::size_t k, std::size_t n) {
  return -kPi + 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
}

ChainState instantiate(const IkBranch& branch, const std::vector<double>& free_values) {
  if (free_values.size() != branch.free.size())
    throw std::invalid_argument("instantiate: wrong number of free parameter values");
  ChainState s = branch.state;
  for (std::size_t k = 0; k < branch.free.size(); ++k) {
    const auto& fp = branch.free[k];
    if (fp.compensate) {
      const double sum = branch.state.units[fp.unit].phi + branch.state.units[*fp.compensate].phi;
      s.units[*fp.compensate].phi = wrap_angle(sum - free_values[k]);
    }
    s.units[fp.unit].phi = wrap_angle(free_values[k]);
  }
  return s;
}

IkResult ik_pp(const ChainSpec& spec, const Point3& target, double tolerance) {
  spec.validate();
  const Point3 p = to_base_frame(spec, target);
  if (std::hypot(p.x(), p.y()) > tolerance) return fail("unreachable: target is off the base axis");
  double thickness = 0.0, stroke = 0.0;
  for (const auto& u : spec.units) {
    thickness += u.t;
    stroke += 2.0 * u.l;
  }
  const double needed = p.z() - thickness;
  if (needed <= 0.0 || needed > stroke + tolerance)
    return fail("unreachable: axial height outside the stroke range");
  const double fraction = std::min(needed / stroke, 1.0);
  const double theta = 2.0 * std::acos(fraction);
  ChainState s;
  for (const auto& u : spec.units) {
    if (theta > u.theta_p_max) return fail("unreachable: required fold exceeds theta_p_max");
    s.units.push_back({Mode::P, 0.0, theta});
  }
  IkSolutionFamily fam{ModeString(spec.size(), Mode::P), BendConvention::IncludeProximal, {}};
  fam.branches.push_back({"axial", s, {}});
  IkResult r;
  r.family = std::move(fam);
  return r;
}

IkResult ik_pb(const ChainSpec& spec, const Point3& target, BendConvention conv) {
  spec.validate();
  if (spec.size() != 2) return fail("PB closed form needs a two-unit chain");
  const auto& u1 = spec.units[0];
  const auto& u2 = spec.units[1];
  const Point3 p = to_base_frame(spec, target);
  const double r = std::hypot(p.x(), p.y());
  if (r > u2.l * (1.0 + 1e-12)) return fail("unreachable: radial offset exceeds l2");
  const double a = std::asin(std::min(r / u2.l, 1.0));
  const double psi = r > 0.0 ? std::atan2(p.y(), p.x()) : 0.0;
  const double proximal = conv == BendConvention::IncludeProximal ? u2.l : 0.0;

  struct Candidate {
    double theta2;
    double yaw_sum;
    const char* label;
  };
  std::vector<Candidate> cands = {{a, psi, "elbow-A"}};
  const bool distinct_b = a < kPi / 2;
  if (distinct_b) cands.push_back({kPi - a, psi, "elbow-B"});
  if (a > 0.0) cands.push_back({-a, psi + kPi, "elbow-A-mirror"});
  if (distinct_b) cands.push_back({-(kPi - a), psi + kPi, "elbow-B-mirror"});

  IkSolutionFamily fam{parse_modes("PB"), conv, {}};
  bool domain_ok = false;
  for (const auto& c : cands) {
    const double arg = (p.z() - u1.t - u2.t - proximal - u2.l * std::cos(c.theta2)) / (2.0 * u1.l);
    if (!in_acos_domain(arg)) continue;
    domain_ok = true;
    const double theta1 = 2.0 * std::acos(std::clamp(arg, -1.0, 1.0));
    ChainState s;
    s.units = {{Mode::P, 0.0, theta1}, {Mode::B, wrap_angle(c.yaw_sum), c.theta2}};
    if (!within_limits(spec, s)) continue;
    fam.branches.push_back({c.label, s, {FreeParameter{0, 1}}});
  }
  if (fam.branches.empty())
    return fail(domain_ok ? "unreachable: no branch within joint limits"
                          : "unreachable: arccos argument outside [-1, 1]");
  IkResult res;
  res.family = std::move(fam);
  return res;
}

IkResult ik_bp(const ChainSpec& spec, const Point3& target, BendConvention conv) {
  spec.validate();
  if (spec.size() != 2) return fail("BP closed form needs a two-unit chain");
  const auto& u1 = spec.units[0];
  const auto& u2 = spec.units[1];
  const Point3 p = to_base_frame(spec, target);
  const double pivot = u1.t + (conv == BendConvention::IncludeProximal ? u1.l : 0.0);
  const double rho = std::hypot(p.x(), p.y());
  const double dz = p.z() - pivot;
  const double d = std::hypot(rho, dz);
  const double arg = (d - u1.l - u2.t) / (2.0 * u2.l);
  if (!in_acos_domain(arg)) return fail("unreachable: arccos argument outside [-1, 1]");
  const double theta2 = 2.0 * std::acos(std::clamp(arg, -1.0, 1.0));
  if (theta2 > u2.theta_p_max) return fail("unreachable: required fold exceeds theta_p_max");

  const double psi = rho > 0.0 ? std::atan2(p.y(), p.x()) : 0.0;
  const double tilt = std::atan2(rho, dz);
  IkSolutionFamily fam{parse_modes("BP"), conv, {}};
  auto add = [&](double theta1, double phi1, const char* label) {
    ChainState s;
    s.units = {{Mode::B, wrap_angle(phi1), theta1}, {Mode::P, 0.0, theta2}};
    if (within_limits(spec, s)) fam.branches.push_back({label, s, {FreeParameter{1, {}}}});
  };
  add(tilt, psi, "elbow-A");
  if (tilt != 0.0) add(-tilt, psi + kPi, "elbow-B");
  if (fam.branches.empty()) return fail("unreachable: no branch within joint limits");
  IkResult res;
  res.family = std::move(fam);
  return res;
}

std::pair<ChainState, double> dls_solve(const ChainSpec& spec, const Point3& target,
                                        ChainState q, const DlsOptions& options,
                                        BendConvention conv) {
  const double lambda2 = options.damping * options.damping;
  const std::size_t n = q.size();
  double err = (target - fk_generic(spec, q, conv).translation()).norm();
  for (std::size_t it = 0; it < options.max_iters && err >= options.tolerance; ++it) {
    const Eigen::Vector3d e = target - fk_generic(spec, q, conv).translation();
    const auto j = jacobian(spec, q, conv);
    const Eigen::Matrix3d jjt = j * j.transpose() + lambda2 * Eigen::Matrix3d::Identity();
    const Eigen::VectorXd dq = j.transpose() * jjt.ldlt().solve(e);
    for (std::size_t i = 0; i < n; ++i) {
      auto& u = q.units[i];
      const Interval lim = theta_limits(spec.units[i], u.mode);
      u.phi = wrap_angle(u.phi + dq(2 * i));
      u.theta = std::clamp(u.theta + dq(2 * i + 1), lim.lo, lim.hi);
    }
    err = (target - fk_generic(spec, q, conv).translation()).norm();
  }
  return {q, err};
}

IkResult ik_bb(const ChainSpec& spec, const Point3& target, const DlsOptions& options,
               BendConvention conv, std::optional<ModeString> modes) {
  spec.validate();
  const ModeString m = modes.value_or(ModeString(spec.size(), Mode::B));
  if (m.size() != spec.size()) throw std::invalid_argument("mode string length mismatch");
  if (options.seeds == 0) throw std::invalid_argument("ik_bb needs at least one seed");

  IkSolutionFamily fam{m, conv, {}};
  IkResult res;
  res.residual = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < options.seeds; ++k) {
    // Lattice over the first two yaws; thetas start mid-range.
    ChainState seed = ChainState::zeros(m);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const Interval lim = theta_limits(spec.units[i], m[i]);
      seed.units[i].theta = 0.5 * (lim.lo + lim.hi);
    }
    seed.units[0].phi = grid_angle(k % 4, 4);
    if (m.size() > 1) seed.units[1].phi = grid_angle((k / 4) % 2, 2);

    auto [q, err] = dls_solve(spec, target, seed, options, conv);
    if (err < res.residual) {
      res.residual = err;
      res.best = q;
    }
    if (err >= options.tolerance) continue;
    const bool duplicate = std::any_of(fam.branches.begin(), fam.branches.end(), [&](const auto& b) {
      return angular_distance(b.state, q) < options.dedup_resolution;
    });
    if (!duplicate) fam.branches.push_back({"dls-" + std::to_string(k), q, {}});
  }
  if (fam.branches.empty()) {
    res.failure = "not converged: best residual " + std::to_string(res.residual) + " m";
    return res;
  }
  res.family = std::move(fam);
  return res;
}

Selection select_collision_free(const ChainSpec& spec, const IkSolutionFamily& family,
                                const std::vector<ConvexObstacle>& obstacles, std::size_t grid) {
  if (grid == 0) throw std::invalid_argument("grid resolution must be > 0");
  Selection sel;
  bool have_best = false;
  for (std::size_t b = 0; b < family.branches.size(); ++b) {
    const auto& branch = family.branches[b];
    std::size_t combos = 1;
    for (std::size_t k = 0; k < branch.free.size(); ++k) combos *= grid;
    std::vector<double> values(branch.free.size());
    for (std::size_t g = 0; g < combos; ++g) {
      std::size_t rest = g;
      for (std::size_t k = branch.free.size(); k-- > 0;) {
        values[k] = grid_angle(rest % grid, grid);
        rest /= grid;
      }
      ChainState s = instantiate(branch, values);
      const double c = chain_clearance(spec, s, obstacles, family.conv);
      ++sel.candidates;
      if (!have_best || c > sel.clearance) {
        have_best = true;
        sel.clearance = c;
        sel.branch = b;
        sel.grid_index = g;
        sel.best_candidate = std::move(s);
      }
    }
  }
  if (have_best && sel.clearance >= 0.0) sel.state = sel.best_candidate;
  return sel;
}

std::string to_string(AttemptStatus status) {
  switch (status) {
    case AttemptStatus::Solved: return "solved";
    case AttemptStatus::Unreachable: return "unreachable";
    case AttemptStatus::Blocked: return "collision-blocked";
  }
  return "?";
}

IkResult solve_family(const ChainSpec& spec, const ModeString& mode, const Point3& target,
                      BendConvention conv, double tolerance, const DlsOptions& dls) {
  if (mode.size() != spec.size())
    return fail("mode string " + to_string(mode) + " does not match chain length");
  const std::string m = to_string(mode);
  if (std::all_of(mode.begin(), mode.end(), [](Mode x) { return x == Mode::P; }))
    return ik_pp(spec, target, tolerance);
  if (m == "PB") return ik_pb(spec, target, conv);
  if (m == "BP") return ik_bp(spec, target, conv);
  DlsOptions opts = dls;
  opts.tolerance = std::min(opts.tolerance, tolerance);
  IkResult r = ik_bb(spec, target, opts, conv, mode);
  if (!r) r.failure = "unreachable: " + r.failure;
  return r;
}

SolveReport solve(const ChainSpec& spec, const IkQuery& query) {
  if (!(query.tolerance > 0.0)) throw std::invalid_argument("IK tolerance must be > 0");
  if (!query.target.allFinite()) throw std::invalid_argument("IK target must be finite");
  for (const auto& o : query.obstacles) validate_obstacle(o);
  SolveReport report;
  for (const auto& mode : query.preference) {
    const BendConvention conv = query.conv.value_or(default_convention(mode));
    IkResult fam = solve_family(spec, mode, query.target, conv, query.tolerance, query.dls);
    if (!fam) {
      report.attempts.push_back({mode, AttemptStatus::Unreachable, fam.failure, std::nullopt});
      continue;
    }
    const Selection sel = select_collision_free(spec, *fam.family, query.obstacles, query.grid);
    if (!sel.state) {
      report.attempts.push_back({mode, AttemptStatus::Blocked,
                                 "best clearance " + std::to_string(sel.clearance) + " m",
                                 fam.family});
      continue;
    }
    report.attempts.push_back({mode, AttemptStatus::Solved, "", fam.family});
    report.ok = true;
    report.mode = mode;
    report.state = *sel.state;
    report.clearance = sel.clearance;
    report.conv = conv;
    return report;
  }
  return report;
}

}  // namespace pbt

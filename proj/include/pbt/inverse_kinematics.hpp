#pragma once

#include "pbt/geometry.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace pbt {

/// A base yaw left open by the position constraint. Sweeping it sets
/// phi[unit]; when `compensate` is set, that unit's phi absorbs the change so
/// the sum of the two yaws stays fixed.
struct FreeParameter {
  std::size_t unit;
  std::optional<std::size_t> compensate;
};

struct IkBranch {
  std::string label;
  ChainState state;  // free parameters at their canonical values
  std::vector<FreeParameter> free;
};

struct IkSolutionFamily {
  ModeString mode;
  BendConvention conv = BendConvention::IncludeProximal;
  std::vector<IkBranch> branches;
};

struct IkResult {
  std::optional<IkSolutionFamily> family;
  std::string failure;  // why no family, when empty
  double residual = std::numeric_limits<double>::quiet_NaN();  // numeric solvers only
  std::optional<ChainState> best;  // numeric solvers: lowest-residual state seen

  explicit operator bool() const { return family.has_value(); }
};

/// Value of grid point k out of n over [-pi, pi).
double grid_angle(std::size_t k, std::size_t n);

ChainState instantiate(const IkBranch& branch, const std::vector<double>& free_values);

/// On-axis target; every unit extends the same fraction of its own stroke.
IkResult ik_pp(const ChainSpec& spec, const Point3& target, double tolerance = 1e-9);

/// Two-unit PB chain. The default convention inverts the closed-form PB equation.
IkResult ik_pb(const ChainSpec& spec, const Point3& target,
               BendConvention conv = BendConvention::ExcludeProximal);

/// Two-unit BP chain. The second unit's yaw is reported as a free parameter.
IkResult ik_bp(const ChainSpec& spec, const Point3& target,
               BendConvention conv = BendConvention::IncludeProximal);

struct DlsOptions {
  std::size_t seeds = 8;
  std::size_t max_iters = 200;
  double damping = 0.01;
  double tolerance = 1e-6;  // converged when the position error drops below this
  double dedup_resolution = 1e-3;
};

/// Multi-start damped least squares over every (phi, theta) of the chain.
/// Defaults to an all-bending mode string.
IkResult ik_bb(const ChainSpec& spec, const Point3& target, const DlsOptions& options = {},
               BendConvention conv = BendConvention::IncludeProximal,
               std::optional<ModeString> modes = std::nullopt);

/// DLS from a caller-supplied seed; returns the final state and its residual.
std::pair<ChainState, double> dls_solve(const ChainSpec& spec, const Point3& target,
                                        ChainState seed, const DlsOptions& options,
                                        BendConvention conv);

struct Selection {
  std::optional<ChainState> state;  // set when a collision-free candidate exists
  double clearance = -std::numeric_limits<double>::infinity();
  std::size_t branch = 0;
  std::size_t grid_index = 0;  // mixed-radix index over the branch's free parameters
  ChainState best_candidate;   // argmax even when colliding, for diagnostics
  std::size_t candidates = 0;
};

/// Sweeps every branch over a uniform grid of its free parameters and keeps the
/// candidate with the largest clearance. Ties go to the lowest branch index,
/// then the lowest grid index.
Selection select_collision_free(const ChainSpec& spec, const IkSolutionFamily& family,
                                const std::vector<ConvexObstacle>& obstacles,
                                std::size_t grid = 64);

struct IkQuery {
  Point3 target = Point3::Zero();
  std::vector<ConvexObstacle> obstacles;
  double tolerance = 1e-9;
  std::vector<ModeString> preference = {parse_modes("PB"), parse_modes("BP"),
                                        parse_modes("BB"), parse_modes("PP")};
  std::optional<BendConvention> conv;  // per-mode default when empty
  std::size_t grid = 64;
  DlsOptions dls;
};

enum class AttemptStatus { Solved, Unreachable, Blocked };

std::string to_string(AttemptStatus status);

struct ModeAttempt {
  ModeString mode;
  AttemptStatus status;
  std::string detail;
  std::optional<IkSolutionFamily> family;
};

struct SolveReport {
  bool ok = false;
  ModeString mode;
  ChainState state;
  double clearance = 0.0;
  BendConvention conv = BendConvention::IncludeProximal;
  std::vector<ModeAttempt> attempts;
};

SolveReport solve(const ChainSpec& spec, const IkQuery& query);

/// Family solver for one mode string on a two-unit chain (PP works for any length).
IkResult solve_family(const ChainSpec& spec, const ModeString& mode, const Point3& target,
                      BendConvention conv, double tolerance, const DlsOptions& dls);

}  // namespace pbt

#pragma once

#include "pbt/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pbt {

/// Yoshikawa measure sqrt(det(J J^T)) of the translational Jacobian.
double manipulability(const ChainSpec& spec, const ChainState& state, BendConvention conv);

/// Same quantity as sqrt of the product of the eigenvalues of J J^T.
double manipulability_eigen(const ChainSpec& spec, const ChainState& state, BendConvention conv);

/// Counter-based uniform draw in [0, 1): a pure function of (seed, index, stream).
double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t stream);

/// The index-th joint-space sample: yaws uniform on [-pi, pi), thetas uniform
/// over the mode's limits.
ChainState sample_state(const ChainSpec& spec, const ModeString& modes, std::uint64_t seed,
                        std::uint64_t index);

struct WorkspaceSample {
  Point3 position;
  ChainState state;
  double sigma = 0.0;
  std::uint64_t index = 0;  // draw index that produced it
};

struct WorkspaceSampleSet {
  std::vector<WorkspaceSample> samples;
  ModeString mode;
  BendConvention conv = BendConvention::IncludeProximal;
  std::size_t requested = 0;
  std::uint64_t seed = 0;
  std::string obstacle_digest;

  std::size_t kept() const { return samples.size(); }
};

std::string obstacle_digest(const std::vector<ConvexObstacle>& obstacles);

/// 0 means one worker per hardware thread. Results never depend on this.
struct Parallelism {
  unsigned threads = 0;
};

WorkspaceSampleSet sample_workspace(const ChainSpec& spec, const ModeString& modes, std::size_t n,
                                    std::uint64_t seed, const std::vector<ConvexObstacle>& obstacles,
                                    BendConvention conv, Parallelism par = {});

WorkspaceSampleSet manip_map(const ChainSpec& spec, const ModeString& modes, std::size_t n,
                             std::uint64_t seed, BendConvention conv, Parallelism par = {});

using VoxelIndex = std::array<std::int64_t, 3>;

struct ConnectivityReport {
  double voxel_size = 0.0;
  std::size_t component_count = 0;
  std::vector<VoxelIndex> voxels;          // occupied, lexicographic order
  std::vector<std::size_t> labels;         // component per voxel, numbered by first voxel
  std::vector<std::size_t> component_voxels;

  double volume() const;
  double component_volume(std::size_t c) const;
};

VoxelIndex voxel_of(const Point3& p, double voxel_size);

/// Union-find over the 26-neighbourhood of occupied voxels.
ConnectivityReport connectivity(const WorkspaceSampleSet& samples, double voxel_size);
ConnectivityReport connectivity(const std::vector<Point3>& points, double voxel_size);

struct ModeSummary {
  ModeString mode;
  BendConvention conv;
  std::size_t requested = 0;
  std::size_t kept = 0;
  std::size_t occupied_voxels = 0;
  double volume = 0.0;
  std::size_t components = 0;
  double max_sigma = 0.0;
  double mean_sigma = 0.0;
  std::optional<std::size_t> roi_count;
};

struct CompareReport {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double voxel_size = 0.0;
  std::string obstacle_digest;
  std::optional<AxisBox> roi;
  std::vector<ModeSummary> modes;

  const ModeSummary& at(std::string_view mode) const;
};

/// Every mode string of the chain, P before B at each position (PP, PB, BP, BB).
std::vector<ModeString> all_modes(std::size_t units);

ModeSummary summarize(const WorkspaceSampleSet& set, double voxel_size,
                      const std::optional<AxisBox>& roi);

CompareReport compare_modes(const ChainSpec& spec, const std::vector<ConvexObstacle>& obstacles,
                            std::size_t n, std::uint64_t seed, double voxel_size,
                            const std::optional<AxisBox>& roi = std::nullopt,
                            std::optional<BendConvention> conv = std::nullopt,
                            Parallelism par = {});

}  // namespace pbt

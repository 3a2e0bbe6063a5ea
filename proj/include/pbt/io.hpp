#pragma once

#include "pbt/analysis.hpp"
#include "pbt/inverse_kinematics.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbt::io {

using nlohmann::json;

/// Raised when an output cannot be written. Malformed input raises
/// std::invalid_argument instead.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AnalysisDefaults {
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  double voxel_size = 0.02;
  std::optional<BendConvention> conv;
  std::vector<ModeString> modes = {parse_modes("PB"), parse_modes("BP"), parse_modes("BB"),
                                   parse_modes("PP")};
};

struct Scenario {
  std::string description;
  ChainSpec chain;
  std::vector<ConvexObstacle> obstacles;
  AnalysisDefaults analysis;
  std::optional<AxisBox> region_of_interest;
};

/// Large base unit under a medium upper unit, t = (0.05, 0.04) m.
ChainSpec default_chain();

Eigen::Isometry3d pose_from_xyz_rpy(const Eigen::Vector3d& xyz, const Eigen::Vector3d& rpy);

ChainSpec chain_from_json(const json& j);
json chain_to_json(const ChainSpec& spec);

ConvexObstacle obstacle_from_json(const json& j);
std::vector<ConvexObstacle> obstacles_from_json(const json& j);
json obstacle_to_json(const ConvexObstacle& o);
json obstacles_to_json(const std::vector<ConvexObstacle>& obstacles);

AxisBox box_from_json(const json& j);

/// `base_dir` resolves "chain"/"obstacles" entries given as relative file paths.
Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir = {});
json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);

/// Fixed "%.9g" rendering used by every text output.
std::string fmt9(double v);

void write_samples_csv(std::ostream& os, const WorkspaceSampleSet& set);
void write_connectivity_csv(std::ostream& os, const ConnectivityReport& rep);
std::vector<Point3> read_sample_positions_csv(std::istream& is);

json catalog_to_json();
json family_to_json(const IkSolutionFamily& family);
json state_to_json(const ChainState& state);
json sample_summary_to_json(const WorkspaceSampleSet& set);
json connectivity_to_json(const ConnectivityReport& rep);
json mode_summary_to_json(const ModeSummary& s);
json compare_to_json(const CompareReport& rep);
json solve_report_to_json(const SolveReport& rep);

/// Writes text to `path` atomically enough for batch use; throws IoError.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace pbt::io

// Batch front end: pbt_kin <catalog|fk|ik|sample|manip|connectivity|compare> [flags]
//
// Exit codes: 0 success, 2 input error, 3 no IK solution, 4 I/O error.

#include "pbt/analysis.hpp"
#include "pbt/inverse_kinematics.hpp"
#include "pbt/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace pbt;
using pbt::io::fmt9;
using pbt::io::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNoSolution = 3;
constexpr int kExitIo = 4;

struct Common {
  std::string scenario;
  std::string mode;
  std::string conv;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<double> voxel;
  std::string out;
  std::string format;
};

Parallelism parallelism_from_env() {
  Parallelism p;
  if (const char* env = std::getenv("PBT_KIN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0)
      throw std::invalid_argument("PBT_KIN_THREADS must be a non-negative integer");
    p.threads = static_cast<unsigned>(v);
  }
  return p;
}

io::Scenario load(const Common& c) {
  io::Scenario s;
  if (!c.scenario.empty()) s = io::load_scenario(c.scenario);
  else s.chain = io::default_chain();
  if (c.n) s.analysis.n = *c.n;
  if (c.seed) s.analysis.seed = *c.seed;
  if (c.voxel) s.analysis.voxel_size = *c.voxel;
  if (!c.conv.empty()) s.analysis.conv = parse_convention(c.conv);
  if (s.analysis.n == 0) throw std::invalid_argument("--n must be > 0");
  if (!(s.analysis.voxel_size > 0.0)) throw std::invalid_argument("--voxel must be > 0");
  return s;
}

BendConvention conv_for(const io::Scenario& s, const ModeString& mode) {
  return s.analysis.conv.value_or(default_convention(mode));
}

ModeString require_mode(const Common& c, const io::Scenario& s) {
  if (c.mode.empty()) throw std::invalid_argument("--mode is required");
  ModeString m = parse_modes(c.mode);
  if (m.size() != s.chain.size())
    throw std::invalid_argument("--mode " + c.mode + " does not match the chain's " +
                                std::to_string(s.chain.size()) + " units");
  return m;
}

std::string vec_text(const Eigen::Vector3d& v) {
  return fmt9(v.x()) + " " + fmt9(v.y()) + " " + fmt9(v.z());
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) std::cout << text;
  else io::write_file(c.out, text);
}

void add_common(CLI::App* cmd, Common& c, bool sampling) {
  cmd->add_option("--scenario", c.scenario, "Scenario JSON file")->check(CLI::ExistingFile);
  cmd->add_option("--conv", c.conv, "Bend convention: include or exclude");
  if (sampling) {
    cmd->add_option("--n", c.n, "Number of joint-space samples");
    cmd->add_option("--seed", c.seed, "Sampling seed");
    cmd->add_option("--voxel", c.voxel, "Voxel edge length in meters");
    cmd->add_option("--out", c.out, "Output file");
  }
}

int cmd_catalog(const std::string& size, const std::string& format) {
  std::vector<UnitSizeSpec> rows;
  if (size.empty()) rows = catalog();
  else rows.push_back(catalog_lookup(size));
  if (format == "json") {
    json all = io::catalog_to_json();
    if (!size.empty()) {
      json one = json::array();
      for (const auto& r : all)
        if (r["size"] == to_string(rows.front().name)) one.push_back(r);
      all = one;
    }
    std::cout << all.dump(2) << '\n';
    return kExitOk;
  }
  std::cout << "size    linear_reduction revolute_reduction link1_m  link3_m  weight_kg payload_kg\n";
  for (const auto& r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%-7s %-16s %-18s %-8s %-8s %-9s %s\n",
                  to_string(r.name).c_str(), fmt9(r.linear_reduction).c_str(),
                  fmt9(r.revolute_reduction).c_str(), fmt9(r.link1_length).c_str(),
                  fmt9(r.link3_length).c_str(), fmt9(r.self_weight).c_str(),
                  fmt9(r.linear_payload).c_str());
    std::cout << line;
  }
  return kExitOk;
}

int cmd_fk(const Common& c, const std::vector<double>& values) {
  const io::Scenario s = load(c);
  const ModeString mode = require_mode(c, s);
  const ChainState state = ChainState::from_flat(mode, values);
  const auto violations = validate_state(s.chain, state);
  if (!violations.empty()) {
    for (const auto& v : violations)
      std::cerr << "violation at unit " << v.unit + 1 << ": " << v.message << '\n';
    return kExitInput;
  }
  const BendConvention conv = conv_for(s, mode);
  const RigidTransform pose = fk_generic(s.chain, state, conv);
  std::optional<Point3> closed;
  const std::string m = to_string(mode);
  if (std::all_of(mode.begin(), mode.end(), [](Mode x) { return x == Mode::P; }))
    closed = fk_pp(s.chain, state);
  else if (m == "PB" && s.chain.size() == 2) closed = fk_pb_closed_form(s.chain, state);
  else if (m == "BP" && s.chain.size() == 2) closed = fk_bp_closed_form(s.chain, state);

  if (c.format == "json") {
    json out = {{"mode", m},
                {"conv", to_string(conv)},
                {"generic", {pose.translation().x(), pose.translation().y(), pose.translation().z()}}};
    json rot = json::array();
    for (int r = 0; r < 3; ++r) rot.push_back({pose.linear()(r, 0), pose.linear()(r, 1), pose.linear()(r, 2)});
    out["rotation"] = rot;
    if (closed) {
      out["closed_form"] = {closed->x(), closed->y(), closed->z()};
      out["difference"] = (*closed - pose.translation()).norm();
    }
    std::cout << out.dump(2) << '\n';
    return kExitOk;
  }
  std::cout << "mode " << m << "  conv " << to_string(conv) << '\n';
  if (closed) std::cout << "closed_form " << vec_text(*closed) << '\n';
  else std::cout << "closed_form n/a\n";
  std::cout << "generic     " << vec_text(pose.translation()) << '\n';
  if (closed) std::cout << "difference  " << fmt9((*closed - pose.translation()).norm()) << '\n';
  for (int r = 0; r < 3; ++r)
    std::cout << (r == 0 ? "rotation    " : "            ") << vec_text(pose.linear().row(r).transpose())
              << '\n';
  return kExitOk;
}

int cmd_ik(const Common& c, const std::vector<double>& target, const std::string& modes,
           std::size_t grid) {
  const io::Scenario s = load(c);
  if (target.size() != 3) throw std::invalid_argument("--target needs x,y,z");
  IkQuery q;
  q.target = Point3(target[0], target[1], target[2]);
  if (!q.target.allFinite()) throw std::invalid_argument("--target must be finite");
  q.obstacles = s.obstacles;
  q.preference = s.analysis.modes;
  q.conv = s.analysis.conv;
  q.grid = grid;
  const std::string mode_list = !modes.empty() ? modes : c.mode;
  if (!mode_list.empty()) {
    q.preference.clear();
    std::stringstream ss(mode_list);
    std::string item;
    while (std::getline(ss, item, ',')) q.preference.push_back(parse_modes(item));
  }
  const SolveReport rep = solve(s.chain, q);

  double fk_error = std::numeric_limits<double>::quiet_NaN();
  if (rep.ok) fk_error = (fk_generic(s.chain, rep.state, rep.conv).translation() - q.target).norm();

  if (c.format == "json") {
    json out = io::solve_report_to_json(rep);
    if (rep.ok) out["fk_error"] = fk_error;
    std::cout << out.dump(2) << '\n';
    return rep.ok ? kExitOk : kExitNoSolution;
  }
  std::cout << "target " << vec_text(q.target) << '\n';
  for (const auto& a : rep.attempts) {
    const std::string status = to_string(a.status);
    std::string detail = a.detail;
    if (detail.rfind(status + ": ", 0) == 0) detail.erase(0, status.size() + 2);
    std::cout << "mode " << to_string(a.mode) << ": " << status;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << '\n';
    if (!a.family) continue;
    for (const auto& b : a.family->branches) {
      std::cout << "  branch " << b.label << ":";
      for (const auto& u : b.state.units) std::cout << " phi=" << fmt9(u.phi) << " theta=" << fmt9(u.theta);
      if (!b.free.empty()) {
        std::cout << "  free:";
        for (const auto& f : b.free) std::cout << " phi" << f.unit + 1;
      }
      std::cout << '\n';
    }
  }
  if (!rep.ok) {
    std::cout << "no collision-free solution\n";
    return kExitNoSolution;
  }
  std::cout << "selected " << to_string(rep.mode) << " (conv " << to_string(rep.conv) << "):";
  for (const auto& u : rep.state.units) std::cout << " phi=" << fmt9(u.phi) << " theta=" << fmt9(u.theta);
  std::cout << "\nclearance " << fmt9(rep.clearance) << "\nfk_error " << fmt9(fk_error) << '\n';
  return kExitOk;
}

std::string samples_text(const Common& c, const WorkspaceSampleSet& set) {
  std::ostringstream os;
  if (c.format == "json") {
    json out = io::sample_summary_to_json(set);
    json samples = json::array();
    for (const auto& w : set.samples)
      samples.push_back({{"position", {std::strtod(fmt9(w.position.x()).c_str(), nullptr),
                                       std::strtod(fmt9(w.position.y()).c_str(), nullptr),
                                       std::strtod(fmt9(w.position.z()).c_str(), nullptr)}},
                         {"sigma", std::strtod(fmt9(w.sigma).c_str(), nullptr)},
                         {"state", io::state_to_json(w.state)}});
    out["samples"] = samples;
    os << out.dump(2) << '\n';
  } else {
    io::write_samples_csv(os, set);
  }
  return os.str();
}

// Data written to stdout pushes the human-readable summary to stderr.
bool data_on_stdout(const Common& c) { return c.out.empty() && !c.format.empty(); }

std::ostream& summary_stream(const Common& c) {
  return data_on_stdout(c) ? std::cerr : std::cout;
}

void print_set_summary(std::ostream& os, const WorkspaceSampleSet& set, double voxel) {
  double max_sigma = 0.0;
  for (const auto& w : set.samples) max_sigma = std::max(max_sigma, w.sigma);
  os << "mode " << to_string(set.mode) << "  conv " << to_string(set.conv) << '\n'
            << "kept: " << set.kept() << " / " << set.requested << '\n';
  if (!set.samples.empty()) {
    const auto rep = connectivity(set, voxel);
    os << "volume: " << fmt9(rep.volume()) << '\n'
       << "components: " << rep.component_count << '\n';
  }
  os << "max sigma: " << fmt9(max_sigma) << '\n';
}

int cmd_sample(const Common& c, bool obstacle_free) {
  const io::Scenario s = load(c);
  const ModeString mode = require_mode(c, s);
  const auto obstacles = obstacle_free ? std::vector<ConvexObstacle>{} : s.obstacles;
  const auto set = sample_workspace(s.chain, mode, s.analysis.n, s.analysis.seed, obstacles,
                                    conv_for(s, mode), parallelism_from_env());
  if (!c.out.empty()) io::write_file(c.out, samples_text(c, set));
  else if (data_on_stdout(c)) std::cout << samples_text(c, set);
  print_set_summary(summary_stream(c), set, s.analysis.voxel_size);
  return kExitOk;
}

int cmd_connectivity(const Common& c, const std::string& samples_path) {
  const io::Scenario s = load(c);
  std::vector<Point3> points;
  if (!samples_path.empty()) {
    std::ifstream in(samples_path);
    if (!in) throw std::invalid_argument("cannot open '" + samples_path + "'");
    points = io::read_sample_positions_csv(in);
  } else {
    const ModeString mode = require_mode(c, s);
    const auto set = sample_workspace(s.chain, mode, s.analysis.n, s.analysis.seed, s.obstacles,
                                      conv_for(s, mode), parallelism_from_env());
    for (const auto& w : set.samples) points.push_back(w.position);
    summary_stream(c) << "mode " << to_string(mode) << "  kept: " << set.kept() << " / " << set.requested
              << '\n';
  }
  if (points.empty()) throw std::invalid_argument("no collision-free samples to voxelize");
  const auto rep = connectivity(points, s.analysis.voxel_size);
  if (!c.out.empty() || data_on_stdout(c)) {
    std::ostringstream os;
    if (c.format == "json") os << io::connectivity_to_json(rep).dump(2) << '\n';
    else io::write_connectivity_csv(os, rep);
    if (c.out.empty()) std::cout << os.str();
    else io::write_file(c.out, os.str());
  }
  summary_stream(c) << "voxel: " << fmt9(rep.voxel_size) << '\n'
            << "occupied voxels: " << rep.voxels.size() << '\n'
            << "volume: " << fmt9(rep.volume()) << '\n'
            << "components: " << rep.component_count << '\n';
  return kExitOk;
}

int cmd_compare(const Common& c, const std::vector<double>& roi_values) {
  const io::Scenario s = load(c);
  std::optional<AxisBox> roi = s.region_of_interest;
  if (!roi_values.empty()) {
    if (roi_values.size() != 6) throw std::invalid_argument("--roi needs xmin,ymin,zmin,xmax,ymax,zmax");
    roi = AxisBox{Point3(roi_values[0], roi_values[1], roi_values[2]),
                  Point3(roi_values[3], roi_values[4], roi_values[5])};
  }
  const auto rep = compare_modes(s.chain, s.obstacles, s.analysis.n, s.analysis.seed,
                                 s.analysis.voxel_size, roi, s.analysis.conv, parallelism_from_env());
  const std::string text = io::compare_to_json(rep).dump(2) + "\n";
  if (!c.out.empty()) io::write_file(c.out, text);
  else if (data_on_stdout(c)) std::cout << text;
  std::ostream& table = summary_stream(c);
  table << "mode conv     kept   volume       components max_sigma    mean_sigma   roi\n";
  for (const auto& m : rep.modes) {
    char line[200];
    std::snprintf(line, sizeof line, "%-4s %-8s %-6zu %-12s %-10zu %-12s %-12s %s\n",
                  to_string(m.mode).c_str(), to_string(m.conv).c_str(), m.kept,
                  fmt9(m.volume).c_str(), m.components, fmt9(m.max_sigma).c_str(),
                  fmt9(m.mean_sigma).c_str(),
                  m.roi_count ? std::to_string(*m.roi_count).c_str() : "-");
    table << line;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinematics and workspace analysis for chains of prismatic-bending transformable joints"};
  app.require_subcommand(1);

  std::string size, catalog_format = "table";
  auto* catalog_cmd = app.add_subcommand("catalog", "Print the module size catalog");
  catalog_cmd->add_option("--size", size, "Only this size");
  catalog_cmd->add_option("--format", catalog_format, "Output format")->check(CLI::IsMember({"table", "json"}));

  Common fk_c;
  std::vector<double> state_values;
  auto* fk_cmd = app.add_subcommand("fk", "Forward kinematics, closed form next to the generic chain");
  add_common(fk_cmd, fk_c, false);
  fk_cmd->add_option("--mode", fk_c.mode, "Mode string, e.g. PB")->required();
  fk_cmd->add_option("--state", state_values, "phi1,theta1,phi2,theta2,...")
      ->delimiter(',')
      ->required();
  fk_cmd->add_option("--format", fk_c.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  Common ik_c;
  std::vector<double> target;
  std::string ik_modes;
  std::size_t grid = 64;
  auto* ik_cmd = app.add_subcommand("ik", "Collision-aware inverse kinematics");
  add_common(ik_cmd, ik_c, false);
  ik_cmd->add_option("--target", target, "x,y,z")->delimiter(',')->required();
  ik_cmd->add_option("--modes", ik_modes, "Comma-separated mode preference, e.g. PB,BP");
  ik_cmd->add_option("--mode", ik_c.mode, "Single mode (same as --modes X)");
  ik_cmd->add_option("--grid", grid, "Samples per free yaw")->check(CLI::PositiveNumber);
  ik_cmd->add_option("--format", ik_c.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  Common sample_c;
  auto* sample_cmd = app.add_subcommand("sample", "Collision-filtered Monte Carlo workspace");
  add_common(sample_cmd, sample_c, true);
  sample_cmd->add_option("--mode", sample_c.mode, "Mode string, e.g. BB")->required();
  sample_cmd->add_option("--format", sample_c.format, "csv writes samples, json a summary")->check(CLI::IsMember({"csv", "json"}));

  Common manip_c;
  auto* manip_cmd = app.add_subcommand("manip", "Obstacle-free manipulability map");
  add_common(manip_cmd, manip_c, true);
  manip_cmd->add_option("--mode", manip_c.mode, "Mode string, e.g. BB")->required();
  manip_cmd->add_option("--format", manip_c.format, "csv writes samples, json a summary")->check(CLI::IsMember({"csv", "json"}));

  Common conn_c;
  std::string samples_path;
  auto* conn_cmd = app.add_subcommand("connectivity", "Voxel connectivity of a sampled workspace");
  add_common(conn_cmd, conn_c, true);
  conn_cmd->add_option("--mode", conn_c.mode, "Mode string to sample when --samples is absent");
  conn_cmd->add_option("--samples", samples_path, "Reuse a sample CSV instead of sampling")
      ->check(CLI::ExistingFile);
  conn_cmd->add_option("--format", conn_c.format, "csv writes labelled voxels, json a summary")->check(CLI::IsMember({"csv", "json"}));

  Common cmp_c;
  std::vector<double> roi;
  auto* cmp_cmd = app.add_subcommand("compare", "Per-mode workspace comparison report");
  add_common(cmp_cmd, cmp_c, true);
  cmp_cmd->add_option("--roi", roi, "xmin,ymin,zmin,xmax,ymax,zmax")->delimiter(',');
  cmp_cmd->add_option("--format", cmp_c.format, "Report format")->check(CLI::IsMember({"json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*catalog_cmd) return cmd_catalog(size, catalog_format);
    if (*fk_cmd) return cmd_fk(fk_c, state_values);
    if (*ik_cmd) return cmd_ik(ik_c, target, ik_modes, grid);
    if (*sample_cmd) return cmd_sample(sample_c, false);
    if (*manip_cmd) return cmd_sample(manip_c, true);
    if (*conn_cmd) return cmd_connectivity(conn_c, samples_path);
    if (*cmp_cmd) return cmd_compare(cmp_c, roi);
  } catch (const io::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

#include "pbt/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace pbt::io {

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         std::string_view where) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key))
      throw std::invalid_argument("unknown key '" + key + "' in " + std::string(where));
}

Eigen::Vector3d vec3(const json& j, std::string_view what) {
  if (!j.is_array() || j.size() != 3)
    throw std::invalid_argument(std::string(what) + " must be a 3-element array");
  Eigen::Vector3d v;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) throw std::invalid_argument(std::string(what) + " must be numeric");
    v[k] = j[k].get<double>();
  }
  return v;
}

json vec_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

double num(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw std::invalid_argument(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::optional<double> opt_num(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return num(j, key);
}

// Rounds to the 9 significant digits used for all printed output.
double r9(double v) { return std::strtod(fmt9(v).c_str(), nullptr); }

json r9_vec(const Eigen::Vector3d& v) { return json::array({r9(v.x()), r9(v.y()), r9(v.z())}); }

}  // namespace

ChainSpec default_chain() {
  ChainSpec spec;
  UnitOverrides large, medium;
  large.t = 0.05;
  medium.t = 0.04;
  spec.units.push_back(unit_params_from_spec(catalog_lookup(SizeName::Large), large));
  spec.units.push_back(unit_params_from_spec(catalog_lookup(SizeName::Medium), medium));
  return spec;
}

Eigen::Isometry3d pose_from_xyz_rpy(const Eigen::Vector3d& xyz, const Eigen::Vector3d& rpy) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.linear() = (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
                Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
                Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
                   .toRotationMatrix();
  t.translation() = xyz;
  return t;
}

ChainSpec chain_from_json(const json& j) {
  reject_unknown_keys(j, {"units", "base_pose"}, "chain");
  if (!j.contains("units") || !j.at("units").is_array())
    throw std::invalid_argument("chain needs a 'units' array");
  ChainSpec spec;
  for (const auto& u : j.at("units")) {
    reject_unknown_keys(u,
                        {"size", "l", "t", "theta_p_max", "theta_b_min", "theta_b_max",
                         "link_radius"},
                        "chain unit");
    UnitOverrides ov;
    ov.l = opt_num(u, "l");
    ov.t = opt_num(u, "t");
    ov.theta_p_max = opt_num(u, "theta_p_max");
    ov.link_radius = opt_num(u, "link_radius");
    const auto bmin = opt_num(u, "theta_b_min");
    const auto bmax = opt_num(u, "theta_b_max");
    if (bmin || bmax) ov.theta_b_range = Interval{bmin.value_or(-kPi / 2), bmax.value_or(kPi / 2)};

    if (u.contains("size") && !u.at("size").is_null()) {
      spec.units.push_back(
          unit_params_from_spec(catalog_lookup(u.at("size").get<std::string>()), ov));
    } else {
      if (!ov.l || !ov.t)
        throw std::invalid_argument("chain unit without 'size' needs explicit 'l' and 't'");
      UnitParams p;
      p.l = *ov.l;
      p.t = *ov.t;
      if (ov.theta_p_max) p.theta_p_max = *ov.theta_p_max;
      if (ov.theta_b_range) p.theta_b_range = *ov.theta_b_range;
      p.link_radius = ov.link_radius.value_or(p.l / 8.0);
      p.validate();
      spec.units.push_back(p);
    }
  }
  if (j.contains("base_pose")) {
    const auto& bp = j.at("base_pose");
    reject_unknown_keys(bp, {"xyz", "rpy"}, "base_pose");
    const Eigen::Vector3d xyz = bp.contains("xyz") ? vec3(bp.at("xyz"), "xyz") : Eigen::Vector3d::Zero();
    const Eigen::Vector3d rpy = bp.contains("rpy") ? vec3(bp.at("rpy"), "rpy") : Eigen::Vector3d::Zero();
    spec.base_pose = pose_from_xyz_rpy(xyz, rpy);
  }
  spec.validate();
  return spec;
}

json chain_to_json(const ChainSpec& spec) {
  json units = json::array();
  for (const auto& u : spec.units) {
    units.push_back({{"l", u.l},
                     {"t", u.t},
                     {"theta_p_max", u.theta_p_max},
                     {"theta_b_min", u.theta_b_range.lo},
                     {"theta_b_max", u.theta_b_range.hi},
                     {"link_radius", u.link_radius}});
  }
  const Eigen::Matrix3d r = spec.base_pose.linear();
  // Inverse of Rz(yaw) Ry(pitch) Rx(roll).
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return {{"units", units},
          {"base_pose",
           {{"xyz", vec_json(spec.base_pose.translation())},
            {"rpy", json::array({roll, pitch, yaw})}}}};
}

ConvexObstacle obstacle_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type")) throw std::invalid_argument("obstacle needs a 'type'");
  const std::string type = j.at("type").get<std::string>();
  ConvexObstacle o = Sphere{};
  if (type == "sphere") {
    reject_unknown_keys(j, {"type", "center", "radius"}, "sphere obstacle");
    o = Sphere{vec3(j.at("center"), "center"), num(j, "radius")};
  } else if (type == "box") {
    reject_unknown_keys(j, {"type", "min", "max"}, "box obstacle");
    o = AxisBox{vec3(j.at("min"), "min"), vec3(j.at("max"), "max")};
  } else if (type == "hull") {
    reject_unknown_keys(j, {"type", "vertices"}, "hull obstacle");
    std::vector<Point3> verts;
    for (const auto& v : j.at("vertices")) verts.push_back(vec3(v, "vertex"));
    o = ConvexHull(std::move(verts));
  } else {
    throw std::invalid_argument("unknown obstacle type '" + type + "'");
  }
  validate_obstacle(o);
  return o;
}

std::vector<ConvexObstacle> obstacles_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("obstacles must be a JSON list");
  std::vector<ConvexObstacle> out;
  for (const auto& o : j) out.push_back(obstacle_from_json(o));
  return out;
}

json obstacle_to_json(const ConvexObstacle& o) {
  return std::visit(
      [](const auto& ob) -> json {
        using T = std::decay_t<decltype(ob)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return {{"type", "sphere"}, {"center", vec_json(ob.center)}, {"radius", ob.radius}};
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return {{"type", "box"}, {"min", vec_json(ob.min)}, {"max", vec_json(ob.max)}};
        } else {
          json verts = json::array();
          for (const auto& v : ob.vertices()) verts.push_back(vec_json(v));
          return {{"type", "hull"}, {"vertices", verts}};
        }
      },
      o);
}

json obstacles_to_json(const std::vector<ConvexObstacle>& obstacles) {
  json out = json::array();
  for (const auto& o : obstacles) out.push_back(obstacle_to_json(o));
  return out;
}

AxisBox box_from_json(const json& j) {
  reject_unknown_keys(j, {"min", "max"}, "region_of_interest");
  AxisBox b{vec3(j.at("min"), "min"), vec3(j.at("max"), "max")};
  validate_obstacle(b);
  return b;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
  reject_unknown_keys(j, {"description", "chain", "obstacles", "analysis", "region_of_interest"},
                      "scenario");
  Scenario s;
  try {
    if (j.contains("description")) s.description = j.at("description").get<std::string>();
    s.chain = default_chain();
    if (j.contains("chain")) {
      const auto& c = j.at("chain");
      s.chain = c.is_string() ? chain_from_json(read_json_file(base_dir / c.get<std::string>()))
                              : chain_from_json(c);
    }
    if (j.contains("obstacles")) {
      const auto& o = j.at("obstacles");
      s.obstacles = o.is_string()
                        ? obstacles_from_json(read_json_file(base_dir / o.get<std::string>()))
                        : obstacles_from_json(o);
    }
    if (j.contains("analysis")) {
      const auto& a = j.at("analysis");
      reject_unknown_keys(a, {"n", "seed", "voxel_size", "conv", "modes"}, "analysis");
      if (a.contains("n")) s.analysis.n = a.at("n").get<std::size_t>();
      if (a.contains("seed")) s.analysis.seed = a.at("seed").get<std::uint64_t>();
      if (a.contains("voxel_size")) s.analysis.voxel_size = num(a, "voxel_size");
      if (a.contains("conv") && !a.at("conv").is_null())
        s.analysis.conv = parse_convention(a.at("conv").get<std::string>());
      if (a.contains("modes")) {
        s.analysis.modes.clear();
        for (const auto& m : a.at("modes")) s.analysis.modes.push_back(parse_modes(m.get<std::string>()));
      }
      if (s.analysis.n == 0) throw std::invalid_argument("analysis.n must be > 0");
      if (!(s.analysis.voxel_size > 0.0)) throw std::invalid_argument("analysis.voxel_size must be > 0");
    }
    if (j.contains("region_of_interest") && !j.at("region_of_interest").is_null())
      s.region_of_interest = box_from_json(j.at("region_of_interest"));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json modes = json::array();
  for (const auto& m : s.analysis.modes) modes.push_back(to_string(m));
  json analysis = {{"n", s.analysis.n},
                   {"seed", s.analysis.seed},
                   {"voxel_size", s.analysis.voxel_size},
                   {"modes", modes}};
  if (s.analysis.conv) analysis["conv"] = to_string(*s.analysis.conv);
  json out = {{"chain", chain_to_json(s.chain)},
              {"obstacles", obstacles_to_json(s.obstacles)},
              {"analysis", analysis}};
  if (!s.description.empty()) out["description"] = s.description;
  if (s.region_of_interest)
    out["region_of_interest"] = {{"min", vec_json(s.region_of_interest->min)},
                                 {"max", vec_json(s.region_of_interest->max)}};
  return out;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json_file(path), path.parent_path());
}

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

void write_samples_csv(std::ostream& os, const WorkspaceSampleSet& set) {
  os << "x,y,z,sigma,mode";
  for (std::size_t i = 1; i <= set.mode.size(); ++i) os << ",phi" << i << ",theta" << i;
  os << '\n';
  const std::string mode = to_string(set.mode);
  for (const auto& s : set.samples) {
    os << fmt9(s.position.x()) << ',' << fmt9(s.position.y()) << ',' << fmt9(s.position.z()) << ','
       << fmt9(s.sigma) << ',' << mode;
    for (const auto& u : s.state.units) os << ',' << fmt9(u.phi) << ',' << fmt9(u.theta);
    os << '\n';
  }
}

void write_connectivity_csv(std::ostream& os, const ConnectivityReport& rep) {
  os << "voxel_i,voxel_j,voxel_k,component\n";
  for (std::size_t i = 0; i < rep.voxels.size(); ++i)
    os << rep.voxels[i][0] << ',' << rep.voxels[i][1] << ',' << rep.voxels[i][2] << ','
       << rep.labels[i] << '\n';
}

std::vector<Point3> read_sample_positions_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,y,z", 0) != 0)
    throw std::invalid_argument("sample CSV must start with an x,y,z header");
  std::vector<Point3> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    Point3 p;
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(ls, cell, ',')) throw std::invalid_argument("short sample CSV row");
      char* end = nullptr;
      p[k] = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw std::invalid_argument("non-numeric sample CSV cell");
    }
    out.push_back(p);
  }
  return out;
}

json catalog_to_json() {
  json out = json::array();
  for (const auto& c : catalog())
    out.push_back({{"size", to_string(c.name)},
                   {"linear_reduction", c.linear_reduction},
                   {"revolute_reduction", c.revolute_reduction},
                   {"link1_length", c.link1_length},
                   {"link3_length", c.link3_length},
                   {"self_weight", c.self_weight},
                   {"linear_payload", c.linear_payload}});
  return out;
}

json state_to_json(const ChainState& state) {
  json out = json::array();
  for (const auto& u : state.units)
    out.push_back({{"mode", std::string(1, static_cast<char>(u.mode))},
                   {"phi", r9(u.phi)},
                   {"theta", r9(u.theta)}});
  return out;
}

json family_to_json(const IkSolutionFamily& family) {
  json branches = json::array();
  for (const auto& b : family.branches) {
    json free = json::array();
    for (const auto& f : b.free) {
      json fj = {{"phi_of_unit", f.unit + 1}};
      if (f.compensate) fj["compensated_by_unit"] = *f.compensate + 1;
      free.push_back(fj);
    }
    branches.push_back({{"label", b.label}, {"state", state_to_json(b.state)}, {"free", free}});
  }
  return {{"mode", to_string(family.mode)},
          {"conv", to_string(family.conv)},
          {"branches", branches}};
}

json sample_summary_to_json(const WorkspaceSampleSet& set) {
  double max_sigma = 0.0;
  for (const auto& s : set.samples) max_sigma = std::max(max_sigma, s.sigma);
  return {{"mode", to_string(set.mode)},
          {"conv", to_string(set.conv)},
          {"requested", set.requested},
          {"kept", set.kept()},
          {"seed", set.seed},
          {"obstacle_digest", set.obstacle_digest},
          {"max_sigma", r9(max_sigma)}};
}

json connectivity_to_json(const ConnectivityReport& rep) {
  json volumes = json::array();
  for (std::size_t c = 0; c < rep.component_count; ++c) volumes.push_back(r9(rep.component_volume(c)));
  return {{"voxel_size", r9(rep.voxel_size)},
          {"occupied_voxels", rep.voxels.size()},
          {"volume", r9(rep.volume())},
          {"components", rep.component_count},
          {"component_volumes", volumes}};
}

json mode_summary_to_json(const ModeSummary& s) {
  json out = {{"mode", to_string(s.mode)},
              {"conv", to_string(s.conv)},
              {"requested", s.requested},
              {"kept", s.kept},
              {"occupied_voxels", s.occupied_voxels},
              {"volume", r9(s.volume)},
              {"components", s.components},
              {"max_sigma", r9(s.max_sigma)},
              {"mean_sigma", r9(s.mean_sigma)}};
  if (s.roi_count) out["roi_count"] = *s.roi_count;
  return out;
}

json compare_to_json(const CompareReport& rep) {
  json modes = json::array();
  for (const auto& m : rep.modes) modes.push_back(mode_summary_to_json(m));
  json out = {{"n", rep.n},
              {"seed", rep.seed},
              {"voxel_size", r9(rep.voxel_size)},
              {"obstacle_digest", rep.obstacle_digest},
              {"modes", modes}};
  if (rep.roi) out["region_of_interest"] = {{"min", r9_vec(rep.roi->min)}, {"max", r9_vec(rep.roi->max)}};
  return out;
}

json solve_report_to_json(const SolveReport& rep) {
  json attempts = json::array();
  for (const auto& a : rep.attempts) {
    json aj = {{"mode", to_string(a.mode)}, {"status", to_string(a.status)}, {"detail", a.detail}};
    if (a.family) aj["family"] = family_to_json(*a.family);
    attempts.push_back(aj);
  }
  json out = {{"ok", rep.ok}, {"attempts", attempts}};
  if (rep.ok) {
    out["mode"] = to_string(rep.mode);
    out["conv"] = to_string(rep.conv);
    out["state"] = state_to_json(rep.state);
    out["clearance"] = r9(rep.clearance);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << contents;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace pbt::io

#include "pbt/analysis.hpp"
#include "pbt/inverse_kinematics.hpp"
#include "pbt/io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace pbt;

namespace {

BendConvention conv_or_default(const std::optional<std::string>& conv, const ModeString& modes) {
  return conv ? parse_convention(*conv) : default_convention(modes);
}

ChainState make_state(const ChainSpec& spec, const std::string& modes,
                      const std::vector<double>& values) {
  ChainState s = ChainState::from_flat(parse_modes(modes), values);
  if (s.size() != spec.size())
    throw std::invalid_argument("mode string length does not match the chain");
  require_valid_state(spec, s);
  return s;
}

py::dict family_dict(const IkSolutionFamily& fam) {
  py::list branches;
  for (const auto& b : fam.branches) {
    py::list free;
    for (const auto& f : b.free) {
      py::dict d;
      d["unit"] = f.unit;
      d["compensate"] = f.compensate ? py::cast(*f.compensate) : py::none();
      free.append(d);
    }
    py::dict d;
    d["label"] = b.label;
    d["state"] = b.state.flat();
    d["free"] = free;
    branches.append(d);
  }
  py::dict out;
  out["mode"] = to_string(fam.mode);
  out["conv"] = to_string(fam.conv);
  out["branches"] = branches;
  return out;
}

py::dict summary_dict(const ModeSummary& s) {
  py::dict d;
  d["mode"] = to_string(s.mode);
  d["conv"] = to_string(s.conv);
  d["requested"] = s.requested;
  d["kept"] = s.kept;
  d["occupied_voxels"] = s.occupied_voxels;
  d["volume"] = s.volume;
  d["components"] = s.components;
  d["max_sigma"] = s.max_sigma;
  d["mean_sigma"] = s.mean_sigma;
  d["roi_count"] = s.roi_count ? py::cast(*s.roi_count) : py::none();
  return d;
}

std::optional<AxisBox> roi_from(const std::optional<std::pair<Point3, Point3>>& roi) {
  if (!roi) return std::nullopt;
  return AxisBox{roi->first, roi->second};
}

}  // namespace

PYBIND11_MODULE(_pbt_kin, m) {
  m.doc() = "C++ core of the pbt_kin package";

  py::register_exception<io::IoError>(m, "IoError", PyExc_OSError);

  py::class_<Sphere>(m, "Sphere")
      .def(py::init([](const Point3& c, double r) {
             Sphere s{c, r};
             validate_obstacle(s);
             return s;
           }),
           py::arg("center"), py::arg("radius"))
      .def_readonly("center", &Sphere::center)
      .def_readonly("radius", &Sphere::radius);

  py::class_<AxisBox>(m, "Box")
      .def(py::init([](const Point3& lo, const Point3& hi) {
             AxisBox b{lo, hi};
             validate_obstacle(b);
             return b;
           }),
           py::arg("min"), py::arg("max"))
      .def_readonly("min", &AxisBox::min)
      .def_readonly("max", &AxisBox::max)
      .def("contains", &AxisBox::contains);

  py::class_<ConvexHull>(m, "Hull")
      .def(py::init<std::vector<Point3>>(), py::arg("vertices"))
      .def_property_readonly("vertices", &ConvexHull::vertices)
      .def("signed_distance", &ConvexHull::signed_distance);

  py::class_<ChainSpec>(m, "Chain")
      .def_static("default", &io::default_chain, "Large base unit under a medium unit")
      .def_static(
          "from_json",
          [](const std::string& text) { return io::chain_from_json(io::json::parse(text)); },
          py::arg("text"))
      .def("to_json", [](const ChainSpec& c) { return io::chain_to_json(c).dump(); })
      .def("__len__", &ChainSpec::size)
      .def_property_readonly("lengths",
                             [](const ChainSpec& c) {
                               std::vector<double> v;
                               for (const auto& u : c.units) v.push_back(u.l);
                               return v;
                             })
      .def_property_readonly("thicknesses", [](const ChainSpec& c) {
        std::vector<double> v;
        for (const auto& u : c.units) v.push_back(u.t);
        return v;
      });

  py::class_<io::Scenario>(m, "Scenario")
      .def_readonly("description", &io::Scenario::description)
      .def_readonly("chain", &io::Scenario::chain)
      .def_property_readonly("obstacles",
                             [](const io::Scenario& s) {
                               py::list out;
                               for (const auto& o : s.obstacles)
                                 std::visit([&](const auto& x) { out.append(py::cast(x)); }, o);
                               return out;
                             })
      .def_property_readonly("region_of_interest", [](const io::Scenario& s) -> py::object {
        if (!s.region_of_interest) return py::none();
        return py::cast(*s.region_of_interest);
      });

  m.def("load_scenario", &io::load_scenario, py::arg("path"));

  m.def("catalog", [] { return py::module_::import("json").attr("loads")(io::catalog_to_json().dump()); });

  m.def("extension_length", &extension_length, py::arg("l"), py::arg("theta"));
  m.def("motor_to_joint",
        [](double motor, double reduction) { return motor_to_joint(motor, reduction); },
        py::arg("motor_angle"), py::arg("linear_reduction"));

  m.def(
      "fk",
      [](const ChainSpec& spec, const std::string& modes, const std::vector<double>& state,
         std::optional<std::string> conv) {
        const ChainState s = make_state(spec, modes, state);
        const auto t = fk_generic(spec, s, conv_or_default(conv, s.modes()));
        return std::make_pair(Point3(t.translation()), Eigen::Matrix3d(t.rotation()));
      },
      py::arg("chain"), py::arg("modes"), py::arg("state"), py::arg("conv") = py::none(),
      "Generic forward kinematics; returns (position, rotation)");

  m.def(
      "fk_closed_form",
      [](const ChainSpec& spec, const std::string& modes, const std::vector<double>& state) {
        const ChainState s = make_state(spec, modes, state);
        const std::string m = to_string(s.modes());
        if (m == "PB") return fk_pb_closed_form(spec, s);
        if (m == "BP") return fk_bp_closed_form(spec, s);
        if (m.find('B') == std::string::npos) return fk_pp(spec, s);
        throw std::invalid_argument("no closed form for mode " + m);
      },
      py::arg("chain"), py::arg("modes"), py::arg("state"));

  m.def(
      "jacobian",
      [](const ChainSpec& spec, const std::string& modes, const std::vector<double>& state,
         std::optional<std::string> conv) {
        const ChainState s = make_state(spec, modes, state);
        return Eigen::MatrixXd(jacobian(spec, s, conv_or_default(conv, s.modes())));
      },
      py::arg("chain"), py::arg("modes"), py::arg("state"), py::arg("conv") = py::none());

  m.def(
      "manipulability",
      [](const ChainSpec& spec, const std::string& modes, const std::vector<double>& state,
         std::optional<std::string> conv) {
        const ChainState s = make_state(spec, modes, state);
        return manipulability(spec, s, conv_or_default(conv, s.modes()));
      },
      py::arg("chain"), py::arg("modes"), py::arg("state"), py::arg("conv") = py::none());

  m.def(
      "chain_capsules",
      [](const ChainSpec& spec, const std::string& modes, const std::vector<double>& state,
         std::optional<std::string> conv) {
        const ChainState s = make_state(spec, modes, state);
        std::vector<std::tuple<Point3, Point3, double>> out;
        for (const auto& c : chain_capsules(spec, s, conv_or_default(conv, s.modes())))
          out.emplace_back(c.a, c.b, c.radius);
        return out;
      },
      py::arg("chain"), py::arg("modes"), py::arg("state"), py::arg("conv") = py::none());

  m.def(
      "clearance",
      [](const ChainSpec& spec, const std::string& modes, const std::vector<double>& state,
         const std::vector<ConvexObstacle>& obstacles, std::optional<std::string> conv) {
        const ChainState s = make_state(spec, modes, state);
        return chain_clearance(spec, s, obstacles, conv_or_default(conv, s.modes()));
      },
      py::arg("chain"), py::arg("modes"), py::arg("state"), py::arg("obstacles"),
      py::arg("conv") = py::none());

  m.def(
      "ik",
      [](const ChainSpec& spec, const std::string& modes, const Point3& target,
         std::optional<std::string> conv) -> py::object {
        const ModeString m = parse_modes(modes);
        const IkResult r = solve_family(spec, m, target, conv_or_default(conv, m), 1e-9, {});
        if (!r) return py::none();
        return family_dict(*r.family);
      },
      py::arg("chain"), py::arg("modes"), py::arg("target"), py::arg("conv") = py::none(),
      "Solution family for one mode string, or None when unreachable");

  m.def(
      "solve",
      [](const ChainSpec& spec, const Point3& target, const std::vector<ConvexObstacle>& obstacles,
         std::optional<std::vector<std::string>> modes, std::size_t grid) {
        IkQuery q;
        q.target = target;
        q.obstacles = obstacles;
        q.grid = grid;
        if (modes) {
          q.preference.clear();
          for (const auto& m : *modes) q.preference.push_back(parse_modes(m));
        }
        const SolveReport rep = solve(spec, q);
        py::list attempts;
        for (const auto& a : rep.attempts) {
          py::dict d;
          d["mode"] = to_string(a.mode);
          d["status"] = to_string(a.status);
          d["detail"] = a.detail;
          attempts.append(d);
        }
        py::dict out;
        out["ok"] = rep.ok;
        out["attempts"] = attempts;
        if (rep.ok) {
          out["mode"] = to_string(rep.mode);
          out["conv"] = to_string(rep.conv);
          out["state"] = rep.state.flat();
          out["clearance"] = rep.clearance;
        }
        return out;
      },
      py::arg("chain"), py::arg("target"), py::arg("obstacles") = std::vector<ConvexObstacle>{},
      py::arg("modes") = py::none(), py::arg("grid") = 64);

  m.def(
      "sample_workspace",
      [](const ChainSpec& spec, const std::string& modes, std::size_t n, std::uint64_t seed,
         const std::vector<ConvexObstacle>& obstacles, std::optional<std::string> conv,
         unsigned threads) {
        const ModeString m = parse_modes(modes);
        WorkspaceSampleSet set;
        {
          py::gil_scoped_release release;
          set = sample_workspace(spec, m, n, seed, obstacles, conv_or_default(conv, m), {threads});
        }
        const auto k = static_cast<py::ssize_t>(set.kept());
        const auto dof = static_cast<py::ssize_t>(2 * m.size());
        py::array_t<double> positions({k, py::ssize_t{3}});
        py::array_t<double> states({k, dof});
        py::array_t<double> sigma(k);
        py::array_t<std::uint64_t> index(k);
        auto p = positions.mutable_unchecked<2>();
        auto q = states.mutable_unchecked<2>();
        auto s = sigma.mutable_unchecked<1>();
        auto ix = index.mutable_unchecked<1>();
        for (py::ssize_t i = 0; i < k; ++i) {
          const auto& w = set.samples[static_cast<std::size_t>(i)];
          for (int c = 0; c < 3; ++c) p(i, c) = w.position[c];
          const auto flat = w.state.flat();
          for (py::ssize_t c = 0; c < dof; ++c) q(i, c) = flat[static_cast<std::size_t>(c)];
          s(i) = w.sigma;
          ix(i) = w.index;
        }
        py::dict out;
        out["positions"] = positions;
        out["states"] = states;
        out["sigma"] = sigma;
        out["index"] = index;
        out["requested"] = set.requested;
        out["conv"] = to_string(set.conv);
        return out;
      },
      py::arg("chain"), py::arg("modes"), py::arg("n"), py::arg("seed") = 0,
      py::arg("obstacles") = std::vector<ConvexObstacle>{}, py::arg("conv") = py::none(),
      py::arg("threads") = 0);

  m.def(
      "connectivity",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
         double voxel) {
        if (points.ndim() != 2 || points.shape(1) != 3)
          throw std::invalid_argument("points must have shape (n, 3)");
        auto p = points.unchecked<2>();
        std::vector<Point3> pts;
        for (py::ssize_t i = 0; i < p.shape(0); ++i) pts.emplace_back(p(i, 0), p(i, 1), p(i, 2));
        const auto rep = connectivity(pts, voxel);
        py::dict out;
        out["components"] = rep.component_count;
        out["occupied_voxels"] = rep.voxels.size();
        out["volume"] = rep.volume();
        out["component_voxels"] = rep.component_voxels;
        out["voxels"] = rep.voxels;
        out["labels"] = rep.labels;
        return out;
      },
      py::arg("points"), py::arg("voxel_size") = 0.02);

  m.def(
      "compare_modes",
      [](const ChainSpec& spec, const std::vector<ConvexObstacle>& obstacles, std::size_t n,
         std::uint64_t seed, double voxel, std::optional<std::pair<Point3, Point3>> roi) {
        CompareReport rep;
        {
          py::gil_scoped_release release;
          rep = compare_modes(spec, obstacles, n, seed, voxel, roi_from(roi));
        }
        py::list out;
        for (const auto& s : rep.modes) out.append(summary_dict(s));
        return out;
      },
      py::arg("chain"), py::arg("obstacles") = std::vector<ConvexObstacle>{}, py::arg("n") = 10000,
      py::arg("seed") = 0, py::arg("voxel_size") = 0.02, py::arg("roi") = py::none());
}

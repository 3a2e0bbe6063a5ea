#include "pbt/analysis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace pbt {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Eigen::Matrix3d jjt(const ChainSpec& spec, const ChainState& state, BendConvention conv) {
  const auto j = jacobian(spec, state, conv);
  return j * j.transpose();
}

unsigned resolve_threads(Parallelism par, std::size_t work) {
  unsigned t = par.threads;
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(work, 1)));
}

// Runs body(i) for i in [0, n) on contiguous chunks.
template <typename Body>
void parallel_for(std::size_t n, Parallelism par, Body&& body) {
  const unsigned threads = resolve_threads(par, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

void fnv_mix(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

void fnv_mix(std::uint64_t& h, const Point3& p) {
  for (int k = 0; k < 3; ++k) {
    const double v = p[k];
    fnv_mix(h, &v, sizeof v);
  }
}

}  // namespace

double manipulability(const ChainSpec& spec, const ChainState& state, BendConvention conv) {
  return std::sqrt(std::max(jjt(spec, state, conv).determinant(), 0.0));
}

double manipulability_eigen(const ChainSpec& spec, const ChainState& state, BendConvention conv) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(jjt(spec, state, conv),
                                                          Eigen::EigenvaluesOnly);
  double prod = 1.0;
  for (int i = 0; i < 3; ++i) prod *= std::max(es.eigenvalues()(i), 0.0);
  return std::sqrt(prod);
}

double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  const std::uint64_t key = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
  const std::uint64_t x = splitmix64(splitmix64(key + splitmix64(index)) + stream);
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

ChainState sample_state(const ChainSpec& spec, const ModeString& modes, std::uint64_t seed,
                        std::uint64_t index) {
  if (modes.size() != spec.size()) throw std::invalid_argument("mode string length mismatch");
  ChainState s;
  s.units.reserve(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& p = spec.units[i];
    const double phi = -kPi + 2.0 * kPi * counter_uniform(seed, index, 2 * i);
    const double u = counter_uniform(seed, index, 2 * i + 1);
    const double theta = modes[i] == Mode::P
                             ? u * p.theta_p_max
                             : p.theta_b_range.lo + u * p.theta_b_range.width();
    s.units.push_back({modes[i], std::min(phi, std::nextafter(kPi, 0.0)), theta});
  }
  return s;
}

std::string obstacle_digest(const std::vector<ConvexObstacle>& obstacles) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& o : obstacles) {
    const auto tag = static_cast<unsigned char>(o.index());
    fnv_mix(h, &tag, 1);
    std::visit(
        [&](const auto& ob) {
          using T = std::decay_t<decltype(ob)>;
          if constexpr (std::is_same_v<T, Sphere>) {
            fnv_mix(h, ob.center);
            fnv_mix(h, &ob.radius, sizeof ob.radius);
          } else if constexpr (std::is_same_v<T, AxisBox>) {
            fnv_mix(h, ob.min);
            fnv_mix(h, ob.max);
          } else {
            for (const auto& v : ob.vertices()) fnv_mix(h, v);
          }
        },
        o);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

WorkspaceSampleSet sample_workspace(const ChainSpec& spec, const ModeString& modes, std::size_t n,
                                    std::uint64_t seed, const std::vector<ConvexObstacle>& obstacles,
                                    BendConvention conv, Parallelism par) {
  if (n == 0) throw std::invalid_argument("sample count must be > 0");
  spec.validate();
  for (const auto& o : obstacles) validate_obstacle(o);
  std::vector<std::optional<WorkspaceSample>> slots(n);
  parallel_for(n, par, [&](std::size_t i) {
    ChainState s = sample_state(spec, modes, seed, i);
    if (!obstacles.empty() && in_collision(spec, s, obstacles, conv)) return;
    WorkspaceSample w;
    w.position = fk_generic(spec, s, conv).translation();
    w.sigma = manipulability(spec, s, conv);
    w.state = std::move(s);
    w.index = i;
    slots[i] = std::move(w);
  });
  WorkspaceSampleSet out;
  out.mode = modes;
  out.conv = conv;
  out.requested = n;
  out.seed = seed;
  out.obstacle_digest = obstacle_digest(obstacles);
  for (auto& s : slots)
    if (s) out.samples.push_back(std::move(*s));
  return out;
}

WorkspaceSampleSet manip_map(const ChainSpec& spec, const ModeString& modes, std::size_t n,
                             std::uint64_t seed, BendConvention conv, Parallelism par) {
  return sample_workspace(spec, modes, n, seed, {}, conv, par);
}

double ConnectivityReport::volume() const {
  return static_cast<double>(voxels.size()) * voxel_size * voxel_size * voxel_size;
}

double ConnectivityReport::component_volume(std::size_t c) const {
  return static_cast<double>(component_voxels.at(c)) * voxel_size * voxel_size * voxel_size;
}

VoxelIndex voxel_of(const Point3& p, double voxel_size) {
  return {static_cast<std::int64_t>(std::floor(p.x() / voxel_size)),
          static_cast<std::int64_t>(std::floor(p.y() / voxel_size)),
          static_cast<std::int64_t>(std::floor(p.z() / voxel_size))};
}

ConnectivityReport connectivity(const std::vector<Point3>& points, double voxel_size) {
  if (!(voxel_size > 0.0)) throw std::invalid_argument("voxel_size must be > 0");
  if (points.empty()) throw std::invalid_argument("connectivity of an empty sample set");
  ConnectivityReport rep;
  rep.voxel_size = voxel_size;
  rep.voxels.reserve(points.size());
  for (const auto& p : points) rep.voxels.push_back(voxel_of(p, voxel_size));
  std::sort(rep.voxels.begin(), rep.voxels.end());
  rep.voxels.erase(std::unique(rep.voxels.begin(), rep.voxels.end()), rep.voxels.end());

  const std::size_t m = rep.voxels.size();
  DisjointSet ds(m);
  for (std::size_t i = 0; i < m; ++i) {
    const VoxelIndex& v = rep.voxels[i];
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const VoxelIndex nb{v[0] + dx, v[1] + dy, v[2] + dz};
          if (nb <= v) continue;  // each pair once
          const auto it = std::lower_bound(rep.voxels.begin(), rep.voxels.end(), nb);
          if (it != rep.voxels.end() && *it == nb)
            ds.unite(i, static_cast<std::size_t>(it - rep.voxels.begin()));
        }
  }

  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> root_label(m, kUnset);
  rep.labels.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t r = ds.find(i);
    if (root_label[r] == kUnset) {
      root_label[r] = rep.component_count++;
      rep.component_voxels.push_back(0);
    }
    rep.labels[i] = root_label[r];
    ++rep.component_voxels[rep.labels[i]];
  }
  return rep;
}

ConnectivityReport connectivity(const WorkspaceSampleSet& samples, double voxel_size) {
  std::vector<Point3> pts;
  pts.reserve(samples.samples.size());
  for (const auto& s : samples.samples) pts.push_back(s.position);
  return connectivity(pts, voxel_size);
}

const ModeSummary& CompareReport::at(std::string_view mode) const {
  for (const auto& m : modes)
    if (to_string(m.mode) == mode) return m;
  throw std::out_of_range("mode " + std::string(mode) + " not in report");
}

std::vector<ModeString> all_modes(std::size_t units) {
  std::vector<ModeString> out;
  for (std::size_t code = 0; code < (std::size_t{1} << units); ++code) {
    ModeString m;
    for (std::size_t i = 0; i < units; ++i)
      m.push_back(((code >> (units - 1 - i)) & 1U) ? Mode::B : Mode::P);
    out.push_back(m);
  }
  return out;
}

ModeSummary summarize(const WorkspaceSampleSet& set, double voxel_size,
                      const std::optional<AxisBox>& roi) {
  ModeSummary s;
  s.mode = set.mode;
  s.conv = set.conv;
  s.requested = set.requested;
  s.kept = set.kept();
  if (!set.samples.empty()) {
    const ConnectivityReport c = connectivity(set, voxel_size);
    s.occupied_voxels = c.voxels.size();
    s.volume = c.volume();
    s.components = c.component_count;
    double sum = 0.0;
    for (const auto& w : set.samples) {
      s.max_sigma = std::max(s.max_sigma, w.sigma);
      sum += w.sigma;
    }
    s.mean_sigma = sum / static_cast<double>(set.samples.size());
  }
  if (roi) {
    s.roi_count = static_cast<std::size_t>(std::count_if(
        set.samples.begin(), set.samples.end(),
        [&](const WorkspaceSample& w) { return roi->contains(w.position); }));
  }
  return s;
}

CompareReport compare_modes(const ChainSpec& spec, const std::vector<ConvexObstacle>& obstacles,
                            std::size_t n, std::uint64_t seed, double voxel_size,
                            const std::optional<AxisBox>& roi, std::optional<BendConvention> conv,
                            Parallelism par) {
  if (!(voxel_size > 0.0)) throw std::invalid_argument("voxel_size must be > 0");
  if (roi) validate_obstacle(*roi);
  CompareReport rep;
  rep.n = n;
  rep.seed = seed;
  rep.voxel_size = voxel_size;
  rep.obstacle_digest = obstacle_digest(obstacles);
  rep.roi = roi;
  for (const auto& mode : all_modes(spec.size())) {
    const BendConvention c = conv.value_or(default_convention(mode));
    const auto set = sample_workspace(spec, mode, n, seed, obstacles, c, par);
    rep.modes.push_back(summarize(set, voxel_size, roi));
  }
  return rep;
}

}  // namespace pbt

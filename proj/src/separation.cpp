#include "ifslab/separation.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace ifslab {

namespace {

using Cell = std::array<std::int64_t, 3>;

struct CellHash {
  std::size_t operator()(const Cell& c) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto v : c) h = mix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

Cell cell_of(std::span<const double> x, double side) {
  Cell c{0, 0, 0};
  for (std::size_t k = 0; k < x.size(); ++k) c[k] = static_cast<std::int64_t>(std::floor(x[k] / side));
  return c;
}

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

// calls f(neighbour cell) for the 3^d cells around c
template <class F>
void for_neighbours(const Cell& c, int dim, F&& f) {
  const int span = dim == 1 ? 1 : (dim == 2 ? 9 : 27);
  for (int code = 0; code < span; ++code) {
    Cell nb = c;
    int rest = code;
    for (int k = 0; k < dim; ++k) {
      nb[static_cast<std::size_t>(k)] += rest % 3 - 1;
      rest /= 3;
    }
    f(nb);
  }
}

std::vector<double> sorted_copy(std::span<const double> points) {
  std::vector<double> v(points.begin(), points.end());
  std::sort(v.begin(), v.end());
  return v;
}

void check_radius(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("separation radius must be > 0");
}

}  // namespace

SeparatedSubset max_separated(std::span<const double> points, double r) {
  check_radius(r);
  SeparatedSubset out;
  out.radius = r;
  out.flag = SeparatedSubset::Flag::Exact;
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return points[a] < points[b]; });
  double last = 0.0;
  for (auto i : order) {
    if (out.members.empty() || points[i] - last > r) {
      out.members.push_back(i);
      last = points[i];
    }
  }
  std::sort(out.members.begin(), out.members.end());
  return out;
}

SeparatedSubset max_separated(const PointCloud& cloud, double r) {
  if (cloud.dim == 1) return max_separated(std::span<const double>(cloud.coords), r);
  check_radius(r);
  SeparatedSubset out;
  out.radius = r;
  out.flag = SeparatedSubset::Flag::LowerBound;
  std::unordered_map<Cell, std::vector<std::size_t>, CellHash> accepted;
  std::unordered_set<Cell, CellHash> packing;
  const double packing_side = r / std::sqrt(static_cast<double>(cloud.dim));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto x = cloud.point(i);
    packing.insert(cell_of(x, packing_side));
    bool ok = true;
    for_neighbours(cell_of(x, r), cloud.dim, [&](const Cell& nb) {
      if (!ok) return;
      const auto it = accepted.find(nb);
      if (it == accepted.end()) return;
      for (auto j : it->second) {
        if (!(dist(x, cloud.point(j)) > r)) {
          ok = false;
          return;
        }
      }
    });
    if (ok) {
      accepted[cell_of(x, r)].push_back(i);
      out.members.push_back(i);
    }
  }
  out.upper_bound = packing.size();
  return out;
}

double min_gap(std::span<const double> points) {
  if (points.size() < 2) throw std::invalid_argument("min gap needs at least two points");
  const auto v = sorted_copy(points);
  return min_diff_sorted<double>(v);
}

double min_gap(const PointCloud& cloud) {
  if (cloud.dim == 1) return min_gap(std::span<const double>(cloud.coords));
  if (cloud.size() < 2) throw std::invalid_argument("min gap needs at least two points");
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return cloud.point(a)[0] < cloud.point(b)[0]; });
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < order.size(); ++a) {
    const auto x = cloud.point(order[a]);
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const auto y = cloud.point(order[b]);
      if (y[0] - x[0] >= best) break;
      best = std::min(best, dist(x, y));
    }
  }
  return best;
}

std::uint64_t near_pair_count(std::span<const double> points, double r) {
  check_radius(r);
  const auto v = sorted_copy(points);
  return near_pairs_sorted<double>(v, r);
}

std::uint64_t near_pair_count(const PointCloud& cloud, double r) {
  if (cloud.dim == 1) return near_pair_count(std::span<const double>(cloud.coords), r);
  check_radius(r);
  std::unordered_map<Cell, std::vector<std::size_t>, CellHash> grid;
  for (std::size_t i = 0; i < cloud.size(); ++i) grid[cell_of(cloud.point(i), r)].push_back(i);
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto x = cloud.point(i);
    for_neighbours(cell_of(x, r), cloud.dim, [&](const Cell& nb) {
      const auto it = grid.find(nb);
      if (it == grid.end()) return;
      for (auto j : it->second) {
        if (j != i && dist(x, cloud.point(j)) <= r) ++pairs;
      }
    });
  }
  return pairs;
}

LevelRecord separation_record(const PointCloud& cloud, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("probe scale s must be > 0");
  LevelRecord rec;
  rec.n = cloud.level;
  rec.cardinality = cloud.size();
  rec.radius = s * std::pow(static_cast<double>(rec.cardinality), -1.0 / cloud.dim);
  const auto sep = max_separated(cloud, rec.radius);
  rec.separated = sep.count();
  rec.exact = sep.flag == SeparatedSubset::Flag::Exact;
  rec.ratio = static_cast<double>(rec.separated) / static_cast<double>(rec.cardinality);
  rec.min_gap = rec.cardinality >= 2 ? min_gap(cloud) : std::numeric_limits<double>::infinity();
  rec.near_pairs = near_pair_count(cloud, rec.radius);
  rec.method = cloud.dim == 1 ? "sorted-1d" : "grid-greedy";
  return rec;
}

SeparationProfile separation_profile(const Ifs& ifs, const BernoulliMeasure& m, std::span<const double> z, double s,
                                     int n_lo, int n_hi, const GenerationLimits& limits) {
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("level range must satisfy 1 <= lo <= hi");
  SeparationProfile profile;
  profile.s = s;
  CloudOptions opts;
  opts.limits = limits;
  for (int n = n_lo; n <= n_hi; ++n) {
    const auto cloud = point_cloud(ifs, m, n, z, opts);
    profile.levels.push_back(separation_record(cloud, s));
  }
  return profile;
}

CsProbe cs_probe(const SeparationProfile& profile, double threshold) {
  if (profile.levels.empty()) throw std::invalid_argument("CS probe needs a non-empty profile");
  CsProbe probe;
  probe.threshold = threshold;
  double running = std::numeric_limits<double>::infinity();
  for (const auto& rec : profile.levels) {
    running = std::min(running, rec.ratio);
    probe.running_minima.push_back(running);
    if (rec.ratio < threshold) probe.witness_levels.push_back(rec.n);
  }
  probe.running_minimum = running;
  probe.verdict = probe.witness_levels.empty() ? CsProbe::Verdict::CsConsistent : CsProbe::Verdict::CollapseWitnessed;
  return probe;
}

}  // namespace ifslab

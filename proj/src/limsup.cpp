#include "ifslab/limsup.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace ifslab {

namespace {

double unit_uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(mix64(seed ^ mix64(counter)) >> 11) * 0x1.0p-53;
}

// merge two sorted disjoint lists
std::vector<Interval> merge_union(std::span<const Interval> a, std::span<const Interval> b) {
  std::vector<Interval> all;
  all.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(all),
             [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  std::vector<Interval> out;
  for (const auto& iv : all) {
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

// measure covered by at least K of the lists, K = 1..k_max
std::vector<double> kfold_sweep(const std::vector<std::vector<Interval>>& levels, int k_max) {
  std::vector<std::pair<double, int>> events;
  for (const auto& lv : levels) {
    for (const auto& iv : lv) {
      events.emplace_back(iv.lo, +1);
      events.emplace_back(iv.hi, -1);
    }
  }
  std::sort(events.begin(), events.end());
  std::vector<long double> covered(static_cast<std::size_t>(k_max), 0.0L);
  int depth = 0;
  for (std::size_t i = 0; i < events.size();) {
    const double x = events[i].first;
    while (i < events.size() && events[i].first == x) depth += events[i++].second;
    if (i == events.size()) break;
    const long double len = events[i].first - x;
    for (int K = 1; K <= std::min(depth, k_max); ++K) covered[static_cast<std::size_t>(K - 1)] += len;
  }
  return {covered.begin(), covered.end()};
}

using Cell = std::array<std::int64_t, 3>;

struct CellHash {
  std::size_t operator()(const Cell& c) const {
    std::uint64_t h = 0;
    for (auto v : c) h = mix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

// point-in-union queries for one d-dimensional family
class BallIndex {
 public:
  explicit BallIndex(const BallFamily& f) : f_(f) {
    side_ = 0.0;
    for (double r : f.radii) side_ = std::max(side_, 2.0 * r);
    if (side_ <= 0.0) return;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f.radii[i] > 0.0) grid_[cell(&f.centers[i * static_cast<std::size_t>(f.dim)])].push_back(i);
    }
  }

  bool contains(const double* x) const {
    if (side_ <= 0.0) return false;
    const Cell c = cell(x);
    const int span = f_.dim == 2 ? 9 : 27;
    for (int code = 0; code < span; ++code) {
      Cell nb = c;
      int rest = code;
      for (int k = 0; k < f_.dim; ++k) {
        nb[static_cast<std::size_t>(k)] += rest % 3 - 1;
        rest /= 3;
      }
      const auto it = grid_.find(nb);
      if (it == grid_.end()) continue;
      for (auto i : it->second) {
        double d2 = 0.0;
        for (int k = 0; k < f_.dim; ++k) {
          const double diff = x[k] - f_.centers[i * static_cast<std::size_t>(f_.dim) + static_cast<std::size_t>(k)];
          d2 += diff * diff;
        }
        if (d2 <= f_.radii[i] * f_.radii[i]) return true;
      }
    }
    return false;
  }

 private:
  Cell cell(const double* x) const {
    Cell c{0, 0, 0};
    for (int k = 0; k < f_.dim; ++k) c[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(std::floor(x[k] / side_));
    return c;
  }

  const BallFamily& f_;
  double side_;
  std::unordered_map<Cell, std::vector<std::size_t>, CellHash> grid_;
};

// samples uniform in [lo, hi]^d, row-major
std::vector<double> mc_samples(std::span<const double> lo, std::span<const double> hi, const MonteCarloOptions& mc) {
  const std::size_t d = lo.size();
  std::vector<double> pts(mc.samples * d);
  for (std::size_t i = 0; i < mc.samples; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      pts[i * d + k] = lo[k] + (hi[k] - lo[k]) * unit_uniform(mc.seed, i * d + k);
    }
  }
  return pts;
}

}  // namespace

BallFamily level_balls(const PointCloud& cloud, const RateFunction& h, std::optional<double> clamp_s) {
  BallFamily f;
  f.level = cloud.level;
  f.dim = cloud.dim;
  f.centers = cloud.coords;
  const double hn = h(cloud.level);
  const double d = static_cast<double>(cloud.dim);
  if (clamp_s) {
    if (!(*clamp_s > 0.0)) throw std::invalid_argument("clamp scale s must be > 0");
    const double R = static_cast<double>(cloud.size());
    const double g = std::min(std::pow(hn / R, 1.0 / d), *clamp_s / (3.0 * std::pow(R, 1.0 / d)));
    f.radii.assign(cloud.size(), g);
    f.clamped = true;
    return f;
  }
  f.radii.reserve(cloud.size());
  for (double mass : cloud.masses) f.radii.push_back(std::pow(mass * hn, 1.0 / d));
  return f;
}

std::vector<Interval> merged_intervals(const BallFamily& family, std::optional<Interval> clip) {
  if (family.dim != 1) throw std::invalid_argument("interval merge is one-dimensional");
  std::vector<Interval> ivs;
  ivs.reserve(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (family.radii[i] <= 0.0) continue;
    Interval iv{family.centers[i] - family.radii[i], family.centers[i] + family.radii[i]};
    if (clip) {
      iv.lo = std::max(iv.lo, clip->lo);
      iv.hi = std::min(iv.hi, clip->hi);
      if (iv.hi <= iv.lo) continue;
    }
    ivs.push_back(iv);
  }
  std::sort(ivs.begin(), ivs.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& iv : ivs) {
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

double total_length(std::span<const Interval> merged) {
  long double s = 0.0L;
  for (const auto& iv : merged) s += iv.hi - iv.lo;
  return static_cast<double>(s);
}

double intersection_length(std::span<const Interval> a, std::span<const Interval> b) {
  long double s = 0.0L;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].lo, b[j].lo);
    const double hi = std::min(a[i].hi, b[j].hi);
    if (hi > lo) s += hi - lo;
    if (a[i].hi < b[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return static_cast<double>(s);
}

MeasureEstimate union_measure(std::span<const BallFamily> families, const MonteCarloOptions& mc) {
  MeasureEstimate est;
  if (families.empty()) return est;
  const int dim = families.front().dim;
  if (dim == 1) {
    std::vector<Interval> all;
    for (const auto& f : families) {
      if (f.dim != 1) throw std::invalid_argument("mixed dimensions in union");
      all = merge_union(all, merged_intervals(f));
    }
    est.value = total_length(all);
    return est;
  }
  std::vector<double> lo(static_cast<std::size_t>(dim), std::numeric_limits<double>::infinity());
  std::vector<double> hi(static_cast<std::size_t>(dim), -std::numeric_limits<double>::infinity());
  bool any = false;
  for (const auto& f : families) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f.radii[i] <= 0.0) continue;
      any = true;
      for (std::size_t k = 0; k < static_cast<std::size_t>(dim); ++k) {
        lo[k] = std::min(lo[k], f.centers[i * static_cast<std::size_t>(dim) + k] - f.radii[i]);
        hi[k] = std::max(hi[k], f.centers[i * static_cast<std::size_t>(dim) + k] + f.radii[i]);
      }
    }
  }
  if (!any) return est;
  double volume = 1.0;
  for (std::size_t k = 0; k < lo.size(); ++k) volume *= hi[k] - lo[k];
  std::vector<BallIndex> idx;
  idx.reserve(families.size());
  for (const auto& f : families) idx.emplace_back(f);
  const auto pts = mc_samples(lo, hi, mc);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < mc.samples; ++i) {
    const double* x = &pts[i * static_cast<std::size_t>(dim)];
    if (std::any_of(idx.begin(), idx.end(), [&](const BallIndex& b) { return b.contains(x); })) ++hits;
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(mc.samples);
  est.value = volume * frac;
  est.std_error = volume * std::sqrt(frac * (1.0 - frac) / static_cast<double>(mc.samples));
  est.exact = false;
  return est;
}

MeasureEstimate union_measure(const BallFamily& family, const MonteCarloOptions& mc) {
  return union_measure(std::span<const BallFamily>(&family, 1), mc);
}

double kochen_stone_bound(std::span<const std::vector<Interval>> levels) {
  long double sum = 0.0L, cross = 0.0L;
  for (std::size_t a = 0; a < levels.size(); ++a) {
    sum += total_length(levels[a]);
    cross += total_length(levels[a]);
    for (std::size_t b = a + 1; b < levels.size(); ++b) cross += 2.0L * intersection_length(levels[a], levels[b]);
  }
  if (cross <= 0.0L) return 0.0;
  return static_cast<double>(sum * sum / cross);
}

CoverageReport coverage_report(const Ifs& ifs, const BernoulliMeasure& m, std::span<const double> z,
                               const RateFunction& h, int n_lo, int n_hi, const CoverageOptions& options) {
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("level range must satisfy 1 <= lo <= hi");
  if (options.k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  CoverageReport rep;
  rep.dim = dimension(ifs);
  rep.n_lo = n_lo;
  rep.n_hi = n_hi;
  const auto bounds = attractor_bounds(ifs);
  rep.ambient_lo = bounds.lo;
  rep.ambient_hi = bounds.hi;
  rep.ambient_measure = 1.0;
  for (std::size_t k = 0; k < bounds.lo.size(); ++k) rep.ambient_measure *= bounds.hi[k] - bounds.lo[k];
  rep.grid = options.grid;

  CloudOptions copts;
  copts.limits = options.limits;
  std::vector<BallFamily> families;
  for (int n = n_lo; n <= n_hi; ++n) {
    families.push_back(level_balls(point_cloud(ifs, m, n, z, copts), h, options.clamp_s));
  }

  const int last_ks = n_hi;
  const int first_ks = std::max(n_lo, n_hi - static_cast<int>(options.ks_max_levels) + 1);
  rep.ks_first_level = first_ks;
  rep.ks_last_level = last_ks;

  long double volume = 0.0L;
  for (const auto& f : families) {
    CoverageLevel lv;
    lv.n = f.level;
    lv.balls = f.size();
    long double bs = 0.0L;
    for (double r : f.radii) {
      bs += rep.dim == 1 ? 2.0L * r : (rep.dim == 2 ? std::acos(-1.0L) * r * r : 4.0L / 3.0L * std::acos(-1.0L) * r * r * r);
    }
    lv.ball_sum = static_cast<double>(bs);
    volume += bs;
    rep.volume_partial_sums.push_back(static_cast<double>(volume));
    rep.levels.push_back(lv);
  }

  if (rep.dim == 1) {
    const Interval ambient{bounds.lo[0], bounds.hi[0]};
    std::vector<std::vector<Interval>> unions;
    double min_radius = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < families.size(); ++i) {
      unions.push_back(merged_intervals(families[i], ambient));
      rep.levels[i].union_measure = total_length(unions.back());
      for (double r : families[i].radii) {
        if (r > 0.0) min_radius = std::min(min_radius, r);
      }
    }
    rep.kfold = kfold_sweep(unions, options.k_max);
    rep.tail_union.assign(unions.size(), 0.0);
    std::vector<Interval> tail;
    for (std::size_t i = unions.size(); i-- > 0;) {
      tail = merge_union(tail, unions[i]);
      rep.tail_union[i] = total_length(tail);
    }
    const std::span<const std::vector<Interval>> ks_levels(unions.data() + (first_ks - n_lo),
                                                           static_cast<std::size_t>(last_ks - first_ks + 1));
    rep.ks_bound = kochen_stone_bound(ks_levels);

    if (options.grid) {
      const double delta = *options.grid;
      if (!(delta > 0.0)) throw std::invalid_argument("grid resolution must be > 0");
      if (std::isfinite(min_radius) && delta > min_radius) {
        throw std::invalid_argument("grid resolution " + std::to_string(delta) + " is coarser than the smallest radius " +
                                    std::to_string(min_radius));
      }
      const double cells_d = std::ceil((ambient.hi - ambient.lo) / delta);
      if (cells_d > static_cast<double>(options.max_grid_cells)) {
        throw ResourceError("hit-count grid needs " + std::to_string(cells_d) + " cells", cells_d);
      }
      const auto cells = static_cast<std::size_t>(cells_d);
      rep.hit_counts.assign(cells, 0);
      for (const auto& u : unions) {
        for (const auto& iv : u) {
          // centres lo + (j + 1/2) delta inside [iv.lo, iv.hi]
          const double a = std::ceil((iv.lo - ambient.lo) / delta - 0.5);
          const double b = std::floor((iv.hi - ambient.lo) / delta - 0.5);
          for (auto j = static_cast<long>(std::max(a, 0.0)); j <= static_cast<long>(b) && j < static_cast<long>(cells);
               ++j) {
            auto& c = rep.hit_counts[static_cast<std::size_t>(j)];
            if (c < std::numeric_limits<std::uint16_t>::max()) ++c;
          }
        }
      }
    }
    return rep;
  }

  // d >= 2: one shared sample set, per-level membership
  rep.exact = false;
  const auto& mc = options.mc;
  const auto pts = mc_samples(bounds.lo, bounds.hi, mc);
  const std::size_t L = families.size();
  std::vector<std::vector<char>> inside(L, std::vector<char>(mc.samples, 0));
  for (std::size_t i = 0; i < L; ++i) {
    const BallIndex idx(families[i]);
    std::size_t hits = 0;
    for (std::size_t j = 0; j < mc.samples; ++j) {
      inside[i][j] = idx.contains(&pts[j * static_cast<std::size_t>(rep.dim)]);
      hits += static_cast<std::size_t>(inside[i][j]);
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(mc.samples);
    rep.levels[i].union_measure = rep.ambient_measure * frac;
    rep.levels[i].union_std_error =
        rep.ambient_measure * std::sqrt(frac * (1.0 - frac) / static_cast<double>(mc.samples));
  }
  const double w = rep.ambient_measure / static_cast<double>(mc.samples);
  rep.kfold.assign(static_cast<std::size_t>(options.k_max), 0.0);
  rep.tail_union.assign(L, 0.0);
  for (std::size_t j = 0; j < mc.samples; ++j) {
    int depth = 0;
    for (std::size_t i = 0; i < L; ++i) depth += inside[i][j];
    for (int K = 1; K <= std::min(depth, options.k_max); ++K) rep.kfold[static_cast<std::size_t>(K - 1)] += w;
    for (std::size_t i = L; i-- > 0;) {
      if (inside[i][j]) {
        for (std::size_t t = 0; t <= i; ++t) rep.tail_union[t] += w;
        break;
      }
    }
  }
  long double sum = 0.0L, cross = 0.0L;
  const auto a0 = static_cast<std::size_t>(first_ks - n_lo);
  for (std::size_t j = 0; j < mc.samples; ++j) {
    long double c = 0.0L;
    for (std::size_t i = a0; i < L; ++i) c += inside[i][j];
    sum += c;
    cross += c * c;
  }
  rep.ks_bound = cross > 0.0L ? static_cast<double>(sum * sum / cross * w) : 0.0;
  return rep;
}

VolumeSum volume_sum(const PsiSpec& psi, double sigma, long N) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (N < 1) throw std::invalid_argument("horizon must be >= 1");
  if (psi.symbols < 1 || !(psi.beta > 0.0)) throw std::invalid_argument("invalid Psi spec");
  VolumeSum v;
  const double ll = std::log(static_cast<double>(psi.symbols));
  const double lb = std::log(psi.beta);
  long double sum = 0.0L;
  for (long n = 1; n <= N; ++n) {
    const double dn = static_cast<double>(n);
    sum += std::exp(static_cast<long double>(dn * ll - sigma * (psi.kappa * dn * lb + psi.gamma * std::log(dn))));
    v.partial_sums.push_back(static_cast<double>(sum));
  }
  v.ratio = static_cast<double>(psi.symbols) * std::pow(psi.beta, -psi.kappa * sigma);
  bool divergent;
  if (std::abs(v.ratio - 1.0) <= 1e-12) {
    divergent = psi.gamma * sigma <= 1.0;
  } else {
    divergent = v.ratio > 1.0;
  }
  v.verdict = divergent ? VolumeSum::Verdict::Divergent : VolumeSum::Verdict::Convergent;
  return v;
}

VolumeSum volume_sum(const RateFunction& h, long N) {
  VolumeSum v;
  long double sum = 0.0L;
  for (long n = 1; n <= N; ++n) {
    sum += h(n);
    v.partial_sums.push_back(static_cast<double>(sum));
  }
  const auto rep = rate_divergence(h, N);
  v.verdict = rep.verdict == DivergenceReport::Verdict::DivergentLooking ? VolumeSum::Verdict::Divergent
                                                                         : VolumeSum::Verdict::Convergent;
  v.ratio = std::numeric_limits<double>::quiet_NaN();
  return v;
}

DimensionEstimate fit_dimension(std::vector<double> deltas, std::vector<double> counts) {
  if (deltas.size() != counts.size()) throw std::invalid_argument("scale/count size mismatch");
  if (deltas.size() < 4) throw std::invalid_argument("box dimension needs at least 4 scales");
  std::vector<std::size_t> order(deltas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return deltas[a] > deltas[b]; });
  DimensionEstimate est;
  for (auto i : order) {
    if (!(deltas[i] > 0.0) || !(counts[i] > 0.0)) throw std::invalid_argument("scales and counts must be positive");
    if (!est.deltas.empty() && deltas[i] == est.deltas.back()) throw std::invalid_argument("repeated scale");
    est.deltas.push_back(deltas[i]);
    est.counts.push_back(counts[i]);
  }
  const std::size_t k = est.deltas.size();
  std::vector<double> x(k), y(k);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = -std::log(est.deltas[i]);
    y[i] = std::log(est.counts[i]);
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = y[i] - (est.intercept + est.slope * x[i]);
    ss += r * r;
  }
  est.residual = std::sqrt(ss / static_cast<double>(k));
  return est;
}

DimensionEstimate box_dimension(const PointCloud& cloud, std::vector<double> deltas) {
  if (deltas.empty()) {
    for (int j = 4; j <= 12; ++j) deltas.push_back(std::ldexp(1.0, -j));
  }
  std::vector<double> counts;
  for (double delta : deltas) {
    if (!(delta > 0.0)) throw std::invalid_argument("box sizes must be > 0");
    std::vector<Cell> cells;
    cells.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      Cell c{0, 0, 0};
      const auto x = cloud.point(i);
      for (std::size_t k = 0; k < x.size(); ++k) c[k] = static_cast<std::int64_t>(std::floor(x[k] / delta));
      cells.push_back(c);
    }
    std::sort(cells.begin(), cells.end());
    counts.push_back(static_cast<double>(std::unique(cells.begin(), cells.end()) - cells.begin()));
  }
  return fit_dimension(std::move(deltas), std::move(counts));
}

DimensionEstimate limsup_cover_dimension(const Ifs& ifs, std::span<const double> z, const PsiSpec& psi, int n_lo,
                                         int n_hi, const GenerationLimits& limits) {
  if (dimension(ifs) != 1) throw std::invalid_argument("limsup cover dimension is one-dimensional");
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("level range must satisfy 1 <= lo <= hi");
  const auto m = BernoulliMeasure::uniform(map_count(ifs));
  CloudOptions opts;
  opts.limits = limits;
  std::vector<double> deltas, counts;
  for (int n = n_lo; n <= n_hi; ++n) {
    const double dn = static_cast<double>(n);
    const double r = std::pow(psi.beta, -psi.kappa * dn) * std::pow(dn, -psi.gamma);
    const auto cloud = point_cloud(ifs, m, n, z, opts);
    std::vector<std::int64_t> cells;
    for (double c : cloud.coords) {
      const auto a = static_cast<std::int64_t>(std::floor((c - r) / r));
      const auto b = static_cast<std::int64_t>(std::floor((c + r) / r));
      for (auto j = a; j <= b; ++j) cells.push_back(j);
    }
    std::sort(cells.begin(), cells.end());
    deltas.push_back(r);
    counts.push_back(static_cast<double>(std::unique(cells.begin(), cells.end()) - cells.begin()));
  }
  return fit_dimension(std::move(deltas), std::move(counts));
}

double mt_predict(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("mass transference prediction needs s > 0");
  return 1.0 / (1.0 + s);
}

}  // namespace ifslab

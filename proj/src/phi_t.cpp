#include "ifslab/phi_t.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ifslab {

namespace {

constexpr int kFixedPointBits = 100;
constexpr int kBruteGapCap = 8;

void check_level(int n, int cap) {
  if (n < 1) throw std::invalid_argument("level n must be >= 1");
  if (n > cap) throw ResourceError("level " + std::to_string(n) + " exceeds the exact-level cap " + std::to_string(cap),
                                   std::ldexp(1.0, 2 * n));
}

i128 to_i128(const BigInt& x) {
  const bool neg = x < 0;
  BigInt a = neg ? BigInt(-x) : x;
  const auto lo = static_cast<std::uint64_t>(a & BigInt(~std::uint64_t{0}));
  const auto hi = static_cast<std::uint64_t>(a >> 64);
  const i128 v = (static_cast<i128>(hi) << 64) | static_cast<i128>(lo);
  return neg ? -v : v;
}

BigInt from_i128(i128 v) {
  const bool neg = v < 0;
  const auto a = static_cast<unsigned __int128>(neg ? -v : v);
  BigInt x = (BigInt(static_cast<std::uint64_t>(a >> 64)) << 64) + BigInt(static_cast<std::uint64_t>(a));
  return neg ? BigInt(-x) : x;
}

// Integer keys k(p,q) = p*B + q*Tb with value (p + q t)/2^n = k / (B 2^n).
struct KeyScheme {
  i128 B = 1;
  i128 Tb = 0;
  bool exact = true;
};

KeyScheme key_scheme(const PhiTSystem& sys) {
  KeyScheme ks;
  if (auto ex = sys.cf().exact_value(); ex && ex->second < (BigInt(1) << 40)) {
    ks.B = to_i128(ex->second);
    ks.Tb = to_i128(ex->first);
    return ks;
  }
  ks.exact = false;
  ks.B = i128{1} << kFixedPointBits;
  const Real scaled = ldexp(sys.t(), kFixedPointBits);
  ks.Tb = to_i128(BigInt(floor(scaled)));
  return ks;
}

// floor(s * B / 2^n), clamped far above any key difference
i128 radius_threshold(double s, const KeyScheme& ks, int n) {
  int e = 0;
  const double f = std::frexp(s, &e);
  const BigInt mant(static_cast<std::uint64_t>(std::ldexp(f, 53)));
  const int shift = e - 53 - n;
  BigInt x = mant * from_i128(ks.B);
  x = shift >= 0 ? BigInt(x << shift) : BigInt(x >> -shift);
  const BigInt cap = BigInt(1) << 120;
  return to_i128(x > cap ? cap : x);
}

bool optimal_level(const ContinuedFraction& cf, int n, const BestApprox& ba) {
  // 8 * 2^n * min(1, |q t - p|) >= 1
  const BigInt K = BigInt(8) << n;
  const BigInt a = K * ba.q;
  const BigInt b = -K * ba.p;
  if (certified_sign(cf, a, b - 1) >= 0) return true;
  if (certified_sign(cf, a, b + 1) <= 0) return true;
  return false;
}

}  // namespace

PhiTSystem::PhiTSystem(TSpec t) : cf_(std::make_shared<ContinuedFraction>(std::move(t))) {}

ExactPoint word_to_pair(const Word& a) {
  ExactPoint e;
  e.level = static_cast<int>(a.size());
  if (a.size() > 63) throw std::invalid_argument("word too long for exact pairs");
  for (auto d : a.digits) {
    if (d > 3) throw std::invalid_argument("Phi_t words use symbols 1..4");
    e.p = (e.p << 1) | (d & 1u);
    e.q = (e.q << 1) | (d >> 1);
  }
  return e;
}

Word pair_to_word(const ExactPoint& e) {
  Word w;
  for (int j = e.level - 1; j >= 0; --j) {
    const auto b = (e.p >> j) & 1u;
    const auto c = (e.q >> j) & 1u;
    w.digits.push_back(static_cast<std::uint8_t>(b | (c << 1)));
  }
  return w;
}

std::vector<ExactPoint> images_exact(const PhiTSystem&, int n, const GenerationLimits& limits) {
  check_level(n, kExactLevelCap);
  const double count = std::ldexp(1.0, 2 * n);
  if (count > static_cast<double>(limits.max_words)) {
    throw ResourceError("4^" + std::to_string(n) + " exact images exceed the cap of " +
                            std::to_string(limits.max_words),
                        count);
  }
  const std::uint64_t total = std::uint64_t{1} << (2 * n);
  std::vector<ExactPoint> out;
  out.reserve(total);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    ExactPoint e;
    e.level = n;
    for (int j = n - 1; j >= 0; --j) {
      const auto d = (idx >> (2 * j)) & 3u;
      e.p = (e.p << 1) | (d & 1u);
      e.q = (e.q << 1) | (d >> 1);
    }
    out.push_back(e);
  }
  return out;
}

OverlapReport detect_overlap(const PhiTSystem& sys, int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  OverlapReport r;
  const auto ex = sys.cf().exact_value();
  if (!ex) return r;
  const BigInt& a = ex->first;
  const BigInt& b = ex->second;
  int n = 1;
  while ((BigInt(1) << n) - 1 < b) ++n;
  if (n > n_max) return r;
  r.level = n;
  r.p = static_cast<std::uint64_t>(a);
  r.q = static_cast<std::uint64_t>(b);
  return r;
}

GapValue min_gap_exact(const PhiTSystem& sys, int n) {
  if (n < 1 || n > 62) throw std::invalid_argument("level n must lie in [1, 62]");
  const BigInt Q = (BigInt(1) << n) - 1;
  const auto ba = best_approx_error(sys.cf(), Q);
  GapValue g;
  g.derivation = "cf-closed-form";
  g.u_gap = ba.error < 1 ? ba.error : Real(1);
  g.gap = ldexp(g.u_gap, -n);
  if (ba.exact_error) {
    auto [num, den] = *ba.exact_error;
    if (num >= den) num = den;
    g.exact = std::make_pair(num, BigInt(den << n));
  }
  return g;
}

GapValue min_gap_brute(const PhiTSystem& sys, int n) {
  check_level(n, kBruteGapCap);
  const std::uint64_t side = std::uint64_t{1} << n;
  GapValue g;
  g.derivation = "brute";
  if (auto ex = sys.cf().exact_value()) {
    const BigInt& a = ex->first;
    const BigInt& b = ex->second;
    std::vector<BigInt> keys;
    keys.reserve(side * side);
    for (std::uint64_t p = 0; p < side; ++p) {
      for (std::uint64_t q = 0; q < side; ++q) keys.push_back(p * b + q * a);
    }
    std::sort(keys.begin(), keys.end());
    BigInt best = keys[1] - keys[0];
    for (std::size_t i = 2; i < keys.size(); ++i) best = std::min(best, BigInt(keys[i] - keys[i - 1]));
    g.exact = std::make_pair(best, BigInt(b << n));
    g.u_gap = Real(best) / Real(b);
    g.gap = ldexp(g.u_gap, -n);
    return g;
  }
  const Real t = sys.t();
  std::vector<Real> vals;
  vals.reserve(side * side);
  for (std::uint64_t p = 0; p < side; ++p) {
    for (std::uint64_t q = 0; q < side; ++q) vals.push_back(Real(p) + Real(q) * t);
  }
  std::sort(vals.begin(), vals.end());
  Real best = vals[1] - vals[0];
  for (std::size_t i = 2; i < vals.size(); ++i) best = std::min(best, Real(vals[i] - vals[i - 1]));
  g.u_gap = best;
  g.gap = ldexp(best, -n);
  return g;
}

DichotomyReport dichotomy_report(const PhiTSystem& sys, int N) {
  if (N < 1 || N > 62) throw std::invalid_argument("dichotomy report needs 1 <= N <= 62");
  const auto& cf = sys.cf();
  DichotomyReport rep;
  rep.t = describe(sys.spec());
  rep.overlap_level = detect_overlap(sys, N).level;
  for (int n = 1; n <= N; ++n) {
    DichotomyLevel lv;
    lv.n = n;
    lv.delta = min_gap_exact(sys, n);
    lv.optimal = optimal_level(cf, n, best_approx_error(cf, (BigInt(1) << n) - 1));
    lv.provisional = n < 3;
    try {
      lv.predicted_good = good_levels(cf, 0.125, n).back().good();
    } catch (const InsufficientDepth&) {
      lv.predicted_good = false;
    }
    lv.discrepancy = lv.predicted_good && n >= 3 && !lv.optimal;
    if (lv.discrepancy) rep.discrepancies.push_back(n);
    rep.optimal_found = rep.optimal_found || lv.optimal;
    rep.levels.push_back(std::move(lv));
  }
  const BigInt window = 4 * ((BigInt(1) << N) - 1);
  const auto top = cf.last_index_with_q_at_most(window);
  rep.guarantee_applies = cf.q(static_cast<long>(top)) >= 2;
  double ct = std::numeric_limits<double>::infinity();
  const Real t = sys.t();
  for (std::size_t m = 1; m <= top; ++m) {
    const Real q(cf.q(static_cast<long>(m)));
    const Real v = q * abs(q * t - Real(cf.p(static_cast<long>(m))));
    if (v > 0) ct = std::min(ct, static_cast<double>(v));
  }
  rep.empirical_ct = std::isfinite(ct) ? ct : 0.0;
  return rep;
}

std::vector<CollapseLevel> collapse_levels(const PhiTSystem& sys, int K) {
  if (K < 1) throw std::invalid_argument("collapse levels need K >= 1");
  const auto& cf = sys.cf();
  std::uint64_t bounded_max = 0;
  if (const auto* pe = std::get_if<PeriodicT>(&cf.spec())) {
    for (auto z : pe->preperiod) bounded_max = std::max(bounded_max, z);
    for (auto z : pe->period) bounded_max = std::max(bounded_max, z);
  }
  constexpr std::size_t kSearchDepth = 100000;
  std::vector<CollapseLevel> out;
  for (int k = 1; k <= K; ++k) {
    const std::uint64_t need = static_cast<std::uint64_t>(k) * k * k;
    if (bounded_max && bounded_max < need) {
      throw std::invalid_argument("t has no partial quotient >= k^3 = " + std::to_string(need) + " (k = " +
                                  std::to_string(k) + ")");
    }
    std::optional<std::size_t> found;
    const auto len = cf.length();
    for (std::size_t m = 1; m < kSearchDepth; ++m) {
      if (len && m + 1 > *len) break;
      if (cf.quotient(m + 1) >= need) {
        found = m;
        break;
      }
    }
    if (!found) {
      throw std::invalid_argument("no partial quotient >= k^3 = " + std::to_string(need) +
                                  " within the available depth (k = " + std::to_string(k) + ")");
    }
    CollapseLevel c;
    c.k = k;
    c.m = *found;
    c.q = cf.q(static_cast<long>(c.m));
    c.p = cf.p(static_cast<long>(c.m));
    // 2^{n_k} <= k^2 q_{m_k} < 2^{n_k+1}
    c.n = static_cast<int>(boost::multiprecision::msb(BigInt(c.q * k * k)));
    c.positive = c.m % 2 == 0;
    out.push_back(std::move(c));
  }
  return out;
}

RateFunction witness_h(const std::vector<int>& levels, double s, int d) {
  if (levels.empty()) throw std::invalid_argument("witness rate function needs at least one level");
  if (!(s > 0.0) || d < 1) throw std::invalid_argument("witness needs s > 0 and d >= 1");
  return RateFunction::indicator(levels, std::pow(s, d));
}

double witness_cover_sum(const std::vector<LevelRecord>& records, double s) {
  long double sum = 0.0L;
  for (const auto& r : records) sum += 6.0L * s * static_cast<long double>(r.ratio);
  return static_cast<double>(sum);
}

LevelRecord phit_separation(const PhiTSystem& sys, int n, double s, int enumeration_cap) {
  if (!(s > 0.0)) throw std::invalid_argument("probe scale s must be > 0");
  if (n < 1 || n > 62) throw std::invalid_argument("level n must lie in [1, 62]");
  LevelRecord rec;
  rec.n = n;
  rec.radius = std::ldexp(s, -2 * n);
  rec.cardinality = n < 32 ? std::size_t{1} << (2 * n) : std::numeric_limits<std::size_t>::max();

  if (n > std::min(enumeration_cap, kExactLevelCap)) {
    const auto g = min_gap_exact(sys, n);
    rec.min_gap = static_cast<double>(g.gap);
    if (g.gap > ldexp(Real(s), -2 * n)) {
      rec.separated = rec.cardinality;
      rec.ratio = 1.0;
      rec.near_pairs = 0;
      rec.method = "closed-form";
      return rec;
    }
    throw ResourceError("level " + std::to_string(n) + " is not decided by the closed-form gap and exceeds the " +
                            "enumeration cap " + std::to_string(enumeration_cap),
                        std::ldexp(1.0, 2 * n));
  }

  const auto ks = key_scheme(sys);
  const std::uint64_t side = std::uint64_t{1} << n;
  std::vector<i128> keys;
  keys.reserve(side * side);
  for (std::uint64_t p = 0; p < side; ++p) {
    const i128 base = static_cast<i128>(p) * ks.B;
    for (std::uint64_t q = 0; q < side; ++q) keys.push_back(base + static_cast<i128>(q) * ks.Tb);
  }
  std::sort(keys.begin(), keys.end());
  const i128 thr = radius_threshold(s, ks, n);
  const std::span<const i128> view(keys);
  rec.separated = greedy_count_sorted<i128>(view, thr);
  rec.near_pairs = near_pairs_sorted<i128>(view, thr);
  rec.ratio = static_cast<double>(rec.separated) / static_cast<double>(rec.cardinality);
  const i128 gap = min_diff_sorted<i128>(view);
  rec.min_gap = static_cast<double>(ldexp(Real(from_i128(gap)) / Real(from_i128(ks.B)), -n));
  rec.exact = ks.exact;
  rec.method = ks.exact ? "exact-pairs" : "fixed-point-pairs";
  return rec;
}

SeparationProfile phit_separation_profile(const PhiTSystem& sys, double s, int n_lo, int n_hi, int enumeration_cap) {
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("level range must satisfy 1 <= lo <= hi");
  SeparationProfile prof;
  prof.s = s;
  for (int n = n_lo; n <= n_hi; ++n) prof.levels.push_back(phit_separation(sys, n, s, enumeration_cap));
  return prof;
}

}  // namespace ifslab

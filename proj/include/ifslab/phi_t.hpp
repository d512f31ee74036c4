#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ifslab/contfrac.hpp"
#include "ifslab/separation.hpp"
#include "ifslab/symbolic.hpp"

namespace ifslab {

// {x/2, (x+1)/2, (x+t)/2, (x+1+t)/2} with t given exactly by its expansion.
class PhiTSystem {
 public:
  explicit PhiTSystem(TSpec t);

  const TSpec& spec() const { return cf_->spec(); }
  const ContinuedFraction& cf() const { return *cf_; }
  Real t() const { return cf_->value(); }
  double t_double() const { return static_cast<double>(cf_->value()); }
  // [0, 1 + t]
  double attractor_hi() const { return 1.0 + t_double(); }

 private:
  std::shared_ptr<const ContinuedFraction> cf_;
};

// (p + q t) / 2^n
struct ExactPoint {
  int level = 0;
  std::uint64_t p = 0;
  std::uint64_t q = 0;

  auto operator<=>(const ExactPoint&) const = default;
};

// Symbol k (zero-based) contributes the bits (k & 1, k >> 1) to (p, q).
ExactPoint word_to_pair(const Word& a);
Word pair_to_word(const ExactPoint& e);

constexpr int kExactLevelCap = 16;

// all 4^n pairs in lexicographic word order
std::vector<ExactPoint> images_exact(const PhiTSystem& sys, int n, const GenerationLimits& limits = {});

struct OverlapReport {
  std::optional<int> level;
  std::uint64_t p = 0;
  std::uint64_t q = 0;
  bool definitive = true;
};

OverlapReport detect_overlap(const PhiTSystem& sys, int n_max);

struct GapValue {
  Real gap;     // Delta_n
  Real u_gap;   // 2^n Delta_n
  std::optional<std::pair<BigInt, BigInt>> exact;  // Delta_n as num/den for rational t
  std::string derivation;                           // "cf-closed-form" or "brute"
};

GapValue min_gap_exact(const PhiTSystem& sys, int n);
// sorts all 4^n values; n <= 8
GapValue min_gap_brute(const PhiTSystem& sys, int n);

struct DichotomyLevel {
  int n = 0;
  GapValue delta;
  bool optimal = false;          // Delta_n >= 1/(8 * 4^n), certified
  bool predicted_good = false;   // good 1/8-level
  bool provisional = false;
  bool discrepancy = false;      // predicted good, n >= 3, not optimal
};

struct DichotomyReport {
  std::string t;
  std::optional<int> overlap_level;
  std::vector<DichotomyLevel> levels;
  bool guarantee_applies = false;  // some q_m in [2, 4(2^N - 1)]
  bool optimal_found = false;
  double empirical_ct = 0.0;       // min over materialised m of q_m |q_m t - p_m|
  std::vector<int> discrepancies;
};

DichotomyReport dichotomy_report(const PhiTSystem& sys, int N);

struct CollapseLevel {
  int k = 0;
  std::size_t m = 0;
  int n = 0;
  BigInt q;
  BigInt p;
  bool positive = true;  // sign of q_m t - p_m
};

std::vector<CollapseLevel> collapse_levels(const PhiTSystem& sys, int K);

// s^d on the levels, zero elsewhere
RateFunction witness_h(const std::vector<int>& levels, double s, int d = 1);

// Sum over records of 6 s T_n / R_n: the measure of the B(u, 3s/R_n) cover of
// a separated subset, which bounds the collapse-level limsup coverage.
double witness_cover_sum(const std::vector<LevelRecord>& records, double s);

constexpr int kExactEnumerationCap = 12;

// Separation statistics at radius s/4^n over exact keys. Levels above the
// enumeration cap use the closed-form gap, which decides ratio == 1 exactly
// whenever Delta_n > s/4^n; otherwise a ResourceError is raised.
LevelRecord phit_separation(const PhiTSystem& sys, int n, double s, int enumeration_cap = kExactEnumerationCap);

SeparationProfile phit_separation_profile(const PhiTSystem& sys, double s, int n_lo, int n_hi,
                                          int enumeration_cap = kExactEnumerationCap);

}  // namespace ifslab

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ifslab/ifs.hpp"

namespace ifslab {

struct SeparatedSubset {
  enum class Flag { Exact, LowerBound };

  double radius = 0.0;
  std::vector<std::size_t> members;
  Flag flag = Flag::Exact;
  // packing bound for d >= 2 (occupied cells of side r/sqrt(d))
  std::optional<std::size_t> upper_bound;

  std::size_t count() const { return members.size(); }
};

// Kernels over sorted 1D keys (doubles or exact integer keys). Separation is
// strict: consecutive accepted keys differ by more than `thr`.
template <class T>
std::size_t greedy_count_sorted(std::span<const T> sorted, T thr) {
  if (sorted.empty()) return 0;
  std::size_t count = 1;
  T last = sorted[0];
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] - last > thr) {
      ++count;
      last = sorted[i];
    }
  }
  return count;
}

// ordered pairs (i, j), i != j, with key difference <= thr
template <class T>
std::uint64_t near_pairs_sorted(std::span<const T> sorted, T thr) {
  std::uint64_t pairs = 0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < sorted.size(); ++hi) {
    while (sorted[hi] - sorted[lo] > thr) ++lo;
    pairs += hi - lo;
  }
  return 2 * pairs;
}

template <class T>
T min_diff_sorted(std::span<const T> sorted) {
  T best = sorted[1] - sorted[0];
  for (std::size_t i = 2; i < sorted.size(); ++i) best = std::min(best, sorted[i] - sorted[i - 1]);
  return best;
}

SeparatedSubset max_separated(std::span<const double> points, double r);
// d taken from the cloud; d == 1 dispatches to the exact 1D routine
SeparatedSubset max_separated(const PointCloud& cloud, double r);

double min_gap(std::span<const double> points);
double min_gap(const PointCloud& cloud);

std::uint64_t near_pair_count(std::span<const double> points, double r);
std::uint64_t near_pair_count(const PointCloud& cloud, double r);

struct LevelRecord {
  int n = 0;
  std::size_t cardinality = 0;  // R_n
  std::size_t separated = 0;    // T_n
  double ratio = 0.0;
  double min_gap = 0.0;
  std::uint64_t near_pairs = 0;
  double radius = 0.0;
  bool exact = true;   // T_n is the true maximum
  std::string method;  // "sorted-1d", "grid-greedy", "exact-pairs", "closed-form"
};

struct SeparationProfile {
  double s = 0.0;
  std::vector<LevelRecord> levels;
};

// T at radius s * R_n^{-1/d} for one cloud
LevelRecord separation_record(const PointCloud& cloud, double s);

SeparationProfile separation_profile(const Ifs& ifs, const BernoulliMeasure& m, std::span<const double> z, double s,
                                     int n_lo, int n_hi, const GenerationLimits& limits = {});

struct CsProbe {
  enum class Verdict { CsConsistent, CollapseWitnessed };

  double threshold = 0.05;
  double running_minimum = 1.0;
  std::vector<double> running_minima;  // per profile level
  Verdict verdict = Verdict::CsConsistent;
  std::vector<int> witness_levels;
};

CsProbe cs_probe(const SeparationProfile& profile, double threshold = 0.05);

}  // namespace ifslab

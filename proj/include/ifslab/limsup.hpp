#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ifslab/ifs.hpp"
#include "ifslab/symbolic.hpp"

namespace ifslab {

// Balls B(phi_a(z), radius_a) for the words of one level.
struct BallFamily {
  int level = 0;
  int dim = 1;
  std::vector<double> centers;  // row-major
  std::vector<double> radii;
  bool clamped = false;

  std::size_t size() const { return radii.size(); }
};

// radius (m([a]) h(n))^{1/d}; with clamp_s the common radius
// g(n) = min((h(n)/R_n)^{1/d}, s/(3 R_n^{1/d})).
BallFamily level_balls(const PointCloud& cloud, const RateFunction& h, std::optional<double> clamp_s = std::nullopt);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// sorted, pairwise disjoint union of a 1D family, optionally clipped
std::vector<Interval> merged_intervals(const BallFamily& family, std::optional<Interval> clip = std::nullopt);
double total_length(std::span<const Interval> merged);
double intersection_length(std::span<const Interval> a, std::span<const Interval> b);

struct MeasureEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero when exact
  bool exact = true;
};

struct MonteCarloOptions {
  std::uint64_t seed = 0x5eed5eedULL;
  std::size_t samples = 1 << 18;
};

// 1D: exact sort-merge. d >= 2: seeded Monte Carlo over the bounding box.
MeasureEstimate union_measure(std::span<const BallFamily> families, const MonteCarloOptions& mc = {});
MeasureEstimate union_measure(const BallFamily& family, const MonteCarloOptions& mc = {});

// (sum L(E_n))^2 / sum_{n,m} L(E_n cap E_m) over 1D level unions
double kochen_stone_bound(std::span<const std::vector<Interval>> levels);

struct CoverageOptions {
  int k_max = 3;
  std::optional<double> clamp_s;
  // hit-count field resolution; empty means no grid
  std::optional<double> grid;
  std::size_t max_grid_cells = std::size_t{1} << 26;
  std::size_t ks_max_levels = 20;
  GenerationLimits limits;
  MonteCarloOptions mc;
};

struct CoverageLevel {
  int n = 0;
  std::size_t balls = 0;
  double ball_sum = 0.0;  // sum of ball measures before merging
  double union_measure = 0.0;
  double union_std_error = 0.0;
};

struct CoverageReport {
  int dim = 1;
  std::vector<double> ambient_lo;
  std::vector<double> ambient_hi;
  double ambient_measure = 0.0;
  int n_lo = 0;
  int n_hi = 0;
  bool exact = true;
  std::vector<CoverageLevel> levels;
  std::vector<double> kfold;        // kfold[K-1] = measure covered by >= K levels
  std::vector<double> tail_union;   // tail_union[i] = L(union_{n >= n_lo+i} E_n)
  double ks_bound = 0.0;
  int ks_first_level = 0;           // levels used for the bound
  int ks_last_level = 0;
  std::vector<double> volume_partial_sums;
  std::optional<double> grid;
  std::vector<std::uint16_t> hit_counts;  // per grid cell (1D only)
};

CoverageReport coverage_report(const Ifs& ifs, const BernoulliMeasure& m, std::span<const double> z,
                               const RateFunction& h, int n_lo, int n_hi, const CoverageOptions& options = {});

// Psi(n) = beta^{-kappa n} n^{-gamma} on words of length n over l symbols.
struct PsiSpec {
  std::size_t symbols = 2;
  double beta = 2.0;
  double kappa = 1.0;
  double gamma = 0.0;
};

struct VolumeSum {
  std::vector<double> partial_sums;
  double ratio = 0.0;  // l beta^{-kappa sigma}
  enum class Verdict { Convergent, Divergent } verdict = Verdict::Convergent;
};

VolumeSum volume_sum(const PsiSpec& psi, double sigma, long N);
// sum_n h(n), the (m, h) form of the volume sum
VolumeSum volume_sum(const RateFunction& h, long N);

struct DimensionEstimate {
  std::vector<double> deltas;
  std::vector<double> counts;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
};

// OLS of log N(delta) on log(1/delta); at least 4 scales
DimensionEstimate fit_dimension(std::vector<double> deltas, std::vector<double> counts);

// box counts of a point set over the given scales; default dyadic 2^-j, j in [4, 12]
DimensionEstimate box_dimension(const PointCloud& cloud, std::vector<double> deltas = {});

// Scale-matched cover of the truncated limsup set W(z, Psi): at level n the
// scale is delta_n = Psi(n) and N(delta_n) counts delta_n-cells met by the
// level-n balls. 1D only.
DimensionEstimate limsup_cover_dimension(const Ifs& ifs, std::span<const double> z, const PsiSpec& psi, int n_lo,
                                         int n_hi, const GenerationLimits& limits = {});

double mt_predict(double s);

}  // namespace ifslab

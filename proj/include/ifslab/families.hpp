#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ifslab/ifs.hpp"
#include "ifslab/symbolic.hpp"

namespace ifslab {

struct FamilySpec {
  enum class Kind { BernoulliConvolution, ZeroOneThree, Custom };

  Kind kind = Kind::BernoulliConvolution;
  std::vector<double> digits{-1.0, 1.0};

  // `bc`, `013`, `custom:[d1,d2,...]`
  static FamilySpec parse(std::string_view text);
  static FamilySpec bernoulli_convolution();
  static FamilySpec zero_one_three();
  std::string describe() const;
};

// max |d_j - d_l| / min nonzero |d_k - d_i|
double b_of_D(std::span<const double> digits);

struct AlphaBound {
  double value = 0.0;
  std::string provenance;
  bool exact = false;  // true when the bound is known to be attained
};

// regime table in b alone
AlphaBound alpha_for_b(double b);
AlphaBound alpha_lower_bound(const FamilySpec& family);

// s with sum r_i^s = 1
double similarity_dimension(std::span<const double> ratios);
double similarity_dimension(const SimilarityIfs1D& ifs);

struct EightMapConstants {
  double gamma = 0.0;
  double attractor_dimension = 0.0;
  double cover_exponent = 0.0;
};

EightMapConstants eight_map_constants();

struct GarsiaLevel {
  int n = 0;
  double gap = 0.0;     // min gap between distinct sign sums; 0 below 2^-200
  double scaled = 0.0;  // 2^n * gap
  double running_inf = 0.0;
  bool exact_zero = false;
};

constexpr int kGarsiaLevelCap = 16;

// lambda in (1/2, 1)
std::vector<GarsiaLevel> garsia_separation_scan(const Real& lambda, int n_max);

struct LambdaGrid {
  double lo = 0.5;
  double hi = 0.668;
  std::size_t steps = 64;
  double margin = 1e-3;  // endpoints excluded by this much

  std::vector<double> points() const;
};

struct SweepResult {
  std::vector<double> lambdas;
  std::vector<double> ratios;
  std::vector<double> min_gaps;
  std::vector<double> c_values;
  std::vector<double> fractions;  // share of lambdas with ratio >= c
};

SweepResult lambda_sweep(const FamilySpec& family, const BernoulliMeasure& m, double s, int n, const LambdaGrid& grid,
                         std::vector<double> c_values, unsigned threads = 1, const GenerationLimits& limits = {});

}  // namespace ifslab

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ifslab/common.hpp"

namespace ifslab {

// Finite word over the alphabet {1,...,l}. Symbols are stored zero-based;
// to_string() and parse() use the one-based labels.
struct Word {
  std::vector<std::uint8_t> digits;

  std::size_t size() const { return digits.size(); }
  bool empty() const { return digits.empty(); }

  Word concat(const Word& other) const;

  // "12" style for alphabets of at most 9 symbols, "1.12.3" otherwise.
  std::string to_string(std::size_t alphabet = 9) const;
  static Word parse(std::string_view text);

  auto operator<=>(const Word&) const = default;
  bool operator==(const Word&) const = default;
};

// Bernoulli measure on the code space. Every probability is positive, so the
// measure is slowly decaying with constant min_i p_i.
class BernoulliMeasure {
 public:
  explicit BernoulliMeasure(std::vector<double> probabilities);
  static BernoulliMeasure uniform(std::size_t symbols);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> probabilities() const { return p_; }
  double min_probability() const;
  double max_probability() const;
  bool is_uniform() const;

  double cylinder_mass(const Word& a) const;
  double cylinder_mass(std::span<const std::uint8_t> digits) const;

 private:
  std::vector<double> p_;
};

double entropy(const BernoulliMeasure& m);
double slow_decay_constant(const BernoulliMeasure& m);

struct GenerationLimits {
  std::size_t max_words = std::size_t{1} << 26;
};

// The antichain L_{m,n} in lexicographic order together with cylinder masses.
struct StoppingGeneration {
  int level = 0;
  std::vector<Word> words;
  std::vector<double> masses;

  std::size_t cardinality() const { return words.size(); }
};

// Lower bound c_m^{-n} on R_{m,n} for a quick cap check; exact l^n for
// uniform measures.
double estimated_generation_size(const BernoulliMeasure& m, int n);

// Depth-first descent over L_{m,n} in lexicographic order without storing
// the words. The callback sees the word digits and the cylinder mass.
void for_each_stopping_word(
    const BernoulliMeasure& m, int n, const GenerationLimits& limits,
    const std::function<void(std::span<const std::uint8_t>, double)>& visit);

StoppingGeneration stopping_generation(const BernoulliMeasure& m, int n,
                                       const GenerationLimits& limits = {});

// Rate functions h : N -> [0, inf). Bounded by construction.
class RateFunction {
 public:
  enum class Kind { Constant, Reciprocal, ReciprocalSquare, Geometric, Indicator, Tabulated };

  static RateFunction constant(double value);
  static RateFunction reciprocal();
  static RateFunction reciprocal_square();
  static RateFunction geometric(double ratio);
  // value on the listed levels, zero elsewhere; levels strictly increasing, positive
  static RateFunction indicator(std::vector<int> levels, double value);
  // values[0] is h(1)
  static RateFunction tabulated(std::vector<double> values);

  // `constant(1)`, `reciprocal`, `reciprocal_square`, `geometric(0.5)`,
  // `indicator(2,5,9;0.5)`, `table(path)` (whitespace/comma separated numbers).
  static RateFunction parse(std::string_view spec);

  Kind kind() const { return kind_; }
  double operator()(long n) const;
  double sup() const;
  std::string describe() const;

  double parameter() const { return param_; }
  const std::vector<int>& levels() const { return levels_; }
  const std::vector<double>& table() const { return table_; }

 private:
  Kind kind_ = Kind::Constant;
  double param_ = 0.0;
  std::vector<int> levels_;
  std::vector<double> table_;
};

struct DivergenceReport {
  enum class Verdict { DivergentLooking, ConvergentLooking };

  long horizon = 0;
  double partial_sum = 0.0;
  Verdict verdict = Verdict::ConvergentLooking;
  // true when the verdict comes from the closed form of a built-in kind
  bool closed_form = false;
  // membership flags; empty when not decided
  std::optional<bool> in_h;
  std::optional<bool> in_h_star;
  // true when the H* flag only records the sufficient test
  // (non-increasing with divergent-looking sum)
  bool sufficient_condition_only = false;
};

DivergenceReport rate_divergence(const RateFunction& h, long horizon);

}  // namespace ifslab

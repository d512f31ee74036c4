#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ifslab/common.hpp"

namespace ifslab {

// t = a/b in lowest terms, 0 < a <= b
struct RationalT {
  std::uint64_t num = 1;
  std::uint64_t den = 1;
};

// [0; pre..., period, period, ...]
struct PeriodicT {
  std::vector<std::uint64_t> preperiod;
  std::vector<std::uint64_t> period;
};

// explicit finite quotient list
struct TableT {
  std::vector<std::uint64_t> quotients;
};

// zeta_{2j-1} = j^3, zeta_{2j} = 1: (1, 1, 8, 1, 27, 1, 64, ...)
struct CubesT {};

using TSpec = std::variant<RationalT, PeriodicT, TableT, CubesT>;

// `rational:3/4`, `cf:[2;2]`, `cf:[;1]`, `cftable:[1,100,1]`,
// plus the names `golden`, `sqrt2m1`, `cubes`.
TSpec parse_tspec(std::string_view text);
std::string describe(const TSpec& t);

TSpec golden_conjugate();
TSpec sqrt2_minus_1();

// Lazily extended expansion with exact convergents. Extension is serialised
// behind a mutex; reads return copies, so instances may be shared between
// threads.
class ContinuedFraction {
 public:
  explicit ContinuedFraction(TSpec spec);

  const TSpec& spec() const { return spec_; }
  // number of quotients for finite expansions
  std::optional<std::size_t> length() const;
  bool is_rational() const;
  // p_L/q_L for finite expansions
  std::optional<std::pair<BigInt, BigInt>> exact_value() const;

  // m >= 1; throws InsufficientDepth past the end of a finite expansion
  std::uint64_t quotient(std::size_t m) const;
  // m >= -1 (seeds p_{-1}=1, q_{-1}=0, p_0=0, q_0=1)
  BigInt p(long m) const;
  BigInt q(long m) const;

  // materialises quotients 1..depth (clamped to the finite length)
  void ensure_depth(std::size_t depth) const;
  // largest materialisable m with q_m <= bound; for finite expansions this
  // can be the last index
  std::size_t last_index_with_q_at_most(const BigInt& bound) const;

  // t at 256-bit precision; exact up to rounding for finite expansions
  Real value() const;

 private:
  std::uint64_t generate(std::size_t m) const;
  void extend_locked(std::size_t depth) const;

  TSpec spec_;
  mutable std::mutex mu_;
  mutable std::vector<std::uint64_t> zeta_;  // zeta_[m-1] = zeta_m
  mutable std::vector<BigInt> p_;            // p_[m+1] = p_m
  mutable std::vector<BigInt> q_;
  mutable std::optional<Real> value_;
};

std::shared_ptr<const ContinuedFraction> expand(const TSpec& t, std::size_t depth);

struct BestApprox {
  BigInt q;
  BigInt p;
  std::size_t index = 0;  // convergent index m
  Real error;             // |q t - p|
  // error as num/den when t is rational
  std::optional<std::pair<BigInt, BigInt>> exact_error;
};

// min over 1 <= q <= Q of |q t - p|, attained at the largest q_m <= Q
BestApprox best_approx_error(const ContinuedFraction& cf, const BigInt& Q);

struct ApproximabilityVerdict {
  enum class Kind { BoundedSoFar, Rational, UnboundedWitnessed };
  Kind kind = Kind::BoundedSoFar;
  std::uint64_t max_quotient = 0;
  bool definitive = false;
  std::size_t depth = 0;
};

ApproximabilityVerdict is_badly_approximable(const ContinuedFraction& cf, std::size_t depth);

// Sign of alpha*t + beta, decided exactly from convergents.
int certified_sign(const ContinuedFraction& cf, const BigInt& alpha, const BigInt& beta);

struct LevelVerdict {
  int n = 0;
  std::size_t m = 0;  // m_n
  BigInt q_m;
  std::optional<BigInt> q_next;  // empty past the end of a rational expansion
  bool dioph = false;            // 2 s q_{m+1} <= 2^n - 1
  bool cf = false;               // 3 s zeta_{m+1} <= 1
  bool provisional = false;      // n < 3
  bool good() const { return dioph || cf; }
};

// One record per level 1..N. s in (0, 1/2).
std::vector<LevelVerdict> good_levels(const ContinuedFraction& cf, double s, int N);

struct DensityCondition {
  double lhs = 0.0;
  double bound = 0.0;
  bool satisfied = true;
  std::vector<std::size_t> contributing;  // indices m with q_{m+1}/q_m >= L
};

// eps = +inf is the always-satisfied sentinel
DensityCondition density_condition(const ContinuedFraction& cf, double eps, double L, std::size_t M);

struct GaussPartial {
  std::vector<double> masses;        // mu_G([1/(m+1), 1/m])
  std::vector<double> terms;         // mass * log2(m+1)
  std::vector<double> partial_sums;  // running sums of terms
  double total_mass = 0.0;
};

GaussPartial gauss_condition_partial(std::size_t M);

}  // namespace ifslab

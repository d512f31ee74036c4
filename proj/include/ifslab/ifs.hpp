#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ifslab/symbolic.hpp"

namespace ifslab {

// x -> scale * x + shift
struct AffineMap1D {
  double scale = 1.0;
  double shift = 0.0;

  double operator()(double x) const { return scale * x + shift; }
  // (this o inner)(x) = this(inner(x))
  AffineMap1D after(const AffineMap1D& inner) const { return {scale * inner.scale, scale * inner.shift + shift}; }
};

// Phi_{lambda,D} = { x -> lambda x + d_i }.
class SimilarityIfs1D {
 public:
  SimilarityIfs1D(double ratio, std::vector<double> digits);

  double ratio() const { return ratio_; }
  const std::vector<double>& digits() const { return digits_; }
  std::size_t size() const { return digits_.size(); }

 private:
  double ratio_;
  std::vector<double> digits_;
};

// { x/2, (x+1)/2, (x+t)/2, (x+1+t)/2 } as a generic similarity system; t in (0,1).
SimilarityIfs1D phi_t_family(double t);

struct AffineMap {
  Eigen::MatrixXd linear;
  Eigen::VectorXd shift;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return linear * x + shift; }
};

class AffineIfs {
 public:
  enum class Structure { Similarity, Diagonal, General };

  AffineIfs(std::vector<Eigen::MatrixXd> matrices, std::vector<Eigen::VectorXd> translations);

  int dimension() const { return dim_; }
  std::size_t size() const { return matrices_.size(); }
  const Eigen::MatrixXd& matrix(std::size_t i) const { return matrices_[i]; }
  const Eigen::VectorXd& translation(std::size_t i) const { return translations_[i]; }
  Structure structure() const { return structure_; }
  // largest singular value of each matrix
  double operator_norm(std::size_t i) const { return norms_[i]; }
  double max_operator_norm() const;

  static AffineIfs from_similarity(const SimilarityIfs1D& ifs);

 private:
  int dim_ = 0;
  std::vector<Eigen::MatrixXd> matrices_;
  std::vector<Eigen::VectorXd> translations_;
  std::vector<double> norms_;
  Structure structure_ = Structure::General;
};

using Ifs = std::variant<SimilarityIfs1D, AffineIfs>;

int dimension(const Ifs& ifs);
std::size_t map_count(const Ifs& ifs);

AffineMap1D compose_map(const SimilarityIfs1D& ifs, const Word& a);
AffineMap compose_map(const AffineIfs& ifs, const Word& a);

// Points stored row-major: coords[i*dim + k].
struct PointCloud {
  int level = 0;
  int dim = 1;
  std::vector<double> anchor;
  std::vector<double> coords;
  std::vector<double> masses;
  std::vector<Word> words;  // filled only when requested
  bool anchor_in_bounds = true;

  std::size_t size() const { return masses.size(); }
  std::span<const double> point(std::size_t i) const {
    return std::span<const double>(coords).subspan(i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
  }
};

struct CloudOptions {
  GenerationLimits limits;
  bool keep_words = false;
};

// One point phi_a(z) per word of L_{m,n}, lexicographic word order.
PointCloud point_cloud(const Ifs& ifs, const BernoulliMeasure& m, int n, std::span<const double> z,
                       const CloudOptions& options = {});

// Closed box [lo, hi]; for affine systems also the radius of the invariant ball
// centred at the origin.
struct AttractorBounds {
  std::vector<double> lo;
  std::vector<double> hi;
  std::optional<double> ball_radius;

  bool contains(std::span<const double> x, double slack = 0.0) const;
  double diameter() const;
};

AttractorBounds attractor_bounds(const Ifs& ifs);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> mass;
  double total() const;
};

// Bins span the attractor bounds; the last bin is closed on the right.
Histogram empirical_pushforward(const Ifs& ifs, const BernoulliMeasure& m, int n, double z, std::size_t bins,
                                const GenerationLimits& limits = {});

// Per-word perturbation errors: a pure function of (seed, word), uniform in the
// closed disc of the given radius.
class PerturbationScheme {
 public:
  PerturbationScheme(double radius, std::uint64_t seed);

  double radius() const { return radius_; }
  std::uint64_t seed() const { return seed_; }
  Eigen::VectorXd error(std::span<const std::uint8_t> word, int dim) const;

 private:
  double radius_;
  std::uint64_t seed_;
};

struct PerturbedPoint {
  Eigen::VectorXd point;
  // bound on |value at depth - value at depth+1|
  double truncation_bound = 0.0;
};

// Perturbed composition along a·tail·tail·..., truncated to `depth` symbols,
// applied to the origin.
PerturbedPoint perturbed_point(const Ifs& ifs, const PerturbationScheme& scheme, const Word& a, const Word& tail,
                               std::size_t depth);

// splitmix64 finaliser; the counter-based generator behind the perturbations
std::uint64_t mix64(std::uint64_t x);

}  // namespace ifslab

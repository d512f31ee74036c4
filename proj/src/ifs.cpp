#include "ifslab/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

namespace ifslab {

SimilarityIfs1D::SimilarityIfs1D(double ratio, std::vector<double> digits)
    : ratio_(ratio), digits_(std::move(digits)) {
  if (!(ratio_ > 0.0 && ratio_ < 1.0)) throw std::invalid_argument("contraction ratio must lie in (0,1)");
  if (digits_.empty()) throw std::invalid_argument("IFS needs at least one map");
  if (digits_.size() > 255) throw std::invalid_argument("at most 255 maps supported");
  std::set<double> seen(digits_.begin(), digits_.end());
  if (seen.size() != digits_.size()) throw std::invalid_argument("digits must be pairwise distinct");
}

SimilarityIfs1D phi_t_family(double t) {
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("Phi_t as a similarity system needs t in (0,1)");
  // phi_i(x) = (x + d_i)/2 = x/2 + d_i/2
  return SimilarityIfs1D(0.5, {0.0, 0.5, 0.5 * t, 0.5 * (1.0 + t)});
}

AffineIfs::AffineIfs(std::vector<Eigen::MatrixXd> matrices, std::vector<Eigen::VectorXd> translations)
    : matrices_(std::move(matrices)), translations_(std::move(translations)) {
  if (matrices_.empty()) throw std::invalid_argument("IFS needs at least one map");
  if (matrices_.size() != translations_.size()) throw std::invalid_argument("matrix/translation count mismatch");
  if (matrices_.size() > 255) throw std::invalid_argument("at most 255 maps supported");
  dim_ = static_cast<int>(matrices_.front().rows());
  if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("affine systems are supported for dimensions 1..3");
  bool similarity = true, diagonal = true;
  for (std::size_t i = 0; i < matrices_.size(); ++i) {
    const auto& a = matrices_[i];
    if (a.rows() != dim_ || a.cols() != dim_ || translations_[i].size() != dim_) {
      throw std::invalid_argument("inconsistent dimensions in affine IFS");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    const double norm = sv(0);
    if (!(norm < 1.0)) throw std::invalid_argument("every matrix needs operator norm < 1");
    norms_.push_back(norm);
    if (sv(sv.size() - 1) < norm * (1.0 - 1e-12)) similarity = false;
    if (!a.isDiagonal(1e-15)) diagonal = false;
  }
  structure_ = similarity ? Structure::Similarity : (diagonal ? Structure::Diagonal : Structure::General);
}

double AffineIfs::max_operator_norm() const { return *std::max_element(norms_.begin(), norms_.end()); }

AffineIfs AffineIfs::from_similarity(const SimilarityIfs1D& ifs) {
  std::vector<Eigen::MatrixXd> mats;
  std::vector<Eigen::VectorXd> shifts;
  for (double d : ifs.digits()) {
    mats.push_back(Eigen::MatrixXd::Constant(1, 1, ifs.ratio()));
    shifts.push_back(Eigen::VectorXd::Constant(1, d));
  }
  return AffineIfs(std::move(mats), std::move(shifts));
}

int dimension(const Ifs& ifs) {
  return std::visit(
      [](const auto& f) -> int {
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, SimilarityIfs1D>) {
          return 1;
        } else {
          return f.dimension();
        }
      },
      ifs);
}

std::size_t map_count(const Ifs& ifs) {
  return std::visit([](const auto& f) { return f.size(); }, ifs);
}

namespace {

void check_word(const Word& a, std::size_t maps) {
  for (auto d : a.digits) {
    if (d >= maps) throw std::invalid_argument("word symbol " + std::to_string(d + 1) + " exceeds the IFS size");
  }
}

// Horner evaluation of sum_j d_{a_j} lambda^{j-1}
double similarity_shift(const SimilarityIfs1D& ifs, std::span<const std::uint8_t> digits) {
  double s = 0.0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) s = ifs.digits()[*it] + ifs.ratio() * s;
  return s;
}

}  // namespace

AffineMap1D compose_map(const SimilarityIfs1D& ifs, const Word& a) {
  check_word(a, ifs.size());
  return {std::pow(ifs.ratio(), static_cast<double>(a.size())), similarity_shift(ifs, a.digits)};
}

AffineMap compose_map(const AffineIfs& ifs, const Word& a) {
  check_word(a, ifs.size());
  const int d = ifs.dimension();
  AffineMap out{Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d)};
  for (auto sym : a.digits) {
    out.shift += out.linear * ifs.translation(sym);
    out.linear = out.linear * ifs.matrix(sym);
  }
  return out;
}

AttractorBounds attractor_bounds(const Ifs& ifs) {
  AttractorBounds b;
  if (const auto* s = std::get_if<SimilarityIfs1D>(&ifs)) {
    const auto [mn, mx] = std::minmax_element(s->digits().begin(), s->digits().end());
    b.lo = {*mn / (1.0 - s->ratio())};
    b.hi = {*mx / (1.0 - s->ratio())};
    return b;
  }
  const auto& a = std::get<AffineIfs>(ifs);
  // smallest R with |A_i| R + |t_i| <= R for every i
  double radius = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    radius = std::max(radius, a.translation(i).norm() / (1.0 - a.operator_norm(i)));
  }
  b.lo.assign(static_cast<std::size_t>(a.dimension()), -radius);
  b.hi.assign(static_cast<std::size_t>(a.dimension()), radius);
  b.ball_radius = radius;
  return b;
}

bool AttractorBounds::contains(std::span<const double> x, double slack) const {
  if (ball_radius) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return std::sqrt(r2) <= *ball_radius + slack;
  }
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (x[k] < lo[k] - slack || x[k] > hi[k] + slack) return false;
  }
  return true;
}

double AttractorBounds::diameter() const {
  if (ball_radius) return 2.0 * *ball_radius;
  double d2 = 0.0;
  for (std::size_t k = 0; k < lo.size(); ++k) d2 += (hi[k] - lo[k]) * (hi[k] - lo[k]);
  return std::sqrt(d2);
}

PointCloud point_cloud(const Ifs& ifs, const BernoulliMeasure& m, int n, std::span<const double> z,
                       const CloudOptions& options) {
  const int dim = dimension(ifs);
  if (static_cast<int>(z.size()) != dim) throw std::invalid_argument("anchor dimension does not match the IFS");
  if (m.size() != map_count(ifs)) throw std::invalid_argument("measure alphabet does not match the IFS");

  PointCloud cloud;
  cloud.level = n;
  cloud.dim = dim;
  cloud.anchor.assign(z.begin(), z.end());
  cloud.anchor_in_bounds = attractor_bounds(ifs).contains(z, 1e-12);
  if (!cloud.anchor_in_bounds) {
    std::cerr << "warning: anchor lies outside the attractor bounds\n";
  }

  if (const auto* s = std::get_if<SimilarityIfs1D>(&ifs)) {
    const double z0 = z[0];
    for_each_stopping_word(m, n, options.limits, [&](std::span<const std::uint8_t> w, double mass) {
      const double scale = std::pow(s->ratio(), static_cast<double>(w.size()));
      cloud.coords.push_back(scale * z0 + similarity_shift(*s, w));
      cloud.masses.push_back(mass);
      if (options.keep_words) cloud.words.push_back(Word{{w.begin(), w.end()}});
    });
    return cloud;
  }

  const auto& a = std::get<AffineIfs>(ifs);
  const Eigen::Map<const Eigen::VectorXd> anchor(z.data(), dim);
  for_each_stopping_word(m, n, options.limits, [&](std::span<const std::uint8_t> w, double mass) {
    Eigen::VectorXd x = anchor;
    for (auto it = w.rbegin(); it != w.rend(); ++it) x = a.matrix(*it) * x + a.translation(*it);
    for (int k = 0; k < dim; ++k) cloud.coords.push_back(x(k));
    cloud.masses.push_back(mass);
    if (options.keep_words) cloud.words.push_back(Word{{w.begin(), w.end()}});
  });
  return cloud;
}

double Histogram::total() const {
  long double t = 0.0L;
  for (double v : mass) t += v;
  return static_cast<double>(t);
}

Histogram empirical_pushforward(const Ifs& ifs, const BernoulliMeasure& m, int n, double z, std::size_t bins,
                                const GenerationLimits& limits) {
  if (bins < 1) throw std::invalid_argument("need at least one bin");
  if (dimension(ifs) != 1) throw std::invalid_argument("pushforward histograms are one-dimensional");
  const auto bounds = attractor_bounds(ifs);
  Histogram h;
  h.lo = bounds.lo[0];
  h.hi = bounds.hi[0];
  h.mass.assign(bins, 0.0);
  std::vector<long double> acc(bins, 0.0L);
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  CloudOptions opts;
  opts.limits = limits;
  const double anchor[1] = {z};
  const auto cloud = point_cloud(ifs, m, n, anchor, opts);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double x = cloud.coords[i];
    long k = width > 0.0 ? static_cast<long>(std::floor((x - h.lo) / width)) : 0;
    k = std::clamp<long>(k, 0, static_cast<long>(bins) - 1);
    acc[static_cast<std::size_t>(k)] += cloud.masses[i];
  }
  for (std::size_t k = 0; k < bins; ++k) h.mass[k] = static_cast<double>(acc[k]);
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

PerturbationScheme::PerturbationScheme(double radius, std::uint64_t seed) : radius_(radius), seed_(seed) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw std::invalid_argument("perturbation radius must be >= 0");
}

Eigen::VectorXd PerturbationScheme::error(std::span<const std::uint8_t> word, int dim) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
  if (radius_ == 0.0) return y;
  // canonical key of the word: length-prefixed digit chain
  std::uint64_t key = mix64(seed_ ^ (0xa0761d6478bd642fULL * (word.size() + 1)));
  for (auto d : word) key = mix64(key ^ (static_cast<std::uint64_t>(d) + 1));
  auto uniform = [&, counter = std::uint64_t{0}]() mutable {
    const std::uint64_t bits = mix64(key + 0x632be59bd9b4e019ULL * ++counter);
    return 2.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53) - 1.0;
  };
  // rejection sampling from the enclosing cube
  for (;;) {
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      y(k) = uniform();
      r2 += y(k) * y(k);
    }
    if (r2 <= 1.0) break;
  }
  return radius_ * y;
}

PerturbedPoint perturbed_point(const Ifs& ifs, const PerturbationScheme& scheme, const Word& a, const Word& tail,
                               std::size_t depth) {
  if (depth < a.size()) throw std::invalid_argument("depth must be at least the word length");
  if (tail.empty() && depth > a.size()) throw std::invalid_argument("tail word must be non-empty");
  const AffineIfs affine =
      std::holds_alternative<AffineIfs>(ifs) ? std::get<AffineIfs>(ifs) : AffineIfs::from_similarity(std::get<SimilarityIfs1D>(ifs));
  check_word(a, affine.size());
  check_word(tail, affine.size());

  std::vector<std::uint8_t> w(a.digits);
  while (w.size() < depth) w.push_back(tail.digits[(w.size() - a.size()) % tail.size()]);

  const int dim = affine.dimension();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  for (std::size_t k = depth; k-- > 0;) {
    const auto sym = w[k];
    x = affine.matrix(sym) * x + affine.translation(sym) + scheme.error(std::span(w).first(k + 1), dim);
  }

  double max_t = 0.0;
  for (std::size_t i = 0; i < affine.size(); ++i) max_t = std::max(max_t, affine.translation(i).norm());
  PerturbedPoint out;
  out.point = std::move(x);
  out.truncation_bound = std::pow(affine.max_operator_norm(), static_cast<double>(depth)) * (max_t + scheme.radius());
  return out;
}

}  // namespace ifslab

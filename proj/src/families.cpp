#include "ifslab/families.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "ifslab/separation.hpp"

namespace ifslab {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double sum_powers(std::span<const double> ratios, double s) {
  long double acc = 0.0L;
  for (double r : ratios) acc += std::pow(static_cast<long double>(r), static_cast<long double>(s));
  return static_cast<double>(acc);
}

}  // namespace

FamilySpec FamilySpec::bernoulli_convolution() { return {Kind::BernoulliConvolution, {-1.0, 1.0}}; }

FamilySpec FamilySpec::zero_one_three() { return {Kind::ZeroOneThree, {0.0, 1.0, 3.0}}; }

FamilySpec FamilySpec::parse(std::string_view text_in) {
  const std::string text = trim(text_in);
  if (text == "bc") return bernoulli_convolution();
  if (text == "013") return zero_one_three();
  const std::string prefix = "custom:";
  if (text.rfind(prefix, 0) == 0) {
    std::string body = trim(std::string_view(text).substr(prefix.size()));
    if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
      throw ParseError("custom family needs custom:[d1,d2,...]");
    }
    FamilySpec f;
    f.kind = Kind::Custom;
    f.digits.clear();
    std::stringstream ss(body.substr(1, body.size() - 2));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        const std::string t = trim(tok);
        f.digits.push_back(std::stod(t, &used));
        if (used != t.size()) throw ParseError("bad digit '" + t + "'");
      } catch (const std::invalid_argument&) {
        throw ParseError("bad digit '" + trim(tok) + "' in custom family");
      }
    }
    std::vector<double> sorted = f.digits;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.size() < 2 || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ParseError("custom family needs at least two distinct digits");
    }
    return f;
  }
  throw ParseError("unknown family '" + text + "' (expected bc, 013 or custom:[...])");
}

std::string FamilySpec::describe() const {
  switch (kind) {
    case Kind::BernoulliConvolution:
      return "bc";
    case Kind::ZeroOneThree:
      return "013";
    case Kind::Custom: {
      std::ostringstream os;
      os.precision(17);
      os << "custom:[";
      for (std::size_t i = 0; i < digits.size(); ++i) os << (i ? "," : "") << digits[i];
      os << "]";
      return os.str();
    }
  }
  return {};
}

double b_of_D(std::span<const double> digits) {
  if (digits.size() < 2) throw std::invalid_argument("b(D) needs at least two digits");
  double max_diff = 0.0;
  double min_nonzero = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < digits.size(); ++i) {
    for (std::size_t j = i + 1; j < digits.size(); ++j) {
      const double d = std::abs(digits[i] - digits[j]);
      max_diff = std::max(max_diff, d);
      if (d > 0.0) min_nonzero = std::min(min_nonzero, d);
    }
  }
  if (!std::isfinite(min_nonzero)) throw std::invalid_argument("b(D) needs two distinct digits");
  return max_diff / min_nonzero;
}

AlphaBound alpha_for_b(double b) {
  if (!(b >= 1.0)) throw std::invalid_argument("b(D) is always >= 1");
  if (b == 1.0) return {0.668, "published bound for b(D) = 1", false};
  // the class for b <= 2 sits inside the class for b = 2
  if (b <= 2.0) return {0.5, "published bound for b(D) = 2", false};
  if (b >= 3.0 + std::sqrt(8.0)) return {1.0 / (b + 1.0), "(b+1)^-1, attained for b(D) >= 3+sqrt(8)", true};
  return {1.0 / (b + 1.0), "generic (b+1)^-1 lower bound", false};
}

AlphaBound alpha_lower_bound(const FamilySpec& family) {
  std::vector<double> sorted = family.digits;
  std::sort(sorted.begin(), sorted.end());
  if (family.kind == FamilySpec::Kind::ZeroOneThree || sorted == std::vector<double>{0.0, 1.0, 3.0}) {
    return {0.418, "published bound for the {0,1,3} difference class", false};
  }
  return alpha_for_b(b_of_D(family.digits));
}

double similarity_dimension(std::span<const double> ratios) {
  if (ratios.empty()) throw std::invalid_argument("similarity dimension needs at least one ratio");
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("ratios must lie in (0,1)");
  }
  if (std::all_of(ratios.begin(), ratios.end(), [&](double r) { return r == ratios.front(); })) {
    return std::log(static_cast<double>(ratios.size())) / -std::log(ratios.front());
  }
  double lo = 0.0, hi = 1.0;
  while (sum_powers(ratios, hi) > 1.0) hi *= 2.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (sum_powers(ratios, mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double similarity_dimension(const SimilarityIfs1D& ifs) {
  const std::vector<double> ratios(ifs.size(), ifs.ratio());
  return similarity_dimension(ratios);
}

EightMapConstants eight_map_constants() {
  const double D = 1.0 + std::log(2.0) / std::log(3.0);
  // 8 gamma^D = 1, bisection on gamma
  double lo = 1e-6, hi = 0.999999;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (8.0 * std::pow(mid, D) < 1.0 ? lo : hi) = mid;
  }
  EightMapConstants ex;
  ex.gamma = 0.5 * (lo + hi);
  const std::vector<double> ratios(8, ex.gamma);
  ex.attractor_dimension = similarity_dimension(ratios);
  ex.cover_exponent = (std::log(ex.gamma) - std::log(2.0)) / std::log(ex.gamma);
  return ex;
}

std::vector<GarsiaLevel> garsia_separation_scan(const Real& lambda, int n_max) {
  if (!(lambda > Real(0.5) && lambda < Real(1))) throw std::invalid_argument("Garsia scan needs lambda in (1/2, 1)");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (n_max > kGarsiaLevelCap) {
    throw ResourceError("Garsia scan cap is n <= " + std::to_string(kGarsiaLevelCap), std::ldexp(1.0, n_max));
  }
  const Real zero_floor = ldexp(Real(1), -200);
  std::vector<GarsiaLevel> out;
  std::vector<Real> sums{Real(0)};
  Real power(1);
  double running = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    std::vector<Real> next;
    next.reserve(sums.size() * 2);
    for (const auto& v : sums) {
      next.push_back(v + power);
      next.push_back(v - power);
    }
    sums = std::move(next);
    power *= lambda;
    std::vector<Real> sorted = sums;
    std::sort(sorted.begin(), sorted.end());
    Real best = sorted[1] - sorted[0];
    for (std::size_t i = 2; i < sorted.size(); ++i) best = std::min(best, Real(sorted[i] - sorted[i - 1]));
    GarsiaLevel g;
    g.n = n;
    g.exact_zero = best < zero_floor;
    g.gap = g.exact_zero ? 0.0 : static_cast<double>(best);
    g.scaled = std::ldexp(g.gap, n);
    running = std::min(running, g.scaled);
    g.running_inf = running;
    out.push_back(g);
  }
  return out;
}

std::vector<double> LambdaGrid::points() const {
  if (!(lo < hi)) throw std::invalid_argument("lambda grid needs lo < hi");
  if (steps < 1) throw std::invalid_argument("lambda grid needs at least one step");
  const double a = lo + margin, b = hi - margin;
  if (!(a <= b)) throw std::invalid_argument("margin leaves an empty lambda range");
  std::vector<double> pts;
  if (steps == 1) return {0.5 * (a + b)};
  for (std::size_t i = 0; i < steps; ++i) {
    pts.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  return pts;
}

SweepResult lambda_sweep(const FamilySpec& family, const BernoulliMeasure& m, double s, int n, const LambdaGrid& grid,
                         std::vector<double> c_values, unsigned threads, const GenerationLimits& limits) {
  if (m.size() != family.digits.size()) throw std::invalid_argument("measure alphabet does not match the family");
  SweepResult res;
  res.lambdas = grid.points();
  const std::size_t count = res.lambdas.size();
  res.ratios.assign(count, 0.0);
  res.min_gaps.assign(count, 0.0);
  std::vector<std::exception_ptr> errors(count);
  const double z[1] = {0.0};

  auto work = [&](std::size_t worker, std::size_t stride) {
    CloudOptions opts;
    opts.limits = limits;
    for (std::size_t i = worker; i < count; i += stride) {
      try {
        const Ifs ifs = SimilarityIfs1D(res.lambdas[i], family.digits);
        const auto rec = separation_record(point_cloud(ifs, m, n, z, opts), s);
        res.ratios[i] = rec.ratio;
        res.min_gaps[i] = rec.min_gap;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::sort(c_values.begin(), c_values.end());
  res.c_values = c_values;
  for (double c : res.c_values) {
    const auto hits = std::count_if(res.ratios.begin(), res.ratios.end(), [&](double r) { return r >= c; });
    res.fractions.push_back(static_cast<double>(hits) / static_cast<double>(count));
  }
  return res;
}

}  // namespace ifslab

#include "ifslab/contfrac.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ifslab {

namespace {

constexpr std::size_t kMaxCertifyDepth = 100000;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::uint64_t parse_u64(std::string_view text, std::string_view context) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ParseError("expected a non-negative integer in " + std::string(context) + ", got '" + t + "'");
  }
  return v;
}

std::vector<std::uint64_t> parse_list(std::string_view text, std::string_view context) {
  std::vector<std::uint64_t> out;
  const std::string t = trim(text);
  if (t.empty()) return out;
  std::stringstream ss(t);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_u64(tok, context));
  return out;
}

void check_quotients(const std::vector<std::uint64_t>& qs) {
  for (auto z : qs) {
    if (z < 1) throw std::invalid_argument("partial quotients must be >= 1");
  }
}

std::string join(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

int sign(const BigInt& x) { return x.sign(); }

// split s = mant * 2^exp with mant a 53-bit integer
std::pair<BigInt, int> split_double(double s) {
  int k = 0;
  const double f = std::frexp(s, &k);
  const auto mant = static_cast<std::uint64_t>(std::ldexp(f, 53));
  return {BigInt(mant), k - 53};
}

// a * 2^e <= b for integers a, b >= 0
bool scaled_leq(const BigInt& a, int e, const BigInt& b) {
  if (e >= 0) return (a << e) <= b;
  return a <= (b << -e);
}

}  // namespace

TSpec golden_conjugate() { return PeriodicT{{}, {1}}; }
TSpec sqrt2_minus_1() { return PeriodicT{{}, {2}}; }

TSpec parse_tspec(std::string_view text_in) {
  const std::string text = trim(text_in);
  if (text == "golden") return golden_conjugate();
  if (text == "sqrt2m1") return sqrt2_minus_1();
  if (text == "cubes") return CubesT{};
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("unknown t spec '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string body = trim(std::string_view(text).substr(colon + 1));
  if (kind == "rational") {
    const auto slash = body.find('/');
    if (slash == std::string::npos) throw ParseError("rational t needs the form a/b, got '" + body + "'");
    const auto a = parse_u64(std::string_view(body).substr(0, slash), "rational numerator");
    const auto b = parse_u64(std::string_view(body).substr(slash + 1), "rational denominator");
    if (b == 0 || a == 0 || a > b) throw ParseError("rational t must lie in (0,1], got '" + body + "'");
    const auto g = std::gcd(a, b);
    return RationalT{a / g, b / g};
  }
  if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
    throw ParseError("expected a bracketed list after '" + kind + ":'");
  }
  const std::string inner = body.substr(1, body.size() - 2);
  if (kind == "cf") {
    const auto semi = inner.find(';');
    if (semi == std::string::npos) throw ParseError("cf spec needs 'preperiod;period', got '" + inner + "'");
    PeriodicT p{parse_list(std::string_view(inner).substr(0, semi), "cf preperiod"),
                parse_list(std::string_view(inner).substr(semi + 1), "cf period")};
    if (p.period.empty()) throw ParseError("cf period must be non-empty");
    if (std::any_of(p.preperiod.begin(), p.preperiod.end(), [](auto z) { return z == 0; }) ||
        std::any_of(p.period.begin(), p.period.end(), [](auto z) { return z == 0; })) {
      throw ParseError("partial quotients must be >= 1");
    }
    return p;
  }
  if (kind == "cftable") {
    TableT t{parse_list(inner, "cftable")};
    if (t.quotients.empty()) throw ParseError("cftable must be non-empty");
    if (std::any_of(t.quotients.begin(), t.quotients.end(), [](auto z) { return z == 0; })) {
      throw ParseError("partial quotients must be >= 1");
    }
    return t;
  }
  throw ParseError("unknown t spec kind '" + kind + "'");
}

std::string describe(const TSpec& t) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, RationalT>) {
          return "rational:" + std::to_string(s.num) + "/" + std::to_string(s.den);
        } else if constexpr (std::is_same_v<S, PeriodicT>) {
          return "cf:[" + join(s.preperiod) + ";" + join(s.period) + "]";
        } else if constexpr (std::is_same_v<S, TableT>) {
          return "cftable:[" + join(s.quotients) + "]";
        } else {
          return "cubes";
        }
      },
      t);
}

ContinuedFraction::ContinuedFraction(TSpec spec) : spec_(std::move(spec)) {
  p_ = {BigInt(1), BigInt(0)};
  q_ = {BigInt(0), BigInt(1)};
  if (auto* r = std::get_if<RationalT>(&spec_)) {
    if (r->den == 0 || r->num == 0 || r->num > r->den) throw std::invalid_argument("rational t must lie in (0,1]");
    const auto g = std::gcd(r->num, r->den);
    r->num /= g;
    r->den /= g;
    // Euclid on den/num; the last quotient is >= 2 whenever the length exceeds 1
    std::uint64_t a = r->den, b = r->num;
    std::vector<std::uint64_t> zs;
    while (b != 0) {
      zs.push_back(a / b);
      const auto rem = a % b;
      a = b;
      b = rem;
    }
    extend_locked(0);
    for (auto z : zs) {
      zeta_.push_back(z);
      p_.push_back(z * p_[p_.size() - 1] + p_[p_.size() - 2]);
      q_.push_back(z * q_[q_.size() - 1] + q_[q_.size() - 2]);
    }
  } else if (const auto* tb = std::get_if<TableT>(&spec_)) {
    if (tb->quotients.empty()) throw std::invalid_argument("table must be non-empty");
    check_quotients(tb->quotients);
    extend_locked(tb->quotients.size());
  } else if (const auto* pe = std::get_if<PeriodicT>(&spec_)) {
    if (pe->period.empty()) throw std::invalid_argument("period must be non-empty");
    check_quotients(pe->preperiod);
    check_quotients(pe->period);
  }
}

std::optional<std::size_t> ContinuedFraction::length() const {
  if (std::holds_alternative<RationalT>(spec_)) {
    std::lock_guard lock(mu_);
    return zeta_.size();
  }
  if (const auto* tb = std::get_if<TableT>(&spec_)) return tb->quotients.size();
  return std::nullopt;
}

bool ContinuedFraction::is_rational() const { return length().has_value(); }

std::uint64_t ContinuedFraction::generate(std::size_t m) const {
  return std::visit(
      [m](const auto& s) -> std::uint64_t {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, RationalT>) {
          return 0;  // materialised at construction
        } else if constexpr (std::is_same_v<S, TableT>) {
          return s.quotients[m - 1];
        } else if constexpr (std::is_same_v<S, PeriodicT>) {
          if (m <= s.preperiod.size()) return s.preperiod[m - 1];
          return s.period[(m - 1 - s.preperiod.size()) % s.period.size()];
        } else {
          if (m % 2 == 0) return 1;
          const std::uint64_t j = (m + 1) / 2;
          if (j > 2642245) throw InsufficientDepth("cube quotient overflows 64 bits");
          return j * j * j;
        }
      },
      spec_);
}

void ContinuedFraction::extend_locked(std::size_t depth) const {
  std::optional<std::size_t> cap;
  if (const auto* tb = std::get_if<TableT>(&spec_)) cap = tb->quotients.size();
  if (std::holds_alternative<RationalT>(spec_)) return;
  if (cap) depth = std::min(depth, *cap);
  while (zeta_.size() < depth) {
    const std::uint64_t z = generate(zeta_.size() + 1);
    zeta_.push_back(z);
    p_.push_back(z * p_[p_.size() - 1] + p_[p_.size() - 2]);
    q_.push_back(z * q_[q_.size() - 1] + q_[q_.size() - 2]);
  }
}

void ContinuedFraction::ensure_depth(std::size_t depth) const {
  std::lock_guard lock(mu_);
  extend_locked(depth);
}

std::uint64_t ContinuedFraction::quotient(std::size_t m) const {
  if (m < 1) throw std::invalid_argument("partial quotients are indexed from 1");
  std::lock_guard lock(mu_);
  extend_locked(m);
  if (m > zeta_.size()) {
    throw InsufficientDepth(describe(spec_) + " has only " + std::to_string(zeta_.size()) +
                            " partial quotients, asked for index " + std::to_string(m));
  }
  return zeta_[m - 1];
}

BigInt ContinuedFraction::p(long m) const {
  if (m < -1) throw std::invalid_argument("convergents are indexed from -1");
  if (m >= 1) quotient(static_cast<std::size_t>(m));
  std::lock_guard lock(mu_);
  return p_[static_cast<std::size_t>(m + 1)];
}

BigInt ContinuedFraction::q(long m) const {
  if (m < -1) throw std::invalid_argument("convergents are indexed from -1");
  if (m >= 1) quotient(static_cast<std::size_t>(m));
  std::lock_guard lock(mu_);
  return q_[static_cast<std::size_t>(m + 1)];
}

std::optional<std::pair<BigInt, BigInt>> ContinuedFraction::exact_value() const {
  const auto len = length();
  if (!len) return std::nullopt;
  std::lock_guard lock(mu_);
  extend_locked(*len);
  return std::make_pair(p_.back(), q_.back());
}

std::size_t ContinuedFraction::last_index_with_q_at_most(const BigInt& bound) const {
  if (bound < 1) throw std::invalid_argument("q bound must be >= 1");
  const auto len = length();
  std::lock_guard lock(mu_);
  std::size_t m = 0;
  for (;;) {
    if (len && m == *len) return m;
    extend_locked(m + 1);
    if (q_[m + 2] > bound) return m;
    ++m;
  }
}

Real ContinuedFraction::value() const {
  if (auto ex = exact_value()) return Real(ex->first) / Real(ex->second);
  std::lock_guard lock(mu_);
  if (value_) return *value_;
  // |t - p_m/q_m| < 1/(q_m q_{m+1}) <= 2^-270
  const BigInt target = BigInt(1) << 270;
  std::size_t m = 1;
  for (;;) {
    extend_locked(m + 1);
    if (q_[m + 1] * q_[m + 2] > target) break;
    ++m;
  }
  value_ = Real(p_[m + 1]) / Real(q_[m + 1]);
  return *value_;
}

std::shared_ptr<const ContinuedFraction> expand(const TSpec& t, std::size_t depth) {
  if (depth < 1) throw std::invalid_argument("expansion depth must be >= 1");
  auto cf = std::make_shared<ContinuedFraction>(t);
  cf->ensure_depth(depth);
  return cf;
}

BestApprox best_approx_error(const ContinuedFraction& cf, const BigInt& Q) {
  if (Q < 1) throw std::invalid_argument("best approximation needs Q >= 1");
  BestApprox out;
  out.index = cf.last_index_with_q_at_most(Q);
  const long m = static_cast<long>(out.index);
  out.q = cf.q(m);
  out.p = cf.p(m);
  if (auto ex = cf.exact_value()) {
    const auto& [a, b] = *ex;
    BigInt num = out.q * a - out.p * b;
    if (num < 0) num = -num;
    out.exact_error = std::make_pair(num, b);
    out.error = Real(num) / Real(b);
  } else {
    out.error = abs(Real(out.q) * cf.value() - Real(out.p));
  }
  return out;
}

ApproximabilityVerdict is_badly_approximable(const ContinuedFraction& cf, std::size_t depth) {
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  ApproximabilityVerdict v;
  const auto& spec = cf.spec();
  if (std::holds_alternative<RationalT>(spec)) {
    v.kind = ApproximabilityVerdict::Kind::Rational;
    v.definitive = true;
    v.depth = *cf.length();
    for (std::size_t m = 1; m <= v.depth; ++m) v.max_quotient = std::max(v.max_quotient, cf.quotient(m));
    return v;
  }
  if (const auto* pe = std::get_if<PeriodicT>(&spec)) {
    v.kind = ApproximabilityVerdict::Kind::BoundedSoFar;
    v.definitive = true;
    v.depth = depth;
    for (auto z : pe->preperiod) v.max_quotient = std::max(v.max_quotient, z);
    for (auto z : pe->period) v.max_quotient = std::max(v.max_quotient, z);
    return v;
  }
  if (std::holds_alternative<CubesT>(spec)) {
    v.kind = ApproximabilityVerdict::Kind::UnboundedWitnessed;
    v.definitive = true;
    v.depth = depth;
    for (std::size_t m = 1; m <= depth; ++m) v.max_quotient = std::max(v.max_quotient, cf.quotient(m));
    return v;
  }
  // table: heuristic on the observed prefix
  const std::size_t d = std::min(depth, *cf.length());
  std::vector<double> zs;
  for (std::size_t m = 1; m <= d; ++m) {
    zs.push_back(static_cast<double>(cf.quotient(m)));
    v.max_quotient = std::max(v.max_quotient, cf.quotient(m));
  }
  std::sort(zs.begin(), zs.end());
  const double median = zs.size() % 2 ? zs[zs.size() / 2] : 0.5 * (zs[zs.size() / 2 - 1] + zs[zs.size() / 2]);
  v.kind = static_cast<double>(v.max_quotient) > 10.0 * median ? ApproximabilityVerdict::Kind::UnboundedWitnessed
                                                               : ApproximabilityVerdict::Kind::BoundedSoFar;
  v.definitive = false;
  v.depth = d;
  return v;
}

int certified_sign(const ContinuedFraction& cf, const BigInt& alpha, const BigInt& beta) {
  if (alpha == 0) return sign(beta);
  if (auto ex = cf.exact_value()) return sign(alpha * ex->first + beta * ex->second);
  // t lies strictly between consecutive convergents, and alpha*x + beta is monotone
  for (long m = 0; m < static_cast<long>(kMaxCertifyDepth); ++m) {
    const int a = sign(alpha * cf.p(m) + beta * cf.q(m));
    const int b = sign(alpha * cf.p(m + 1) + beta * cf.q(m + 1));
    if (a == b && a != 0) return a;
  }
  throw InsufficientDepth("could not certify a sign within " + std::to_string(kMaxCertifyDepth) + " convergents");
}

std::vector<LevelVerdict> good_levels(const ContinuedFraction& cf, double s, int N) {
  if (!(s > 0.0 && s < 0.5)) throw std::invalid_argument("good levels need s in (0, 1/2)");
  if (N < 1) throw std::invalid_argument("good levels need N >= 1");
  if (N > 62) throw std::invalid_argument("good levels support N <= 62");
  const auto [mant, e] = split_double(s);
  const auto len = cf.length();
  const bool table = std::holds_alternative<TableT>(cf.spec());
  std::vector<LevelVerdict> out;
  for (int n = 1; n <= N; ++n) {
    LevelVerdict v;
    v.n = n;
    v.provisional = n < 3;
    const BigInt X = (BigInt(1) << n) - 1;
    v.m = cf.last_index_with_q_at_most(X);
    v.q_m = cf.q(static_cast<long>(v.m));
    if (len && v.m == *len) {
      if (table) {
        throw InsufficientDepth("table " + describe(cf.spec()) + " ends before q exceeds 2^" + std::to_string(n) +
                                " - 1 = " + X.str() + "; level " + std::to_string(n) + " needs a larger q");
      }
      out.push_back(std::move(v));
      continue;
    }
    v.q_next = cf.q(static_cast<long>(v.m + 1));
    const BigInt zeta(cf.quotient(v.m + 1));
    v.dioph = scaled_leq(mant * *v.q_next, e + 1, X);
    v.cf = scaled_leq(3 * mant * zeta, e, BigInt(1));
    out.push_back(std::move(v));
  }
  return out;
}

DensityCondition density_condition(const ContinuedFraction& cf, double eps, double L, std::size_t M) {
  if (M < 1) throw std::invalid_argument("density condition needs M >= 1");
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  DensityCondition d;
  const Real ratio(L);
  long double lhs = 0.0L;
  for (std::size_t m = 1; m <= M; ++m) {
    const BigInt qm = cf.q(static_cast<long>(m));
    const BigInt qn = cf.q(static_cast<long>(m + 1));
    if (Real(qn) >= ratio * Real(qm)) {
      d.contributing.push_back(m);
      lhs += std::log2(static_cast<long double>(cf.quotient(m + 1)) + 1.0L);
    }
  }
  d.lhs = static_cast<double>(lhs);
  d.bound = std::isinf(eps) ? eps : eps * static_cast<double>(M);
  d.satisfied = std::isinf(eps) || d.lhs <= d.bound;
  return d;
}

GaussPartial gauss_condition_partial(std::size_t M) {
  if (M < 1) throw std::invalid_argument("Gauss partial sum needs M >= 1");
  GaussPartial g;
  long double running = 0.0L, mass_total = 0.0L;
  for (std::size_t m = 1; m <= M; ++m) {
    const long double mm = static_cast<long double>(m);
    // log2((m+1)^2 / (m(m+2))) = log2(1 + 1/(m(m+2)))
    const long double mass = std::log1p(1.0L / (mm * (mm + 2.0L))) / std::log(2.0L);
    const long double term = mass * std::log2(mm + 1.0L);
    running += term;
    mass_total += mass;
    g.masses.push_back(static_cast<double>(mass));
    g.terms.push_back(static_cast<double>(term));
    g.partial_sums.push_back(static_cast<double>(running));
  }
  g.total_mass = static_cast<double>(mass_total);
  return g;
}

}  // namespace ifslab

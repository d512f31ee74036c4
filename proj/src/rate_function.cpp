#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ifslab/symbolic.hpp"

namespace ifslab {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + text + "'");
  }
  if (used != text.size()) throw ParseError("trailing characters in number '" + text + "'");
  return v;
}

// Heuristic for sequences without a closed form: the sum over (N/2, N]
// of a divergent non-increasing sequence such as 1/(n log n) stays near
// 1/log2 N, while convergent tails shrink faster.
bool tail_looks_divergent(const RateFunction& h, long horizon) {
  if (horizon < 4) return false;
  long double tail = 0.0L;
  for (long n = horizon / 2 + 1; n <= horizon; ++n) tail += h(n);
  return tail >= 0.5L / std::log2(static_cast<long double>(horizon));
}

}  // namespace

RateFunction RateFunction::constant(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw std::invalid_argument("constant rate must be finite and >= 0");
  RateFunction h;
  h.kind_ = Kind::Constant;
  h.param_ = value;
  return h;
}

RateFunction RateFunction::reciprocal() {
  RateFunction h;
  h.kind_ = Kind::Reciprocal;
  return h;
}

RateFunction RateFunction::reciprocal_square() {
  RateFunction h;
  h.kind_ = Kind::ReciprocalSquare;
  return h;
}

RateFunction RateFunction::geometric(double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("geometric ratio must lie in (0, 1]");
  RateFunction h;
  h.kind_ = Kind::Geometric;
  h.param_ = ratio;
  return h;
}

RateFunction RateFunction::indicator(std::vector<int> levels, double value) {
  if (levels.empty()) throw std::invalid_argument("indicator rate needs at least one level");
  if (!(value >= 0.0) || !std::isfinite(value)) throw std::invalid_argument("indicator value must be finite and >= 0");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1) throw std::invalid_argument("indicator levels must be positive");
    if (i > 0 && levels[i] <= levels[i - 1]) throw std::invalid_argument("indicator levels must be strictly increasing");
  }
  RateFunction h;
  h.kind_ = Kind::Indicator;
  h.param_ = value;
  h.levels_ = std::move(levels);
  return h;
}

RateFunction RateFunction::tabulated(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("tabulated rate needs at least one value");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("tabulated rate values must be finite and >= 0");
  }
  RateFunction h;
  h.kind_ = Kind::Tabulated;
  h.table_ = std::move(values);
  return h;
}

RateFunction RateFunction::parse(std::string_view spec_in) {
  const std::string spec = trim(spec_in);
  const auto open = spec.find('(');
  std::string name = trim(spec.substr(0, open));
  std::string arg;
  if (open != std::string::npos) {
    if (spec.back() != ')') throw ParseError("unbalanced parentheses in rate spec '" + spec + "'");
    arg = trim(spec.substr(open + 1, spec.size() - open - 2));
  }
  std::replace(name.begin(), name.end(), '-', '_');
  if (name == "constant") return constant(arg.empty() ? 1.0 : parse_double(arg));
  if (name == "reciprocal") return reciprocal();
  if (name == "reciprocal_square") return reciprocal_square();
  if (name == "geometric") {
    if (arg.empty()) throw ParseError("geometric(rho) needs a ratio");
    return geometric(parse_double(arg));
  }
  if (name == "indicator") {
    const auto semi = arg.find(';');
    if (semi == std::string::npos) throw ParseError("indicator spec is indicator(l1,l2,...;value)");
    std::vector<int> levels;
    std::stringstream ls(arg.substr(0, semi));
    std::string tok;
    while (std::getline(ls, tok, ',')) {
      tok = trim(tok);
      if (!tok.empty()) levels.push_back(static_cast<int>(parse_double(tok)));
    }
    return indicator(std::move(levels), parse_double(trim(arg.substr(semi + 1))));
  }
  if (name == "table") {
    std::ifstream in(arg);
    if (!in) throw ParseError("cannot open rate table '" + arg + "'");
    std::vector<double> values;
    std::string tok;
    while (in >> tok) {
      std::stringstream ts(tok);
      std::string piece;
      while (std::getline(ts, piece, ',')) {
        if (!piece.empty()) values.push_back(parse_double(piece));
      }
    }
    return tabulated(std::move(values));
  }
  throw ParseError("unknown rate function '" + spec + "'");
}

double RateFunction::operator()(long n) const {
  if (n < 1) throw std::invalid_argument("rate functions are defined for n >= 1");
  switch (kind_) {
    case Kind::Constant:
      return param_;
    case Kind::Reciprocal:
      return 1.0 / static_cast<double>(n);
    case Kind::ReciprocalSquare:
      return 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    case Kind::Geometric:
      return std::pow(param_, static_cast<double>(n));
    case Kind::Indicator:
      return std::binary_search(levels_.begin(), levels_.end(), n) ? param_ : 0.0;
    case Kind::Tabulated:
      if (static_cast<std::size_t>(n) > table_.size()) {
        throw std::out_of_range("rate table has " + std::to_string(table_.size()) + " entries, asked for n=" +
                                std::to_string(n));
      }
      return table_[static_cast<std::size_t>(n - 1)];
  }
  return 0.0;
}

double RateFunction::sup() const {
  switch (kind_) {
    case Kind::Constant:
    case Kind::Indicator:
      return param_;
    case Kind::Reciprocal:
    case Kind::ReciprocalSquare:
      return 1.0;
    case Kind::Geometric:
      return param_;
    case Kind::Tabulated:
      return *std::max_element(table_.begin(), table_.end());
  }
  return 0.0;
}

std::string RateFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Constant:
      os << "constant(" << param_ << ")";
      break;
    case Kind::Reciprocal:
      os << "reciprocal";
      break;
    case Kind::ReciprocalSquare:
      os << "reciprocal_square";
      break;
    case Kind::Geometric:
      os << "geometric(" << param_ << ")";
      break;
    case Kind::Indicator:
      os << "indicator(";
      for (std::size_t i = 0; i < levels_.size(); ++i) os << (i ? "," : "") << levels_[i];
      os << ";" << param_ << ")";
      break;
    case Kind::Tabulated:
      os << "table[" << table_.size() << "]";
      break;
  }
  return os.str();
}

DivergenceReport rate_divergence(const RateFunction& h, long horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  DivergenceReport r;
  r.horizon = horizon;
  // summing small terms first keeps the harmonic partial sum accurate
  long double sum = 0.0L;
  for (long n = horizon; n >= 1; --n) sum += h(n);
  r.partial_sum = static_cast<double>(sum);

  using Kind = RateFunction::Kind;
  auto set = [&](bool divergent, std::optional<bool> in_h, std::optional<bool> in_h_star) {
    r.verdict = divergent ? DivergenceReport::Verdict::DivergentLooking : DivergenceReport::Verdict::ConvergentLooking;
    r.closed_form = true;
    r.in_h = in_h;
    r.in_h_star = in_h_star;
  };
  switch (h.kind()) {
    case Kind::Constant: {
      const bool pos = h.parameter() > 0.0;
      set(pos, pos, pos);
      break;
    }
    case Kind::Reciprocal:
      set(true, true, true);
      break;
    case Kind::ReciprocalSquare:
      set(false, false, false);
      break;
    case Kind::Geometric: {
      const bool one = h.parameter() == 1.0;
      set(one, one, one);
      break;
    }
    case Kind::Indicator:
    case Kind::Tabulated: {
      r.closed_form = false;
      const bool divergent = tail_looks_divergent(h, horizon);
      r.verdict = divergent ? DivergenceReport::Verdict::DivergentLooking
                            : DivergenceReport::Verdict::ConvergentLooking;
      bool non_increasing = true;
      for (long n = 1; n < horizon && non_increasing; ++n) non_increasing = h(n + 1) <= h(n);
      if (non_increasing && divergent) {
        r.in_h_star = true;
        r.sufficient_condition_only = true;
      }
      break;
    }
  }
  return r;
}

}  // namespace ifslab

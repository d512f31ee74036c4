#include <charconv>
#include <cmath>
#include <map>

#include "ifslab/cli.hpp"
#include "ifslab/contfrac.hpp"

namespace ifslab::cli {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double number(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError("expected a number for " + std::string(what) + ", got '" + t + "'");
  }
  return v;
}

// split on `sep` outside brackets and parentheses
std::vector<std::string> split_top(std::string_view text, char sep) {
  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '[' || c == '(') ++depth;
    if (c == ']' || c == ')') --depth;
    if (c == sep && depth == 0) {
      parts.push_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.push_back(trim(text.substr(start)));
  return parts;
}

std::string strip_brackets(const std::string& s, std::string_view what) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    throw ParseError(std::string(what) + " must be a bracketed list, got '" + s + "'");
  }
  return s.substr(1, s.size() - 2);
}

// name(key=value, ...)
std::pair<std::string, std::map<std::string, std::string>> call_form(std::string_view text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos || t.back() != ')') {
    throw ParseError("IFS spec must look like name(key=value, ...), got '" + t + "'");
  }
  std::map<std::string, std::string> kv;
  const std::string body = t.substr(open + 1, t.size() - open - 2);
  if (!trim(body).empty()) {
    for (const auto& part : split_top(body, ',')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw ParseError("expected key=value in IFS spec, got '" + part + "'");
      kv[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
    }
  }
  return {trim(t.substr(0, open)), kv};
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key,
                           std::string_view spec) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ParseError(std::string(spec) + " spec is missing '" + key + "'");
  return it->second;
}

double phit_parameter(const TSpec& t) {
  const ContinuedFraction cf(t);
  const double v = static_cast<double>(cf.value());
  if (!(v > 0.0 && v < 1.0)) throw ParseError("phit IFS needs t in (0,1)");
  return v;
}

}  // namespace

std::vector<double> parse_number_list(std::string_view text) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == '[') t = strip_brackets(t, "number list");
  std::vector<double> out;
  if (trim(t).empty()) return out;
  for (const auto& part : split_top(t, ',')) out.push_back(number(part, "list entry"));
  return out;
}

Ifs parse_ifs(std::string_view text) {
  const auto [name, kv] = call_form(text);
  try {
    if (name == "similarity1d") {
      return SimilarityIfs1D(number(require(kv, "lambda", name), "lambda"),
                             parse_number_list(require(kv, "digits", name)));
    }
    if (name == "phit") {
      return phi_t_family(phit_parameter(parse_tspec(require(kv, "t", name))));
    }
    if (name == "affine") {
      const int d = static_cast<int>(number(require(kv, "d", name), "d"));
      if (d < 1 || d > 3) throw ParseError("affine dimension must be 1, 2 or 3");
      const std::string maps = strip_brackets(require(kv, "maps", name), "maps");
      std::vector<Eigen::MatrixXd> mats;
      std::vector<Eigen::VectorXd> shifts;
      for (const auto& row : split_top(maps, ';')) {
        const auto vals = parse_number_list(row);
        if (vals.size() != static_cast<std::size_t>(d * d + d)) {
          throw ParseError("each affine map needs d*d + d = " + std::to_string(d * d + d) + " numbers, got '" + row + "'");
        }
        Eigen::MatrixXd a(d, d);
        Eigen::VectorXd s(d);
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) a(i, j) = vals[static_cast<std::size_t>(i * d + j)];
          s(i) = vals[static_cast<std::size_t>(d * d + i)];
        }
        mats.push_back(a);
        shifts.push_back(s);
      }
      return AffineIfs(std::move(mats), std::move(shifts));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ParseError("invalid IFS '" + std::string(text) + "': " + e.what());
  }
  throw ParseError("unknown IFS kind '" + name + "'");
}

std::optional<TSpec> phit_tspec(std::string_view text) {
  const auto [name, kv] = call_form(text);
  if (name != "phit") return std::nullopt;
  return parse_tspec(require(kv, "t", name));
}

BernoulliMeasure parse_measure(std::string_view text, std::size_t symbols) {
  const std::string t = trim(text);
  if (t == "uniform") return BernoulliMeasure::uniform(symbols);
  const auto p = parse_number_list(t);
  if (p.size() != symbols) {
    throw ParseError("measure has " + std::to_string(p.size()) + " entries but the IFS has " + std::to_string(symbols) +
                     " maps");
  }
  try {
    return BernoulliMeasure(p);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid measure: ") + e.what());
  }
}

std::pair<int, int> parse_level_range(std::string_view text) {
  const std::string t = trim(text);
  const auto dots = t.find("..");
  int a = 0, b = 0;
  if (dots == std::string::npos) {
    a = b = static_cast<int>(number(t, "level"));
  } else {
    a = static_cast<int>(number(t.substr(0, dots), "level range start"));
    b = static_cast<int>(number(t.substr(dots + 2), "level range end"));
  }
  if (a < 1 || b < a) throw ParseError("level range must satisfy 1 <= a <= b, got '" + t + "'");
  return {a, b};
}

double parse_scale(std::string_view text) {
  const std::string t = trim(text);
  if (t.rfind("2^", 0) == 0) return std::ldexp(1.0, static_cast<int>(number(t.substr(2), "exponent")));
  const double v = number(t, "scale");
  if (!(v > 0.0)) throw ParseError("scale must be > 0");
  return v;
}

LambdaGrid parse_lambda_grid(std::string_view text) {
  const auto parts = split_top(text, ':');
  if (parts.size() != 3) throw ParseError("lambda grid must be a:b:steps, got '" + std::string(text) + "'");
  LambdaGrid g;
  g.lo = number(parts[0], "lambda start");
  g.hi = number(parts[1], "lambda end");
  const double steps = number(parts[2], "lambda steps");
  if (!(g.lo < g.hi) || steps < 1 || steps != std::floor(steps)) {
    throw ParseError("lambda grid needs a < b and a positive integer step count");
  }
  g.steps = static_cast<std::size_t>(steps);
  return g;
}

Real parse_real(std::string_view text) {
  const std::string t = trim(text);
  if (t == "inv_sqrt2") return Real(1) / sqrt(Real(2));
  if (t == "inv_golden") return Real(2) / (Real(1) + sqrt(Real(5)));
  const auto slash = t.find('/');
  if (slash != std::string::npos) {
    const double den = number(t.substr(slash + 1), "denominator");
    if (den == 0.0) throw ParseError("zero denominator in '" + t + "'");
    return Real(number(t.substr(0, slash), "numerator")) / Real(den);
  }
  try {
    return Real(t);
  } catch (const std::exception&) {
    throw ParseError("expected a real number, got '" + t + "'");
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace ifslab::cli

#include "ifslab/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ifslab {

namespace {

constexpr double kProbabilityTolerance = 1e-12;
constexpr double kStoppingSlack = 1e-12;

}  // namespace

Word Word::concat(const Word& other) const {
  Word out = *this;
  out.digits.insert(out.digits.end(), other.digits.begin(), other.digits.end());
  return out;
}

std::string Word::to_string(std::size_t alphabet) const {
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (alphabet > 9 && i > 0) out += '.';
    out += std::to_string(static_cast<int>(digits[i]) + 1);
  }
  return out;
}

Word Word::parse(std::string_view text) {
  Word w;
  if (text.find('.') != std::string_view::npos) {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('.', start);
      if (end == std::string_view::npos) end = text.size();
      std::string token(text.substr(start, end - start));
      if (token.empty()) throw ParseError("empty symbol in word '" + std::string(text) + "'");
      int v = std::stoi(token);
      if (v < 1 || v > 255) throw ParseError("symbol out of range in word");
      w.digits.push_back(static_cast<std::uint8_t>(v - 1));
      start = end + 1;
    }
    return w;
  }
  for (char c : text) {
    if (c < '1' || c > '9') {
      throw ParseError("invalid symbol '" + std::string(1, c) + "' in word");
    }
    w.digits.push_back(static_cast<std::uint8_t>(c - '1'));
  }
  return w;
}

BernoulliMeasure::BernoulliMeasure(std::vector<double> probabilities)
    : p_(std::move(probabilities)) {
  if (p_.empty()) throw std::invalid_argument("measure needs at least one symbol");
  if (p_.size() > 255) throw std::invalid_argument("alphabet larger than 255 symbols");
  double total = 0.0;
  for (double p : p_) {
    if (!(p > 0.0)) throw std::invalid_argument("probabilities must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw std::invalid_argument("probabilities sum to " + std::to_string(total) + ", not 1");
  }
  for (double& p : p_) p /= total;
}

BernoulliMeasure BernoulliMeasure::uniform(std::size_t symbols) {
  if (symbols == 0) throw std::invalid_argument("uniform measure needs at least one symbol");
  return BernoulliMeasure(std::vector<double>(symbols, 1.0 / static_cast<double>(symbols)));
}

double BernoulliMeasure::min_probability() const { return *std::min_element(p_.begin(), p_.end()); }

double BernoulliMeasure::max_probability() const { return *std::max_element(p_.begin(), p_.end()); }

bool BernoulliMeasure::is_uniform() const {
  return std::all_of(p_.begin(), p_.end(), [&](double p) { return p == p_.front(); });
}

double BernoulliMeasure::cylinder_mass(std::span<const std::uint8_t> digits) const {
  double mass = 1.0;
  for (auto d : digits) mass *= p_.at(d);
  return mass;
}

double BernoulliMeasure::cylinder_mass(const Word& a) const { return cylinder_mass(std::span(a.digits)); }

double entropy(const BernoulliMeasure& m) {
  double h = 0.0;
  for (double p : m.probabilities()) h -= p * std::log(p);
  return h;
}

double slow_decay_constant(const BernoulliMeasure& m) { return m.min_probability(); }

double estimated_generation_size(const BernoulliMeasure& m, int n) {
  if (m.is_uniform()) return std::pow(static_cast<double>(m.size()), n);
  return std::pow(slow_decay_constant(m), -n);
}

void for_each_stopping_word(
    const BernoulliMeasure& m, int n, const GenerationLimits& limits,
    const std::function<void(std::span<const std::uint8_t>, double)>& visit) {
  if (n < 1) throw std::invalid_argument("stopping generation needs n >= 1");
  const double c = slow_decay_constant(m);
  const double estimate = estimated_generation_size(m, n);
  if (estimate > static_cast<double>(limits.max_words)) {
    throw ResourceError("stopping generation L_{m," + std::to_string(n) + "} has at least " +
                            std::to_string(estimate) + " words, cap is " +
                            std::to_string(limits.max_words),
                        estimate);
  }
  const double threshold = std::pow(c, n) * (1.0 + kStoppingSlack);
  if (m.size() == 1 || 1.0 <= threshold) {
    // single-symbol alphabet: the empty word is the whole generation
    visit({}, 1.0);
    return;
  }

  // Explicit stack so deep generations of skewed measures cannot overflow.
  std::vector<std::uint8_t> word;
  std::vector<double> mass_stack{1.0};
  std::size_t emitted = 0;
  const std::size_t l = m.size();
  word.push_back(0);
  while (!word.empty()) {
    const std::uint8_t d = word.back();
    if (d >= l) {
      word.pop_back();
      mass_stack.pop_back();
      if (!word.empty()) ++word.back();
      continue;
    }
    const double mass = mass_stack.back() * m[d];
    if (mass <= threshold) {
      if (++emitted > limits.max_words) {
        throw ResourceError("stopping generation exceeded cap of " + std::to_string(limits.max_words) +
                                " words (estimated " + std::to_string(1.0 / (c * std::pow(c, n))) + ")",
                            1.0 / (c * std::pow(c, n)));
      }
      visit(std::span<const std::uint8_t>(word), mass);
      ++word.back();
    } else {
      mass_stack.push_back(mass);
      word.push_back(0);
    }
  }
}

StoppingGeneration stopping_generation(const BernoulliMeasure& m, int n, const GenerationLimits& limits) {
  StoppingGeneration gen;
  gen.level = n;
  for_each_stopping_word(m, n, limits, [&](std::span<const std::uint8_t> digits, double mass) {
    gen.words.push_back(Word{std::vector<std::uint8_t>(digits.begin(), digits.end())});
    gen.masses.push_back(mass);
  });
  return gen;
}

}  // namespace ifslab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ifslab/symbolic.hpp"

using namespace ifslab;

TEST_CASE("word round trip and concat") {
  const Word a = Word::parse("12");
  CHECK(a.digits == std::vector<std::uint8_t>{0, 1});
  CHECK(a.to_string() == "12");
  CHECK(a.concat(Word::parse("3")).to_string() == "123");
  const Word wide = Word::parse("1.12.3");
  CHECK(wide.digits == std::vector<std::uint8_t>{0, 11, 2});
  CHECK(wide.to_string(12) == "1.12.3");
  CHECK_THROWS_AS(Word::parse("1x"), ParseError);
}

TEST_CASE("measure construction") {
  CHECK_THROWS(BernoulliMeasure({0.5, 0.6}));
  CHECK_THROWS(BernoulliMeasure({1.0, 0.0}));
  const BernoulliMeasure near({0.5, 0.5 + 1e-13});
  CHECK(near[0] + near[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(BernoulliMeasure::uniform(4).is_uniform());
  CHECK_FALSE(BernoulliMeasure({0.25, 0.75}).is_uniform());
}

TEST_CASE("entropy") {
  CHECK(entropy(BernoulliMeasure({0.5, 0.5})) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(entropy(BernoulliMeasure::uniform(4)) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  const double p = 1.0 / 3.0, q = 2.0 / 3.0;
  const double direct = -(p * std::log(p) + q * std::log(q));
  CHECK(entropy(BernoulliMeasure({p, q})) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(direct == doctest::Approx(0.636514).epsilon(1e-6));
}

TEST_CASE("slow decay constant is the minimum entry") {
  CHECK(slow_decay_constant(BernoulliMeasure({0.5, 0.5})) == 0.5);
  CHECK(slow_decay_constant(BernoulliMeasure::uniform(4)) == 0.25);
  CHECK(slow_decay_constant(BernoulliMeasure({0.5, 0.25, 0.25})) == 0.25);
}

// brute force over the cylinder tree: a word stops once its mass is <= c^n
std::vector<Word> brute_generation(const BernoulliMeasure& m, int n) {
  const double target = std::pow(m.min_probability(), n) * (1 + 1e-12);
  std::vector<Word> out;
  std::vector<Word> frontier{Word{}};
  while (!frontier.empty()) {
    std::vector<Word> next;
    for (const auto& w : frontier) {
      for (std::size_t i = 0; i < m.size(); ++i) {
        Word c = w;
        c.digits.push_back(static_cast<std::uint8_t>(i));
        (m.cylinder_mass(c) <= target ? out : next).push_back(c);
      }
    }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST_CASE("stopping generation") {
  SUBCASE("uniform four symbols") {
    const auto g = stopping_generation(BernoulliMeasure::uniform(4), 3);
    CHECK(g.cardinality() == 64);
    for (const auto& w : g.words) CHECK(w.size() == 3);
  }
  SUBCASE("unequal weights") {
    const BernoulliMeasure m({0.5, 0.25, 0.25});
    const auto g = stopping_generation(m, 1);
    std::vector<std::string> names;
    for (const auto& w : g.words) names.push_back(w.to_string());
    CHECK(names == std::vector<std::string>{"11", "12", "13", "2", "3"});
    CHECK(std::accumulate(g.masses.begin(), g.masses.end(), 0.0) == doctest::Approx(1.0));
  }
  SUBCASE("matches the brute-force tree walk") {
    for (const auto& probs : {std::vector<double>{0.3, 0.7}, {0.2, 0.3, 0.5}, {0.1, 0.45, 0.45}}) {
      const BernoulliMeasure m(probs);
      for (int n = 1; n <= 5; ++n) {
        const auto g = stopping_generation(m, n);
        CHECK(g.words == brute_generation(m, n));
        const double c = m.min_probability();
        const double cn = std::pow(c, n);
        double total = 0.0;
        for (double mass : g.masses) {
          total += mass;
          CHECK(mass <= cn * (1 + 1e-9));
          CHECK(mass > c * cn * (1 - 1e-9));
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        const double lmin = n * std::log(1 / c) / std::log(1 / m.min_probability());
        const double lmax = n * std::log(1 / c) / std::log(1 / m.max_probability());
        for (const auto& w : g.words) {
          CHECK(static_cast<double>(w.size()) >= lmin - 2);
          CHECK(static_cast<double>(w.size()) <= lmax + 2);
        }
      }
    }
  }
  SUBCASE("uniform growth is exact") {
    const auto m = BernoulliMeasure::uniform(3);
    for (int n = 1; n < 6; ++n) {
      CHECK(stopping_generation(m, n + 1).cardinality() == 3 * stopping_generation(m, n).cardinality());
    }
  }
  SUBCASE("n = 0 and the size cap") {
    CHECK_THROWS_AS(stopping_generation(BernoulliMeasure::uniform(2), 0), std::invalid_argument);
    GenerationLimits tiny;
    tiny.max_words = 100;
    try {
      stopping_generation(BernoulliMeasure::uniform(4), 4, tiny);
      FAIL("expected a resource error");
    } catch (const ResourceError& e) {
      CHECK(e.estimated_cardinality() == doctest::Approx(256.0));
    }
  }
}

TEST_CASE("rate functions") {
  CHECK(RateFunction::reciprocal()(4) == 0.25);
  CHECK(RateFunction::geometric(0.5)(3) == 0.125);
  const auto ind = RateFunction::parse("indicator(2,5,9;0.5)");
  CHECK(ind(2) == 0.5);
  CHECK(ind(3) == 0.0);
  CHECK(ind(9) == 0.5);
  CHECK_THROWS(RateFunction::indicator({}, 0.5));
  CHECK_THROWS(RateFunction::parse("bogus(1)"));
  CHECK(RateFunction::parse("geometric(0.25)").describe() == "geometric(0.25)");
}

TEST_CASE("divergence classification") {
  SUBCASE("harmonic") {
    const long N = 1000000;
    const auto r = rate_divergence(RateFunction::reciprocal(), N);
    double direct = 0.0;
    for (long n = N; n >= 1; --n) direct += 1.0 / static_cast<double>(n);
    CHECK(r.partial_sum == doctest::Approx(direct).epsilon(1e-12));
    CHECK(r.partial_sum == doctest::Approx(14.392727).epsilon(1e-7));
    CHECK(r.verdict == DivergenceReport::Verdict::DivergentLooking);
    REQUIRE(r.in_h.has_value());
    CHECK(*r.in_h);
  }
  SUBCASE("geometric") {
    const auto r = rate_divergence(RateFunction::geometric(0.5), 100);
    CHECK(r.verdict == DivergenceReport::Verdict::ConvergentLooking);
    REQUIRE(r.in_h_star.has_value());
    CHECK_FALSE(*r.in_h_star);
  }
  SUBCASE("constant") {
    const auto r = rate_divergence(RateFunction::constant(1.0), 50);
    CHECK(r.partial_sum == 50.0);
    CHECK(r.verdict == DivergenceReport::Verdict::DivergentLooking);
    CHECK(*r.in_h);
  }
  SUBCASE("short table") {
    CHECK_THROWS(rate_divergence(RateFunction::tabulated({1.0, 0.5}), 5));
  }
}

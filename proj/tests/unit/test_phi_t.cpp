#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "ifslab/phi_t.hpp"

using namespace ifslab;

namespace {

PhiTSystem rational(std::uint64_t a, std::uint64_t b) { return PhiTSystem(RationalT{a, b}); }

// value of the word's image of 0 times b * 2^n, as an integer: phi_a(0) = sum d_{a_j} / 2^j
std::uint64_t scaled_image(const Word& w, std::uint64_t a, std::uint64_t b) {
  std::uint64_t acc = 0;
  for (auto d : w.digits) {
    const std::uint64_t digit = (d & 1) * b + (d >> 1) * a;
    acc = 2 * acc + digit;
  }
  return acc;
}

// first level where two distinct words give the same map
std::optional<int> brute_overlap(std::uint64_t a, std::uint64_t b, int n_max) {
  for (int n = 1; n <= n_max; ++n) {
    std::set<std::uint64_t> seen;
    const std::size_t count = std::size_t{1} << (2 * n);
    for (std::size_t idx = 0; idx < count; ++idx) {
      Word w;
      for (int j = n - 1; j >= 0; --j) w.digits.push_back(static_cast<std::uint8_t>((idx >> (2 * j)) & 3));
      if (!seen.insert(scaled_image(w, a, b)).second) return n;
    }
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("word and pair bijection") {
  for (int n = 1; n <= 6; ++n) {
    const auto pts = images_exact(rational(1, 3), n);
    CHECK(pts.size() == (std::size_t{1} << (2 * n)));
    std::set<std::pair<std::uint64_t, std::uint64_t>> distinct;
    for (const auto& e : pts) {
      CHECK(e.p < (1u << n));
      CHECK(e.q < (1u << n));
      distinct.insert({e.p, e.q});
      CHECK(word_to_pair(pair_to_word(e)) == e);
    }
    CHECK(distinct.size() == pts.size());
  }
  const auto one = images_exact(rational(1, 2), 1);
  std::set<std::pair<std::uint64_t, std::uint64_t>> s;
  for (const auto& e : one) s.insert({e.p, e.q});
  CHECK(s == std::set<std::pair<std::uint64_t, std::uint64_t>>{{0, 0}, {1, 0}, {0, 1}, {1, 1}});
}

TEST_CASE("distinct image values match a word-level count") {
  for (auto [a, b] : {std::pair<std::uint64_t, std::uint64_t>{1, 2}, {1, 3}, {2, 5}}) {
    for (int n = 1; n <= 4; ++n) {
      std::set<std::uint64_t> values, oracle;
      for (const auto& e : images_exact(rational(a, b), n)) values.insert(b * e.p + a * e.q);
      const std::size_t count = std::size_t{1} << (2 * n);
      for (std::size_t idx = 0; idx < count; ++idx) {
        Word w;
        for (int j = n - 1; j >= 0; --j) w.digits.push_back(static_cast<std::uint8_t>((idx >> (2 * j)) & 3));
        oracle.insert(scaled_image(w, a, b));
      }
      CHECK(values.size() == oracle.size());
    }
  }
  // p + q/2 over p, q in [0, 3]
  std::set<std::uint64_t> half;
  for (const auto& e : images_exact(rational(1, 2), 2)) half.insert(2 * e.p + e.q);
  CHECK(half.size() == 10);
}

TEST_CASE("overlap detection") {
  const auto third = detect_overlap(rational(1, 3), 8);
  REQUIRE(third.level.has_value());
  CHECK(*third.level == 2);
  CHECK(third.p == 1);
  CHECK(third.q == 3);
  const auto half = detect_overlap(rational(1, 2), 8);
  CHECK(*half.level == 2);
  CHECK(half.p == 1);
  CHECK(half.q == 2);
  const auto g = detect_overlap(PhiTSystem(golden_conjugate()), 16);
  CHECK_FALSE(g.level.has_value());
  CHECK(g.definitive);
  CHECK(*detect_overlap(rational(3, 17), 10).level == 5);
  CHECK_FALSE(detect_overlap(rational(3, 17), 4).level.has_value());
}

TEST_CASE("overlap agrees with word-level search for small denominators") {
  for (std::uint64_t b = 2; b <= 12; ++b) {
    for (std::uint64_t a = 1; a < b; ++a) {
      if (std::gcd(a, b) != 1) continue;
      CHECK(detect_overlap(rational(a, b), 4).level == brute_overlap(a, b, 4));
    }
  }
}

TEST_CASE("gaps") {
  const PhiTSystem g(golden_conjugate());
  const auto g3 = min_gap_exact(g, 3);
  CHECK(g3.derivation == "cf-closed-form");
  const Real t = g.t();
  CHECK(abs(g3.gap - abs(5 * t - 3) / 8) < ldexp(Real(1), -200));
  CHECK(static_cast<double>(g3.gap) == doctest::Approx(0.0112712).epsilon(1e-6));
  CHECK(min_gap_exact(rational(1, 2), 2).gap == 0);
  CHECK(min_gap_exact(rational(1, 2), 1).gap == Real(1) / 4);
  const auto ex = min_gap_exact(rational(1, 2), 1).exact;
  REQUIRE(ex.has_value());
  CHECK(ex->first * 4 == ex->second);
}

TEST_CASE("closed form matches enumeration") {
  for (const auto& spec : {golden_conjugate(), sqrt2_minus_1(), parse_tspec("cf:[1,2,1,2;3]"), TSpec{CubesT{}},
                           TSpec{RationalT{5, 13}}, TSpec{RationalT{100, 101}}}) {
    const PhiTSystem sys(spec);
    for (int n = 1; n <= 7; ++n) {
      const auto a = min_gap_exact(sys, n), b = min_gap_brute(sys, n);
      CHECK(abs(a.gap - b.gap) < ldexp(Real(1), -100));
      if (sys.cf().is_rational()) {
        REQUIRE(a.exact.has_value());
        REQUIRE(b.exact.has_value());
        CHECK(a.exact->first * b.exact->second == b.exact->first * a.exact->second);
      }
    }
  }
}

TEST_CASE("dichotomy report") {
  SUBCASE("rational: zero beyond the overlap level") {
    const auto r = dichotomy_report(rational(2, 5), 8);
    REQUIRE(r.overlap_level.has_value());
    for (const auto& lv : r.levels) {
      if (lv.n >= *r.overlap_level) CHECK(lv.delta.gap == 0);
      else CHECK(lv.delta.gap > 0);
    }
  }
  SUBCASE("golden: every level optimal") {
    const auto r = dichotomy_report(PhiTSystem(golden_conjugate()), 12);
    CHECK_FALSE(r.overlap_level.has_value());
    CHECK(r.optimal_found);
    CHECK(r.discrepancies.empty());
    for (const auto& lv : r.levels) CHECK(lv.optimal);
    CHECK(r.empirical_ct > 0.3);
  }
  SUBCASE("sqrt2 - 1: predicted levels are optimal") {
    const auto r = dichotomy_report(PhiTSystem(sqrt2_minus_1()), 14);
    CHECK(r.discrepancies.empty());
    for (const auto& lv : r.levels) {
      if (lv.predicted_good && lv.n >= 3) CHECK(lv.optimal);
    }
  }
}

TEST_CASE("collapse levels") {
  const PhiTSystem cubes(CubesT{});
  const auto cl = collapse_levels(cubes, 3);
  REQUIRE(cl.size() == 3);
  CHECK(cl[1].m == 2);
  CHECK(cl[1].n == 3);
  CHECK(cl[2].m == 4);
  CHECK(cl[2].n == 7);
  for (const auto& c : cl) {
    const BigInt k2q = BigInt(c.k) * c.k * c.q;
    const BigInt lo = BigInt(1) << c.n, hi = BigInt(1) << (c.n + 1);
    CHECK(lo <= k2q);
    CHECK(k2q < hi);
    CHECK(cubes.cf().quotient(c.m + 1) >= static_cast<std::uint64_t>(c.k) * c.k * c.k);
  }
  CHECK_THROWS(collapse_levels(PhiTSystem(golden_conjugate()), 2));
}

TEST_CASE("witness rates") {
  const auto h = witness_h({2, 5, 9}, 0.5);
  CHECK(h(2) == 0.5);
  CHECK(h(5) == 0.5);
  CHECK(h(3) == 0.0);
  CHECK_THROWS(witness_h({}, 0.5));
  std::vector<LevelRecord> recs(2);
  recs[0].ratio = 0.5;
  recs[1].ratio = 0.25;
  CHECK(witness_cover_sum(recs, 0.5) == doctest::Approx(6 * 0.5 * 0.75));
}

TEST_CASE("exact separation") {
  SUBCASE("golden at s = 1/8 is fully separated") {
    const PhiTSystem g(golden_conjugate());
    for (int n = 1; n <= 9; ++n) {
      const auto r = phit_separation(g, n, 0.125);
      CHECK(r.ratio == 1.0);
      CHECK(r.cardinality == (std::size_t{1} << (2 * n)));
    }
  }
  SUBCASE("agrees with floating separation where no ties occur") {
    const PhiTSystem sys(sqrt2_minus_1());
    const double z[1] = {0.0};
    const auto cloud = point_cloud(phi_t_family(sys.t_double()), BernoulliMeasure::uniform(4), 6, z);
    const auto flo = separation_record(cloud, 0.7);
    const auto ex = phit_separation(sys, 6, 0.7);
    CHECK(ex.separated == flo.separated);
    CHECK(ex.near_pairs == flo.near_pairs);
  }
  SUBCASE("1/3 loses points after the overlap") {
    const auto prof = phit_separation_profile(rational(1, 3), 0.125, 1, 8);
    for (const auto& r : prof.levels) {
      if (r.n >= 2) CHECK(r.ratio < 1.0);
      // distinct values grow like (4^2 - 1)^{n/2}
      std::set<std::uint64_t> vals;
      for (const auto& e : images_exact(rational(1, 3), r.n)) vals.insert(3 * e.p + e.q);
      CHECK(static_cast<double>(vals.size()) <= 4 * std::pow(15.0, r.n / 2.0));
      CHECK(r.separated <= vals.size());
    }
  }
  SUBCASE("closed form above the cap") {
    const auto r = phit_separation(PhiTSystem(golden_conjugate()), 14, 0.125);
    CHECK(r.method == "closed-form");
    CHECK(r.ratio == 1.0);
    CHECK_THROWS_AS(phit_separation(rational(1, 3), 14, 0.125), ResourceError);
  }
}

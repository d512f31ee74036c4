#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ifslab/limsup.hpp"

using namespace ifslab;

namespace {

BallFamily family_of(std::vector<double> centers, std::vector<double> radii, int level = 1) {
  BallFamily f;
  f.level = level;
  f.centers = std::move(centers);
  f.radii = std::move(radii);
  return f;
}

std::vector<Interval> intervals(const BallFamily& f) { return merged_intervals(f); }

// measure of {x : x lies in at least k of the sets}, sampled on a fine grid
double grid_kfold(const std::vector<std::vector<Interval>>& sets, int k, double lo, double hi, int cells) {
  const double w = (hi - lo) / cells;
  int hits = 0;
  for (int c = 0; c < cells; ++c) {
    const double x = lo + (c + 0.5) * w;
    int cover = 0;
    for (const auto& s : sets) {
      for (const auto& iv : s) {
        if (x >= iv.lo && x <= iv.hi) {
          ++cover;
          break;
        }
      }
    }
    hits += cover >= k;
  }
  return hits * w;
}

}  // namespace

TEST_CASE("ball radii") {
  const double z[1] = {0.0};
  const auto cloud = point_cloud(phi_t_family(0.5), BernoulliMeasure::uniform(4), 3, z);
  const auto f = level_balls(cloud, RateFunction::constant(1.0));
  for (double r : f.radii) CHECK(r == doctest::Approx(1.0 / 64));
  const auto c4 = point_cloud(phi_t_family(0.5), BernoulliMeasure::uniform(4), 4, z);
  for (double r : level_balls(c4, RateFunction::reciprocal()).radii) CHECK(r == doctest::Approx(1.0 / 1024));
  const auto clamped = level_balls(c4, RateFunction::constant(1.0), 0.3);
  CHECK(clamped.clamped);
  CHECK(clamped.radii[0] == doctest::Approx(std::min(1.0 / 256, 0.3 / (3 * 256))));
}

TEST_CASE("interval unions") {
  const auto f = family_of({0.5, 1.25}, {0.5, 0.75});
  const auto u = intervals(f);
  REQUIRE(u.size() == 1);
  CHECK(u[0].lo == 0.0);
  CHECK(u[0].hi == 2.0);
  CHECK(union_measure(f).value == 2.0);
  CHECK(union_measure(family_of({}, {})).value == 0.0);
  const double g = 0.01;
  std::vector<double> c, r;
  for (int i = 0; i < 16; ++i) {
    c.push_back(i * 0.1);
    r.push_back(g);
  }
  CHECK(union_measure(family_of(c, r)).value == doctest::Approx(2 * 16 * g));
}

TEST_CASE("subadditivity") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<BallFamily> fams;
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
      std::vector<double> c, r;
      for (int i = 0; i < 5; ++i) {
        c.push_back(u(rng));
        r.push_back(0.02 * u(rng));
      }
      fams.push_back(family_of(c, r, k + 1));
      sum += union_measure(fams.back()).value;
    }
    CHECK(union_measure(fams).value <= sum + 1e-15);
  }
  std::vector<BallFamily> disjoint{family_of({0.0}, {0.1}), family_of({1.0}, {0.2}), family_of({2.0}, {0.05})};
  CHECK(union_measure(disjoint).value == doctest::Approx(0.2 + 0.4 + 0.1));
  std::vector<BallFamily> overlapping{family_of({0.0}, {0.1}), family_of({0.05}, {0.1})};
  CHECK(union_measure(overlapping).value < 0.4);
}

TEST_CASE("monte carlo union in two dimensions") {
  BallFamily f;
  f.dim = 2;
  f.centers = {0.0, 0.0, 3.0, 0.0};
  f.radii = {1.0, 0.5};
  const auto est = union_measure(f, MonteCarloOptions{7, 1 << 20});
  CHECK_FALSE(est.exact);
  const double truth = std::acos(-1.0) * 1.25;
  CHECK(std::abs(est.value - truth) < 5 * est.std_error);
  CHECK(union_measure(f, MonteCarloOptions{7, 1 << 20}).value == est.value);
}

TEST_CASE("kochen-stone") {
  const std::vector<Interval> e{{0.0, 0.3}};
  std::vector<std::vector<Interval>> same(5, e);
  CHECK(kochen_stone_bound(same) == doctest::Approx(0.3).epsilon(1e-12));
  std::vector<std::vector<Interval>> apart{{{0.0, 0.1}}, {{0.2, 0.3}}, {{0.4, 0.5}}};
  // (0.3)^2 / 0.3
  CHECK(kochen_stone_bound(apart) == doctest::Approx(0.3).epsilon(1e-12));
  std::vector<std::vector<Interval>> chain{{{0.0, 0.2}}, {{0.1, 0.3}}, {{0.2, 0.4}}};
  // diagonal 0.6, off-diagonal 2 * (0.1 + 0.0 + 0.1)
  CHECK(kochen_stone_bound(chain) == doctest::Approx(0.36 / 1.0).epsilon(1e-12));
}

TEST_CASE("coverage report") {
  const double z[1] = {0.0};
  const Ifs ifs = phi_t_family(0.6180339887498949);
  const auto m = BernoulliMeasure::uniform(4);
  SUBCASE("zero rate") {
    const auto rep = coverage_report(ifs, m, z, RateFunction::constant(0.0), 1, 5);
    for (double v : rep.kfold) CHECK(v == 0.0);
    for (const auto& lv : rep.levels) CHECK(lv.union_measure == 0.0);
    CHECK(rep.ks_bound == 0.0);
  }
  SUBCASE("invariants and sweep against a sampling oracle") {
    CoverageOptions opts;
    opts.k_max = 4;
    const auto rep = coverage_report(ifs, m, z, RateFunction::reciprocal(), 2, 6, opts);
    REQUIRE(rep.kfold.size() == 4);
    for (std::size_t k = 1; k < rep.kfold.size(); ++k) CHECK(rep.kfold[k] <= rep.kfold[k - 1]);
    for (double v : rep.kfold) CHECK(v <= rep.ambient_measure);
    CHECK(rep.ks_bound <= rep.ambient_measure + 1e-12);
    for (std::size_t i = 1; i < rep.tail_union.size(); ++i) CHECK(rep.tail_union[i] <= rep.tail_union[i - 1]);

    std::vector<std::vector<Interval>> sets;
    for (int n = 2; n <= 6; ++n) {
      sets.push_back(merged_intervals(level_balls(point_cloud(ifs, m, n, z), RateFunction::reciprocal()),
                                      Interval{rep.ambient_lo[0], rep.ambient_hi[0]}));
    }
    const int cells = 1 << 20;
    const double w = rep.ambient_measure / cells;
    std::size_t intervals_total = 0;
    for (const auto& s : sets) intervals_total += s.size();
    for (int k = 1; k <= 4; ++k) {
      const double approx = grid_kfold(sets, k, rep.ambient_lo[0], rep.ambient_hi[0], cells);
      CHECK(std::abs(approx - rep.kfold[k - 1]) <= 2.0 * static_cast<double>(intervals_total) * w);
    }
  }
  SUBCASE("hit-count grid") {
    CoverageOptions opts;
    opts.grid = std::ldexp(1.0, -14);
    const auto rep = coverage_report(ifs, m, z, RateFunction::constant(1.0), 1, 4, opts);
    CHECK(rep.hit_counts.size() == static_cast<std::size_t>(std::ceil(rep.ambient_measure / *opts.grid)));
    opts.grid = 0.5;
    CHECK_THROWS(coverage_report(ifs, m, z, RateFunction::constant(1.0), 1, 4, opts));
  }
}

TEST_CASE("volume sums") {
  const auto harmonic = volume_sum(PsiSpec{2, 2.0, 1.0, 1.0}, 1.0, 1000);
  CHECK(harmonic.verdict == VolumeSum::Verdict::Divergent);
  double h = 0.0;
  for (int n = 1; n <= 1000; ++n) h += 1.0 / n;
  CHECK(harmonic.partial_sums.back() == doctest::Approx(h).epsilon(1e-10));
  const double s = 0.5;
  const auto crit = volume_sum(PsiSpec{4, 4.0, 1.0 + s, 0.0}, 1.0 / (1.0 + s), 20);
  CHECK(crit.ratio == doctest::Approx(1.0));
  CHECK(crit.verdict == VolumeSum::Verdict::Divergent);
  CHECK(crit.partial_sums.back() == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(volume_sum(RateFunction::geometric(0.5), 30).verdict == VolumeSum::Verdict::Convergent);
  CHECK(volume_sum(PsiSpec{2, 2.0, 2.0, 0.0}, 1.0, 10).verdict == VolumeSum::Verdict::Convergent);
}

TEST_CASE("dimension estimates") {
  SUBCASE("dense interval") {
    PointCloud c;
    for (int i = 0; i < (1 << 16); ++i) {
      c.coords.push_back((i + 0.5) / (1 << 16));
      c.masses.push_back(1.0);
    }
    CHECK(box_dimension(c).slope == doctest::Approx(1.0).epsilon(0.05));
  }
  SUBCASE("middle-third Cantor set") {
    const double z[1] = {0.5};
    const auto c = point_cloud(SimilarityIfs1D(1.0 / 3.0, {0.0, 2.0 / 3.0}), BernoulliMeasure::uniform(2), 12, z);
    std::vector<double> deltas;
    for (int j = 1; j <= 8; ++j) deltas.push_back(std::pow(3.0, -j));
    const auto est = box_dimension(c, deltas);
    CHECK(std::abs(est.slope - std::log(2.0) / std::log(3.0)) < 0.05);
    for (std::size_t i = 1; i < est.counts.size(); ++i) CHECK(est.counts[i] >= est.counts[i - 1]);
  }
  SUBCASE("fit needs four scales") {
    CHECK_THROWS(fit_dimension({0.5, 0.25, 0.125}, {2, 4, 8}));
    const auto exact = fit_dimension({0.5, 0.25, 0.125, 0.0625}, {2, 4, 8, 16});
    CHECK(exact.slope == doctest::Approx(1.0));
    CHECK(exact.residual < 1e-12);
  }
}

TEST_CASE("mass transference prediction") {
  CHECK(mt_predict(1.0) == 0.5);
  CHECK(mt_predict(3.0) == 0.25);
  CHECK(mt_predict(1e-9) == doctest::Approx(1.0));
  CHECK_THROWS(mt_predict(0.0));
}

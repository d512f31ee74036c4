#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ifslab/ifs.hpp"

using namespace ifslab;

namespace {

const SimilarityIfs1D dyadic(0.5, {0.0, 0.5});

std::vector<double> cloud_values(const Ifs& ifs, int n, double z) {
  const double zz[1] = {z};
  const auto c = point_cloud(ifs, BernoulliMeasure::uniform(map_count(ifs)), n, zz);
  return c.coords;
}

Word random_word(std::mt19937_64& rng, std::size_t len, std::size_t alphabet) {
  Word w;
  for (std::size_t i = 0; i < len; ++i) w.digits.push_back(static_cast<std::uint8_t>(rng() % alphabet));
  return w;
}

}  // namespace

TEST_CASE("construction checks") {
  CHECK_THROWS(SimilarityIfs1D(1.0, {0.0, 1.0}));
  CHECK_THROWS(SimilarityIfs1D(0.5, {0.0, 0.0}));
  Eigen::MatrixXd big = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS(AffineIfs({big}, {Eigen::VectorXd::Zero(2)}));
  const auto sim = AffineIfs::from_similarity(dyadic);
  CHECK(sim.structure() == AffineIfs::Structure::Similarity);
  Eigen::MatrixXd diag(2, 2);
  diag << 0.5, 0, 0, 0.25;
  CHECK(AffineIfs({diag}, {Eigen::VectorXd::Zero(2)}).structure() == AffineIfs::Structure::Diagonal);
  Eigen::MatrixXd gen(2, 2);
  gen << 0.3, 0.2, 0.1, 0.3;
  const AffineIfs g({gen}, {Eigen::VectorXd::Zero(2)});
  CHECK(g.structure() == AffineIfs::Structure::General);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gen);
  CHECK(g.operator_norm(0) == doctest::Approx(svd.singularValues()(0)));
}

TEST_CASE("compose_map") {
  const auto f2 = compose_map(dyadic, Word::parse("2"));
  CHECK(f2.scale == 0.5);
  CHECK(f2.shift == 0.5);
  const auto f21 = compose_map(dyadic, Word::parse("21"));
  CHECK(f21.scale == 0.25);
  CHECK(f21.shift == 0.5);
  const auto id = compose_map(dyadic, Word{});
  CHECK(id.scale == 1.0);
  CHECK(id.shift == 0.0);
}

TEST_CASE("composition is associative on random words") {
  std::mt19937_64 rng(7);
  const SimilarityIfs1D ifs(0.37, {-1.0, 0.2, 1.5});
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 0.4, 0.1, -0.2, 0.3;
  b << 0.5, 0.0, 0.0, 0.2;
  Eigen::VectorXd ta(2), tb(2);
  ta << 1.0, 0.0;
  tb << 0.0, 1.0;
  const AffineIfs aff({a, b}, {ta, tb});
  for (int trial = 0; trial < 50; ++trial) {
    const Word u = random_word(rng, 1 + rng() % 6, 3), v = random_word(rng, 1 + rng() % 6, 3);
    const auto lhs = compose_map(ifs, u.concat(v));
    const auto rhs = compose_map(ifs, u).after(compose_map(ifs, v));
    CHECK(lhs.scale == doctest::Approx(rhs.scale).epsilon(1e-14));
    CHECK(lhs.shift == doctest::Approx(rhs.shift).epsilon(1e-13));

    const Word x = random_word(rng, 1 + rng() % 6, 2), y = random_word(rng, 1 + rng() % 6, 2);
    const auto ml = compose_map(aff, x.concat(y));
    const auto mx = compose_map(aff, x), my = compose_map(aff, y);
    CHECK((ml.linear - mx.linear * my.linear).norm() < 1e-14);
    CHECK((ml.shift - (mx.linear * my.shift + mx.shift)).norm() < 1e-13);
  }
}

TEST_CASE("point clouds") {
  std::vector<double> two = cloud_values(dyadic, 2, 0.0);
  std::sort(two.begin(), two.end());
  CHECK(two == std::vector<double>{0.0, 0.25, 0.5, 0.75});
  CHECK(cloud_values(dyadic, 1, 0.0) == std::vector<double>{0.0, 0.5});
  std::vector<double> phit = cloud_values(phi_t_family(0.5), 1, 0.0);
  std::sort(phit.begin(), phit.end());
  CHECK(phit == std::vector<double>{0.0, 0.25, 0.5, 0.75});
}

TEST_CASE("attractor bounds") {
  const double lam = 0.6;
  const auto bc = attractor_bounds(SimilarityIfs1D(lam, {-1.0, 1.0}));
  CHECK(bc.lo[0] == doctest::Approx(-1 / (1 - lam)));
  CHECK(bc.hi[0] == doctest::Approx(1 / (1 - lam)));
  const auto ph = attractor_bounds(phi_t_family(0.3));
  CHECK(ph.lo[0] == doctest::Approx(0.0));
  CHECK(ph.hi[0] == doctest::Approx(1.3));
  const auto d = attractor_bounds(dyadic);
  CHECK(d.lo[0] == 0.0);
  CHECK(d.hi[0] == 1.0);
}

TEST_CASE("cloud points stay in the attractor interval") {
  const std::vector<SimilarityIfs1D> fams{SimilarityIfs1D(0.6, {-1.0, 1.0}), SimilarityIfs1D(0.45, {0.0, 1.0, 3.0}),
                                          phi_t_family(0.618), dyadic};
  for (const auto& f : fams) {
    const auto b = attractor_bounds(f);
    const double z = 0.5 * (b.lo[0] + b.hi[0]);
    const int top = f.size() > 2 ? 9 : 12;
    for (int n = 1; n <= top; ++n) {
      for (double x : cloud_values(f, n, z)) {
        CHECK(x >= b.lo[0] - 1e-12);
        CHECK(x <= b.hi[0] + 1e-12);
      }
    }
  }
}

TEST_CASE("moving the anchor translates the cloud") {
  const SimilarityIfs1D f(0.55, {-1.0, 1.0});
  const int n = 8;
  const auto a = cloud_values(f, n, 0.1), b = cloud_values(f, n, -0.7);
  const double shift = std::pow(0.55, n) * (-0.7 - 0.1);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] + shift - b[i]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("empirical pushforward") {
  const auto m = BernoulliMeasure::uniform(2);
  const auto h = empirical_pushforward(dyadic, m, 10, 0.0, 16);
  REQUIRE(h.mass.size() == 16);
  for (double v : h.mass) CHECK(v == doctest::Approx(1.0 / 16).epsilon(1e-12));
  const auto one = empirical_pushforward(dyadic, m, 1, 0.0, 2);
  CHECK(one.mass == std::vector<double>{0.5, 0.5});
  const auto ov = empirical_pushforward(phi_t_family(1.0 / 3.0), BernoulliMeasure::uniform(4), 6, 0.0, 10);
  CHECK(ov.total() == doctest::Approx(1.0).epsilon(1e-9));
  const auto skew = empirical_pushforward(SimilarityIfs1D(0.6, {-1.0, 1.0}), BernoulliMeasure({0.3, 0.7}), 9, 0.0, 7);
  CHECK(skew.total() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("perturbations") {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 0.5, 0.0, 0.0, 0.5;
  b << 0.4, 0.1, 0.0, 0.4;
  Eigen::VectorXd ta(2), tb(2);
  ta << 0.0, 0.0;
  tb << 1.0, 0.5;
  const Ifs ifs = AffineIfs({a, b}, {ta, tb});
  const Word w = Word::parse("1212"), tail = Word::parse("21");

  SUBCASE("zero radius matches the unperturbed composition") {
    const PerturbationScheme none(0.0, 99);
    const std::size_t depth = 10;
    const auto pp = perturbed_point(ifs, none, w, tail, depth);
    Word full = w;
    while (full.size() < depth) full = full.concat(tail);
    full.digits.resize(depth);
    const auto f = compose_map(std::get<AffineIfs>(ifs), full);
    CHECK((pp.point - f.shift).norm() < 1e-14);
  }
  SUBCASE("determinism and bounds") {
    const PerturbationScheme s(0.05, 1234);
    const auto p1 = perturbed_point(ifs, s, w, tail, 12);
    const auto p2 = perturbed_point(ifs, s, w, tail, 12);
    CHECK(p1.point == p2.point);
    const std::uint8_t word[3] = {0, 1, 1};
    CHECK(s.error(word, 2) == s.error(word, 2));
    CHECK(s.error(word, 2).norm() <= 0.05);
    CHECK(PerturbationScheme(0.05, 1235).error(word, 2) != s.error(word, 2));
    CHECK_THROWS(perturbed_point(ifs, s, w, tail, 3));
  }
  SUBCASE("truncation error bound holds between successive depths") {
    const PerturbationScheme s(0.1, 42);
    for (std::size_t depth = 4; depth < 20; ++depth) {
      const auto lo = perturbed_point(ifs, s, w, tail, depth);
      const auto hi = perturbed_point(ifs, s, w, tail, depth + 1);
      CHECK((lo.point - hi.point).norm() <= lo.truncation_bound + 1e-15);
    }
  }
}

TEST_CASE("mix64 is one splitmix64 step") {
  std::uint64_t z = 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  CHECK(mix64(0) == z);
}

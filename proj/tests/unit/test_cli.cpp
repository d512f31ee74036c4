#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ifslab/cli.hpp"

using namespace ifslab;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("spec parsers") {
  const auto bc = std::get<SimilarityIfs1D>(cli::parse_ifs("similarity1d(lambda=0.5, digits=[-1,1])"));
  CHECK(bc.ratio() == 0.5);
  CHECK(bc.digits() == std::vector<double>{-1.0, 1.0});
  const auto ph = std::get<SimilarityIfs1D>(cli::parse_ifs("phit(t=rational:1/3)"));
  CHECK(ph.digits()[2] == doctest::Approx(1.0 / 6));
  const auto aff = std::get<AffineIfs>(cli::parse_ifs("affine(d=2, maps=[[0.5,0,0,0.5,0,0];[0.5,0,0,0.5,1,0]])"));
  CHECK(aff.size() == 2);
  CHECK(aff.translation(1)(0) == 1.0);
  CHECK_THROWS_AS(cli::parse_ifs("affine(d=2, maps=[[0.5,0,0]])"), ParseError);
  CHECK_THROWS_AS(cli::parse_ifs("similarity1d(lambda=2, digits=[0,1])"), ParseError);
  CHECK_THROWS_AS(cli::parse_ifs("spiral(k=1)"), ParseError);
  CHECK(cli::phit_tspec("phit(t=golden)").has_value());
  CHECK_FALSE(cli::phit_tspec("similarity1d(lambda=0.5, digits=[0,1])").has_value());

  CHECK(cli::parse_measure("uniform", 3).is_uniform());
  CHECK(cli::parse_measure("[0.25,0.75]", 2)[1] == 0.75);
  CHECK_THROWS_AS(cli::parse_measure("[0.5,0.5]", 3), ParseError);
  CHECK(cli::parse_level_range("3..9") == std::pair{3, 9});
  CHECK(cli::parse_level_range("4") == std::pair{4, 4});
  CHECK_THROWS_AS(cli::parse_level_range("9..3"), ParseError);
  CHECK(cli::parse_scale("2^-14") == std::ldexp(1.0, -14));
  CHECK(cli::parse_lambda_grid("0.5:0.6:10").steps == 10);
  CHECK(cli::parse_number_list("[1, 2.5,-3]") == std::vector<double>{1.0, 2.5, -3.0});
  CHECK(abs(cli::parse_real("inv_sqrt2") * cli::parse_real("inv_sqrt2") - Real(0.5)) < ldexp(Real(1), -250));
  CHECK(cli::parse_real("1/4") == Real(0.25));
}

TEST_CASE("formatting") {
  CHECK(cli::format_double(0.1) == "0.1");
  CHECK(cli::format_double(1.0 / 0.0) == "inf");
  CHECK(cli::csv_field("plain") == "plain");
  CHECK(cli::csv_field("a,b") == "\"a,b\"");
  CHECK(cli::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("usage and exit codes") {
  const auto empty = run_cli({});
  CHECK(empty.code == 2);
  CHECK(empty.err.find("Usage") != std::string::npos);
  CHECK(run_cli({"nonsense"}).code == 2);
  CHECK(run_cli({"cf", "--t", "rational:7/3"}).code == 2);
  CHECK(run_cli({"phit", "--t", "rational:1/3", "--report", "profile", "--levels", "14"}).code == 3);
  CHECK(run_cli({"cf", "--help"}).code == 0);
}

TEST_CASE("cf convergents") {
  const auto r = run_cli({"cf", "--t", "cf:[;2]", "--depth", "4"});
  CHECK(r.code == 0);
  CHECK(r.out == "m,zeta,p,q\n1,2,1,2\n2,2,2,5\n3,2,5,12\n4,2,12,29\n");
}

TEST_CASE("phit overlap report") {
  const auto r = run_cli({"phit", "--t", "rational:1/3", "--report", "overlap"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["overlap_level"] == 2);
  CHECK(j["p"] == 1);
  CHECK(j["q"] == 3);
  CHECK(j["config"]["t"] == "rational:1/3");
}

TEST_CASE("artifact files and config files") {
  const auto dir = std::filesystem::temp_directory_path() / "ifslab_cli_test";
  std::filesystem::create_directories(dir);
  const auto out = (dir / "sep.csv").string();
  const auto r = run_cli({"separation", "--ifs", "phit(t=golden)", "--levels", "1..4", "--out", out});
  CHECK(r.code == 0);
  std::ifstream f(out);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str().rfind("n,R,T,ratio,delta,near_pairs\n1,4,4,1,", 0) == 0);
  CHECK_FALSE(std::filesystem::exists(out + ".tmp"));

  const auto cfg = (dir / "run.toml").string();
  std::ofstream(cfg) << "[families]\nreport = \"dimension\"\nratios = \"0.5,0.5,0.5\"\n";
  const auto fam = run_cli({"families", "--config", cfg});
  REQUIRE(fam.code == 0);
  CHECK(nlohmann::json::parse(fam.out)["dimension"].get<double>() == doctest::Approx(std::log2(3.0)));
  const auto over = run_cli({"families", "--config", cfg, "--ratios", "0.5,0.5"});
  CHECK(nlohmann::json::parse(over.out)["dimension"].get<double>() == doctest::Approx(1.0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("pushforward and coverage run") {
  const auto p = run_cli({"pushforward", "--ifs", "similarity1d(lambda=0.5, digits=[0,0.5])", "--n", "1", "--bins", "2"});
  CHECK(p.out == "bin,lo,hi,mass\n0,0,0.5,0.5\n1,0.5,1,0.5\n");
  const auto c = run_cli({"coverage", "--ifs", "phit(t=golden)", "--h", "reciprocal", "--levels", "2..6"});
  REQUIRE(c.code == 0);
  const auto j = nlohmann::json::parse(c.out);
  CHECK(j["kfold"].size() == 3);
  CHECK(j["config"]["h"] == "reciprocal");
}

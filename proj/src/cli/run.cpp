#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "ifslab/cli.hpp"
#include "ifslab/contfrac.hpp"
#include "ifslab/families.hpp"
#include "ifslab/limsup.hpp"
#include "ifslab/phi_t.hpp"
#include "ifslab/separation.hpp"

namespace ifslab::cli {

namespace {

using json = nlohmann::ordered_json;

struct Output {
  std::string artifact;
  std::string summary;
};

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("failed writing '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json real(const Real& x) { return num(static_cast<double>(x)); }

std::string fraction(const std::pair<BigInt, BigInt>& f) { return f.first.str() + "/" + f.second.str(); }

std::string join_csv(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_field(fields[i]);
  return line + "\n";
}

std::string b(bool v) { return v ? "true" : "false"; }

// option values in definition order; run-environment options are left out
json config_of(const CLI::App* sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "out" || name == "threads" || name == "config") continue;
    if (opt->count() > 0) {
      std::string v;
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) v += (i ? "," : "") + res[i];
      cfg[name] = v;
    } else {
      cfg[name] = opt->get_default_str();
    }
  }
  return cfg;
}

json header(const std::string& command, const json& config) {
  json j;
  j["schema"] = 1;
  j["command"] = command;
  j["config"] = config;
  return j;
}

json level_record_json(const LevelRecord& r) {
  json j;
  j["n"] = r.n;
  j["R"] = r.cardinality;
  j["T"] = r.separated;
  j["ratio"] = num(r.ratio);
  j["delta"] = num(r.min_gap);
  j["near_pairs"] = r.near_pairs;
  j["radius"] = num(r.radius);
  j["exact"] = r.exact;
  j["method"] = r.method;
  return j;
}

std::string profile_csv(const SeparationProfile& prof) {
  std::string s = "n,R,T,ratio,delta,near_pairs\n";
  for (const auto& r : prof.levels) {
    s += join_csv({std::to_string(r.n), std::to_string(r.cardinality), std::to_string(r.separated),
                   format_double(r.ratio), format_double(r.min_gap), std::to_string(r.near_pairs)});
  }
  return s;
}

json probe_json(const CsProbe& p) {
  json j;
  j["threshold"] = p.threshold;
  j["running_minimum"] = num(p.running_minimum);
  j["verdict"] = p.verdict == CsProbe::Verdict::CsConsistent ? "cs-consistent" : "collapse-witnessed";
  j["witness_levels"] = p.witness_levels;
  return j;
}

std::string verdict_name(ApproximabilityVerdict::Kind k) {
  switch (k) {
    case ApproximabilityVerdict::Kind::BoundedSoFar:
      return "bounded-so-far";
    case ApproximabilityVerdict::Kind::Rational:
      return "rational";
    case ApproximabilityVerdict::Kind::UnboundedWitnessed:
      return "unbounded-witnessed";
  }
  return {};
}

// ---- cf -------------------------------------------------------------------

struct CfOpts {
  std::string t;
  std::size_t depth = 10;
  std::string report = "convergents";
  double s = 0.125;
  int levels = 12;
  double eps = 0.1;
  double L = 2.0;
  std::size_t M = 10;
  std::string Q = "100";
};

Output run_cf(const CfOpts& o, const json& config) {
  const ContinuedFraction cf(parse_tspec(o.t));
  Output out;
  const std::string name = describe(cf.spec());
  if (o.report == "convergents") {
    if (o.depth < 1) throw ParseError("--depth must be >= 1");
    cf.ensure_depth(o.depth);
    const std::size_t d = cf.length() ? std::min(o.depth, *cf.length()) : o.depth;
    out.artifact = "m,zeta,p,q\n";
    for (std::size_t m = 1; m <= d; ++m) {
      out.artifact += join_csv({std::to_string(m), std::to_string(cf.quotient(m)), cf.p(static_cast<long>(m)).str(),
                                cf.q(static_cast<long>(m)).str()});
    }
    const auto v = is_badly_approximable(cf, d);
    out.summary = "cf " + name + ": " + std::to_string(d) + " convergents, " + verdict_name(v.kind) +
                  " (max quotient " + std::to_string(v.max_quotient) + (v.definitive ? ", definitive)" : ", so far)");
  } else if (o.report == "good-levels") {
    const auto lv = good_levels(cf, o.s, o.levels);
    out.artifact = "n,m,q_m,q_next,dioph,cf,provisional,good\n";
    int good = 0;
    for (const auto& v : lv) {
      good += v.good();
      out.artifact += join_csv({std::to_string(v.n), std::to_string(v.m), v.q_m.str(),
                                v.q_next ? v.q_next->str() : std::string(), b(v.dioph), b(v.cf), b(v.provisional),
                                b(v.good())});
    }
    out.summary = "cf " + name + ": " + std::to_string(good) + " of " + std::to_string(o.levels) + " levels are good " +
                  format_double(o.s) + "-levels";
  } else if (o.report == "density") {
    const auto d = density_condition(cf, o.eps, o.L, o.M);
    json j = header("cf", config);
    j["t"] = name;
    j["lhs"] = num(d.lhs);
    j["bound"] = num(d.bound);
    j["satisfied"] = d.satisfied;
    j["contributing"] = d.contributing;
    out.artifact = j.dump(2) + "\n";
    out.summary = "cf " + name + ": density lhs " + format_double(d.lhs) + (d.satisfied ? " <= " : " > ") +
                  format_double(d.bound);
  } else if (o.report == "gauss") {
    const auto g = gauss_condition_partial(o.M);
    out.artifact = "m,mass,term,partial_sum\n";
    for (std::size_t m = 0; m < g.masses.size(); ++m) {
      out.artifact += join_csv({std::to_string(m + 1), format_double(g.masses[m]), format_double(g.terms[m]),
                                format_double(g.partial_sums[m])});
    }
    out.summary = "gauss partial sum to M=" + std::to_string(o.M) + ": " + format_double(g.partial_sums.back());
  } else if (o.report == "best") {
    BigInt Q;
    try {
      Q = BigInt(o.Q);
    } catch (const std::exception&) {
      throw ParseError("--Q must be an integer, got '" + o.Q + "'");
    }
    const auto ba = best_approx_error(cf, Q);
    json j = header("cf", config);
    j["t"] = name;
    j["q"] = ba.q.str();
    j["p"] = ba.p.str();
    j["index"] = ba.index;
    j["error"] = real(ba.error);
    if (ba.exact_error) j["error_exact"] = fraction(*ba.exact_error);
    out.artifact = j.dump(2) + "\n";
    out.summary = "cf " + name + ": best q <= " + o.Q + " is " + ba.q.str();
  } else {
    throw ParseError("unknown cf report '" + o.report + "'");
  }
  return out;
}

// ---- phit -----------------------------------------------------------------

struct PhitOpts {
  std::string t;
  int levels = 12;
  std::string report = "dichotomy";
  double s = 0.125;
  int k = 3;
  double threshold = 0.05;
};

Output run_phit(const PhitOpts& o, const json& config) {
  const PhiTSystem sys(parse_tspec(o.t));
  const std::string name = describe(sys.spec());
  json j = header("phit", config);
  j["t"] = name;
  Output out;
  if (o.report == "overlap") {
    const auto r = detect_overlap(sys, o.levels);
    j["verdict"] = r.level ? "overlap" : "no-overlap";
    j["overlap_level"] = r.level ? json(*r.level) : json(nullptr);
    j["p"] = r.level ? json(r.p) : json(nullptr);
    j["q"] = r.level ? json(r.q) : json(nullptr);
    j["definitive"] = r.definitive;
    out.summary = "phit " + name + ": " + (r.level ? "exact overlap at level " + std::to_string(*r.level)
                                                   : "no exact overlap up to level " + std::to_string(o.levels));
  } else if (o.report == "dichotomy") {
    const auto rep = dichotomy_report(sys, o.levels);
    j["verdict"] = rep.overlap_level ? "overlap" : (rep.optimal_found ? "optimal" : "undecided");
    j["overlap_level"] = rep.overlap_level ? json(*rep.overlap_level) : json(nullptr);
    j["guarantee_applies"] = rep.guarantee_applies;
    j["optimal_found"] = rep.optimal_found;
    j["empirical_ct"] = num(rep.empirical_ct);
    j["discrepancies"] = rep.discrepancies;
    json levels = json::array();
    for (const auto& lv : rep.levels) {
      json e;
      e["n"] = lv.n;
      e["delta"] = real(lv.delta.gap);
      e["u_gap"] = real(lv.delta.u_gap);
      if (lv.delta.exact) e["delta_exact"] = fraction(*lv.delta.exact);
      e["optimal"] = lv.optimal;
      e["predicted_good"] = lv.predicted_good;
      e["provisional"] = lv.provisional;
      e["discrepancy"] = lv.discrepancy;
      levels.push_back(e);
    }
    j["per_level"] = levels;
    out.summary = "phit " + name + ": " + j["verdict"].get<std::string>() + ", " +
                  std::to_string(rep.discrepancies.size()) + " discrepancies";
  } else if (o.report == "collapse") {
    const auto cl = collapse_levels(sys, o.k);
    json levels = json::array();
    std::vector<int> hlevels;
    std::vector<LevelRecord> records;
    for (const auto& c : cl) {
      json e;
      e["k"] = c.k;
      e["m"] = c.m;
      e["n"] = c.n;
      e["q"] = c.q.str();
      e["p"] = c.p.str();
      e["sign"] = c.positive ? "positive" : "negative";
      if (c.n >= 1 && (hlevels.empty() || c.n > hlevels.back())) {
        hlevels.push_back(c.n);
        try {
          const auto rec = phit_separation(sys, c.n, o.s);
          e["ratio"] = num(rec.ratio);
          e["T"] = rec.separated;
          e["R"] = rec.cardinality;
          records.push_back(rec);
        } catch (const ResourceError&) {
          e["ratio"] = nullptr;
        }
      }
      levels.push_back(e);
    }
    j["per_level"] = levels;
    j["witness_levels"] = hlevels;
    j["witness_value"] = std::pow(o.s, 1);
    j["cover_sum"] = num(witness_cover_sum(records, o.s));
    j["verdict"] = "collapse-levels";
    out.summary = "phit " + name + ": " + std::to_string(cl.size()) + " collapse levels";
  } else if (o.report == "profile") {
    const auto prof = phit_separation_profile(sys, o.s, 1, o.levels);
    const auto probe = cs_probe(prof, o.threshold);
    json levels = json::array();
    for (const auto& r : prof.levels) levels.push_back(level_record_json(r));
    j["s"] = o.s;
    j["verdict"] = probe_json(probe)["verdict"];
    j["probe"] = probe_json(probe);
    j["per_level"] = levels;
    out.summary = "phit " + name + ": " + j["verdict"].get<std::string>() + ", min ratio " +
                  format_double(probe.running_minimum);
  } else {
    throw ParseError("unknown phit report '" + o.report + "'");
  }
  out.artifact = j.dump(2) + "\n";
  return out;
}

// ---- separation -----------------------------------------------------------

struct SepOpts {
  std::string ifs;
  std::string measure = "uniform";
  std::string z = "0";
  double s = 0.125;
  std::string levels = "1..8";
  double threshold = 0.05;
  std::string format = "csv";
};

Output run_separation(const SepOpts& o, const json& config) {
  const Ifs ifs = parse_ifs(o.ifs);
  const auto m = parse_measure(o.measure, map_count(ifs));
  const auto z = parse_number_list(o.z);
  const auto [lo, hi] = parse_level_range(o.levels);
  SeparationProfile prof;
  const auto tspec = phit_tspec(o.ifs);
  if (tspec && m.is_uniform() && z.size() == 1 && z[0] == 0.0) {
    prof = phit_separation_profile(PhiTSystem(*tspec), o.s, lo, hi);
  } else {
    prof = separation_profile(ifs, m, z, o.s, lo, hi);
  }
  const auto probe = cs_probe(prof, o.threshold);
  Output out;
  if (o.format == "csv") {
    out.artifact = profile_csv(prof);
  } else if (o.format == "json") {
    json j = header("separation", config);
    j["s"] = o.s;
    json levels = json::array();
    for (const auto& r : prof.levels) levels.push_back(level_record_json(r));
    j["levels"] = levels;
    j["probe"] = probe_json(probe);
    out.artifact = j.dump(2) + "\n";
  } else {
    throw ParseError("unknown format '" + o.format + "'");
  }
  out.summary = "separation: levels " + std::to_string(lo) + ".." + std::to_string(hi) + ", min ratio " +
                format_double(probe.running_minimum) + ", " + probe_json(probe)["verdict"].get<std::string>();
  return out;
}

// ---- coverage -------------------------------------------------------------

struct CovOpts {
  std::string ifs;
  std::string measure = "uniform";
  std::string h;
  std::string levels = "1..10";
  std::string z = "0";
  int kmax = 3;
  std::string grid;
  double clamp = 0.0;
  std::uint64_t seed = 0x5eed5eedULL;
  std::size_t samples = 1 << 18;
  std::string cells;
};

Output run_coverage(const CovOpts& o, const json& config) {
  const Ifs ifs = parse_ifs(o.ifs);
  const auto m = parse_measure(o.measure, map_count(ifs));
  const auto h = RateFunction::parse(o.h);
  const auto z = parse_number_list(o.z);
  const auto [lo, hi] = parse_level_range(o.levels);
  CoverageOptions opts;
  opts.k_max = o.kmax;
  if (!o.grid.empty()) opts.grid = parse_scale(o.grid);
  if (o.clamp > 0.0) opts.clamp_s = o.clamp;
  opts.mc.seed = o.seed;
  opts.mc.samples = o.samples;
  const auto rep = coverage_report(ifs, m, z, h, lo, hi, opts);

  json j = header("coverage", config);
  j["ambient"] = {{"lo", rep.ambient_lo}, {"hi", rep.ambient_hi}, {"measure", num(rep.ambient_measure)}};
  j["window"] = {{"n_lo", rep.n_lo}, {"n_hi", rep.n_hi}, {"k_max", o.kmax}};
  j["exact"] = rep.exact;
  json levels = json::array();
  for (const auto& lv : rep.levels) {
    levels.push_back({{"n", lv.n},
                      {"balls", lv.balls},
                      {"ball_sum", num(lv.ball_sum)},
                      {"union", num(lv.union_measure)},
                      {"std_error", num(lv.union_std_error)}});
  }
  j["levels"] = levels;
  json kfold = json::array();
  for (std::size_t k = 0; k < rep.kfold.size(); ++k) kfold.push_back({{"K", k + 1}, {"measure", num(rep.kfold[k])}});
  j["kfold"] = kfold;
  j["tail_union"] = rep.tail_union;
  j["ks_bound"] = num(rep.ks_bound);
  j["ks_levels"] = {rep.ks_first_level, rep.ks_last_level};
  j["volume_sums"] = rep.volume_partial_sums;

  if (!o.cells.empty()) {
    if (!rep.grid) throw ParseError("--cells needs --grid");
    std::string csv = "cell_lo,cell_hi,hits\n";
    for (std::size_t c = 0; c < rep.hit_counts.size(); ++c) {
      const double a = rep.ambient_lo[0] + static_cast<double>(c) * *rep.grid;
      csv += join_csv({format_double(a), format_double(a + *rep.grid), std::to_string(rep.hit_counts[c])});
    }
    write_atomic(o.cells, csv);
  }
  Output out;
  out.artifact = j.dump(2) + "\n";
  out.summary = "coverage: levels " + std::to_string(lo) + ".." + std::to_string(hi) + ", " +
                std::to_string(o.kmax) + "-fold measure " + format_double(rep.kfold.back()) + ", KS bound " +
                format_double(rep.ks_bound);
  return out;
}

// ---- sweep ----------------------------------------------------------------

struct SweepOpts {
  std::string family = "bc";
  std::string lambda = "0.5:0.668:64";
  double margin = 1e-3;
  double s = 0.1;
  int n = 10;
  std::string c_grid = "0.1,0.25,0.5,0.75,0.9";
  std::string measure = "uniform";
  std::string format = "csv";
};

Output run_sweep(const SweepOpts& o, const json& config, unsigned threads) {
  const auto family = FamilySpec::parse(o.family);
  auto grid = parse_lambda_grid(o.lambda);
  grid.margin = o.margin;
  const auto m = parse_measure(o.measure, family.digits.size());
  const auto res = lambda_sweep(family, m, o.s, o.n, grid, parse_number_list(o.c_grid), threads);
  Output out;
  std::string fr;
  for (std::size_t i = 0; i < res.c_values.size(); ++i) {
    fr += (i ? " " : "") + format_double(res.c_values[i]) + ":" + format_double(res.fractions[i]);
  }
  if (o.format == "csv") {
    out.artifact = "lambda,ratio,delta\n";
    for (std::size_t i = 0; i < res.lambdas.size(); ++i) {
      out.artifact +=
          join_csv({format_double(res.lambdas[i]), format_double(res.ratios[i]), format_double(res.min_gaps[i])});
    }
  } else if (o.format == "json") {
    json j = header("sweep", config);
    j["lambdas"] = res.lambdas;
    j["ratios"] = res.ratios;
    j["deltas"] = res.min_gaps;
    j["c_values"] = res.c_values;
    j["fractions"] = res.fractions;
    out.artifact = j.dump(2) + "\n";
  } else {
    throw ParseError("unknown format '" + o.format + "'");
  }
  out.summary = "sweep " + family.describe() + ": " + std::to_string(res.lambdas.size()) + " lambdas, fractions " + fr;
  return out;
}

// ---- families -------------------------------------------------------------

struct FamOpts {
  std::string report = "constants";
  std::string family = "bc";
  std::string lambda = "inv_sqrt2";
  int nmax = 14;
  std::string ratios = "0.5,0.5";
};

Output run_families(const FamOpts& o, const json& config) {
  json j = header("families", config);
  Output out;
  if (o.report == "constants") {
    const auto ex = eight_map_constants();
    j["gamma"] = ex.gamma;
    j["attractor_dimension"] = ex.attractor_dimension;
    j["cover_exponent"] = ex.cover_exponent;
    out.summary = "families: gamma " + format_double(ex.gamma) + ", dim " + format_double(ex.attractor_dimension) +
                  ", cover exponent " + format_double(ex.cover_exponent);
  } else if (o.report == "alpha") {
    const auto f = FamilySpec::parse(o.family);
    const auto a = alpha_lower_bound(f);
    j["family"] = f.describe();
    j["b"] = b_of_D(f.digits);
    j["alpha"] = a.value;
    j["provenance"] = a.provenance;
    j["exact"] = a.exact;
    out.summary = "families " + f.describe() + ": alpha > " + format_double(a.value);
  } else if (o.report == "garsia") {
    const auto scan = garsia_separation_scan(parse_real(o.lambda), o.nmax);
    json levels = json::array();
    for (const auto& g : scan) {
      levels.push_back({{"n", g.n},
                        {"gap", num(g.gap)},
                        {"scaled", num(g.scaled)},
                        {"running_inf", num(g.running_inf)},
                        {"exact_zero", g.exact_zero}});
    }
    j["per_level"] = levels;
    out.summary = "families garsia " + o.lambda + ": running inf " + format_double(scan.back().running_inf);
  } else if (o.report == "dimension") {
    const auto r = parse_number_list(o.ratios);
    const double d = similarity_dimension(r);
    j["ratios"] = r;
    j["dimension"] = d;
    out.summary = "families: similarity dimension " + format_double(d);
  } else {
    throw ParseError("unknown families report '" + o.report + "'");
  }
  out.artifact = j.dump(2) + "\n";
  return out;
}

// ---- pushforward ----------------------------------------------------------

struct PushOpts {
  std::string ifs;
  std::string measure = "uniform";
  int n = 8;
  double z = 0.0;
  std::size_t bins = 16;
};

Output run_pushforward(const PushOpts& o, const json&) {
  const Ifs ifs = parse_ifs(o.ifs);
  const auto m = parse_measure(o.measure, map_count(ifs));
  const auto hist = empirical_pushforward(ifs, m, o.n, o.z, o.bins);
  Output out;
  out.artifact = "bin,lo,hi,mass\n";
  const double w = (hist.hi - hist.lo) / static_cast<double>(hist.mass.size());
  for (std::size_t i = 0; i < hist.mass.size(); ++i) {
    const double a = hist.lo + static_cast<double>(i) * w;
    out.artifact += join_csv({std::to_string(i), format_double(a), format_double(i + 1 == hist.mass.size() ? hist.hi : a + w),
                              format_double(hist.mass[i])});
  }
  out.summary = "pushforward: " + std::to_string(o.bins) + " bins, total mass " + format_double(hist.total());
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Desk-scale experiments on overlapping iterated function systems"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  std::string out_path;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--out", out_path, "write the primary artifact here (atomically) instead of stdout");
  app.add_option("--threads", threads, "worker threads; results do not depend on this")->check(CLI::PositiveNumber);

  CfOpts cf;
  auto* cf_cmd = app.add_subcommand("cf", "continued fractions; CSV m,zeta,p,q (convergents), "
                                          "n,m,q_m,q_next,dioph,cf,provisional,good (good-levels), "
                                          "m,mass,term,partial_sum (gauss); JSON for density and best");
  cf_cmd->add_option("--t", cf.t, "t spec: rational:a/b, cf:[pre;period], cftable:[...], golden, sqrt2m1, cubes")
      ->required();
  cf_cmd->add_option("--depth", cf.depth, "number of convergents")->capture_default_str();
  cf_cmd->add_option("--report", cf.report, "convergents|good-levels|density|gauss|best")->capture_default_str();
  cf_cmd->add_option("--s", cf.s, "good-level scale in (0,1/2)")->capture_default_str();
  cf_cmd->add_option("--levels", cf.levels, "good-level horizon N")->capture_default_str();
  cf_cmd->add_option("--eps", cf.eps, "density epsilon (inf allowed)")->capture_default_str();
  cf_cmd->add_option("--L", cf.L, "density ratio threshold")->capture_default_str();
  cf_cmd->add_option("--M", cf.M, "density / Gauss horizon")->capture_default_str();
  cf_cmd->add_option("--Q", cf.Q, "best-approximation bound")->capture_default_str();

  PhitOpts ph;
  auto* ph_cmd = app.add_subcommand("phit", "the Phi_t family; JSON {t, verdict, per_level}");
  ph_cmd->add_option("--t", ph.t, "t spec")->required();
  ph_cmd->add_option("--levels", ph.levels, "level horizon N")->capture_default_str();
  ph_cmd->add_option("--report", ph.report, "overlap|dichotomy|collapse|profile")->capture_default_str();
  ph_cmd->add_option("--s", ph.s, "separation scale")->capture_default_str();
  ph_cmd->add_option("--k", ph.k, "number of collapse levels")->capture_default_str();
  ph_cmd->add_option("--threshold", ph.threshold, "CS probe threshold")->capture_default_str();

  SepOpts sp;
  auto* sp_cmd = app.add_subcommand("separation", "separation profile; CSV n,R,T,ratio,delta,near_pairs");
  sp_cmd->add_option("--ifs", sp.ifs, "IFS spec")->required();
  sp_cmd->add_option("--measure", sp.measure, "uniform or [p1,...]")->capture_default_str();
  sp_cmd->add_option("--z", sp.z, "anchor point, comma separated")->capture_default_str();
  sp_cmd->add_option("--s", sp.s, "probe scale")->capture_default_str();
  sp_cmd->add_option("--levels", sp.levels, "a..b")->capture_default_str();
  sp_cmd->add_option("--threshold", sp.threshold, "CS probe threshold")->capture_default_str();
  sp_cmd->add_option("--format", sp.format, "csv|json")->capture_default_str();

  CovOpts cv;
  auto* cv_cmd = app.add_subcommand("coverage", "truncated limsup coverage; JSON report, optional CSV cell_lo,cell_hi,hits");
  cv_cmd->set_help_flag("--help", "Print this help message and exit");
  cv_cmd->add_option("--ifs", cv.ifs, "IFS spec")->required();
  cv_cmd->add_option("--measure", cv.measure, "uniform or [p1,...]")->capture_default_str();
  cv_cmd->add_option("--h", cv.h, "rate function, e.g. reciprocal, geometric(0.5)")->required();
  cv_cmd->add_option("--levels", cv.levels, "a..b")->capture_default_str();
  cv_cmd->add_option("--z", cv.z, "anchor point")->capture_default_str();
  cv_cmd->add_option("--kmax", cv.kmax, "largest K for K-fold coverage")->capture_default_str();
  cv_cmd->add_option("--grid", cv.grid, "hit-count grid resolution, e.g. 2^-14");
  cv_cmd->add_option("--clamp", cv.clamp, "clamp radii with this s (0 = off)")->capture_default_str();
  cv_cmd->add_option("--seed", cv.seed, "Monte Carlo seed (d >= 2)")->capture_default_str();
  cv_cmd->add_option("--samples", cv.samples, "Monte Carlo samples (d >= 2)")->capture_default_str();
  cv_cmd->add_option("--cells", cv.cells, "write per-cell hit counts to this CSV");

  SweepOpts sw;
  auto* sw_cmd = app.add_subcommand("sweep", "lambda sweep; CSV lambda,ratio,delta");
  sw_cmd->add_option("--family", sw.family, "bc|013|custom:[...]")->capture_default_str();
  sw_cmd->add_option("--lambda", sw.lambda, "a:b:steps")->capture_default_str();
  sw_cmd->add_option("--margin", sw.margin, "endpoint exclusion margin")->capture_default_str();
  sw_cmd->add_option("--s", sw.s, "probe scale")->capture_default_str();
  sw_cmd->add_option("--n", sw.n, "level")->capture_default_str();
  sw_cmd->add_option("--c-grid", sw.c_grid, "ratio thresholds")->capture_default_str();
  sw_cmd->add_option("--measure", sw.measure, "uniform or [p1,...]")->capture_default_str();
  sw_cmd->add_option("--format", sw.format, "csv|json")->capture_default_str();

  FamOpts fm;
  auto* fm_cmd = app.add_subcommand("families", "family constants; JSON");
  fm_cmd->add_option("--report", fm.report, "constants|alpha|garsia|dimension")->capture_default_str();
  fm_cmd->add_option("--family", fm.family, "bc|013|custom:[...]")->capture_default_str();
  fm_cmd->add_option("--lambda", fm.lambda, "Garsia lambda: decimal, a/b, inv_sqrt2, inv_golden")
      ->capture_default_str();
  fm_cmd->add_option("--nmax", fm.nmax, "Garsia horizon (<= 16)")->capture_default_str();
  fm_cmd->add_option("--ratios", fm.ratios, "contraction ratios for dimension")->capture_default_str();

  PushOpts pf;
  auto* pf_cmd = app.add_subcommand("pushforward", "empirical pushforward histogram; CSV bin,lo,hi,mass");
  pf_cmd->add_option("--ifs", pf.ifs, "one-dimensional IFS spec")->required();
  pf_cmd->add_option("--measure", pf.measure, "uniform or [p1,...]")->capture_default_str();
  pf_cmd->add_option("--n", pf.n, "level")->capture_default_str();
  pf_cmd->add_option("--z", pf.z, "anchor")->capture_default_str();
  pf_cmd->add_option("--bins", pf.bins, "number of bins")->capture_default_str();

  if (args.empty()) {
    err << app.help();
    return 2;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    Output res;
    if (cf_cmd->parsed()) {
      res = run_cf(cf, config_of(cf_cmd));
    } else if (ph_cmd->parsed()) {
      res = run_phit(ph, config_of(ph_cmd));
    } else if (sp_cmd->parsed()) {
      res = run_separation(sp, config_of(sp_cmd));
    } else if (cv_cmd->parsed()) {
      res = run_coverage(cv, config_of(cv_cmd));
    } else if (sw_cmd->parsed()) {
      res = run_sweep(sw, config_of(sw_cmd), threads);
    } else if (fm_cmd->parsed()) {
      res = run_families(fm, config_of(fm_cmd));
    } else {
      res = run_pushforward(pf, config_of(pf_cmd));
    }
    if (out_path.empty()) {
      out << res.artifact;
      err << res.summary << "\n";
    } else {
      write_atomic(out_path, res.artifact);
      out << res.summary << "\n";
    }
    return 0;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << " (estimated " << format_double(e.estimated_cardinality()) << ")\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ifslab::cli

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"
#include "wishlab/config.hpp"
#include "wishlab/ensembles.hpp"
#include "wishlab/errors.hpp"
#include "wishlab/experiments.hpp"
#include "wishlab/majorization.hpp"
#include "wishlab/rng.hpp"
#include "wishlab/stats.hpp"

using namespace wishlab;
using nlohmann::json;

namespace {

ExperimentConfig make_config(const std::string& experiment,
                             std::vector<std::size_t> n, std::size_t trials,
                             std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.experiment = experiment_from_name(experiment);
  cfg.n_values = std::move(n);
  cfg.trials = trials;
  cfg.seed = seed;
  validate_config(cfg);
  return cfg;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string temp_path(const std::string& stem) {
  return "wishlab_test_" + stem;  // relative to the test working directory
}

}  // namespace

TEST_CASE("experiment names round-trip") {
  const std::vector<std::string> names = {
      "nielsen-decay", "uniform-decay", "pi-dist",      "clt-check",
      "quadrature-report", "persistence",  "concentration"};
  for (const std::string& name : names)
    CHECK(experiment_name(experiment_from_name(name)) == name);
  CHECK_THROWS_AS((void)experiment_from_name("frobnicate"), ConfigError);
  CHECK_THROWS_AS((void)experiment_from_name(""), ConfigError);
}

TEST_CASE("dimension rules resolve as documented") {
  MRule ratio;
  ratio.kind = MRuleKind::fixed_ratio;
  ratio.c = 1.5;
  CHECK(resolve_m(ratio, 10, 0) == 15);
  CHECK(resolve_m(ratio, 128, 3) == 192);
  ratio.c = 1.0;
  CHECK(resolve_m(ratio, 7, 0) == 7);

  // n + ceil(C sqrt(n log n)) with the natural log
  MRule offset;
  offset.kind = MRuleKind::offset;
  offset.gap_C = 10.0;
  CHECK(resolve_m(offset, 100, 0) ==
        100 + static_cast<std::size_t>(
                  std::ceil(10.0 * std::sqrt(100.0 * std::log(100.0)))));
  CHECK(resolve_m(offset, 100, 0) == 315);

  MRule list;
  list.kind = MRuleKind::explicit_list;
  list.m_list = {12, 34};
  CHECK(resolve_m(list, 8, 0) == 12);
  CHECK(resolve_m(list, 8, 1) == 34);
  CHECK_THROWS_AS((void)resolve_m(list, 8, 2), ConfigError);

  MRule none;
  CHECK_THROWS_AS((void)resolve_m(none, 8, 0), ConfigError);
}

TEST_CASE("config documents parse and validate") {
  const std::string good = R"({
    "experiment": "nielsen-decay",
    "n": [8, 16],
    "m_rule": {"kind": "fixed-ratio", "c": 2.0},
    "trials": 100,
    "seed": 5
  })";
  ExperimentConfig cfg = parse_config_json(good);
  validate_config(cfg);
  CHECK(cfg.experiment == ExperimentKind::nielsen_decay);
  CHECK(cfg.n_values == std::vector<std::size_t>{8, 16});
  CHECK(cfg.m_rule.kind == MRuleKind::fixed_ratio);
  CHECK(cfg.m_rule.c == 2.0);
  CHECK(cfg.trials == 100);
  CHECK(cfg.seed == 5);
  CHECK(cfg.workers == 1);  // default untouched

  // malformed JSON, unknown keys, unknown experiments, missing experiment
  CHECK_THROWS_AS((void)parse_config_json("{"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_json("[1, 2]"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_json(
                      R"({"experiment": "pi-dist", "n": [8], "bogus": 1})"),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config_json(R"({"experiment": "frobnicate"})"),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config_json(R"({"n": [8]})"), ConfigError);
  CHECK_THROWS_AS(
      (void)parse_config_json(
          R"({"experiment": "pi-dist", "m_rule": {"kind": "sideways"}})"),
      ConfigError);

  // validation gate: simplex-side experiments refuse any dimension rule
  ExperimentConfig bad = parse_config_json(
      R"({"experiment": "uniform-decay", "n": [8],
          "m_rule": {"kind": "fixed-ratio", "c": 1.0}})");
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  ExperimentConfig bad2 = parse_config_json(
      R"({"experiment": "persistence", "n": [16, 8], "trials": 10})");
  CHECK_THROWS_AS(validate_config(bad2), ConfigError);

  ExperimentConfig bad3 = parse_config_json(
      R"({"experiment": "concentration", "n": [8], "eps": 1.5})");
  CHECK_THROWS_AS(validate_config(bad3), ConfigError);

  ExperimentConfig bad4 = parse_config_json(
      R"({"experiment": "clt-check", "n": [8], "scaling": "upside-down"})");
  CHECK_THROWS_AS(validate_config(bad4), ConfigError);

  ExperimentConfig bad5 = parse_config_json(
      R"({"experiment": "nielsen-decay", "n": [8], "trials": 0})");
  CHECK_THROWS_AS(validate_config(bad5), ConfigError);

  // matrix experiments default to the square ratio rule and require m >= n
  ExperimentConfig square = parse_config_json(
      R"({"experiment": "pi-dist", "n": [8]})");
  validate_config(square);
  CHECK(square.m_rule.kind == MRuleKind::fixed_ratio);
  CHECK(square.m_rule.c == 1.0);

  ExperimentConfig shrink = parse_config_json(
      R"({"experiment": "pi-dist", "n": [8],
          "m_rule": {"kind": "explicit", "m": [4]}})");
  CHECK_THROWS_AS(validate_config(shrink), ConfigError);
}

TEST_CASE("file values yield to explicit overrides") {
  const std::string path = temp_path("config.json");
  {
    std::ofstream out(path);
    out << R"({"experiment": "uniform-decay", "n": [8, 16],
               "trials": 100, "seed": 1})";
  }
  CliOverrides ov;
  ov.trials = 55;
  ov.seed = 99;
  const ExperimentConfig cfg = load_config(path, ov);
  CHECK(cfg.experiment == ExperimentKind::uniform_decay);
  CHECK(cfg.trials == 55);
  CHECK(cfg.seed == 99);
  CHECK(cfg.n_values == std::vector<std::size_t>{8, 16});

  // a ratio override rewrites the rule kind wholesale
  CliOverrides ov2;
  ov2.experiment = "pi-dist";
  ov2.c = 2.0;
  const ExperimentConfig cfg2 = load_config(path, ov2);
  CHECK(cfg2.experiment == ExperimentKind::pi_dist);
  CHECK(cfg2.m_rule.kind == MRuleKind::fixed_ratio);
  CHECK(cfg2.m_rule.c == 2.0);

  CHECK_THROWS_AS((void)load_config(std::string("no_such_file.json"), CliOverrides{}),
                  IoError);
  CHECK_THROWS_AS((void)load_config(std::nullopt, CliOverrides{}), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("worker count never changes the output") {
  ExperimentConfig cfg = make_config("nielsen-decay", {8, 12}, 64, 3);
  cfg.workers = 1;
  const SummaryRecord one = run_experiment(cfg);
  cfg.workers = 2;
  const SummaryRecord two = run_experiment(cfg);
  cfg.workers = 8;
  const SummaryRecord eight = run_experiment(cfg);

  CHECK(render_summary(one, false) == render_summary(two, false));
  CHECK(render_summary(one, false) == render_summary(eight, false));
  CHECK(one.trial_csv_rows == eight.trial_csv_rows);
  CHECK(one.plot_rows == eight.plot_rows);

  // the timestamp is the only moving part of the rendered document
  const std::string stamped = render_summary(one, true);
  CHECK(stamped.find("\"timestamp\"") != std::string::npos);
  CHECK(render_summary(one, false).find("\"timestamp\"") == std::string::npos);
}

TEST_CASE("per-trial records re-aggregate to the summary") {
  ExperimentConfig cfg = make_config("pi-dist", {12}, 400, 2024);
  const SummaryRecord rec = run_experiment(cfg);
  REQUIRE(rec.trial_csv_rows.size() == 400);

  double sum = 0.0;
  std::size_t below = 0;
  for (const std::string& line : rec.trial_csv_rows) {
    const auto fields = split_csv(line);
    REQUIRE(fields.size() == 5);
    CHECK(fields[0] == "pi-dist");
    CHECK(fields[1] == "12");
    CHECK(fields[2] == "12");
    const double pi = std::strtod(fields[4].c_str(), nullptr);
    CHECK(pi >= 0.0);
    CHECK(pi <= 1.0);
    sum += pi;
    if (pi < 0.9) ++below;
  }
  const json row = rec.summary["results"]["rows"][0];
  CHECK(row["mean_pi"].get<double>() ==
        doctest::Approx(sum / 400.0).epsilon(1e-12));
  CHECK(row["prob_below_0p9"].get<double>() ==
        doctest::Approx(static_cast<double>(below) / 400.0).epsilon(1e-12));

  std::size_t hist_total = 0;
  for (const auto& count : row["histogram"]) hist_total += count.get<std::size_t>();
  CHECK(hist_total == 400);
}

TEST_CASE("a single trial replays in isolation from its substream index") {
  ExperimentConfig cfg = make_config("nielsen-decay", {8}, 50, 99);
  const SummaryRecord rec = run_experiment(cfg);

  // trial 17 = global index 17: one substream, two draws, dense path (n < 64)
  RngStream rng = derive_substream(99, 17);
  const EnsembleParams params{8, 8};
  const WishartSample a = wishart_spectrum_dense(params, rng);
  const WishartSample b = wishart_spectrum_dense(params, rng);
  const SimplexVector x = trace_normalise(a);
  const SimplexVector y = trace_normalise(b);
  const bool dom0 = tails_dominated(x, y, 0.0).dominated;
  const bool dom12 = tails_dominated(x, y, 1e-12).dominated;

  const auto fields = split_csv(rec.trial_csv_rows[17]);
  REQUIRE(fields.size() == 6);
  CHECK(fields[3] == "17");
  CHECK(fields[4] == (dom0 ? "1" : "0"));
  CHECK(fields[5] == (dom12 ? "1" : "0"));
}

TEST_CASE("persistence experiment agrees with the library estimator") {
  ExperimentConfig cfg = make_config("persistence", {4, 8, 16}, 1500, 42);
  cfg.threshold_t = 1.0;
  const SummaryRecord rec = run_experiment(cfg);

  const PersistenceResult ref = persistence_probability(
      {4, 8, 16}, 1500, 1.0, PersistenceDriver::gaussian, 42);
  const json rows = rec.summary["results"]["rows"];
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rows[i]["N"].get<std::size_t>() == ref.N_values[i]);
    // identical substreams, so identical counts — not merely close
    CHECK(rows[i]["p"].get<double>() == ref.probabilities[i]);
  }

  // survival is monotone in the cutoff by construction
  CHECK(rows[0]["p"].get<double>() >= rows[1]["p"].get<double>());
  CHECK(rows[1]["p"].get<double>() >= rows[2]["p"].get<double>());
}

TEST_CASE("uniform pairs: the loose tolerance only adds dominated pairs") {
  ExperimentConfig cfg = make_config("uniform-decay", {8, 16}, 500, 7);
  const SummaryRecord rec = run_experiment(cfg);
  const json rows = rec.summary["results"]["rows"];
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    const double p0 = row["p_tol0"].get<double>();
    const double p12 = row["p_tol12"].get<double>();
    CHECK(p0 >= 0.0);
    CHECK(p12 <= 1.0);
    CHECK(p0 <= p12);
  }
  // two sizes cannot support a three-point fit
  CHECK(rec.summary["results"]["fit_tol0"].is_null());
  // simplex rows carry no m column
  CHECK(split_csv(rec.trial_csv_rows[0]).size() == 5);
}

TEST_CASE("fluctuation summary carries limit targets in both conventions") {
  ExperimentConfig cfg = make_config("clt-check", {16}, 1200, 5);
  cfg.m_rule.c = 2.0;  // m = 32, ratio exactly 2
  const SummaryRecord rec = run_experiment(cfg);
  const json row = rec.summary["results"]["rows"][0];
  REQUIRE(!row["targets"].is_null());

  // ratio c: mean of the first power sum is n * c, its variance is c in the
  // calibrated convention and 4c as written
  const double c = 2.0;
  const json targets = row["targets"];
  CHECK(targets["means"][0].get<double>() == doctest::Approx(16.0 * c).epsilon(1e-9));
  CHECK(targets["cov_calibrated"][0].get<double>() == doctest::Approx(c).epsilon(1e-6));
  CHECK(targets["cov_as_written"][0].get<double>() ==
        doctest::Approx(4.0 * c).epsilon(1e-6));

  // diagnostics are present (>= 1000 trials) and sized per degree
  const json diag = row["diagnostics"];
  REQUIRE(!diag.is_null());
  CHECK(diag["ks_pvalue"].size() == 4);
  CHECK(diag["skewness"].size() == 4);
  CHECK(diag.contains("max_cov_rel_err"));

  // empirical mean of X_1 should sit near n*c (E X_1 = m exactly; the 0.8%
  // window is about six standard errors at 1200 trials)
  const double mean_x1 = row["mean"][0].get<double>();
  CHECK(mean_x1 == doctest::Approx(16.0 * c).epsilon(0.008));

  // the shifted family's first moment is exactly centred in the limit
  ExperimentConfig cfg2 = make_config("clt-check", {16}, 1200, 5);
  cfg2.m_rule.c = 2.0;
  cfg2.scaling = "shifted";
  const SummaryRecord rec2 = run_experiment(cfg2);
  const json t2 = rec2.summary["results"]["rows"][0]["targets"];
  REQUIRE(!t2.is_null());
  CHECK(std::abs(t2["means"][0].get<double>()) < 1e-9);
  CHECK(t2["means"][1].get<double>() == doctest::Approx(16.0 / 4.0).epsilon(1e-6));

  // scalings without a limit law carry no targets
  ExperimentConfig cfg3 = make_config("clt-check", {16}, 1000, 5);
  cfg3.scaling = "centered";
  const SummaryRecord rec3 = run_experiment(cfg3);
  CHECK(rec3.summary["results"]["rows"][0]["targets"].is_null());
}

TEST_CASE("quadrature report is deterministic and self-consistent") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::quadrature_report;
  validate_config(cfg);
  const SummaryRecord rec = run_experiment(cfg);
  const SummaryRecord again = run_experiment(cfg);
  CHECK(render_summary(rec, false) == render_summary(again, false));

  const json res = rec.summary["results"];
  CHECK(res["kernel_mass"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
  for (const auto& row : res["soft_edge"])
    CHECK(row["rel_dev"].get<double>() < 0.01);
  const json lim = res["limit_constants"];
  CHECK(lim["alpha"].get<double>() ==
        doctest::Approx(lim["alpha_ref"].get<double>()).epsilon(0.02));
  CHECK(lim["alpha_c"].get<double>() ==
        doctest::Approx(lim["alpha_c_ref"].get<double>()).epsilon(0.02));
  for (const auto& row : lim["I_of_A"])
    CHECK(row["I"].get<double>() ==
          doctest::Approx(row["closed_form"].get<double>()).epsilon(1e-4));
  CHECK(rec.trial_csv_header.empty());
  CHECK(!rec.has_plot);
}

TEST_CASE("output files land where the config points") {
  ExperimentConfig cfg = make_config("uniform-decay", {8}, 40, 11);
  cfg.out_path = temp_path("summary.json");
  cfg.trial_csv = temp_path("trials.csv");
  cfg.plot_csv = temp_path("plot.csv");
  const SummaryRecord rec = run_experiment(cfg);

  // emit prints to stdout as well; park it in /dev/null around the call
  std::fflush(stdout);
  FILE* saved = fdopen(dup(fileno(stdout)), "w");
  REQUIRE(saved != nullptr);
  REQUIRE(freopen("/dev/null", "w", stdout) != nullptr);
  emit_outputs(rec, cfg);
  std::fflush(stdout);
  dup2(fileno(saved), fileno(stdout));
  fclose(saved);

  {
    std::ifstream in(cfg.out_path);
    REQUIRE(in.good());
    json doc = json::parse(in);
    CHECK(doc.contains("timestamp"));
    doc.erase("timestamp");
    CHECK(doc.dump(2) + "\n" == render_summary(rec, false));
  }
  {
    std::ifstream in(cfg.trial_csv);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == rec.trial_csv_header);
    std::size_t count = 0;
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) ++count;
    CHECK(count == 40);
  }
  {
    std::ifstream in(cfg.plot_csv);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,probability,stderr,fit");
  }
  std::remove(cfg.out_path.c_str());
  std::remove(cfg.trial_csv.c_str());
  std::remove(cfg.plot_csv.c_str());

  ExperimentConfig bad = cfg;
  bad.out_path = "no_such_dir/summary.json";
  bad.trial_csv.clear();
  bad.plot_csv.clear();
  std::fflush(stdout);
  FILE* saved2 = fdopen(dup(fileno(stdout)), "w");
  REQUIRE(saved2 != nullptr);
  REQUIRE(freopen("/dev/null", "w", stdout) != nullptr);
  CHECK_THROWS_AS(emit_outputs(rec, bad), IoError);
  std::fflush(stdout);
  dup2(fileno(saved2), fileno(stdout));
  fclose(saved2);
}

TEST_CASE("concentration experiment matches a hand count of its own records") {
  ExperimentConfig cfg = make_config("concentration", {16}, 300, 31);
  cfg.m_rule.kind = MRuleKind::offset;
  cfg.m_rule.gap_C = 3.0;
  cfg.eps = 0.999;
  validate_config(cfg);
  const SummaryRecord rec = run_experiment(cfg);
  const json row = rec.summary["results"]["rows"][0];

  std::size_t hits = 0;
  for (const std::string& line : rec.trial_csv_rows) {
    const auto fields = split_csv(line);
    REQUIRE(fields.size() == 5);
    if (fields[4] == "1") ++hits;
  }
  CHECK(row["p"].get<double>() ==
        doctest::Approx(static_cast<double>(hits) / 300.0).epsilon(1e-12));
  // a 99.9% band around an independent copy is essentially never violated
  // at this aspect ratio
  CHECK(row["p"].get<double>() > 0.9);
  CHECK(row["m"].get<std::size_t>() ==
        16 + static_cast<std::size_t>(
                 std::ceil(3.0 * std::sqrt(16.0 * std::log(16.0)))));
}

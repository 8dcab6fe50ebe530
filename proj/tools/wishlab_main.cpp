#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wishlab/config.hpp"
#include "wishlab/errors.hpp"
#include "wishlab/experiments.hpp"

namespace {

// One bundle of bound CLI storage per (sub)command.  Values are only copied
// into the override set when the option was actually given, so file values
// and defaults survive untouched flags.
struct FlagSet {
  std::string config_path;
  std::string experiment;
  std::vector<std::size_t> n_values;
  double c = 0.0;
  double gap_C = 0.0;
  std::vector<std::size_t> m_list;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  double eps = 0.0;
  double threshold_t = 0.0;
  std::string driver;
  std::string scaling;
  std::size_t quad_N = 0;
  std::string out_path;
  std::string trial_csv;
  std::string plot_csv;
};

void add_common_options(CLI::App* cmd, FlagSet* fs, wishlab::CliOverrides* ov) {
  cmd->add_option("--config", fs->config_path, "JSON config file (flags override it)");
  cmd->add_option("--n", fs->n_values, "matrix sizes, or walk cutoffs")->delimiter(',');
  cmd->add_option("--c", fs->c, "dimension rule m = round(c n), c >= 1");
  cmd->add_option("--gap-C", fs->gap_C,
                  "dimension rule m = n + ceil(C sqrt(n log n))");
  cmd->add_option("--m", fs->m_list, "explicit m list paired with --n")->delimiter(',');
  cmd->add_option("--trials", fs->trials, "Monte Carlo trials per size");
  cmd->add_option("--seed", fs->seed, "master seed for the substream tree");
  cmd->add_option("--workers", fs->workers, "worker threads (never changes results)");
  cmd->add_option("--eps", fs->eps, "concentration band half-width, in (0, 1)");
  cmd->add_option("--t", fs->threshold_t, "persistence threshold");
  cmd->add_option("--driver", fs->driver,
                  "walk increments: gaussian | exponential-difference");
  cmd->add_option("--scaling", fs->scaling,
                  "statistic scaling: raw | shifted | normalised | centered");
  cmd->add_option("--quad-N", fs->quad_N, "quadrature resolution (>= 4)");
  cmd->add_flag_callback("--validate-sampler",
                         [ov]() { ov->validate_sampler = true; },
                         "force the dense reference sampler everywhere");
  cmd->add_option("--out", fs->out_path, "write the summary JSON here too");
  cmd->add_option("--trial-csv", fs->trial_csv, "write one CSV row per trial");
  cmd->add_option("--plot-csv", fs->plot_csv,
                  "write plot-ready columns n,probability,stderr,fit");
}

// Copy the options that were actually passed on `cmd` into the override set.
void collect(const CLI::App* cmd, const FlagSet& fs,
             std::optional<std::string>* config_path, wishlab::CliOverrides* ov) {
  auto given = [cmd](const char* name) { return cmd->count(name) > 0; };
  if (given("--config")) *config_path = fs.config_path;
  if (given("--n")) ov->n_values = fs.n_values;
  if (given("--c")) ov->c = fs.c;
  if (given("--gap-C")) ov->gap_C = fs.gap_C;
  if (given("--m")) ov->m_list = fs.m_list;
  if (given("--trials")) ov->trials = fs.trials;
  if (given("--seed")) ov->seed = fs.seed;
  if (given("--workers")) ov->workers = fs.workers;
  if (given("--eps")) ov->eps = fs.eps;
  if (given("--t")) ov->threshold_t = fs.threshold_t;
  if (given("--driver")) ov->driver = fs.driver;
  if (given("--scaling")) ov->scaling = fs.scaling;
  if (given("--quad-N")) ov->quad_N = fs.quad_N;
  if (given("--out")) ov->out_path = fs.out_path;
  if (given("--trial-csv")) ov->trial_csv = fs.trial_csv;
  if (given("--plot-csv")) ov->plot_csv = fs.plot_csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and quadrature laboratory for random-spectrum "
               "dominance, conversion probabilities, and fluctuation laws"};
  app.require_subcommand(0, 1);

  FlagSet root_fs;
  wishlab::CliOverrides overrides;
  std::optional<std::string> config_path;
  add_common_options(&app, &root_fs, &overrides);
  app.add_option("--experiment", root_fs.experiment,
                 "experiment name (alternative to a subcommand)");

  struct SubEntry {
    const char* name;
    const char* blurb;
  };
  const std::vector<SubEntry> subs = {
      {"nielsen-decay", "dominance probability of independent spectrum pairs"},
      {"uniform-decay", "dominance probability of flat simplex pairs"},
      {"pi-dist", "distribution of the best conversion probability"},
      {"clt-check", "fluctuations of eigenvalue power sums"},
      {"quadrature-report", "deterministic integral tables and limit constants"},
      {"persistence", "one-sided survival of integrated random walks"},
      {"concentration", "entrywise relative concentration of paired spectra"},
  };
  std::vector<FlagSet> sub_fs(subs.size());
  std::vector<CLI::App*> sub_cmds(subs.size(), nullptr);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    sub_cmds[i] = app.add_subcommand(subs[i].name, subs[i].blurb);
    add_common_options(sub_cmds[i], &sub_fs[i], &overrides);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0, any parse failure is a config error
  }

  collect(&app, root_fs, &config_path, &overrides);
  if (app.count("--experiment") > 0) overrides.experiment = root_fs.experiment;
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (sub_cmds[i]->parsed()) {
      collect(sub_cmds[i], sub_fs[i], &config_path, &overrides);
      overrides.experiment = subs[i].name;
    }

  try {
    const wishlab::ExperimentConfig cfg = wishlab::load_config(config_path, overrides);
    const wishlab::SummaryRecord rec = wishlab::run_experiment(cfg);
    wishlab::emit_outputs(rec, cfg);
    return 0;
  } catch (const wishlab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const wishlab::ValidationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const wishlab::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    // numerical trouble: failed convergence audits, degenerate samples,
    // aborted trials
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  }
}

#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "wishlab/config.hpp"

namespace wishlab {

// Fully aggregated output of one experiment run.
//
// `summary` is a pure function of the config echo (worker count and output
// paths excluded): per-trial substreams are derived from (seed, global trial
// index), every trial writes into a preassigned slot, and aggregation walks
// the slots serially in index order.  Serialisation sorts keys and prints
// shortest-round-trip doubles, so equal configs give byte-equal documents.
struct SummaryRecord {
  nlohmann::json summary;
  std::string trial_csv_header;  // empty when the experiment keeps no per-trial rows
  std::vector<std::string> trial_csv_rows;
  std::vector<std::string> plot_rows;  // "n,probability,stderr,fit" lines
  bool has_plot = false;
};

// Run a validated config to completion.  Worker failures abort the run with
// the failing global trial index (= substream index) in the message so the
// trial can be replayed in isolation.
SummaryRecord run_experiment(const ExperimentConfig& config);

// 2-space-indented JSON text, trailing newline.  with_timestamp adds a UTC
// "timestamp" key on its own line; everything else is deterministic, so
// stripping that line recovers a byte-stable document.
std::string render_summary(const SummaryRecord& record, bool with_timestamp);

// Print the summary to stdout first, then write the files requested by the
// config.  File problems raise IoError only after the summary reached stdout,
// so a bad path never loses the results.
void emit_outputs(const SummaryRecord& record, const ExperimentConfig& config);

}  // namespace wishlab

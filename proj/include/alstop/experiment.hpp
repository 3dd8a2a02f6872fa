#ifndef ALSTOP_EXPERIMENT_HPP
#define ALSTOP_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "alstop/config.hpp"
#include "alstop/eval.hpp"
#include "alstop/loop.hpp"
#include "alstop/stopping.hpp"

namespace alstop {

struct ExperimentResult {
  std::vector<StopObservation> observations;
  ResultTable table;
};

// Runs the full grid (dataset x category x fold), one exhaustion run per
// cell, and writes trace_<dataset>_<cell>.csv, stops_<dataset>_<cell>.csv,
// table.csv, table.txt, and manifest.json into cfg.output_dir. Independent
// cells run in parallel when jobs != 1; outputs are identical either way.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Re-aggregates every stops_*.csv under `dir` and writes a fresh
/// table.csv/table.txt pair into out_dir.
ResultTable report_from_dir(const std::string& dir, const std::string& out_dir,
                            SignificanceTest test = SignificanceTest::paired_t,
                            double alpha = 0.05);

// Stable CSV shapes, shared with the tests.
std::string trace_csv_header();
std::string trace_csv_row(const RoundRecord& rec);
std::string stops_csv_header();
std::string stops_csv_row(const std::string& dataset, const std::string& cell,
                          const StopReport& report);
std::vector<StopObservation> read_stops_csv(const std::string& path);

/// Filesystem-safe token: anything outside [A-Za-z0-9._-] becomes '-'.
std::string sanitize_file_component(const std::string& name);

}  // namespace alstop

#endif

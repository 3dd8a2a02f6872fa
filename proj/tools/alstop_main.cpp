// Command-line front end: run a configured experiment grid, re-aggregate an
// existing output directory, or just validate a config.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "alstop/config.hpp"
#include "alstop/experiment.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override,
            bool seed_set, std::uint64_t seed_override, int jobs_override) {
  alstop::ExperimentConfig cfg = alstop::parse_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (seed_set) {
    cfg.seed = seed_override;
    cfg.run.seed = seed_override;
  }
  if (jobs_override >= 0) cfg.jobs = jobs_override;

  const alstop::ExperimentResult result = alstop::run_experiment(cfg);
  std::cout << alstop::render_table_text(result.table);
  std::cout << "wrote " << cfg.output_dir << "/table.csv, table.txt, "
            << "manifest.json and per-cell trace/stops files\n";
  return 0;
}

int cmd_report(const std::string& dir, const std::string& out_override,
               const std::string& test_name, double alpha) {
  alstop::SignificanceTest test = alstop::SignificanceTest::paired_t;
  if (test_name == "wilcoxon") {
    test = alstop::SignificanceTest::wilcoxon_signed_rank;
  } else if (test_name != "paired_t") {
    std::cerr << "error: --test must be 'paired_t' or 'wilcoxon'\n";
    return 2;
  }
  const std::string out = out_override.empty() ? dir : out_override;
  const alstop::ResultTable table =
      alstop::report_from_dir(dir, out, test, alpha);
  std::cout << alstop::render_table_text(table);
  std::cout << "wrote " << out << "/table.csv and table.txt\n";
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const alstop::ExperimentConfig cfg = alstop::parse_config(config_path);
  std::cout << "config OK: " << cfg.datasets.size() << " dataset(s), "
            << cfg.criteria.size() << " criteria, seed " << cfg.seed << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active-learning stopping-criteria simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = -1;

  CLI::App* run = app.add_subcommand("run", "run an experiment grid");
  run->add_option("config", config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (overrides config)");
  run->add_option("--seed", seed, "seed override")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--jobs", jobs, "parallel cells; 0 = all cores");

  std::string report_dir;
  std::string test_name = "paired_t";
  double alpha = 0.05;
  CLI::App* report =
      app.add_subcommand("report", "re-aggregate stops files into a table");
  report->add_option("dir", report_dir, "directory holding stops_*.csv")
      ->required()
      ->check(CLI::ExistingDirectory);
  report->add_option("--out", out_dir, "output directory (default: dir)");
  report->add_option("--test", test_name, "paired_t or wilcoxon");
  report->add_option("--alpha", alpha, "significance level");

  CLI::App* validate =
      app.add_subcommand("validate", "check a config and exit");
  validate->add_option("config", config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, out_dir, seed_set, seed, jobs);
    }
    if (report->parsed()) {
      return cmd_report(report_dir, out_dir, test_name, alpha);
    }
    return cmd_validate(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

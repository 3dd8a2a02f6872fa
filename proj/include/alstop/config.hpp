#ifndef ALSTOP_CONFIG_HPP
#define ALSTOP_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "alstop/corpus.hpp"
#include "alstop/eval.hpp"
#include "alstop/loop.hpp"
#include "alstop/stopping.hpp"

namespace alstop {

// One corpus entry in the experiment grid. With test_path set, the dataset
// ships its own train/test split and each positive category is one run
// (one table row averaged over categories). Without it, each category is
// cross-validated: `folds` runs per category, one table row per category.
struct DatasetConfig {
  std::string name;
  std::string path;
  CorpusFormat format = CorpusFormat::jsonl;
  std::string test_path;  // empty = cross-validate instead
  std::vector<std::string> positive_categories;
  int folds = 10;
};

struct ExperimentConfig {
  std::vector<DatasetConfig> datasets;
  std::vector<std::string> criteria;  // roster; see known_criteria()
  PerfSource threshold_source = PerfSource::validation;
  PerfSource difference_source = PerfSource::validation;
  RunConfig run;            // run.seed mirrors `seed`
  StoppingConfig stopping;
  int min_occurrences = 3;
  std::string stopwords_path;  // empty = no stopword removal
  SignificanceTest significance_test = SignificanceTest::paired_t;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int jobs = 0;  // parallel cells; 0 = one per available core
  std::string output_dir = "out";
};

// Parses and fully validates a JSON experiment config; every key is
// optional except datasets. Unknown keys are rejected by name.
ExperimentConfig parse_config(const std::string& path);

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin = "<config>");

}  // namespace alstop

#endif

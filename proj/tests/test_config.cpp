#include <filesystem>
#include <fstream>
#include <string>

#include "alstop/config.hpp"
#include "alstop/stopping.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace alstop;

namespace {

const char* kMinimal = R"({
  "datasets": [
    {"name": "demo", "path": "demo.jsonl", "positive_categories": ["spam"]}
  ]
})";

ExperimentConfig parse(const std::string& text) {
  return parse_config_text(text, "test.json");
}

}  // namespace

TEST_CASE("minimal config fills every default") {
  auto cfg = parse(kMinimal);

  REQUIRE(cfg.datasets.size() == 1);
  CHECK(cfg.datasets[0].name == "demo");
  CHECK(cfg.datasets[0].path == "demo.jsonl");
  CHECK(cfg.datasets[0].format == CorpusFormat::jsonl);
  CHECK(cfg.datasets[0].test_path.empty());
  CHECK(cfg.datasets[0].positive_categories ==
        std::vector<std::string>{"spam"});
  CHECK(cfg.datasets[0].folds == 10);

  CHECK(cfg.criteria == known_criteria());
  CHECK(cfg.threshold_source == PerfSource::validation);
  CHECK(cfg.difference_source == PerfSource::validation);

  CHECK(cfg.run.batch_fraction == 0.005);
  CHECK(cfg.run.validation_size == 500);
  CHECK(cfg.run.validation_reuse);
  CHECK(cfg.run.stop_set_size == 2000);
  CHECK(cfg.run.cv_folds == 10);
  CHECK(cfg.run.train.c == 1.0);
  CHECK(cfg.run.train.tolerance == 1e-3);
  CHECK(cfg.run.train.max_epochs == 1000);
  CHECK(cfg.run.seed == 0);
  // Validation-sourced criteria never need per-round cross validation.
  CHECK_FALSE(cfg.run.compute_cv);

  CHECK(cfg.stopping.epsilon == 0.005);
  CHECK(cfg.stopping.tau == 0.8);
  CHECK(cfg.stopping.w == 3);
  CHECK(cfg.stopping.sp_threshold == 0.99);
  CHECK(cfg.stopping.sp_window == 3);
  CHECK(cfg.stopping.sp_variance_bound == 1e-4);
  CHECK(cfg.stopping.sp_aggregate == SpAggregate::all_exceed);
  CHECK(cfg.stopping.ls_k == 10);
  CHECK(cfg.stopping.ls_threshold == 5e-5);
  CHECK(cfg.stopping.zwh_accuracy_threshold == 0.9);
  CHECK(cfg.stopping.v_drop_count == 3);

  CHECK(cfg.min_occurrences == 3);
  CHECK(cfg.stopwords_path.empty());
  CHECK(cfg.significance_test == SignificanceTest::paired_t);
  CHECK(cfg.alpha == 0.05);
  CHECK(cfg.seed == 0);
  CHECK(cfg.jobs == 0);
  CHECK(cfg.output_dir == "out");
}

TEST_CASE("explicit values override the defaults") {
  auto cfg = parse(R"({
    "datasets": [
      {"name": "a", "path": "a/", "format": "dir_per_class",
       "test_path": "a_test/", "positive_categories": ["x", "y"]},
      {"name": "b", "path": "b.jsonl", "positive_categories": ["z"],
       "folds": 5}
    ],
    "criteria": ["sp", "threshold", "sp_and_threshold"],
    "threshold_source": "cv",
    "batch_fraction": 0.01,
    "validation_size": 100,
    "validation_reuse": false,
    "stop_set_size": 400,
    "cv_folds": 5,
    "svm_c": 0.5,
    "svm_tolerance": 1e-4,
    "svm_max_epochs": 50,
    "epsilon": 0.01,
    "tau": 0.9,
    "w": 2,
    "sp_threshold": 0.95,
    "sp_window": 4,
    "sp_variance_bound": 1e-3,
    "sp_aggregate": "mean",
    "ls_k": 5,
    "ls_threshold": 1e-4,
    "zwh_accuracy_threshold": 0.85,
    "v_drop_count": 2,
    "min_occurrences": 1,
    "stopwords_path": "stop.txt",
    "significance_test": "wilcoxon",
    "alpha": 0.01,
    "seed": 99,
    "jobs": 4,
    "output_dir": "results"
  })");

  CHECK(cfg.datasets[0].format == CorpusFormat::dir_per_class);
  CHECK(cfg.datasets[0].test_path == "a_test/");
  CHECK(cfg.datasets[1].folds == 5);
  CHECK(cfg.criteria ==
        std::vector<std::string>{"sp", "threshold", "sp_and_threshold"});
  CHECK(cfg.threshold_source == PerfSource::cv);
  CHECK(cfg.run.batch_fraction == 0.01);
  CHECK(cfg.run.validation_size == 100);
  CHECK_FALSE(cfg.run.validation_reuse);
  CHECK(cfg.run.stop_set_size == 400);
  CHECK(cfg.run.cv_folds == 5);
  CHECK(cfg.run.train.c == 0.5);
  CHECK(cfg.run.train.tolerance == 1e-4);
  CHECK(cfg.run.train.max_epochs == 50);
  CHECK(cfg.stopping.sp_aggregate == SpAggregate::mean);
  CHECK(cfg.stopping.tau == 0.9);
  CHECK(cfg.min_occurrences == 1);
  CHECK(cfg.stopwords_path == "stop.txt");
  CHECK(cfg.significance_test == SignificanceTest::wilcoxon_signed_rank);
  CHECK(cfg.alpha == 0.01);
  CHECK(cfg.seed == 99);
  CHECK(cfg.run.seed == 99);
  CHECK(cfg.jobs == 4);
  CHECK(cfg.output_dir == "results");
  // threshold reads CV here, so the loop must compute it.
  CHECK(cfg.run.compute_cv);
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(parse(R"({
    "datasets": [{"name": "d", "path": "p", "positive_categories": ["c"]}],
    "batchfraction": 0.01
  })"),
                       "test.json: unknown config key 'batchfraction'",
                       std::runtime_error);

  CHECK_THROWS_WITH_AS(parse(R"({
    "datasets": [{"name": "d", "path": "p", "positive_categories": ["c"],
                  "extra": 1}]
  })"),
                       "test.json: unknown config key 'datasets[0].extra'",
                       std::runtime_error);
}

TEST_CASE("malformed structure fails with the origin prefix") {
  CHECK_THROWS_WITH_AS(parse("[]"), "test.json: config root must be a JSON object",
                       std::runtime_error);
  CHECK_THROWS_AS(parse("{nope"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse("{}"),
                       "test.json: config key 'datasets' must be a non-empty array",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(R"({"datasets": []})"),
                       "test.json: config key 'datasets' must be a non-empty array",
                       std::runtime_error);
}

TEST_CASE("dataset entries are validated") {
  CHECK_THROWS_WITH_AS(
      parse(R"({"datasets": [{"path": "p", "positive_categories": ["c"]}]})"),
      "test.json: config key 'datasets[0].name' is required",
      std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse(R"({"datasets": [{"name": "d", "positive_categories": ["c"]}]})"),
      "test.json: config key 'datasets[0].path' is required",
      std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse(R"({"datasets": [{"name": "d", "path": "p",
                              "positive_categories": []}]})"),
      "test.json: config key 'datasets[0].positive_categories' must be a "
      "non-empty array",
      std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse(R"({"datasets": [{"name": "d", "path": "p", "format": "csv",
                              "positive_categories": ["c"]}]})"),
      "test.json: config key 'datasets[0].format' must be 'jsonl' or "
      "'dir_per_class'",
      std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse(R"({"datasets": [{"name": "d", "path": "p", "folds": 1,
                              "positive_categories": ["c"]}]})"),
      "test.json: config key 'datasets[0].folds' must be >= 2 for "
      "cross-validation",
      std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse(R"({"datasets": [
        {"name": "d", "path": "p", "positive_categories": ["c"]},
        {"name": "d", "path": "q", "positive_categories": ["c"]}
      ]})"),
      "test.json: duplicate dataset name 'd'", std::runtime_error);
  // A predefined test split ignores the folds floor.
  auto cfg = parse(R"({"datasets": [{"name": "d", "path": "p",
    "test_path": "t", "folds": 1, "positive_categories": ["c"]}]})");
  CHECK(cfg.datasets[0].folds == 1);
}

TEST_CASE("criteria lists are validated") {
  std::string head = R"({"datasets": [{"name": "d", "path": "p",
    "positive_categories": ["c"]}], "criteria": )";
  CHECK_THROWS_WITH_AS(parse(head + "[]}"),
                       "test.json: config key 'criteria' must be a non-empty array",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"(["sp", "sp"]})"),
                       "test.json: duplicate criterion 'sp' in 'criteria'",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"(["sp", "bogus"]})"),
                       "test.json: unknown criterion 'bogus' in 'criteria'",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse(head + R"(["sp_or_difference"]})"),
      "test.json: config key 'criteria' lists a combinator without sp",
      std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"(["sp", 3]})"),
                       "test.json: config key 'criteria' must hold strings",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse(R"({"datasets": [{"name": "d", "path": "p",
                              "positive_categories": ["c", 4]}]})"),
      "test.json: config key 'datasets[0].positive_categories' must hold "
      "strings",
      std::runtime_error);
}

TEST_CASE("range checks carry the stopping validation messages") {
  std::string head = R"({"datasets": [{"name": "d", "path": "p",
    "positive_categories": ["c"]}], )";
  CHECK_THROWS_WITH_AS(parse(head + R"("epsilon": 0})"),
                       "test.json: epsilon must be positive",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("tau": 2.0})"),
                       "test.json: tau must be in (0, 1]", std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("batch_fraction": 0})"),
                       "test.json: batch_fraction must be in (0, 1]",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("validation_size": -1})"),
                       "test.json: validation_size must be >= 0",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("stop_set_size": 0})"),
                       "test.json: stop_set_size must be >= 1",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("cv_folds": 1})"),
                       "test.json: cv_folds must be >= 2", std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("svm_c": 0})"),
                       "test.json: svm_c must be positive", std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("svm_tolerance": 0})"),
                       "test.json: svm_tolerance must be positive",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("svm_max_epochs": 0})"),
                       "test.json: svm_max_epochs must be >= 1",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("alpha": 1.0})"),
                       "test.json: alpha must be in (0, 1)",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("seed": -3})"),
                       "test.json: config key 'seed' must be >= 0",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("jobs": -1})"),
                       "test.json: jobs must be >= 0", std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("significance_test": "anova"})"),
                       "test.json: config key 'significance_test' must be "
                       "'paired_t' or 'wilcoxon'",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("sp_aggregate": "median"})"),
                       "test.json: config key 'sp_aggregate' must be "
                       "'all_exceed' or 'mean'",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("threshold_source": "test"})"),
                       "test.json: config key 'threshold_source' must be "
                       "'validation' or 'cv'",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("w": "three"})"),
                       "test.json: config key 'w' must be an integer",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("tau": "high"})"),
                       "test.json: config key 'tau' must be a number",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + R"("validation_reuse": 1})"),
                       "test.json: config key 'validation_reuse' must be a "
                       "boolean",
                       std::runtime_error);
}

TEST_CASE("compute_cv follows the criteria and their sources") {
  std::string head = R"({"datasets": [{"name": "d", "path": "p",
    "positive_categories": ["c"]}], )";
  CHECK_FALSE(parse(head + R"("criteria": ["sp", "difference"]})").run.compute_cv);
  CHECK(parse(head +
              R"("criteria": ["sp", "difference"], "difference_source": "cv"})")
            .run.compute_cv);
  CHECK_FALSE(parse(head + R"("criteria": ["sp"], "threshold_source": "cv"})")
                  .run.compute_cv);
  CHECK(parse(head + R"("criteria": ["sp", "sp_or_threshold"],
                        "threshold_source": "cv"})")
            .run.compute_cv);
}

TEST_CASE("parse_config reads from a file and names it in errors") {
  fs::path dir = fs::temp_directory_path() / "alstop_test_config";
  fs::remove_all(dir);
  fs::create_directories(dir);
  fs::path file = dir / "exp.json";
  {
    std::ofstream out(file);
    out << kMinimal;
  }
  auto cfg = parse_config(file.string());
  CHECK(cfg.datasets[0].name == "demo");

  CHECK_THROWS_WITH_AS(parse_config((dir / "missing.json").string()),
                       doctest::Contains("cannot open config file"),
                       std::runtime_error);
  {
    std::ofstream out(dir / "bad.json");
    out << "{broken";
  }
  CHECK_THROWS_WITH_AS(parse_config((dir / "bad.json").string()),
                       doctest::Contains("bad.json"), std::runtime_error);
}

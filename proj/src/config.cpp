#include "alstop/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace alstop {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& message) {
  throw std::runtime_error(origin + ": " + message);
}

void check_keys(const json& obj, const std::set<std::string>& known,
                const std::string& origin, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!known.contains(item.key())) {
      fail(origin, "unknown config key '" + where + item.key() + "'");
    }
  }
}

double get_number(const json& obj, const std::string& key, double fallback,
                  const std::string& origin) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) {
    fail(origin, "config key '" + key + "' must be a number");
  }
  return obj.at(key).get<double>();
}

int get_int(const json& obj, const std::string& key, int fallback,
            const std::string& origin) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer() && !obj.at(key).is_number_unsigned()) {
    fail(origin, "config key '" + key + "' must be an integer");
  }
  return obj.at(key).get<int>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback,
              const std::string& origin) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) {
    fail(origin, "config key '" + key + "' must be a boolean");
  }
  return obj.at(key).get<bool>();
}

std::string get_string(const json& obj, const std::string& key,
                       const std::string& fallback,
                       const std::string& origin) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) {
    fail(origin, "config key '" + key + "' must be a string");
  }
  return obj.at(key).get<std::string>();
}

PerfSource parse_source(const std::string& value, const std::string& key,
                        const std::string& origin) {
  if (value == "validation") return PerfSource::validation;
  if (value == "cv") return PerfSource::cv;
  fail(origin, "config key '" + key + "' must be 'validation' or 'cv'");
}

bool roster_needs_cv(const ExperimentConfig& cfg) {
  auto uses_threshold = [](const std::string& n) {
    return n == "threshold" || n == "sp_and_threshold" ||
           n == "sp_or_threshold";
  };
  auto uses_difference = [](const std::string& n) {
    return n == "difference" || n == "sp_and_difference" ||
           n == "sp_or_difference";
  };
  return std::any_of(cfg.criteria.begin(), cfg.criteria.end(),
                     [&](const std::string& n) {
                       return (uses_threshold(n) &&
                               cfg.threshold_source == PerfSource::cv) ||
                              (uses_difference(n) &&
                               cfg.difference_source == PerfSource::cv);
                     });
}

DatasetConfig parse_dataset(const json& obj, std::size_t index,
                            const std::string& origin) {
  const std::string where = "datasets[" + std::to_string(index) + "].";
  if (!obj.is_object()) {
    fail(origin, "config key 'datasets[" + std::to_string(index) +
                     "]' must be an object");
  }
  check_keys(obj,
             {"name", "path", "format", "test_path", "positive_categories",
              "folds"},
             origin, where);
  DatasetConfig ds;
  ds.name = get_string(obj, "name", "", origin);
  if (ds.name.empty()) {
    fail(origin, "config key '" + where + "name' is required");
  }
  ds.path = get_string(obj, "path", "", origin);
  if (ds.path.empty()) {
    fail(origin, "config key '" + where + "path' is required");
  }
  const std::string format = get_string(obj, "format", "jsonl", origin);
  if (format == "jsonl") {
    ds.format = CorpusFormat::jsonl;
  } else if (format == "dir_per_class") {
    ds.format = CorpusFormat::dir_per_class;
  } else {
    fail(origin, "config key '" + where +
                     "format' must be 'jsonl' or 'dir_per_class'");
  }
  ds.test_path = get_string(obj, "test_path", "", origin);
  if (!obj.contains("positive_categories") ||
      !obj.at("positive_categories").is_array() ||
      obj.at("positive_categories").empty()) {
    fail(origin, "config key '" + where +
                     "positive_categories' must be a non-empty array");
  }
  for (const auto& cat : obj.at("positive_categories")) {
    if (!cat.is_string()) {
      fail(origin, "config key '" + where +
                       "positive_categories' must hold strings");
    }
    ds.positive_categories.push_back(cat.get<std::string>());
  }
  ds.folds = get_int(obj, "folds", 10, origin);
  if (ds.test_path.empty() && ds.folds < 2) {
    fail(origin,
         "config key '" + where + "folds' must be >= 2 for cross-validation");
  }
  return ds;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, e.what());
  }
  if (!root.is_object()) {
    fail(origin, "config root must be a JSON object");
  }
  check_keys(root,
             {"datasets",        "criteria",
              "threshold_source", "difference_source",
              "batch_fraction",  "validation_size",
              "validation_reuse", "stop_set_size",
              "cv_folds",        "svm_c",
              "svm_tolerance",   "svm_max_epochs",
              "epsilon",         "tau",
              "w",               "sp_threshold",
              "sp_window",       "sp_variance_bound",
              "sp_aggregate",    "ls_k",
              "ls_threshold",    "zwh_accuracy_threshold",
              "v_drop_count",    "min_occurrences",
              "stopwords_path",  "significance_test",
              "alpha",           "seed",
              "jobs",            "output_dir"},
             origin, "");

  ExperimentConfig cfg;

  if (!root.contains("datasets") || !root.at("datasets").is_array() ||
      root.at("datasets").empty()) {
    fail(origin, "config key 'datasets' must be a non-empty array");
  }
  for (std::size_t i = 0; i < root.at("datasets").size(); ++i) {
    cfg.datasets.push_back(parse_dataset(root.at("datasets")[i], i, origin));
  }
  {
    std::set<std::string> names;
    for (const DatasetConfig& ds : cfg.datasets) {
      if (!names.insert(ds.name).second) {
        fail(origin, "duplicate dataset name '" + ds.name + "'");
      }
    }
  }

  if (root.contains("criteria")) {
    if (!root.at("criteria").is_array() || root.at("criteria").empty()) {
      fail(origin, "config key 'criteria' must be a non-empty array");
    }
    for (const auto& item : root.at("criteria")) {
      if (!item.is_string()) {
        fail(origin, "config key 'criteria' must hold strings");
      }
      cfg.criteria.push_back(item.get<std::string>());
    }
  } else {
    cfg.criteria = known_criteria();
  }
  {
    const auto& known = known_criteria();
    std::set<std::string> seen;
    bool has_sp = false;
    bool has_combinator = false;
    for (const std::string& name : cfg.criteria) {
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        fail(origin, "unknown criterion '" + name + "' in 'criteria'");
      }
      if (!seen.insert(name).second) {
        fail(origin, "duplicate criterion '" + name + "' in 'criteria'");
      }
      has_sp = has_sp || name == "sp";
      has_combinator = has_combinator || is_combinator(name);
    }
    if (has_combinator && !has_sp) {
      fail(origin, "config key 'criteria' lists a combinator without sp");
    }
  }

  cfg.threshold_source = parse_source(
      get_string(root, "threshold_source", "validation", origin),
      "threshold_source", origin);
  cfg.difference_source = parse_source(
      get_string(root, "difference_source", "validation", origin),
      "difference_source", origin);

  cfg.run.batch_fraction =
      get_number(root, "batch_fraction", cfg.run.batch_fraction, origin);
  if (!(cfg.run.batch_fraction > 0.0) || cfg.run.batch_fraction > 1.0) {
    fail(origin, "batch_fraction must be in (0, 1]");
  }
  cfg.run.validation_size =
      get_int(root, "validation_size", cfg.run.validation_size, origin);
  if (cfg.run.validation_size < 0) {
    fail(origin, "validation_size must be >= 0");
  }
  cfg.run.validation_reuse =
      get_bool(root, "validation_reuse", cfg.run.validation_reuse, origin);
  cfg.run.stop_set_size =
      get_int(root, "stop_set_size", cfg.run.stop_set_size, origin);
  if (cfg.run.stop_set_size < 1) {
    fail(origin, "stop_set_size must be >= 1");
  }
  cfg.run.cv_folds = get_int(root, "cv_folds", cfg.run.cv_folds, origin);
  if (cfg.run.cv_folds < 2) {
    fail(origin, "cv_folds must be >= 2");
  }

  cfg.run.train.c = get_number(root, "svm_c", cfg.run.train.c, origin);
  if (!(cfg.run.train.c > 0.0)) {
    fail(origin, "svm_c must be positive");
  }
  cfg.run.train.tolerance =
      get_number(root, "svm_tolerance", cfg.run.train.tolerance, origin);
  if (!(cfg.run.train.tolerance > 0.0)) {
    fail(origin, "svm_tolerance must be positive");
  }
  cfg.run.train.max_epochs =
      get_int(root, "svm_max_epochs", cfg.run.train.max_epochs, origin);
  if (cfg.run.train.max_epochs < 1) {
    fail(origin, "svm_max_epochs must be >= 1");
  }

  cfg.stopping.epsilon = get_number(root, "epsilon", cfg.stopping.epsilon, origin);
  cfg.stopping.tau = get_number(root, "tau", cfg.stopping.tau, origin);
  cfg.stopping.w = get_int(root, "w", cfg.stopping.w, origin);
  cfg.stopping.sp_threshold =
      get_number(root, "sp_threshold", cfg.stopping.sp_threshold, origin);
  cfg.stopping.sp_window =
      get_int(root, "sp_window", cfg.stopping.sp_window, origin);
  cfg.stopping.sp_variance_bound = get_number(
      root, "sp_variance_bound", cfg.stopping.sp_variance_bound, origin);
  {
    const std::string agg = get_string(root, "sp_aggregate", "all_exceed", origin);
    if (agg == "all_exceed") {
      cfg.stopping.sp_aggregate = SpAggregate::all_exceed;
    } else if (agg == "mean") {
      cfg.stopping.sp_aggregate = SpAggregate::mean;
    } else {
      fail(origin, "config key 'sp_aggregate' must be 'all_exceed' or 'mean'");
    }
  }
  cfg.stopping.ls_k = get_int(root, "ls_k", cfg.stopping.ls_k, origin);
  cfg.stopping.ls_threshold =
      get_number(root, "ls_threshold", cfg.stopping.ls_threshold, origin);
  cfg.stopping.zwh_accuracy_threshold =
      get_number(root, "zwh_accuracy_threshold",
                 cfg.stopping.zwh_accuracy_threshold, origin);
  cfg.stopping.v_drop_count =
      get_int(root, "v_drop_count", cfg.stopping.v_drop_count, origin);
  try {
    validate(cfg.stopping);
  } catch (const std::invalid_argument& e) {
    fail(origin, e.what());
  }

  cfg.min_occurrences =
      get_int(root, "min_occurrences", cfg.min_occurrences, origin);
  if (cfg.min_occurrences < 0) {
    fail(origin, "min_occurrences must be >= 0");
  }
  cfg.stopwords_path = get_string(root, "stopwords_path", "", origin);

  {
    const std::string test =
        get_string(root, "significance_test", "paired_t", origin);
    if (test == "paired_t") {
      cfg.significance_test = SignificanceTest::paired_t;
    } else if (test == "wilcoxon") {
      cfg.significance_test = SignificanceTest::wilcoxon_signed_rank;
    } else {
      fail(origin,
           "config key 'significance_test' must be 'paired_t' or 'wilcoxon'");
    }
  }
  cfg.alpha = get_number(root, "alpha", cfg.alpha, origin);
  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0)) {
    fail(origin, "alpha must be in (0, 1)");
  }

  if (root.contains("seed")) {
    const json& seed = root.at("seed");
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
      fail(origin, "config key 'seed' must be an integer");
    }
    if (seed.is_number_integer() && seed.get<std::int64_t>() < 0) {
      fail(origin, "config key 'seed' must be >= 0");
    }
    cfg.seed = seed.get<std::uint64_t>();
  }
  cfg.run.seed = cfg.seed;

  cfg.jobs = get_int(root, "jobs", cfg.jobs, origin);
  if (cfg.jobs < 0) {
    fail(origin, "jobs must be >= 0");
  }
  cfg.output_dir = get_string(root, "output_dir", cfg.output_dir, origin);

  cfg.run.compute_cv = roster_needs_cv(cfg);
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open config file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

}  // namespace alstop

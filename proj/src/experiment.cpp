#include "alstop/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "alstop/corpus.hpp"
#include "alstop/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace alstop {

namespace {

constexpr const char* kVersion = "1.0.0";

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(const std::string& line,
                                   const std::string& where) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw std::runtime_error(where + ": unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write file '" + path.string() + "'");
  }
  out << content;
  if (!out) {
    throw std::runtime_error("failed writing file '" + path.string() + "'");
  }
}

struct CellPlan {
  std::string dataset;  // table row name
  std::string cell;     // pairing unit within the row
  std::string positive_category;
  const RawCorpusData* raw = nullptr;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::uint64_t run_seed = 0;
};

struct CellOutcome {
  std::vector<StopObservation> observations;
  std::string trace_csv;
  std::string stops_csv;
};

std::string fold_cell_name(int fold) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "fold%02d", fold);
  return buf;
}

void require_category(const RawCorpusData& raw, const std::string& dataset,
                      const std::string& category) {
  if (!std::binary_search(raw.class_names.begin(), raw.class_names.end(),
                          category)) {
    throw std::runtime_error("dataset '" + dataset + "': category '" +
                             category + "' not present in the corpus");
  }
}

std::vector<CellPlan> plan_cells(const ExperimentConfig& cfg,
                                 std::deque<RawCorpusData>& storage) {
  std::vector<CellPlan> plans;
  for (const DatasetConfig& ds : cfg.datasets) {
    if (!ds.test_path.empty()) {
      RawCorpusData merged = load_raw_documents(ds.path, ds.format);
      const std::size_t train_count = merged.docs.size();
      RawCorpusData test = load_raw_documents(ds.test_path, ds.format);
      std::set<std::string> train_ids;
      for (const auto& doc : merged.docs) train_ids.insert(doc.id);
      for (auto& doc : test.docs) {
        if (train_ids.contains(doc.id)) {
          throw std::runtime_error("dataset '" + ds.name +
                                   "': test document id '" + doc.id +
                                   "' also appears in the training file");
        }
        merged.docs.push_back(std::move(doc));
      }
      std::set<std::string> classes;
      for (const auto& doc : merged.docs) classes.insert(doc.class_name);
      merged.class_names.assign(classes.begin(), classes.end());
      storage.push_back(std::move(merged));
      const RawCorpusData& raw = storage.back();

      std::vector<std::string> train_list, test_list;
      for (std::size_t i = 0; i < raw.docs.size(); ++i) {
        (i < train_count ? train_list : test_list).push_back(raw.docs[i].id);
      }
      for (const std::string& category : ds.positive_categories) {
        require_category(raw, ds.name, category);
        CellPlan plan;
        plan.dataset = ds.name;
        plan.cell = category;
        plan.positive_category = category;
        plan.raw = &raw;
        plan.train_ids = train_list;
        plan.test_ids = test_list;
        plan.run_seed =
            derive_seed(cfg.seed, "run:" + ds.name + ":" + category);
        plans.push_back(std::move(plan));
      }
    } else {
      storage.push_back(load_raw_documents(ds.path, ds.format));
      const RawCorpusData& raw = storage.back();
      std::vector<std::string> all_ids;
      for (const auto& doc : raw.docs) all_ids.push_back(doc.id);
      std::vector<std::vector<std::string>> folds;
      try {
        folds = make_folds(all_ids, ds.folds,
                           derive_seed(cfg.seed, "folds:" + ds.name));
      } catch (const std::exception& e) {
        throw std::runtime_error("dataset '" + ds.name + "': " + e.what());
      }
      for (const std::string& category : ds.positive_categories) {
        require_category(raw, ds.name, category);
        const std::string row = ds.name + "-" + category;
        for (int f = 0; f < ds.folds; ++f) {
          CellPlan plan;
          plan.dataset = row;
          plan.cell = fold_cell_name(f);
          plan.positive_category = category;
          plan.raw = &raw;
          plan.test_ids = folds[static_cast<std::size_t>(f)];
          std::set<std::string> held(plan.test_ids.begin(),
                                     plan.test_ids.end());
          for (const std::string& id : all_ids) {
            if (!held.contains(id)) plan.train_ids.push_back(id);
          }
          plan.run_seed =
              derive_seed(cfg.seed, "run:" + row + ":" + plan.cell);
          plans.push_back(std::move(plan));
        }
      }
    }
  }
  return plans;
}

CellOutcome run_cell(const CellPlan& plan, const ExperimentConfig& cfg,
                     const CorpusBuildOptions& corpus_options) {
  Corpus corpus = build_feature_corpus(
      *plan.raw, plan.positive_category,
      std::set<std::string>(plan.train_ids.begin(), plan.train_ids.end()),
      corpus_options);
  corpus.predefined_split = PredefinedSplit{plan.train_ids, plan.test_ids};
  corpus.seed = plan.run_seed;

  RunConfig run_cfg = cfg.run;
  run_cfg.seed = plan.run_seed;
  const RunState state = run_until_exhausted(corpus, run_cfg);

  StoppingSuite suite(cfg.stopping, cfg.criteria, cfg.threshold_source,
                      cfg.difference_source);
  for (const RoundRecord& rec : state.history) suite.observe(rec);
  const std::vector<StopReport> reports = suite.reports(state.history);

  CellOutcome outcome;
  std::ostringstream trace;
  trace << trace_csv_header() << '\n';
  for (const RoundRecord& rec : state.history) {
    trace << trace_csv_row(rec) << '\n';
  }
  outcome.trace_csv = trace.str();

  std::ostringstream stops;
  stops << stops_csv_header() << '\n';
  for (const StopReport& report : reports) {
    stops << stops_csv_row(plan.dataset, plan.cell, report) << '\n';
    outcome.observations.push_back({plan.dataset, plan.cell, report.criterion,
                                    static_cast<double>(report.annotations),
                                    report.test_f});
  }
  const RoundRecord& last = state.history.back();
  StopReport all;
  all.criterion = "all";
  all.round = last.round;
  all.annotations = last.labeled_count;
  all.test_f = last.test_f;
  stops << stops_csv_row(plan.dataset, plan.cell, all) << '\n';
  outcome.observations.push_back({plan.dataset, plan.cell, "all",
                                  static_cast<double>(all.annotations),
                                  all.test_f});
  outcome.stops_csv = stops.str();
  return outcome;
}

nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json root;
  nlohmann::json datasets = nlohmann::json::array();
  for (const DatasetConfig& ds : cfg.datasets) {
    nlohmann::json d;
    d["name"] = ds.name;
    d["path"] = ds.path;
    d["format"] =
        ds.format == CorpusFormat::jsonl ? "jsonl" : "dir_per_class";
    d["test_path"] = ds.test_path;
    d["positive_categories"] = ds.positive_categories;
    d["folds"] = ds.folds;
    datasets.push_back(std::move(d));
  }
  root["datasets"] = std::move(datasets);
  root["criteria"] = cfg.criteria;
  root["threshold_source"] =
      cfg.threshold_source == PerfSource::validation ? "validation" : "cv";
  root["difference_source"] =
      cfg.difference_source == PerfSource::validation ? "validation" : "cv";
  root["batch_fraction"] = cfg.run.batch_fraction;
  root["validation_size"] = cfg.run.validation_size;
  root["validation_reuse"] = cfg.run.validation_reuse;
  root["stop_set_size"] = cfg.run.stop_set_size;
  root["cv_folds"] = cfg.run.cv_folds;
  root["svm_c"] = cfg.run.train.c;
  root["svm_tolerance"] = cfg.run.train.tolerance;
  root["svm_max_epochs"] = cfg.run.train.max_epochs;
  root["epsilon"] = cfg.stopping.epsilon;
  root["tau"] = cfg.stopping.tau;
  root["w"] = cfg.stopping.w;
  root["sp_threshold"] = cfg.stopping.sp_threshold;
  root["sp_window"] = cfg.stopping.sp_window;
  root["sp_variance_bound"] = cfg.stopping.sp_variance_bound;
  root["sp_aggregate"] =
      cfg.stopping.sp_aggregate == SpAggregate::all_exceed ? "all_exceed"
                                                           : "mean";
  root["ls_k"] = cfg.stopping.ls_k;
  root["ls_threshold"] = cfg.stopping.ls_threshold;
  root["zwh_accuracy_threshold"] = cfg.stopping.zwh_accuracy_threshold;
  root["v_drop_count"] = cfg.stopping.v_drop_count;
  root["min_occurrences"] = cfg.min_occurrences;
  root["stopwords_path"] = cfg.stopwords_path;
  root["significance_test"] =
      cfg.significance_test == SignificanceTest::paired_t ? "paired_t"
                                                          : "wilcoxon";
  root["alpha"] = cfg.alpha;
  root["seed"] = cfg.seed;
  root["jobs"] = cfg.jobs;
  root["output_dir"] = cfg.output_dir;
  return root;
}

}  // namespace

std::string trace_csv_header() {
  return "round,labeled_count,batch_size,test_f,validation_f,cv_f,"
         "batch_prequential_accuracy,stop_set_abs_decision_mean,"
         "unlabeled_abs_decision_min,unlabeled_abs_decision_mean,"
         "batch_abs_decision_mean,degenerate_model";
}

std::string trace_csv_row(const RoundRecord& rec) {
  std::ostringstream out;
  out << rec.round << ',' << rec.labeled_count << ','
      << rec.batch_ids.size() << ',' << format_double(rec.test_f) << ',';
  if (rec.validation_f) out << format_double(*rec.validation_f);
  out << ',';
  if (rec.cv_f) out << format_double(*rec.cv_f);
  out << ',';
  if (rec.batch_prequential_accuracy) {
    out << format_double(*rec.batch_prequential_accuracy);
  }
  out << ',' << format_double(rec.stop_set_abs_decision_mean) << ',';
  if (rec.unlabeled_abs_summary) {
    out << format_double(rec.unlabeled_abs_summary->min);
  }
  out << ',';
  if (rec.unlabeled_abs_summary) {
    out << format_double(rec.unlabeled_abs_summary->mean);
  }
  out << ',';
  if (!rec.batch_decision_values.empty()) {
    double sum = 0.0;
    for (double v : rec.batch_decision_values) sum += std::abs(v);
    out << format_double(sum /
                         static_cast<double>(rec.batch_decision_values.size()));
  }
  out << ',' << (rec.degenerate_model ? 1 : 0);
  return out.str();
}

std::string stops_csv_header() {
  return "dataset,cell,criterion,round,annotations,test_f,exhausted";
}

std::string stops_csv_row(const std::string& dataset, const std::string& cell,
                          const StopReport& report) {
  std::ostringstream out;
  out << csv_escape(dataset) << ',' << csv_escape(cell) << ','
      << report.criterion << ',' << report.round << ',' << report.annotations
      << ',' << format_double(report.test_f) << ','
      << (report.exhausted ? "true" : "false");
  return out.str();
}

std::vector<StopObservation> read_stops_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open stops file '" + path + "'");
  }
  std::vector<StopObservation> out;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path + ":" + std::to_string(line_no);
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const auto fields = csv_split(line, where);
    if (line_no == 1) {
      if (csv_split(stops_csv_header(), where) != fields) {
        throw std::runtime_error(where + ": unexpected stops header");
      }
      continue;
    }
    if (fields.size() != 7) {
      throw std::runtime_error(where + ": expected 7 fields, got " +
                               std::to_string(fields.size()));
    }
    StopObservation obs;
    obs.dataset = fields[0];
    obs.cell = fields[1];
    obs.criterion = fields[2];
    try {
      obs.annotations = std::stod(fields[4]);
      obs.f = std::stod(fields[5]);
    } catch (const std::exception&) {
      throw std::runtime_error(where + ": malformed numeric field");
    }
    out.push_back(std::move(obs));
  }
  return out;
}

std::string sanitize_file_component(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out += ok ? c : '-';
  }
  return out.empty() ? std::string("x") : out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  CorpusBuildOptions corpus_options;
  corpus_options.min_occurrences = cfg.min_occurrences;
  if (!cfg.stopwords_path.empty()) {
    corpus_options.stopwords = load_stopwords(cfg.stopwords_path);
    corpus_options.stopword_list_id =
        fs::path(cfg.stopwords_path).filename().string();
  }

  std::deque<RawCorpusData> storage;
  const std::vector<CellPlan> plans = plan_cells(cfg, storage);

  std::vector<std::pair<std::string, std::string>> file_names;
  {
    std::set<std::pair<std::string, std::string>> seen;
    for (const CellPlan& plan : plans) {
      auto key = std::make_pair(sanitize_file_component(plan.dataset),
                                sanitize_file_component(plan.cell));
      if (!seen.insert(key).second) {
        throw std::runtime_error("output file name collision for dataset '" +
                                 plan.dataset + "', cell '" + plan.cell + "'");
      }
      file_names.push_back(std::move(key));
    }
  }

  fs::create_directories(cfg.output_dir);

  std::vector<CellOutcome> outcomes(plans.size());
  std::vector<std::string> errors(plans.size());
  auto one_cell = [&](std::size_t i) {
    try {
      outcomes[i] = run_cell(plans[i], cfg, corpus_options);
    } catch (const std::exception& e) {
      errors[i] = "dataset '" + plans[i].dataset + "', cell '" +
                  plans[i].cell + "': " + e.what();
    }
  };

  const int jobs = cfg.jobs == 0 ? omp_get_num_procs() : cfg.jobs;
  if (jobs > 1 && plans.size() > 1) {
    // Cells parallelize at the outer level; the scoring kernels inside then
    // run single-threaded (no nested parallelism).
    omp_set_max_active_levels(1);
    const std::int64_t n = static_cast<std::int64_t>(plans.size());
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
      one_cell(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < plans.size(); ++i) one_cell(i);
  }
  for (const std::string& error : errors) {
    if (!error.empty()) throw std::runtime_error(error);
  }

  ExperimentResult result;
  const fs::path out_dir(cfg.output_dir);
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& [ds_name, cell_name] = file_names[i];
    write_file(out_dir / ("trace_" + ds_name + "_" + cell_name + ".csv"),
               outcomes[i].trace_csv);
    write_file(out_dir / ("stops_" + ds_name + "_" + cell_name + ".csv"),
               outcomes[i].stops_csv);
    result.observations.insert(result.observations.end(),
                               outcomes[i].observations.begin(),
                               outcomes[i].observations.end());
  }

  result.table =
      aggregate_table(result.observations, cfg.significance_test, cfg.alpha);
  write_file(out_dir / "table.csv", render_table_csv(result.table));
  write_file(out_dir / "table.txt", render_table_text(result.table));

  nlohmann::json manifest;
  manifest["tool"] = "alstop";
  manifest["version"] = kVersion;
  manifest["seed"] = cfg.seed;
  const nlohmann::json config = config_json(cfg);
  manifest["config"] = config;
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash_tag(config.dump())));
    manifest["config_hash"] = buf;
  }
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t i = 0; i < plans.size(); ++i) {
    nlohmann::json cell;
    cell["dataset"] = plans[i].dataset;
    cell["cell"] = plans[i].cell;
    cell["trace"] = "trace_" + file_names[i].first + "_" +
                    file_names[i].second + ".csv";
    cell["stops"] = "stops_" + file_names[i].first + "_" +
                    file_names[i].second + ".csv";
    cells.push_back(std::move(cell));
  }
  manifest["cells"] = std::move(cells);
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

  return result;
}

ResultTable report_from_dir(const std::string& dir, const std::string& out_dir,
                            SignificanceTest test, double alpha) {
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("not a directory: " + dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.starts_with("stops_") && name.ends_with(".csv")) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw std::runtime_error("no stops_*.csv files under " + dir);
  }
  std::sort(files.begin(), files.end());

  std::vector<StopObservation> observations;
  for (const fs::path& file : files) {
    const auto rows = read_stops_csv(file.string());
    observations.insert(observations.end(), rows.begin(), rows.end());
  }
  ResultTable table = aggregate_table(observations, test, alpha);
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "table.csv", render_table_csv(table));
  write_file(fs::path(out_dir) / "table.txt", render_table_text(table));
  return table;
}

}  // namespace alstop

#include "alstop/loop.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "alstop/corpus.hpp"
#include "alstop/eval.hpp"
#include "alstop/rng.hpp"

namespace alstop {

namespace {

std::unordered_map<std::string, std::int32_t> position_index(
    const Corpus& corpus) {
  std::unordered_map<std::string, std::int32_t> index;
  index.reserve(corpus.examples.size());
  for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
    index.emplace(corpus.examples[i].id, static_cast<std::int32_t>(i));
  }
  return index;
}

std::vector<std::int32_t> resolve_positions(
    const std::vector<std::string>& ids,
    const std::unordered_map<std::string, std::int32_t>& index,
    const char* side) {
  std::vector<std::int32_t> out;
  out.reserve(ids.size());
  for (const std::string& id : ids) {
    const auto it = index.find(id);
    if (it == index.end()) {
      throw std::out_of_range(std::string(side) +
                              " split references unknown document id '" + id +
                              "'");
    }
    out.push_back(it->second);
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw std::invalid_argument(std::string(side) +
                                " split lists a document twice");
  }
  return out;
}

/// Removes `sorted_remove` from ascending `v` in place.
void remove_sorted(std::vector<std::int32_t>& v,
                   const std::vector<std::int32_t>& sorted_remove) {
  std::vector<std::int32_t> kept;
  kept.reserve(v.size() - sorted_remove.size());
  std::set_difference(v.begin(), v.end(), sorted_remove.begin(),
                      sorted_remove.end(), std::back_inserter(kept));
  v = std::move(kept);
}

LabelVector gold_labels(const Corpus& corpus,
                        std::span<const std::int32_t> positions) {
  LabelVector gold(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    gold[i] =
        corpus.examples[static_cast<std::size_t>(positions[i])].positive ? 1 : 0;
  }
  return gold;
}

}  // namespace

int compute_batch_size(int initial_pool, double fraction) {
  if (initial_pool < 1) {
    throw std::invalid_argument("initial pool must hold at least one example");
  }
  const double raw = fraction * static_cast<double>(initial_pool);
  const int rounded = static_cast<int>(std::floor(raw + 0.5));
  return std::max(1, rounded);
}

RunState init_run(const Corpus& corpus, const RunConfig& cfg) {
  if (!(cfg.batch_fraction > 0.0) || cfg.batch_fraction > 1.0) {
    throw std::invalid_argument("batch_fraction must be in (0, 1]");
  }
  if (cfg.validation_size < 0) {
    throw std::invalid_argument("validation_size must be >= 0");
  }
  if (cfg.stop_set_size < 1) {
    throw std::invalid_argument("stop_set_size must be >= 1");
  }
  if (cfg.cv_folds < 2) {
    throw std::invalid_argument("cv_folds must be >= 2");
  }
  if (!corpus.predefined_split) {
    throw std::invalid_argument("corpus has no train/test split");
  }

  const auto index = position_index(corpus);
  RunState state;
  state.unlabeled =
      resolve_positions(corpus.predefined_split->train_ids, index, "train");
  state.test_ids =
      resolve_positions(corpus.predefined_split->test_ids, index, "test");
  {
    std::vector<std::int32_t> overlap;
    std::set_intersection(state.unlabeled.begin(), state.unlabeled.end(),
                          state.test_ids.begin(), state.test_ids.end(),
                          std::back_inserter(overlap));
    if (!overlap.empty()) {
      throw std::invalid_argument("train and test splits overlap");
    }
  }

  state.initial_pool = static_cast<int>(state.unlabeled.size());
  state.b = compute_batch_size(state.initial_pool, cfg.batch_fraction);
  if (state.initial_pool <= cfg.validation_size + state.b) {
    throw std::invalid_argument(
        "training pool too small for validation set plus one batch");
  }

  Rng validation_rng(derive_seed(cfg.seed, "validation"));
  state.validation_ids = validation_rng.sample(
      state.unlabeled, static_cast<std::size_t>(cfg.validation_size));
  std::sort(state.validation_ids.begin(), state.validation_ids.end());
  if (!cfg.validation_reuse) {
    remove_sorted(state.unlabeled, state.validation_ids);
  }

  Rng stop_rng(derive_seed(cfg.seed, "stopset"));
  state.stop_set_ids = stop_rng.sample(
      state.unlabeled, static_cast<std::size_t>(cfg.stop_set_size));
  std::sort(state.stop_set_ids.begin(), state.stop_set_ids.end());

  Rng init_rng(derive_seed(cfg.seed, "init"));
  std::vector<std::int32_t> seed_batch =
      init_rng.sample(state.unlabeled, static_cast<std::size_t>(state.b));
  std::vector<std::int32_t> sorted_batch = seed_batch;
  std::sort(sorted_batch.begin(), sorted_batch.end());
  remove_sorted(state.unlabeled, sorted_batch);
  state.labeled = std::move(seed_batch);
  for (std::int32_t pos : state.labeled) {
    state.labeled_examples.push_back(
        corpus.examples[static_cast<std::size_t>(pos)]);
  }
  return state;
}

std::vector<std::size_t> select_closest_to_hyperplane(
    std::span<const double> decision_values,
    std::span<const std::string* const> ids, std::size_t b) {
  if (decision_values.size() != ids.size()) {
    throw std::invalid_argument("decision values and ids differ in length");
  }
  std::vector<std::size_t> order(decision_values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(b, order.size());
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [&](std::size_t x, std::size_t y) {
                      const double ax = std::abs(decision_values[x]);
                      const double ay = std::abs(decision_values[y]);
                      if (ax != ay) return ax < ay;
                      return *ids[x] < *ids[y];
                    });
  order.resize(take);
  return order;
}

std::vector<std::size_t> select_closest_to_hyperplane(
    const LinearModel& model, std::span<const LabeledExample> pool,
    std::size_t b) {
  std::vector<double> values(pool.size());
  std::vector<const std::string*> ids(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    values[i] = decision_value(model, pool[i].features);
    ids[i] = &pool[i].id;
  }
  return select_closest_to_hyperplane(values, ids, b);
}

std::optional<CvResult> train_cv_scores(
    std::span<const LabeledExample> labeled, int k, std::uint64_t seed,
    std::size_t dim, const TrainConfig& train_cfg) {
  if (k < 2) {
    throw std::invalid_argument("fold count must be >= 2");
  }
  if (labeled.size() < static_cast<std::size_t>(k)) {
    return std::nullopt;
  }
  std::unordered_map<std::string, std::size_t> by_id;
  by_id.reserve(labeled.size());
  std::vector<std::string> ids;
  ids.reserve(labeled.size());
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    by_id.emplace(labeled[i].id, i);
    ids.push_back(labeled[i].id);
  }
  const auto folds = make_folds(ids, k, seed);

  CvResult result;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<char> held(labeled.size(), 0);
    for (const std::string& id : folds[f]) held[by_id.at(id)] = 1;
    std::vector<LabeledExample> train;
    train.reserve(labeled.size() - folds[f].size());
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      if (!held[i]) train.push_back(labeled[i]);
    }
    TrainConfig fold_cfg = train_cfg;
    fold_cfg.seed = derive_seed(seed, "cvfold", f);
    LinearModel model;
    try {
      model = train_svm(train, dim, fold_cfg);
    } catch (const DegenerateLabelsError&) {
      model = majority_model(train, dim);
    }
    ScorePair pair;
    for (const std::string& id : folds[f]) {
      const LabeledExample& ex = labeled[by_id.at(id)];
      pair.predictions.push_back(predict(model, ex.features) ? 1 : 0);
      pair.gold.push_back(ex.positive ? 1 : 0);
    }
    result.fold_scores.push_back(f_measure(pair));
  }
  result.average =
      std::accumulate(result.fold_scores.begin(), result.fold_scores.end(),
                      0.0) /
      static_cast<double>(result.fold_scores.size());
  return result;
}

const RoundRecord& al_step(const Corpus& corpus, RunState& state,
                           const RunConfig& cfg) {
  const std::size_t dim = corpus.vocab.size();

  RoundRecord rec;
  rec.round = state.round;
  rec.labeled_count = static_cast<int>(state.labeled.size());

  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = derive_seed(cfg.seed, "train",
                               static_cast<std::uint64_t>(state.round));
  LinearModel model;
  try {
    model = train_svm(state.labeled_examples, dim, train_cfg,
                      state.warm_alpha.empty() ? nullptr : &state.warm_alpha);
    state.warm_alpha = model.dual_vars;
  } catch (const DegenerateLabelsError&) {
    model = majority_model(state.labeled_examples, dim);
    rec.degenerate_model = true;
  }

  {
    const auto stop_values =
        decision_values(model, corpus.examples, state.stop_set_ids);
    rec.stop_set_predictions = labels_from_values(stop_values);
    rec.stop_set_abs_decision_mean = mean_abs(stop_values);
  }

  std::vector<double> pool_values;
  if (!state.unlabeled.empty()) {
    pool_values = decision_values(model, corpus.examples, state.unlabeled);
    rec.pool_ids = state.unlabeled;
    rec.pool_predictions = labels_from_values(pool_values);
    rec.unlabeled_abs_summary = abs_summary(pool_values);
  }

  if (!state.validation_ids.empty()) {
    const auto values =
        decision_values(model, corpus.examples, state.validation_ids);
    rec.validation_f = f_measure(
        {labels_from_values(values), gold_labels(corpus, state.validation_ids)});
  }
  {
    const auto values = decision_values(model, corpus.examples, state.test_ids);
    rec.test_f = f_measure(
        {labels_from_values(values), gold_labels(corpus, state.test_ids)});
  }

  if (cfg.compute_cv &&
      state.labeled_examples.size() >= static_cast<std::size_t>(cfg.cv_folds)) {
    const auto cv = train_cv_scores(
        state.labeled_examples, cfg.cv_folds,
        derive_seed(cfg.seed, "cv", static_cast<std::uint64_t>(state.round)),
        dim, cfg.train);
    if (cv) rec.cv_f = cv->average;
  }

  if (!state.unlabeled.empty()) {
    std::vector<const std::string*> ids(state.unlabeled.size());
    for (std::size_t i = 0; i < state.unlabeled.size(); ++i) {
      ids[i] = &corpus.examples[static_cast<std::size_t>(state.unlabeled[i])].id;
    }
    const auto picked = select_closest_to_hyperplane(
        pool_values, ids, static_cast<std::size_t>(state.b));
    std::size_t batch_hits = 0;
    for (std::size_t slot : picked) {
      const std::int32_t pos = state.unlabeled[slot];
      rec.batch_ids.push_back(pos);
      rec.batch_decision_values.push_back(pool_values[slot]);
      const bool predicted = pool_values[slot] >= 0.0;
      const bool gold =
          corpus.examples[static_cast<std::size_t>(pos)].positive;
      if (predicted == gold) ++batch_hits;
    }
    rec.batch_prequential_accuracy =
        static_cast<double>(batch_hits) / static_cast<double>(picked.size());

    std::vector<std::int32_t> sorted_batch = rec.batch_ids;
    std::sort(sorted_batch.begin(), sorted_batch.end());
    remove_sorted(state.unlabeled, sorted_batch);
    for (std::int32_t pos : rec.batch_ids) {
      state.labeled.push_back(pos);
      state.labeled_examples.push_back(
          corpus.examples[static_cast<std::size_t>(pos)]);
    }
  }

  state.round += 1;
  state.history.push_back(std::move(rec));
  return state.history.back();
}

RunState run_until_exhausted(const Corpus& corpus, const RunConfig& cfg) {
  RunState state = init_run(corpus, cfg);
  while (!state.unlabeled.empty()) {
    al_step(corpus, state, cfg);
  }
  al_step(corpus, state, cfg);  // exhaustion record: the "ALL" endpoint
  return state;
}

}  // namespace alstop

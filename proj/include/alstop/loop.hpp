#ifndef ALSTOP_LOOP_HPP
#define ALSTOP_LOOP_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alstop/scoring.hpp"
#include "alstop/svm.hpp"
#include "alstop/types.hpp"

namespace alstop {

struct RunConfig {
  double batch_fraction = 0.005;  // of the initial pool
  int validation_size = 500;
  bool validation_reuse = true;  // validation examples stay selectable
  int stop_set_size = 2000;
  int cv_folds = 10;
  bool compute_cv = true;  // per-round CV is costly; harness disables it
                           // when no stopping method consumes cv_f
  std::uint64_t seed = 0;
  TrainConfig train;
};

// One simulation round, measured on the model trained at the start of the
// round, before the selected batch joins L. Document positions index into
// Corpus::examples.
struct RoundRecord {
  int round = 0;
  int labeled_count = 0;  // |L| when this round's model was trained
  LabelVector stop_set_predictions;      // fixed stop set, ascending position
  std::vector<std::int32_t> pool_ids;    // current U, ascending position
  LabelVector pool_predictions;          // aligned with pool_ids
  std::vector<std::int32_t> batch_ids;   // selection order
  std::vector<double> batch_decision_values;  // aligned with batch_ids
  // min/mean |decision value| over current U; absent once U is empty.
  std::optional<AbsSummary> unlabeled_abs_summary;
  double stop_set_abs_decision_mean = 0.0;
  std::optional<double> validation_f;
  double test_f = 0.0;
  std::optional<double> cv_f;
  // Accuracy of this round's model on the batch it just selected, measured
  // before those labels are revealed to training.
  std::optional<double> batch_prequential_accuracy;
  bool degenerate_model = false;  // single-class L; majority fallback used
};

struct RunState {
  std::vector<std::int32_t> unlabeled;       // U, ascending position
  std::vector<std::int32_t> labeled;         // L, absorption order
  std::vector<LabeledExample> labeled_examples;  // mirror of `labeled`
  std::vector<std::int32_t> validation_ids;  // ascending position
  std::vector<std::int32_t> stop_set_ids;    // ascending position
  std::vector<std::int32_t> test_ids;        // ascending position
  int round = 0;
  int b = 0;
  int initial_pool = 0;
  std::vector<double> warm_alpha;  // dual warm start, aligned with `labeled`
  std::vector<RoundRecord> history;
};

struct CvResult {
  std::vector<double> fold_scores;
  double average = 0.0;
};

/// max(1, round-half-up(fraction * initial_pool)); fixed for a whole run.
int compute_batch_size(int initial_pool, double fraction);

// Seeds a run: draws the validation set (removed from U only when reuse is
// off), the fixed stop set (never removed; its members stay selectable), and
// the initial labeled batch. The corpus must carry a train/test split.
RunState init_run(const Corpus& corpus, const RunConfig& cfg);

// Positions (into the parallel spans) of the min(b, n) smallest absolute
// decision values, ties broken by ascending id; output in that order.
std::vector<std::size_t> select_closest_to_hyperplane(
    std::span<const double> decision_values,
    std::span<const std::string* const> ids, std::size_t b);

std::vector<std::size_t> select_closest_to_hyperplane(
    const LinearModel& model, std::span<const LabeledExample> pool,
    std::size_t b);

// k-fold cross validation on the accumulated labeled pool: deterministic
// seeded partition, F-measure on each held-out fold, arithmetic-mean
// average. Folds whose training portion is single-class fall back to the
// majority predictor. Absent when |labeled| < k.
std::optional<CvResult> train_cv_scores(
    std::span<const LabeledExample> labeled, int k, std::uint64_t seed,
    std::size_t dim, const TrainConfig& train_cfg);

// Runs one round: trains on current L (majority fallback when L is
// single-class), measures everything, then absorbs the selected batch U->L.
// With U already empty it emits the exhaustion record instead (full-pool
// model, no batch), which run_until_exhausted uses as the final "ALL" row.
const RoundRecord& al_step(const Corpus& corpus, RunState& state,
                           const RunConfig& cfg);

/// Steps until U empties, then appends the exhaustion record.
RunState run_until_exhausted(const Corpus& corpus, const RunConfig& cfg);

}  // namespace alstop

#endif

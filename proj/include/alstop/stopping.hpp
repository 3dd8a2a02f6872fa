#ifndef ALSTOP_STOPPING_HPP
#define ALSTOP_STOPPING_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alstop/loop.hpp"
#include "alstop/types.hpp"

namespace alstop {

enum class SpAggregate { all_exceed, mean };

struct StoppingConfig {
  double epsilon = 0.005;  // mean |dF| below this stops Difference
  double tau = 0.8;        // mean F at or above this stops Threshold
  int w = 3;               // look-back window of the two methods above
  double sp_threshold = 0.99;
  int sp_window = 3;
  double sp_variance_bound = 1e-4;
  SpAggregate sp_aggregate = SpAggregate::all_exceed;
  int ls_k = 10;
  double ls_threshold = 5e-5;
  double zwh_accuracy_threshold = 0.9;
  int v_drop_count = 3;
};

void validate(const StoppingConfig& cfg);

// Cohen's kappa with binary marginals. Two constant vectors agree perfectly
// (1.0) or disagree perfectly (-1.0); otherwise chance agreement is below 1
// and the usual formula applies.
double kappa(const LabelVector& a, const LabelVector& b);

// Every criterion observes one value per round and latches the first round
// that satisfies its rule; once latched it ignores further input.

// Stabilizing Predictions: agreement (kappa) of consecutive models on the
// fixed stop set. Stops when the last sp_window kappas agree per the
// aggregate rule (each > threshold, or their mean > threshold) and their
// sample variance is below sp_variance_bound.
class SpCriterion {
 public:
  explicit SpCriterion(const StoppingConfig& cfg);
  void update(int round, const LabelVector& stop_set_predictions);
  std::optional<int> latched() const { return latched_; }

 private:
  double threshold_;
  std::size_t window_;
  double variance_bound_;
  SpAggregate aggregate_;
  LabelVector previous_;
  bool has_previous_ = false;
  std::vector<double> kappas_;
  std::optional<int> latched_;
};

// Margin exhaustion: stop once no unlabeled example sits inside the margin
// (min |decision value| over U >= 1), or U is empty.
class Sc2000Criterion {
 public:
  void update(int round, std::optional<double> unlabeled_abs_min);
  std::optional<int> latched() const { return latched_; }

 private:
  std::optional<int> latched_;
};

// Confidence drop: stop after v_drop_count consecutive strict decreases of
// the stop-set mean |decision value|, once at least one rise has been seen
// (the rise guard skips the initial downhill transient).
class V2008Criterion {
 public:
  explicit V2008Criterion(const StoppingConfig& cfg);
  void update(int round, double stop_set_abs_mean);
  std::optional<int> latched() const { return latched_; }

 private:
  int drop_count_;
  double previous_ = 0.0;
  bool has_previous_ = false;
  bool seen_rise_ = false;
  int run_ = 0;
  std::optional<int> latched_;
};

// Confidence gradient: median of the last ls_k batch-mean |decision values|
// per round; stop when the round-over-round change of that median falls
// below ls_threshold in magnitude. Needs ls_k + 1 observations.
class Ls2008Criterion {
 public:
  explicit Ls2008Criterion(const StoppingConfig& cfg);
  void update(int round, std::optional<double> batch_abs_mean);
  std::optional<int> latched() const { return latched_; }

 private:
  std::size_t k_;
  double threshold_;
  std::vector<double> values_;
  std::optional<double> previous_median_;
  std::optional<int> latched_;
};

// Batch accuracy + pool stability: stop when prequential accuracy on the
// selected batch reaches the threshold and the pool predictions match the
// previous round's on every id present in both rounds' pools.
class Zwh2008Criterion {
 public:
  explicit Zwh2008Criterion(const StoppingConfig& cfg);
  void update(int round, std::optional<double> batch_prequential_accuracy,
              std::span<const std::int32_t> pool_ids,
              const LabelVector& pool_predictions);
  std::optional<int> latched() const { return latched_; }

 private:
  double threshold_;
  std::vector<std::int32_t> previous_ids_;
  LabelVector previous_predictions_;
  bool has_previous_ = false;
  std::optional<int> latched_;
};

// Stop when the mean of the last w performance values reaches tau.
// Absent values (CV not yet defined) skip the round without advancing.
class PerfThresholdCriterion {
 public:
  PerfThresholdCriterion(double tau, int w);
  void update(int round, std::optional<double> f);
  std::optional<int> latched() const { return latched_; }

 private:
  double tau_;
  std::size_t w_;
  std::vector<double> history_;
  std::optional<int> latched_;
};

// Stop when the mean of the last w absolute performance differences falls
// below epsilon. Differences are taken between consecutive observed values.
class PerfDifferenceCriterion {
 public:
  PerfDifferenceCriterion(double epsilon, int w);
  void update(int round, std::optional<double> f);
  std::optional<int> latched() const { return latched_; }

 private:
  double epsilon_;
  std::size_t w_;
  double previous_ = 0.0;
  bool has_previous_ = false;
  std::vector<double> diffs_;
  std::optional<int> latched_;
};

// Conservative combination: latest of the two stops; absent until both latch.
std::optional<int> combine_and(std::optional<int> a, std::optional<int> b);

// Aggressive combination: earliest latched stop; absent only when both are.
std::optional<int> combine_or(std::optional<int> a, std::optional<int> b);

struct StopReport {
  std::string criterion;
  int round = 0;
  int annotations = 0;  // labeled_count at the stopping round
  double test_f = 0.0;
  bool exhausted = false;  // never latched; forced at pool exhaustion
};

enum class PerfSource { validation, cv };

// Canonical criterion names: sp, sc2000, v2008, ls2008, zwh2008, threshold,
// difference, and the four combinators sp_and_threshold, sp_and_difference,
// sp_or_threshold, sp_or_difference.
const std::vector<std::string>& known_criteria();
bool is_combinator(const std::string& name);

// Feeds one run's RoundRecords to every criterion in the roster (components
// of requested combinators are instantiated implicitly) and produces the
// per-criterion StopReports, forcing unlatched criteria to the final record.
class StoppingSuite {
 public:
  StoppingSuite(const StoppingConfig& cfg, std::vector<std::string> roster,
                PerfSource threshold_source = PerfSource::validation,
                PerfSource difference_source = PerfSource::validation);

  void observe(const RoundRecord& rec);

  // Latched round of a roster criterion; combinators derived per round.
  std::optional<int> latched(const std::string& name) const;

  // True when some roster criterion consumes cv_f.
  bool needs_cv() const;

  std::vector<StopReport> reports(std::span<const RoundRecord> records) const;

 private:
  std::vector<std::string> roster_;
  PerfSource threshold_source_;
  PerfSource difference_source_;
  std::optional<SpCriterion> sp_;
  std::optional<Sc2000Criterion> sc2000_;
  std::optional<V2008Criterion> v2008_;
  std::optional<Ls2008Criterion> ls2008_;
  std::optional<Zwh2008Criterion> zwh2008_;
  std::optional<PerfThresholdCriterion> threshold_;
  std::optional<PerfDifferenceCriterion> difference_;
};

}  // namespace alstop

#endif

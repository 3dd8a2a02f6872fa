#include "alstop/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace alstop {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

double mean_of_last(const std::vector<double>& xs, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = xs.size() - n; i < xs.size(); ++i) sum += xs[i];
  return sum / static_cast<double>(n);
}

double sample_variance_of_last(const std::vector<double>& xs, std::size_t n) {
  if (n < 2) return 0.0;
  const double mean = mean_of_last(xs, n);
  double ss = 0.0;
  for (std::size_t i = xs.size() - n; i < xs.size(); ++i) {
    ss += (xs[i] - mean) * (xs[i] - mean);
  }
  return ss / static_cast<double>(n - 1);
}

double median_of_last(const std::vector<double>& xs, std::size_t n) {
  std::vector<double> tail(xs.end() - static_cast<std::ptrdiff_t>(n), xs.end());
  std::sort(tail.begin(), tail.end());
  if (n % 2 == 1) return tail[n / 2];
  return (tail[n / 2 - 1] + tail[n / 2]) / 2.0;
}

}  // namespace

void validate(const StoppingConfig& cfg) {
  require(cfg.epsilon > 0.0, "epsilon must be positive");
  require(cfg.tau > 0.0 && cfg.tau <= 1.0, "tau must be in (0, 1]");
  require(cfg.w >= 1, "w must be >= 1");
  require(cfg.sp_threshold > 0.0 && cfg.sp_threshold <= 1.0,
          "sp_threshold must be in (0, 1]");
  require(cfg.sp_window >= 1, "sp_window must be >= 1");
  require(cfg.sp_variance_bound > 0.0, "sp_variance_bound must be positive");
  require(cfg.ls_k >= 1, "ls_k must be >= 1");
  require(cfg.ls_threshold > 0.0, "ls_threshold must be positive");
  require(cfg.zwh_accuracy_threshold > 0.0 && cfg.zwh_accuracy_threshold <= 1.0,
          "zwh_accuracy_threshold must be in (0, 1]");
  require(cfg.v_drop_count >= 1, "v_drop_count must be >= 1");
}

double kappa(const LabelVector& a, const LabelVector& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("empty prediction vectors");
  }
  if (a.size() != b.size()) {
    throw std::invalid_argument("prediction vectors differ in length");
  }
  std::size_t agree = 0, a_pos = 0, b_pos = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) ++agree;
    if (a[i]) ++a_pos;
    if (b[i]) ++b_pos;
  }
  const bool a_const = a_pos == 0 || a_pos == a.size();
  const bool b_const = b_pos == 0 || b_pos == b.size();
  if (a_const && b_const) {
    return a[0] == b[0] ? 1.0 : -1.0;
  }
  const double n = static_cast<double>(a.size());
  const double po = static_cast<double>(agree) / n;
  const double pa = static_cast<double>(a_pos) / n;
  const double pb = static_cast<double>(b_pos) / n;
  const double pe = pa * pb + (1.0 - pa) * (1.0 - pb);
  if (pe == 1.0) return 1.0;  // unreachable unless both constant; keep the guard
  return (po - pe) / (1.0 - pe);
}

SpCriterion::SpCriterion(const StoppingConfig& cfg)
    : threshold_(cfg.sp_threshold),
      window_(static_cast<std::size_t>(cfg.sp_window)),
      variance_bound_(cfg.sp_variance_bound),
      aggregate_(cfg.sp_aggregate) {}

void SpCriterion::update(int round, const LabelVector& stop_set_predictions) {
  if (latched_) return;
  if (has_previous_) {
    kappas_.push_back(kappa(previous_, stop_set_predictions));
    if (kappas_.size() >= window_) {
      bool agree;
      if (aggregate_ == SpAggregate::all_exceed) {
        agree = std::all_of(kappas_.end() - static_cast<std::ptrdiff_t>(window_),
                            kappas_.end(),
                            [&](double k) { return k > threshold_; });
      } else {
        agree = mean_of_last(kappas_, window_) > threshold_;
      }
      if (agree && sample_variance_of_last(kappas_, window_) < variance_bound_) {
        latched_ = round;
      }
    }
  }
  previous_ = stop_set_predictions;
  has_previous_ = true;
}

void Sc2000Criterion::update(int round,
                             std::optional<double> unlabeled_abs_min) {
  if (latched_) return;
  if (!unlabeled_abs_min || *unlabeled_abs_min >= 1.0) {
    latched_ = round;
  }
}

V2008Criterion::V2008Criterion(const StoppingConfig& cfg)
    : drop_count_(cfg.v_drop_count) {}

void V2008Criterion::update(int round, double stop_set_abs_mean) {
  if (latched_) return;
  if (has_previous_) {
    if (stop_set_abs_mean < previous_) {
      ++run_;
    } else {
      if (stop_set_abs_mean > previous_) seen_rise_ = true;
      run_ = 0;
    }
    if (seen_rise_ && run_ >= drop_count_) {
      latched_ = round;
    }
  }
  previous_ = stop_set_abs_mean;
  has_previous_ = true;
}

Ls2008Criterion::Ls2008Criterion(const StoppingConfig& cfg)
    : k_(static_cast<std::size_t>(cfg.ls_k)), threshold_(cfg.ls_threshold) {}

void Ls2008Criterion::update(int round, std::optional<double> batch_abs_mean) {
  if (latched_ || !batch_abs_mean) return;
  values_.push_back(*batch_abs_mean);
  if (values_.size() < k_) return;
  const double median = median_of_last(values_, k_);
  if (previous_median_ &&
      std::abs(median - *previous_median_) < threshold_) {
    latched_ = round;
  }
  previous_median_ = median;
}

Zwh2008Criterion::Zwh2008Criterion(const StoppingConfig& cfg)
    : threshold_(cfg.zwh_accuracy_threshold) {}

void Zwh2008Criterion::update(int round,
                              std::optional<double> batch_prequential_accuracy,
                              std::span<const std::int32_t> pool_ids,
                              const LabelVector& pool_predictions) {
  if (latched_) return;
  if (pool_ids.size() != pool_predictions.size()) {
    throw std::invalid_argument("pool ids and predictions differ in length");
  }
  if (has_previous_ && batch_prequential_accuracy &&
      *batch_prequential_accuracy >= threshold_) {
    // Compare on the id intersection; both lists are ascending.
    bool stable = true;
    std::size_t j = 0;
    for (std::size_t i = 0; i < pool_ids.size() && stable; ++i) {
      while (j < previous_ids_.size() && previous_ids_[j] < pool_ids[i]) ++j;
      if (j < previous_ids_.size() && previous_ids_[j] == pool_ids[i] &&
          previous_predictions_[j] != pool_predictions[i]) {
        stable = false;
      }
    }
    if (stable) latched_ = round;
  }
  previous_ids_.assign(pool_ids.begin(), pool_ids.end());
  previous_predictions_ = pool_predictions;
  has_previous_ = true;
}

PerfThresholdCriterion::PerfThresholdCriterion(double tau, int w)
    : tau_(tau), w_(static_cast<std::size_t>(w)) {}

void PerfThresholdCriterion::update(int round, std::optional<double> f) {
  if (latched_ || !f) return;
  history_.push_back(*f);
  if (history_.size() >= w_ && mean_of_last(history_, w_) >= tau_) {
    latched_ = round;
  }
}

PerfDifferenceCriterion::PerfDifferenceCriterion(double epsilon, int w)
    : epsilon_(epsilon), w_(static_cast<std::size_t>(w)) {}

void PerfDifferenceCriterion::update(int round, std::optional<double> f) {
  if (latched_ || !f) return;
  if (has_previous_) {
    diffs_.push_back(std::abs(*f - previous_));
    if (diffs_.size() >= w_ && mean_of_last(diffs_, w_) < epsilon_) {
      latched_ = round;
    }
  }
  previous_ = *f;
  has_previous_ = true;
}

std::optional<int> combine_and(std::optional<int> a, std::optional<int> b) {
  if (a && b) return std::max(*a, *b);
  return std::nullopt;
}

std::optional<int> combine_or(std::optional<int> a, std::optional<int> b) {
  if (a && b) return std::min(*a, *b);
  return a ? a : b;
}

const std::vector<std::string>& known_criteria() {
  static const std::vector<std::string> names{
      "sp",           "sc2000",
      "v2008",        "ls2008",
      "zwh2008",      "threshold",
      "difference",   "sp_and_threshold",
      "sp_and_difference", "sp_or_threshold",
      "sp_or_difference"};
  return names;
}

bool is_combinator(const std::string& name) {
  return name.starts_with("sp_and_") || name.starts_with("sp_or_");
}

StoppingSuite::StoppingSuite(const StoppingConfig& cfg,
                             std::vector<std::string> roster,
                             PerfSource threshold_source,
                             PerfSource difference_source)
    : roster_(std::move(roster)),
      threshold_source_(threshold_source),
      difference_source_(difference_source) {
  validate(cfg);
  if (roster_.empty()) {
    throw std::invalid_argument("criteria roster is empty");
  }
  const auto& known = known_criteria();
  bool any_combinator = false;
  for (const std::string& name : roster_) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw std::invalid_argument("unknown stopping criterion '" + name + "'");
    }
    any_combinator = any_combinator || is_combinator(name);
  }
  auto in_roster = [&](const char* name) {
    return std::find(roster_.begin(), roster_.end(), name) != roster_.end();
  };
  if (any_combinator && !in_roster("sp")) {
    throw std::invalid_argument(
        "combinators require sp in the criteria roster");
  }

  if (in_roster("sp") || any_combinator) sp_.emplace(cfg);
  if (in_roster("sc2000")) sc2000_.emplace();
  if (in_roster("v2008")) v2008_.emplace(cfg);
  if (in_roster("ls2008")) ls2008_.emplace(cfg);
  if (in_roster("zwh2008")) zwh2008_.emplace(cfg);
  if (in_roster("threshold") || in_roster("sp_and_threshold") ||
      in_roster("sp_or_threshold")) {
    threshold_.emplace(cfg.tau, cfg.w);
  }
  if (in_roster("difference") || in_roster("sp_and_difference") ||
      in_roster("sp_or_difference")) {
    difference_.emplace(cfg.epsilon, cfg.w);
  }
}

void StoppingSuite::observe(const RoundRecord& rec) {
  if (sp_) sp_->update(rec.round, rec.stop_set_predictions);
  if (sc2000_) {
    std::optional<double> min_abs;
    if (rec.unlabeled_abs_summary) min_abs = rec.unlabeled_abs_summary->min;
    sc2000_->update(rec.round, min_abs);
  }
  if (v2008_) v2008_->update(rec.round, rec.stop_set_abs_decision_mean);
  if (ls2008_) {
    std::optional<double> batch_mean;
    if (!rec.batch_decision_values.empty()) {
      double sum = 0.0;
      for (double v : rec.batch_decision_values) sum += std::abs(v);
      batch_mean = sum / static_cast<double>(rec.batch_decision_values.size());
    }
    ls2008_->update(rec.round, batch_mean);
  }
  if (zwh2008_) {
    zwh2008_->update(rec.round, rec.batch_prequential_accuracy, rec.pool_ids,
                     rec.pool_predictions);
  }
  if (threshold_) {
    threshold_->update(rec.round, threshold_source_ == PerfSource::validation
                                      ? rec.validation_f
                                      : rec.cv_f);
  }
  if (difference_) {
    difference_->update(rec.round, difference_source_ == PerfSource::validation
                                       ? rec.validation_f
                                       : rec.cv_f);
  }
}

namespace {

template <typename T>
const T& engaged(const std::optional<T>& component, const std::string& name) {
  if (!component) {
    throw std::invalid_argument("criterion '" + name +
                                "' is not active in this suite");
  }
  return *component;
}

}  // namespace

std::optional<int> StoppingSuite::latched(const std::string& name) const {
  if (name == "sp") return engaged(sp_, name).latched();
  if (name == "sc2000") return engaged(sc2000_, name).latched();
  if (name == "v2008") return engaged(v2008_, name).latched();
  if (name == "ls2008") return engaged(ls2008_, name).latched();
  if (name == "zwh2008") return engaged(zwh2008_, name).latched();
  if (name == "threshold") return engaged(threshold_, name).latched();
  if (name == "difference") return engaged(difference_, name).latched();
  if (name == "sp_and_threshold") {
    return combine_and(engaged(sp_, name).latched(),
                       engaged(threshold_, name).latched());
  }
  if (name == "sp_and_difference") {
    return combine_and(engaged(sp_, name).latched(),
                       engaged(difference_, name).latched());
  }
  if (name == "sp_or_threshold") {
    return combine_or(engaged(sp_, name).latched(),
                      engaged(threshold_, name).latched());
  }
  if (name == "sp_or_difference") {
    return combine_or(engaged(sp_, name).latched(),
                      engaged(difference_, name).latched());
  }
  throw std::invalid_argument("unknown stopping criterion '" + name + "'");
}

bool StoppingSuite::needs_cv() const {
  auto uses_threshold = [&](const std::string& n) {
    return n == "threshold" || n == "sp_and_threshold" ||
           n == "sp_or_threshold";
  };
  auto uses_difference = [&](const std::string& n) {
    return n == "difference" || n == "sp_and_difference" ||
           n == "sp_or_difference";
  };
  for (const std::string& name : roster_) {
    if (uses_threshold(name) && threshold_source_ == PerfSource::cv) return true;
    if (uses_difference(name) && difference_source_ == PerfSource::cv) return true;
  }
  return false;
}

std::vector<StopReport> StoppingSuite::reports(
    std::span<const RoundRecord> records) const {
  if (records.empty()) {
    throw std::invalid_argument("no round records");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].round != static_cast<int>(i)) {
      throw std::invalid_argument("round records are not a contiguous trace");
    }
  }
  std::vector<StopReport> out;
  out.reserve(roster_.size());
  for (const std::string& name : roster_) {
    const std::optional<int> round = latched(name);
    StopReport report;
    report.criterion = name;
    report.exhausted = !round.has_value();
    const RoundRecord& rec =
        round ? records[static_cast<std::size_t>(*round)] : records.back();
    report.round = rec.round;
    report.annotations = rec.labeled_count;
    report.test_f = rec.test_f;
    out.push_back(std::move(report));
  }
  return out;
}

}  // namespace alstop

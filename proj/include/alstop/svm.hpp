#ifndef ALSTOP_SVM_HPP
#define ALSTOP_SVM_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "alstop/types.hpp"

namespace alstop {

struct TrainConfig {
  double c = 1.0;
  double tolerance = 1e-3;
  int max_epochs = 1000;
  std::uint64_t seed = 0;
};

/// Thrown when every training example carries the same label; callers fall
/// back to a majority predictor.
struct DegenerateLabelsError : std::runtime_error {
  DegenerateLabelsError() : std::runtime_error("degenerate labels") {}
};

struct LinearModel {
  std::vector<double> weights;  // length = feature dimension
  double bias = 0.0;
  std::vector<double> dual_vars;  // one per training example
  double c = 1.0;
  std::vector<double> epoch_objectives;  // dual objective after each epoch
  int epochs = 0;
  bool majority_fallback = false;
};

/// Soft-margin linear SVM on sparse binary vectors: coordinate ascent on the
/// L2-regularized L1-hinge dual, bias as an appended always-on feature.
/// Terminates when the largest projected-gradient violation in an epoch drops
/// below cfg.tolerance. Deterministic for a fixed seed.
///
/// warm_alpha, when given, seeds the dual variables for a prefix of
/// `examples` (missing entries start at zero).
LinearModel train_svm(std::span<const LabeledExample> examples,
                      std::size_t dim, const TrainConfig& cfg,
                      const std::vector<double>* warm_alpha = nullptr);

/// Constant-prediction fallback for single-class training sets. Decision
/// value is +0.5 or -0.5 (majority sign; tie -> positive), strictly inside
/// the margin so margin-based observers never mistake it for a confident fit.
LinearModel majority_model(std::span<const LabeledExample> examples,
                           std::size_t dim);

double decision_value(const LinearModel& model, const SparseBinaryVector& x);

inline bool predict(const LinearModel& model, const SparseBinaryVector& x) {
  return decision_value(model, x) >= 0.0;  // tie -> positive
}

/// sum(alpha) - 0.5 * ||w_aug||^2 with w_aug reconstructed from the duals
/// (bias feature included). Diagnostic; used by tests.
double dual_objective(std::span<const LabeledExample> examples,
                      const LinearModel& model);

}  // namespace alstop

#endif

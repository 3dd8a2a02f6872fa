#include "alstop/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alstop/rng.hpp"

namespace alstop {

namespace {

double sparse_dot(const std::vector<double>& w, const SparseBinaryVector& x) {
  double sum = 0.0;
  for (auto idx : x.indices) sum += w[idx];
  return sum;
}

}  // namespace

LinearModel train_svm(std::span<const LabeledExample> examples,
                      std::size_t dim, const TrainConfig& cfg,
                      const std::vector<double>* warm_alpha) {
  if (examples.empty()) throw std::invalid_argument("empty training set");
  if (cfg.c <= 0.0) throw std::invalid_argument("C must be positive");
  if (cfg.tolerance <= 0.0)
    throw std::invalid_argument("tolerance must be positive");
  if (cfg.max_epochs < 1)
    throw std::invalid_argument("max_epochs must be positive");

  const std::size_t n = examples.size();
  bool has_pos = false, has_neg = false;
  for (const auto& ex : examples) (ex.positive ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw DegenerateLabelsError();

  const double c = cfg.c;
  std::vector<double> w(dim + 1, 0.0);  // slot dim is the always-on bias feature
  std::vector<double> alpha(n, 0.0);
  if (warm_alpha) {
    for (std::size_t i = 0; i < std::min(warm_alpha->size(), n); ++i)
      alpha[i] = std::clamp((*warm_alpha)[i], 0.0, c);
  }

  std::vector<double> qd(n);
  std::vector<signed char> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto idx : examples[i].features.indices)
      if (idx >= dim) throw std::out_of_range("feature index out of range");
    qd[i] = static_cast<double>(examples[i].features.indices.size()) + 1.0;
    y[i] = examples[i].positive ? 1 : -1;
    if (alpha[i] != 0.0) {
      double d = alpha[i] * y[i];
      for (auto idx : examples[i].features.indices) w[idx] += d;
      w[dim] += d;
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed);

  LinearModel model;
  model.c = c;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double max_violation = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      std::size_t i = order[s];
      const auto& x = examples[i].features;
      double g = y[i] * (sparse_dot(w, x) + w[dim]) - 1.0;

      double pg = g;
      if (alpha[i] == 0.0)
        pg = std::min(g, 0.0);
      else if (alpha[i] == c)
        pg = std::max(g, 0.0);
      max_violation = std::max(max_violation, std::fabs(pg));

      if (std::fabs(pg) > 1e-12) {
        double old = alpha[i];
        alpha[i] = std::clamp(old - g / qd[i], 0.0, c);
        double d = (alpha[i] - old) * y[i];
        for (auto idx : x.indices) w[idx] += d;
        w[dim] += d;
      }
    }
    ++model.epochs;

    double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    double w_norm_sq = 0.0;
    for (double v : w) w_norm_sq += v * v;
    model.epoch_objectives.push_back(alpha_sum - 0.5 * w_norm_sq);

    if (max_violation < cfg.tolerance) break;
  }

  model.bias = w[dim];
  w.resize(dim);
  model.weights = std::move(w);
  model.dual_vars = std::move(alpha);
  return model;
}

LinearModel majority_model(std::span<const LabeledExample> examples,
                           std::size_t dim) {
  long long balance = 0;
  for (const auto& ex : examples) balance += ex.positive ? 1 : -1;
  LinearModel model;
  model.weights.assign(dim, 0.0);
  model.bias = balance >= 0 ? 0.5 : -0.5;
  model.majority_fallback = true;
  return model;
}

double decision_value(const LinearModel& model, const SparseBinaryVector& x) {
  double sum = model.bias;
  for (auto idx : x.indices) {
    if (idx >= model.weights.size())
      throw std::out_of_range("feature index out of range");
    sum += model.weights[idx];
  }
  return sum;
}

double dual_objective(std::span<const LabeledExample> examples,
                      const LinearModel& model) {
  if (examples.size() != model.dual_vars.size())
    throw std::invalid_argument("dual variable count does not match examples");
  std::vector<double> w(model.weights.size() + 1, 0.0);
  double alpha_sum = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    double a = model.dual_vars[i];
    alpha_sum += a;
    double d = a * (examples[i].positive ? 1.0 : -1.0);
    for (auto idx : examples[i].features.indices) w[idx] += d;
    w.back() += d;
  }
  double norm_sq = 0.0;
  for (double v : w) norm_sq += v * v;
  return alpha_sum - 0.5 * norm_sq;
}

}  // namespace alstop

#include "alstop/scoring.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace alstop {

std::vector<double> decision_values_serial(
    const LinearModel& model, std::span<const SparseBinaryVector> xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = decision_value(model, xs[i]);
  }
  return out;
}

std::vector<double> decision_values(const LinearModel& model,
                                    std::span<const SparseBinaryVector> xs) {
  std::vector<double> out(xs.size());
  const std::int64_t n = static_cast<std::int64_t>(xs.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        decision_value(model, xs[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<double> decision_values_serial(
    const LinearModel& model, std::span<const LabeledExample> examples,
    std::span<const std::int32_t> positions) {
  std::vector<double> out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out[i] = decision_value(model,
                            examples[static_cast<std::size_t>(positions[i])].features);
  }
  return out;
}

std::vector<double> decision_values(const LinearModel& model,
                                    std::span<const LabeledExample> examples,
                                    std::span<const std::int32_t> positions) {
  std::vector<double> out(positions.size());
  const std::int64_t n = static_cast<std::int64_t>(positions.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto pos = static_cast<std::size_t>(positions[static_cast<std::size_t>(i)]);
    out[static_cast<std::size_t>(i)] = decision_value(model, examples[pos].features);
  }
  return out;
}

LabelVector labels_from_values(std::span<const double> values) {
  LabelVector out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = values[i] >= 0.0 ? 1 : 0;
  }
  return out;
}

AbsSummary abs_summary(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("abs_summary of empty span");
  }
  AbsSummary s;
  s.min = std::abs(values[0]);
  double sum = 0.0;
  // Serial reduction: summation order must not depend on thread count.
  for (double v : values) {
    const double a = std::abs(v);
    if (a < s.min) s.min = a;
    sum += a;
  }
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

double mean_abs(std::span<const double> values) {
  return abs_summary(values).mean;
}

}  // namespace alstop

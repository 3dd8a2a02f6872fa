#ifndef ALSTOP_SCORING_HPP
#define ALSTOP_SCORING_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "alstop/svm.hpp"
#include "alstop/types.hpp"

namespace alstop {

// Batch scoring is the hot inner loop of every simulation round: one dot
// product per pool document. The OpenMP kernel computes each element
// independently, so its output is identical to the serial reference for any
// thread count. The serial variant is the testing baseline and the
// bench_scoring tool compares the two.

std::vector<double> decision_values_serial(
    const LinearModel& model, std::span<const SparseBinaryVector> xs);

std::vector<double> decision_values(const LinearModel& model,
                                    std::span<const SparseBinaryVector> xs);

// Gather variants: score examples[positions[i]] without copying features.
std::vector<double> decision_values_serial(
    const LinearModel& model, std::span<const LabeledExample> examples,
    std::span<const std::int32_t> positions);

std::vector<double> decision_values(const LinearModel& model,
                                    std::span<const LabeledExample> examples,
                                    std::span<const std::int32_t> positions);

LabelVector labels_from_values(std::span<const double> values);

struct AbsSummary {
  double min = 0.0;
  double mean = 0.0;
};

/// min and mean of |v| over values; values must be non-empty.
AbsSummary abs_summary(std::span<const double> values);

double mean_abs(std::span<const double> values);

}  // namespace alstop

#endif

#ifndef ALSTOP_EVAL_HPP
#define ALSTOP_EVAL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "alstop/types.hpp"

namespace alstop {

struct ScorePair {
  LabelVector predictions;
  LabelVector gold;
};

// F1 on the positive class. Degenerate conventions: a precision or recall
// whose denominator is zero counts as 0, F = 0 when P+R = 0, and F = 1 when
// there are neither gold nor predicted positives (vacuously perfect).
double f_measure(const ScorePair& pair, std::uint8_t positive = 1);

double accuracy(const ScorePair& pair);

enum class SignificanceTest {
  paired_t,
  wilcoxon_signed_rank,
};

/// Regularized incomplete beta function I_x(a, b); a, b > 0; x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// Two-tailed paired t-test. All-zero differences return 1.0; zero variance
// with a non-zero mean difference returns 0.0.
double paired_t_p_value(std::span<const double> a, std::span<const double> b);

// Two-tailed Wilcoxon signed-rank test with midranks for ties. Exact
// enumeration of sign assignments up to 20 non-zero differences, normal
// approximation with tie correction beyond that.
double wilcoxon_signed_rank_p_value(std::span<const double> a,
                                    std::span<const double> b);

double paired_significance(std::span<const double> a,
                           std::span<const double> b,
                           SignificanceTest test = SignificanceTest::paired_t);

// One stopping outcome for one (dataset row, cell) pair. `cell` is the
// pairing unit for significance testing: a category for datasets evaluated
// across categories, a fold id for cross-validated ones. The pseudo-criterion
// "all" carries the exhaustion endpoint.
struct StopObservation {
  std::string dataset;
  std::string cell;
  std::string criterion;
  double annotations = 0.0;
  double f = 0.0;
};

struct TableCell {
  double mean_annotations = 0.0;
  double mean_f = 0.0;
  // Flags are vs the SP column, tested pairwise over cells. SP itself and
  // the "all" column carry no flag.
  bool annotations_significant = false;
  bool f_significant = false;
};

struct ResultTable {
  std::vector<std::string> criteria;  // column order; "all" last when present
  std::vector<std::string> datasets;  // row order
  std::vector<std::vector<TableCell>> cells;  // [dataset][criterion]
  std::vector<TableCell> macro;               // aligned with criteria
};

// Aggregates per-cell stopping outcomes into the report table: per-dataset
// means over cells, an unweighted macro-average row, and significance flags
// vs SP (per dataset paired over cells; macro row paired over dataset
// means). Fewer than two pairs leaves a flag false. SP must be present for
// every dataset.
ResultTable aggregate_table(std::span<const StopObservation> observations,
                            SignificanceTest test = SignificanceTest::paired_t,
                            double alpha = 0.05);

// Renderings display F scaled by 100 with two decimals and annotations with
// one decimal; significant entries carry a '*' suffix. Raw values live in
// the per-run stops files.
std::string render_table_csv(const ResultTable& table);
std::string render_table_text(const ResultTable& table);

}  // namespace alstop

#endif

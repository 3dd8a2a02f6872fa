#include "alstop/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace alstop {

namespace {

void check_pair(const ScorePair& pair) {
  if (pair.predictions.empty() || pair.gold.empty()) {
    throw std::invalid_argument("empty score vectors");
  }
  if (pair.predictions.size() != pair.gold.size()) {
    throw std::invalid_argument("prediction/gold length mismatch");
  }
}

}  // namespace

double f_measure(const ScorePair& pair, std::uint8_t positive) {
  check_pair(pair);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pair.gold.size(); ++i) {
    const bool p = pair.predictions[i] == positive;
    const bool g = pair.gold[i] == positive;
    if (p && g) ++tp;
    else if (p) ++fp;
    else if (g) ++fn;
  }
  if (tp + fp + fn == 0) return 1.0;  // no gold and no predicted positives
  const double precision =
      (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall =
      (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double accuracy(const ScorePair& pair) {
  check_pair(pair);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pair.gold.size(); ++i) {
    if (pair.predictions[i] == pair.gold[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pair.gold.size());
}

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

std::vector<double> paired_diffs(std::span<const double> a,
                                 std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("paired samples differ in length");
  }
  if (a.size() < 2) {
    throw std::invalid_argument("paired test needs at least 2 pairs");
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("beta parameters must be positive");
  }
  if (x < 0.0 || x > 1.0) {
    throw std::invalid_argument("beta argument outside [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double paired_t_p_value(std::span<const double> a, std::span<const double> b) {
  const std::vector<double> d = paired_diffs(a, b);
  const double n = static_cast<double>(d.size());
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double var = ss / (n - 1.0);
  if (var == 0.0) {
    return mean == 0.0 ? 1.0 : 0.0;
  }
  const double t = mean / std::sqrt(var / n);
  const double df = n - 1.0;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double wilcoxon_signed_rank_p_value(std::span<const double> a,
                                    std::span<const double> b) {
  const std::vector<double> d = paired_diffs(a, b);
  std::vector<double> nonzero;
  for (double v : d) {
    if (v != 0.0) nonzero.push_back(v);
  }
  const std::size_t m = nonzero.size();
  if (m == 0) return 1.0;

  // Midranks of |d|.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(nonzero[i]) < std::abs(nonzero[j]);
  });
  std::vector<double> rank(m);
  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m && std::abs(nonzero[order[j + 1]]) ==
                            std::abs(nonzero[order[i]])) {
      ++j;
    }
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }

  double t_plus = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (nonzero[k] > 0.0) t_plus += rank[k];
  }
  const double total = static_cast<double>(m) * static_cast<double>(m + 1) / 2.0;
  const double t_obs = std::min(t_plus, total - t_plus);

  if (m <= 20) {
    // Exact null: every sign assignment equally likely. Midranks are
    // half-integers, so the sums below are exact in double.
    const std::uint64_t count = 1ull << m;
    std::uint64_t at_most = 0;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      double tp = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        if (mask & (1ull << k)) tp += rank[k];
      }
      if (std::min(tp, total - tp) <= t_obs + 1e-12) ++at_most;
    }
    return static_cast<double>(at_most) / static_cast<double>(count);
  }

  const double n = static_cast<double>(m);
  double tie_term = 0.0;
  i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m && std::abs(nonzero[order[j + 1]]) ==
                            std::abs(nonzero[order[i]])) {
      ++j;
    }
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double mu = n * (n + 1.0) / 4.0;
  const double sigma2 = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (sigma2 <= 0.0) return 1.0;
  const double z = (t_obs - mu + 0.5) / std::sqrt(sigma2);  // continuity corr.
  const double one_tail = 0.5 * std::erfc(-z / std::sqrt(2.0));  // P(T <= t_obs)
  return std::min(1.0, 2.0 * one_tail);
}

double paired_significance(std::span<const double> a,
                           std::span<const double> b, SignificanceTest test) {
  switch (test) {
    case SignificanceTest::paired_t:
      return paired_t_p_value(a, b);
    case SignificanceTest::wilcoxon_signed_rank:
      return wilcoxon_signed_rank_p_value(a, b);
  }
  throw std::logic_error("unknown significance test");
}

namespace {

struct CellSamples {
  // Parallel, sorted by cell id so pairing is deterministic.
  std::vector<std::string> cell_ids;
  std::vector<double> annotations;
  std::vector<double> f;
};

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

bool differs_significantly(const std::vector<double>& a,
                           const std::vector<double>& b,
                           SignificanceTest test, double alpha) {
  if (a.size() < 2 || a.size() != b.size()) return false;
  return paired_significance(a, b, test) < alpha;
}

std::string format_value(double v, int decimals, bool starred) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (starred) s += '*';
  return s;
}

}  // namespace

ResultTable aggregate_table(std::span<const StopObservation> observations,
                            SignificanceTest test, double alpha) {
  if (observations.empty()) {
    throw std::invalid_argument("no stop observations to aggregate");
  }

  ResultTable table;
  std::map<std::pair<std::string, std::string>, CellSamples> groups;
  for (const StopObservation& obs : observations) {
    if (std::find(table.datasets.begin(), table.datasets.end(), obs.dataset) ==
        table.datasets.end()) {
      table.datasets.push_back(obs.dataset);
    }
    if (obs.criterion != "all" &&
        std::find(table.criteria.begin(), table.criteria.end(),
                  obs.criterion) == table.criteria.end()) {
      table.criteria.push_back(obs.criterion);
    }
    CellSamples& g = groups[{obs.dataset, obs.criterion}];
    g.cell_ids.push_back(obs.cell);
    g.annotations.push_back(obs.annotations);
    g.f.push_back(obs.f);
  }
  const bool has_all = std::any_of(
      observations.begin(), observations.end(),
      [](const StopObservation& o) { return o.criterion == "all"; });
  if (has_all) table.criteria.push_back("all");

  for (auto& [key, g] : groups) {
    std::vector<std::size_t> order(g.cell_ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return g.cell_ids[x] < g.cell_ids[y];
    });
    CellSamples sorted;
    for (std::size_t idx : order) {
      sorted.cell_ids.push_back(g.cell_ids[idx]);
      sorted.annotations.push_back(g.annotations[idx]);
      sorted.f.push_back(g.f[idx]);
    }
    g = std::move(sorted);
  }

  for (const std::string& ds : table.datasets) {
    if (!groups.contains({ds, "sp"})) {
      throw std::runtime_error("missing SP runs for dataset '" + ds +
                               "' (SP is the significance reference)");
    }
  }

  table.cells.resize(table.datasets.size());
  for (std::size_t di = 0; di < table.datasets.size(); ++di) {
    const std::string& ds = table.datasets[di];
    const CellSamples& sp = groups.at({ds, "sp"});
    table.cells[di].resize(table.criteria.size());
    for (std::size_t ci = 0; ci < table.criteria.size(); ++ci) {
      const std::string& crit = table.criteria[ci];
      const auto it = groups.find({ds, crit});
      if (it == groups.end()) {
        throw std::runtime_error("no runs for dataset '" + ds +
                                 "', criterion '" + crit + "'");
      }
      const CellSamples& g = it->second;
      TableCell& cell = table.cells[di][ci];
      cell.mean_annotations = mean_of(g.annotations);
      cell.mean_f = mean_of(g.f);
      if (crit != "sp" && crit != "all") {
        if (g.cell_ids != sp.cell_ids) {
          throw std::runtime_error("cells for criterion '" + crit +
                                   "' do not match SP cells in dataset '" +
                                   ds + "'");
        }
        cell.annotations_significant =
            differs_significantly(g.annotations, sp.annotations, test, alpha);
        cell.f_significant = differs_significantly(g.f, sp.f, test, alpha);
      }
    }
  }

  // Macro row: unweighted mean of dataset means; significance paired over
  // the dataset means against the SP column.
  table.macro.resize(table.criteria.size());
  std::size_t sp_index = 0;
  for (std::size_t ci = 0; ci < table.criteria.size(); ++ci) {
    if (table.criteria[ci] == "sp") sp_index = ci;
  }
  for (std::size_t ci = 0; ci < table.criteria.size(); ++ci) {
    std::vector<double> ann, f, sp_ann, sp_f;
    for (std::size_t di = 0; di < table.datasets.size(); ++di) {
      ann.push_back(table.cells[di][ci].mean_annotations);
      f.push_back(table.cells[di][ci].mean_f);
      sp_ann.push_back(table.cells[di][sp_index].mean_annotations);
      sp_f.push_back(table.cells[di][sp_index].mean_f);
    }
    TableCell& cell = table.macro[ci];
    cell.mean_annotations = mean_of(ann);
    cell.mean_f = mean_of(f);
    const std::string& crit = table.criteria[ci];
    if (crit != "sp" && crit != "all") {
      cell.annotations_significant =
          differs_significantly(ann, sp_ann, test, alpha);
      cell.f_significant = differs_significantly(f, sp_f, test, alpha);
    }
  }
  return table;
}

namespace {

std::vector<std::vector<std::string>> table_rows(const ResultTable& table) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"dataset", "measure"};
  header.insert(header.end(), table.criteria.begin(), table.criteria.end());
  rows.push_back(std::move(header));
  auto emit = [&](const std::string& name,
                  const std::vector<TableCell>& cells) {
    std::vector<std::string> ann{name, "annotations"};
    std::vector<std::string> f{name, "f"};
    for (const TableCell& c : cells) {
      ann.push_back(format_value(c.mean_annotations, 1,
                                 c.annotations_significant));
      f.push_back(format_value(c.mean_f * 100.0, 2, c.f_significant));
    }
    rows.push_back(std::move(ann));
    rows.push_back(std::move(f));
  };
  for (std::size_t di = 0; di < table.datasets.size(); ++di) {
    emit(table.datasets[di], table.cells[di]);
  }
  emit("average", table.macro);
  return rows;
}

}  // namespace

std::string render_table_csv(const ResultTable& table) {
  std::ostringstream out;
  for (const auto& row : table_rows(table)) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  return out.str();
}

std::string render_table_text(const ResultTable& table) {
  const auto rows = table_rows(table);
  std::vector<std::size_t> widths(rows[0].size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      widths[i] = std::max(widths[i], row[i].size());
    }
  }
  std::ostringstream out;
  auto rule = [&] {
    for (std::size_t i = 0; i < widths.size(); ++i) {
      out << '+' << std::string(widths[i] + 2, '-');
    }
    out << "+\n";
  };
  rule();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << '|';
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      out << ' ' << rows[r][i]
          << std::string(widths[i] - rows[r][i].size(), ' ') << " |";
    }
    out << '\n';
    // Group the annotation/F line pair per dataset.
    if (r == 0 || r % 2 == 0) rule();
  }
  out << "* = significantly different from sp\n";
  return out.str();
}

}  // namespace alstop

// Compares the serial reference scorer against the OpenMP kernel on a
// synthetic pool, checking bitwise-equal output while timing both.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "alstop/rng.hpp"
#include "alstop/scoring.hpp"
#include "alstop/svm.hpp"
#include "alstop/types.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

int main() {
  constexpr std::size_t kDim = 20000;
  constexpr std::size_t kDocs = 50000;
  constexpr std::size_t kTokens = 80;
  constexpr int kRepeats = 5;

  alstop::Rng rng(2026);
  alstop::LinearModel model;
  model.weights.resize(kDim);
  for (double& w : model.weights) {
    w = (static_cast<double>(rng.below(2001)) - 1000.0) / 1000.0;
  }
  model.bias = 0.25;

  std::vector<alstop::SparseBinaryVector> docs(kDocs);
  for (auto& doc : docs) {
    for (std::size_t t = 0; t < kTokens; ++t) {
      doc.indices.push_back(static_cast<std::uint32_t>(rng.below(kDim)));
    }
    std::sort(doc.indices.begin(), doc.indices.end());
    doc.indices.erase(std::unique(doc.indices.begin(), doc.indices.end()),
                      doc.indices.end());
  }

  std::vector<double> serial, parallel;
  double serial_time = 0.0, parallel_time = 0.0;
  for (int r = 0; r < kRepeats; ++r) {
    auto t0 = Clock::now();
    serial = alstop::decision_values_serial(model, docs);
    serial_time += seconds_since(t0);

    t0 = Clock::now();
    parallel = alstop::decision_values(model, docs);
    parallel_time += seconds_since(t0);
  }

  bool identical = serial.size() == parallel.size();
  for (std::size_t i = 0; identical && i < serial.size(); ++i) {
    identical = serial[i] == parallel[i];
  }

  std::printf("pool scoring, %zu docs x %zu dims, %d repeats\n", kDocs, kDim,
              kRepeats);
  std::printf("  serial reference: %8.2f ms/pass\n",
              1000.0 * serial_time / kRepeats);
  std::printf("  openmp kernel:    %8.2f ms/pass\n",
              1000.0 * parallel_time / kRepeats);
  std::printf("  speedup: %.2fx, outputs bitwise identical: %s\n",
              serial_time / parallel_time, identical ? "yes" : "NO");
  return identical ? 0 : 1;
}

#ifndef ALSTOP_TYPES_HPP
#define ALSTOP_TYPES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace alstop {

// Sorted set of active feature indices for one document.
struct SparseBinaryVector {
  std::vector<std::uint32_t> indices;  // strictly increasing

  bool operator==(const SparseBinaryVector&) const = default;
};

struct LabeledExample {
  std::string id;
  SparseBinaryVector features;
  bool positive = false;
};

// Binary prediction vector; 1 = positive.
using LabelVector = std::vector<std::uint8_t>;

struct PredefinedSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

struct Vocabulary {
  std::vector<std::string> terms;  // index -> term, lexicographically sorted
  int min_occurrences = 3;
  std::string stopword_list_id = "none";

  std::size_t size() const { return terms.size(); }

  // Index of `term`, or -1 when the term is not in the vocabulary.
  std::int64_t index_of(const std::string& term) const;
};

struct Corpus {
  std::vector<LabeledExample> examples;
  std::string category;
  std::optional<PredefinedSplit> predefined_split;
  std::uint64_t seed = 0;
  Vocabulary vocab;
};

}  // namespace alstop

#endif

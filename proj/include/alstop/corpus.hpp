#ifndef ALSTOP_CORPUS_HPP
#define ALSTOP_CORPUS_HPP

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alstop/types.hpp"

namespace alstop {

struct RawDocument {
  std::string id;
  std::string text;
  bool positive = false;
};

/// One document as it appears on disk, before the binary task is fixed.
struct RawClassDocument {
  std::string id;
  std::string text;
  std::string class_name;
  std::vector<std::string> tokens;  // filled at load time
};

struct RawCorpusData {
  std::vector<RawClassDocument> docs;
  std::vector<std::string> class_names;  // distinct, sorted
};

enum class CorpusFormat { jsonl, dir_per_class };

struct CorpusBuildOptions {
  int min_occurrences = 3;
  std::set<std::string> stopwords;
  std::string stopword_list_id = "none";
};

/// Lowercased alphabetic tokens; any non-letter byte splits.
std::vector<std::string> tokenize(std::string_view text);

/// Terms kept iff corpus-wide token count > min_occurrences and not a stopword;
/// indices assigned in lexicographic term order.
Vocabulary build_vocabulary(const std::vector<RawDocument>& docs,
                            int min_occurrences,
                            const std::set<std::string>& stopwords);
Vocabulary build_vocabulary_from_tokens(
    const std::vector<const std::vector<std::string>*>& docs,
    int min_occurrences, const std::set<std::string>& stopwords);

SparseBinaryVector featurize(const RawDocument& doc, const Vocabulary& vocab);
SparseBinaryVector featurize_tokens(const std::vector<std::string>& tokens,
                                    const Vocabulary& vocab);

/// k disjoint id sets partitioning `ids`; sizes differ by at most one.
std::vector<std::vector<std::string>> make_folds(
    const std::vector<std::string>& ids, int k, std::uint64_t seed);

std::set<std::string> load_stopwords(const std::string& path);

RawCorpusData load_raw_documents(const std::string& path, CorpusFormat format);

/// Vocabulary and features for every document, with the vocabulary counted
/// over `vocab_doc_ids` only (the training portion; never the test side).
Corpus build_feature_corpus(const RawCorpusData& raw,
                            const std::string& positive_category,
                            const std::set<std::string>& vocab_doc_ids,
                            const CorpusBuildOptions& options);

/// One-shot load: reads `path`, binarizes labels one-vs-rest against
/// `positive_category`, builds the vocabulary from the predefined train split
/// when one exists (here: never) or the whole corpus, and featurizes.
Corpus load_corpus(const std::string& path, CorpusFormat format,
                   const std::string& positive_category,
                   const CorpusBuildOptions& options = {});

}  // namespace alstop

#endif

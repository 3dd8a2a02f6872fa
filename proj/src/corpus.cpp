#include "alstop/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "alstop/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace alstop {

std::int64_t Vocabulary::index_of(const std::string& term) const {
  auto it = std::lower_bound(terms.begin(), terms.end(), term);
  if (it == terms.end() || *it != term) return -1;
  return it - terms.begin();
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      cur.push_back(static_cast<char>(c | 0x20));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Vocabulary build_vocabulary_from_tokens(
    const std::vector<const std::vector<std::string>*>& docs,
    int min_occurrences, const std::set<std::string>& stopwords) {
  if (docs.empty()) throw std::invalid_argument("empty corpus");
  std::unordered_map<std::string, long long> counts;
  for (const auto* doc : docs)
    for (const auto& term : *doc) ++counts[term];

  Vocabulary vocab;
  vocab.min_occurrences = min_occurrences;
  for (const auto& [term, count] : counts) {
    if (count > min_occurrences && !stopwords.contains(term))
      vocab.terms.push_back(term);
  }
  std::sort(vocab.terms.begin(), vocab.terms.end());
  return vocab;
}

Vocabulary build_vocabulary(const std::vector<RawDocument>& docs,
                            int min_occurrences,
                            const std::set<std::string>& stopwords) {
  if (docs.empty()) throw std::invalid_argument("empty corpus");
  if (min_occurrences < 0)
    throw std::invalid_argument("min_occurrences must be >= 0");
  std::vector<std::vector<std::string>> token_lists;
  token_lists.reserve(docs.size());
  for (const auto& doc : docs) token_lists.push_back(tokenize(doc.text));
  std::vector<const std::vector<std::string>*> ptrs;
  ptrs.reserve(token_lists.size());
  for (const auto& t : token_lists) ptrs.push_back(&t);
  return build_vocabulary_from_tokens(ptrs, min_occurrences, stopwords);
}

SparseBinaryVector featurize_tokens(const std::vector<std::string>& tokens,
                                    const Vocabulary& vocab) {
  std::vector<std::uint32_t> indices;
  for (const auto& term : tokens) {
    auto idx = vocab.index_of(term);
    if (idx >= 0) indices.push_back(static_cast<std::uint32_t>(idx));
  }
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return SparseBinaryVector{std::move(indices)};
}

SparseBinaryVector featurize(const RawDocument& doc, const Vocabulary& vocab) {
  if (vocab.terms.empty()) throw std::invalid_argument("empty vocabulary");
  return featurize_tokens(tokenize(doc.text), vocab);
}

std::vector<std::vector<std::string>> make_folds(
    const std::vector<std::string>& ids, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("fold count must be >= 2");
  if (ids.size() < static_cast<std::size_t>(k))
    throw std::invalid_argument("too few examples for k folds");

  std::vector<std::string> order = ids;
  std::sort(order.begin(), order.end());  // canonical before the seeded shuffle
  Rng rng(seed);
  rng.shuffle(order);

  std::size_t n = order.size();
  std::size_t base = n / k;
  std::size_t extra = n % k;
  std::vector<std::vector<std::string>> folds(k);
  std::size_t pos = 0;
  for (int f = 0; f < k; ++f) {
    std::size_t sz = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    folds[f].assign(order.begin() + pos, order.begin() + pos + sz);
    pos += sz;
  }
  return folds;
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword file: " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    // trim whitespace and lowercase; one term per line
    auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r\n");
    std::string term = line.substr(first, last - first + 1);
    for (auto& c : term)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c | 0x20);
    words.insert(term);
  }
  return words;
}

namespace {

// Invalid UTF-8 sequences become U+FFFD; the tokenizer only keeps ASCII
// letters, so replacement only affects stored text.
std::string sanitize_utf8(std::string_view bytes) {
  static const std::string kReplacement = "\xef\xbf\xbd";
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    unsigned char c = bytes[i];
    std::size_t len = 0;
    if (c < 0x80)
      len = 1;
    else if ((c & 0xe0) == 0xc0)
      len = 2;
    else if ((c & 0xf0) == 0xe0)
      len = 3;
    else if ((c & 0xf8) == 0xf0)
      len = 4;
    bool ok = len > 0 && i + len <= bytes.size();
    for (std::size_t j = 1; ok && j < len; ++j)
      ok = (static_cast<unsigned char>(bytes[i + j]) & 0xc0) == 0x80;
    if (ok) {
      out.append(bytes.substr(i, len));
      i += len;
    } else {
      out.append(kReplacement);
      ++i;
    }
  }
  return out;
}

RawCorpusData load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  RawCorpusData data;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = [&] {
      return path + ":" + std::to_string(line_no);
    };
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(where() + ": malformed JSON record: " + e.what());
    }
    if (!rec.is_object())
      throw std::runtime_error(where() + ": record is not an object");
    for (const char* key : {"id", "text", "label"}) {
      if (!rec.contains(key) || !rec[key].is_string())
        throw std::runtime_error(where() + ": missing or non-string field \"" +
                                 key + "\"");
    }
    RawClassDocument doc;
    doc.id = rec["id"].get<std::string>();
    doc.text = rec["text"].get<std::string>();
    doc.class_name = rec["label"].get<std::string>();
    if (doc.id.empty()) throw std::runtime_error(where() + ": empty id");
    if (!seen_ids.insert(doc.id).second)
      throw std::runtime_error(where() + ": duplicate id \"" + doc.id + "\"");
    doc.tokens = tokenize(doc.text);
    data.docs.push_back(std::move(doc));
  }
  if (data.docs.empty()) throw std::runtime_error("empty corpus: " + path);
  return data;
}

RawCorpusData load_dir_per_class(const std::string& path) {
  if (!fs::is_directory(path))
    throw std::runtime_error("not a directory: " + path);
  RawCorpusData data;
  std::vector<std::string> class_dirs;
  for (const auto& entry : fs::directory_iterator(path))
    if (entry.is_directory()) class_dirs.push_back(entry.path().filename());
  std::sort(class_dirs.begin(), class_dirs.end());

  for (const auto& cls : class_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry :
         fs::recursive_directory_iterator(fs::path(path) / cls))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::ifstream in(file, std::ios::binary);
      if (!in) throw std::runtime_error("cannot read file: " + file.string());
      std::ostringstream buf;
      buf << in.rdbuf();
      RawClassDocument doc;
      doc.id = fs::relative(file, path).generic_string();
      doc.text = sanitize_utf8(buf.str());
      doc.class_name = cls;
      doc.tokens = tokenize(doc.text);
      data.docs.push_back(std::move(doc));
    }
  }
  if (data.docs.empty()) throw std::runtime_error("empty corpus: " + path);
  return data;
}

}  // namespace

RawCorpusData load_raw_documents(const std::string& path, CorpusFormat format) {
  RawCorpusData data = format == CorpusFormat::jsonl ? load_jsonl(path)
                                                     : load_dir_per_class(path);
  std::set<std::string> classes;
  for (const auto& doc : data.docs) classes.insert(doc.class_name);
  data.class_names.assign(classes.begin(), classes.end());
  return data;
}

Corpus build_feature_corpus(const RawCorpusData& raw,
                            const std::string& positive_category,
                            const std::set<std::string>& vocab_doc_ids,
                            const CorpusBuildOptions& options) {
  std::vector<const std::vector<std::string>*> vocab_docs;
  for (const auto& doc : raw.docs)
    if (vocab_doc_ids.contains(doc.id)) vocab_docs.push_back(&doc.tokens);
  Vocabulary vocab = build_vocabulary_from_tokens(
      vocab_docs, options.min_occurrences, options.stopwords);
  vocab.stopword_list_id = options.stopword_list_id;

  Corpus corpus;
  corpus.category = positive_category;
  corpus.vocab = std::move(vocab);
  corpus.examples.reserve(raw.docs.size());
  for (const auto& doc : raw.docs) {
    LabeledExample ex;
    ex.id = doc.id;
    ex.features = featurize_tokens(doc.tokens, corpus.vocab);
    ex.positive = doc.class_name == positive_category;
    corpus.examples.push_back(std::move(ex));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path, CorpusFormat format,
                   const std::string& positive_category,
                   const CorpusBuildOptions& options) {
  RawCorpusData raw = load_raw_documents(path, format);
  std::set<std::string> all_ids;
  for (const auto& doc : raw.docs) all_ids.insert(doc.id);
  return build_feature_corpus(raw, positive_category, all_ids, options);
}

}  // namespace alstop

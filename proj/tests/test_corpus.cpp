#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "alstop/corpus.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace alstop;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("alstop_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& body) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << body;
}

}  // namespace

TEST_CASE("tokenize keeps lowercased ASCII letter runs") {
  CHECK(tokenize("The cat, the CAT!") ==
        std::vector<std::string>{"the", "cat", "the", "cat"});
  CHECK(tokenize("it's the 2nd-best") ==
        std::vector<std::string>{"it", "s", "the", "nd", "best"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("123 456") == std::vector<std::string>{});
  CHECK(tokenize("a") == std::vector<std::string>{"a"});
  // Non-ASCII bytes act as separators.
  CHECK(tokenize("caf\xc3\xa9 bar") ==
        std::vector<std::string>{"caf", "bar"});
}

TEST_CASE("vocabulary keeps terms occurring strictly more than the floor") {
  std::vector<RawDocument> docs = {
      {"d1", "apple apple banana cherry", false},
      {"d2", "apple banana the the", false},
      {"d3", "apple cherry", false},
  };
  // counts: apple=4 banana=2 cherry=2 the=2
  auto vocab = build_vocabulary(docs, 3, {});
  CHECK(vocab.terms == std::vector<std::string>{"apple"});

  auto vocab2 = build_vocabulary(docs, 1, {"the"});
  CHECK(vocab2.terms ==
        std::vector<std::string>{"apple", "banana", "cherry"});
  CHECK(vocab2.index_of("apple") == 0);
  CHECK(vocab2.index_of("cherry") == 2);
  CHECK(vocab2.index_of("the") == -1);
  CHECK(vocab2.index_of("zebra") == -1);

  CHECK_THROWS_AS(build_vocabulary({}, 3, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_vocabulary(docs, -1, {}), std::invalid_argument);
}

TEST_CASE("featurize yields sorted distinct known-term indices") {
  std::vector<RawDocument> docs = {
      {"d1", "b b a a c c", false},
      {"d2", "c b a c b a", false},
  };
  auto vocab = build_vocabulary(docs, 1, {});
  REQUIRE(vocab.terms == std::vector<std::string>{"a", "b", "c"});

  auto vec = featurize({"q", "c a zzz c a", false}, vocab);
  CHECK(vec.indices == std::vector<std::uint32_t>{0, 2});

  auto none = featurize({"q", "zzz yyy", false}, vocab);
  CHECK(none.indices.empty());

  Vocabulary empty;
  CHECK_THROWS_AS(featurize({"q", "a", false}, empty), std::invalid_argument);
}

TEST_CASE("make_folds partitions with near-equal sizes") {
  std::vector<std::string> ids;
  for (int i = 0; i < 23; ++i) ids.push_back("id" + std::to_string(i));

  auto folds = make_folds(ids, 10, 7);
  REQUIRE(folds.size() == 10);
  // 23 = 10*2 + 3: first three folds get the extra element.
  for (int f = 0; f < 10; ++f) CHECK(folds[f].size() == (f < 3 ? 3u : 2u));

  std::set<std::string> seen;
  for (const auto& fold : folds)
    for (const auto& id : fold) CHECK(seen.insert(id).second);
  CHECK(seen.size() == ids.size());

  // Input order is irrelevant; the seed decides the assignment.
  std::vector<std::string> reversed(ids.rbegin(), ids.rend());
  CHECK(make_folds(reversed, 10, 7) == folds);
  CHECK(make_folds(ids, 10, 7) == folds);
  CHECK(make_folds(ids, 10, 8) != folds);

  CHECK_THROWS_AS(make_folds(ids, 1, 7), std::invalid_argument);
  std::vector<std::string> tiny = {"a", "b"};
  CHECK_THROWS_AS(make_folds(tiny, 3, 7), std::invalid_argument);
}

TEST_CASE("load_stopwords trims, lowercases, and skips blanks") {
  auto dir = scratch_dir("stopwords");
  write_text(dir / "stop.txt", "  The \n\nAND\nof\r\n\t\n");
  auto words = load_stopwords((dir / "stop.txt").string());
  CHECK(words == std::set<std::string>{"the", "and", "of"});
  CHECK_THROWS_AS(load_stopwords((dir / "missing.txt").string()),
                  std::runtime_error);
}

TEST_CASE("jsonl loader reads records and reports bad lines by position") {
  auto dir = scratch_dir("jsonl");
  write_text(dir / "ok.jsonl",
             "{\"id\":\"a\",\"text\":\"one two\",\"label\":\"spam\"}\n"
             "\n"
             "{\"id\":\"b\",\"text\":\"three\",\"label\":\"ham\"}\n");
  auto data = load_raw_documents((dir / "ok.jsonl").string(),
                                 CorpusFormat::jsonl);
  REQUIRE(data.docs.size() == 2);
  CHECK(data.docs[0].id == "a");
  CHECK(data.docs[0].tokens == std::vector<std::string>{"one", "two"});
  CHECK(data.docs[1].class_name == "ham");
  CHECK(data.class_names == std::vector<std::string>{"ham", "spam"});

  write_text(dir / "bad.jsonl", "{\"id\":\"a\",\"text\":\"x\",\"label\":\"y\"}\nnot json\n");
  CHECK_THROWS_WITH_AS(
      load_raw_documents((dir / "bad.jsonl").string(), CorpusFormat::jsonl),
      doctest::Contains("bad.jsonl:2"), std::runtime_error);

  write_text(dir / "dup.jsonl",
             "{\"id\":\"a\",\"text\":\"x\",\"label\":\"y\"}\n"
             "{\"id\":\"a\",\"text\":\"z\",\"label\":\"y\"}\n");
  CHECK_THROWS_WITH_AS(
      load_raw_documents((dir / "dup.jsonl").string(), CorpusFormat::jsonl),
      doctest::Contains("duplicate id"), std::runtime_error);

  write_text(dir / "missing.jsonl", "{\"id\":\"a\",\"text\":\"x\"}\n");
  CHECK_THROWS_WITH_AS(
      load_raw_documents((dir / "missing.jsonl").string(), CorpusFormat::jsonl),
      doctest::Contains("label"), std::runtime_error);

  write_text(dir / "numlabel.jsonl", "{\"id\":\"a\",\"text\":\"x\",\"label\":3}\n");
  CHECK_THROWS_AS(load_raw_documents((dir / "numlabel.jsonl").string(),
                                     CorpusFormat::jsonl),
                  std::runtime_error);

  write_text(dir / "empty.jsonl", "\n\n");
  CHECK_THROWS_AS(
      load_raw_documents((dir / "empty.jsonl").string(), CorpusFormat::jsonl),
      std::runtime_error);
}

TEST_CASE("directory loader walks class folders in sorted order") {
  auto dir = scratch_dir("dirs");
  write_text(dir / "spam" / "002.txt", "buy now");
  write_text(dir / "spam" / "001.txt", "cheap pills");
  write_text(dir / "ham" / "sub" / "a.txt", "meeting at noon");
  // Invalid UTF-8 byte gets replaced, not dropped.
  write_text(dir / "ham" / "b.txt", std::string("hello \xff world"));

  auto data = load_raw_documents(dir.string(), CorpusFormat::dir_per_class);
  REQUIRE(data.docs.size() == 4);
  CHECK(data.class_names == std::vector<std::string>{"ham", "spam"});
  CHECK(data.docs[0].id == "ham/b.txt");
  CHECK(data.docs[1].id == "ham/sub/a.txt");
  CHECK(data.docs[2].id == "spam/001.txt");
  CHECK(data.docs[3].id == "spam/002.txt");
  CHECK(data.docs[0].tokens == std::vector<std::string>{"hello", "world"});
  CHECK(data.docs[0].text.find("\xef\xbf\xbd") != std::string::npos);

  CHECK_THROWS_AS(load_raw_documents((dir / "nope").string(),
                                     CorpusFormat::dir_per_class),
                  std::runtime_error);
}

TEST_CASE("feature corpus counts vocabulary on the chosen side only") {
  RawCorpusData raw;
  raw.class_names = {"ham", "spam"};
  auto add = [&](const std::string& id, const std::string& text,
                 const std::string& cls) {
    RawClassDocument doc;
    doc.id = id;
    doc.text = text;
    doc.class_name = cls;
    doc.tokens = tokenize(text);
    raw.docs.push_back(doc);
  };
  add("t1", "alpha alpha beta", "spam");
  add("t2", "alpha beta beta", "ham");
  add("x1", "gamma gamma gamma gamma", "spam");  // test side only

  CorpusBuildOptions opts;
  opts.min_occurrences = 1;
  auto corpus = build_feature_corpus(raw, "spam", {"t1", "t2"}, opts);

  // gamma is frequent but lives outside the vocabulary side.
  CHECK(corpus.vocab.terms == std::vector<std::string>{"alpha", "beta"});
  REQUIRE(corpus.examples.size() == 3);
  CHECK(corpus.examples[0].positive);
  CHECK_FALSE(corpus.examples[1].positive);
  CHECK(corpus.examples[2].positive);
  CHECK(corpus.examples[2].features.indices.empty());
  CHECK(corpus.category == "spam");
}

TEST_CASE("one-shot load builds the vocabulary over every document") {
  auto dir = scratch_dir("oneshot");
  write_text(dir / "c.jsonl",
             "{\"id\":\"a\",\"text\":\"red red blue\",\"label\":\"warm\"}\n"
             "{\"id\":\"b\",\"text\":\"red blue blue\",\"label\":\"cool\"}\n");
  CorpusBuildOptions opts;
  opts.min_occurrences = 2;
  auto corpus =
      load_corpus((dir / "c.jsonl").string(), CorpusFormat::jsonl, "warm", opts);
  CHECK(corpus.vocab.terms == std::vector<std::string>{"blue", "red"});
  REQUIRE(corpus.examples.size() == 2);
  CHECK(corpus.examples[0].positive);
  CHECK_FALSE(corpus.examples[1].positive);
  CHECK_FALSE(corpus.predefined_split.has_value());
}

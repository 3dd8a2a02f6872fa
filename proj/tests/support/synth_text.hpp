#ifndef TESTS_SUPPORT_SYNTH_TEXT_HPP
#define TESTS_SUPPORT_SYNTH_TEXT_HPP

// Seeded two-class text corpus generator. Each document mixes tokens from
// its own class pool, the opposite pool (label noise), and a shared pool;
// the permille knobs control how separable the task is and therefore how
// fast the simulated learning curve rises.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alstop/corpus.hpp"
#include "alstop/rng.hpp"

namespace synth {

struct SynthSpec {
  std::size_t docs = 1000;
  std::size_t doc_len = 40;
  std::size_t class_words = 150;  // pool size per class
  std::size_t common_words = 700;
  int own_permille = 320;    // P(token drawn from the doc's class pool)
  int other_permille = 80;   // P(token drawn from the opposite class pool)
  int positive_permille = 350;
  std::uint64_t seed = 1;
};

inline std::string word_name(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04zu", prefix, i);
  return buf;
}

inline alstop::RawCorpusData make_corpus(const SynthSpec& spec) {
  std::vector<std::string> pos_pool, neg_pool, common_pool;
  for (std::size_t i = 0; i < spec.class_words; ++i) {
    pos_pool.push_back(word_name("aye", i));
    neg_pool.push_back(word_name("nay", i));
  }
  for (std::size_t i = 0; i < spec.common_words; ++i) {
    common_pool.push_back(word_name("mid", i));
  }

  alstop::Rng rng(spec.seed);
  alstop::RawCorpusData data;
  data.class_names = {"neg", "pos"};
  for (std::size_t d = 0; d < spec.docs; ++d) {
    alstop::RawClassDocument doc;
    char id[16];
    std::snprintf(id, sizeof(id), "d%05zu", d);
    doc.id = id;
    const bool positive =
        rng.below(1000) < static_cast<std::uint64_t>(spec.positive_permille);
    doc.class_name = positive ? "pos" : "neg";
    const auto& own = positive ? pos_pool : neg_pool;
    const auto& other = positive ? neg_pool : pos_pool;
    for (std::size_t t = 0; t < spec.doc_len; ++t) {
      const std::uint64_t roll = rng.below(1000);
      const std::vector<std::string>* pool = &common_pool;
      if (roll < static_cast<std::uint64_t>(spec.own_permille)) {
        pool = &own;
      } else if (roll < static_cast<std::uint64_t>(spec.own_permille +
                                                   spec.other_permille)) {
        pool = &other;
      }
      doc.tokens.push_back((*pool)[rng.below(pool->size())]);
    }
    for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
      if (t) doc.text += ' ';
      doc.text += doc.tokens[t];
    }
    data.docs.push_back(std::move(doc));
  }
  return data;
}

inline std::string to_jsonl(const alstop::RawCorpusData& data) {
  std::string out;
  for (const auto& doc : data.docs) {
    out += "{\"id\":\"" + doc.id + "\",\"text\":\"" + doc.text +
           "\",\"label\":\"" + doc.class_name + "\"}\n";
  }
  return out;
}

inline void write_jsonl(const std::string& path,
                        const alstop::RawCorpusData& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_jsonl(data);
}

}  // namespace synth

#endif

#ifndef ALSTOP_RNG_HPP
#define ALSTOP_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace alstop {

// All randomness in the project flows through these helpers so that runs are
// reproducible bit-for-bit across platforms. std::mt19937_64 has a fully
// specified output sequence; the distributions below avoid
// std::uniform_int_distribution, whose mapping is implementation-defined.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Decorrelated seed for one purpose within a run ("train", "cv", ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t n = 0) {
  return splitmix64(base ^ splitmix64(hash_tag(tag) + 0x9e3779b97f4a7c15ULL * n));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform draw in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // First m elements of a seeded partial Fisher-Yates pass over v.
  template <typename T>
  std::vector<T> sample(std::vector<T> v, std::size_t m) {
    if (m > v.size()) m = v.size();
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t j = i + static_cast<std::size_t>(below(v.size() - i));
      std::swap(v[i], v[j]);
    }
    v.resize(m);
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace alstop

#endif

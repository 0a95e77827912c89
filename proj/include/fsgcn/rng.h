/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn/rng.h
 * \brief Seeded random streams. Every consumer receives an explicit Rng;
 *        there is no global generator.
 */
#ifndef FSGCN_RNG_H_
#define FSGCN_RNG_H_

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fsgcn {

class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}
  explicit Rng(std::seed_seq& seq) : engine_(seq) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), unbiased via rejection. n must be > 0.
  uint64_t uniform_index(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::string state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  void set_state(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
  }

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

/// FNV-1a, used to name independent streams and to hash configs.
inline uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Independent named stream derived from a master seed ("split", "init",
/// "dropout", "triplets", ...). Toggling one consumer never shifts another.
inline Rng derive_stream(uint64_t master_seed, std::string_view name) {
  const uint64_t tag = fnv1a64(name);
  std::seed_seq seq{static_cast<uint32_t>(master_seed),
                    static_cast<uint32_t>(master_seed >> 32),
                    static_cast<uint32_t>(tag), static_cast<uint32_t>(tag >> 32)};
  return Rng(seq);
}

/// Fisher-Yates; the draw sequence is fixed by Rng, not by the standard library.
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = rng.uniform_index(i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace fsgcn

#endif  // FSGCN_RNG_H_

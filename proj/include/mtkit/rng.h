#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mtkit {

// Deterministic RNG used everywhere seeds appear in outputs. std::mt19937_64
// output is fixed by the standard; the bounded/coin/shuffle reductions are
// implemented here so results do not depend on the standard library's
// distribution objects, which are not portable across implementations.
class SeededRng {
 public:
  explicit SeededRng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  bool coin() { return (next() & 1u) != 0; }

  // Uniform in [0, n) via rejection sampling.
  uint64_t bounded(uint64_t n);

  // In-place Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derives an independent stream for a named sub-task, so that e.g. the
  // pair-order coins and the shard shuffle never share state.
  static SeededRng derive(uint64_t seed, std::string_view label);

 private:
  std::mt19937_64 engine_;
};

}  // namespace mtkit

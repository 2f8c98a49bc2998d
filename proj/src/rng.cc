#include "mtkit/rng.h"

namespace mtkit {

uint64_t SeededRng::bounded(uint64_t n) {
  if (n <= 1) return 0;
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

SeededRng SeededRng::derive(uint64_t seed, std::string_view label) {
  // FNV-1a over the label, mixed into the seed.
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return SeededRng(seed ^ h);
}

}  // namespace mtkit

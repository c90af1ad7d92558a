#include "qarg/rng.hpp"

namespace qarg {

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t Rng::next_u64() { return mix64(seed_ ^ mix64(counter_++)); }

uint64_t Rng::next_below(uint64_t n) {
  if (n <= 1) return 0;
  // rejection sampling to avoid modulo bias
  uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n);
  uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

double Rng::next_double() {
  return double(next_u64() >> 11) * 0x1.0p-53;
}

Rng Rng::derive(uint64_t index) const {
  return Rng(mix64(seed_ + 0x632be59bd9b4e019ull * (index + 1)));
}

}  // namespace qarg

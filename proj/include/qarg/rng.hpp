#pragma once

#include <cstdint>
#include <vector>

namespace qarg {

// Counter-based generator: output i is a pure function of (seed, i), so a
// stream can be split by deriving child seeds and replayed from its trace.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), counter_(0) {}

  uint64_t next_u64();
  // uniform in [0, n)
  uint64_t next_below(uint64_t n);
  // uniform in [0, 1)
  double next_double();
  bool next_bit() { return next_u64() >> 63; }

  // Child stream for trial `index`; independent of draws made so far.
  Rng derive(uint64_t index) const;

  uint64_t seed() const { return seed_; }
  uint64_t draws() const { return counter_; }

 private:
  uint64_t seed_;
  uint64_t counter_;
};

// SplitMix64 finalizer; also used to derive child seeds.
uint64_t mix64(uint64_t x);

}  // namespace qarg

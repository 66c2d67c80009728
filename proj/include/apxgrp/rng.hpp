#pragma once

#include <cstdint>

namespace apxgrp {

// xorshift64* — the seeded generator recorded in instances and certificates.
// Bit-identical across platforms; that is the whole point.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  uint64_t next() {
    s_ ^= s_ >> 12;
    s_ ^= s_ << 25;
    s_ ^= s_ >> 27;
    return s_ * 2685821657736338717ull;
  }

  // Unbiased draw from [0, n) by rejection.
  uint64_t below(uint64_t n) {
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

 private:
  uint64_t s_;
};

}  // namespace apxgrp

#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace apxgrp {

// Dense fixed-size bit vector; the membership carrier for every set in the
// library. Word layout is canonical (trailing bits zero), so equality and
// hashing are plain word comparisons.
class DenseBitset {
 public:
  DenseBitset() = default;
  explicit DenseBitset(uint32_t n) : n_(n), w_((n + 63) / 64, 0) {}

  uint32_t size() const { return n_; }

  bool test(uint32_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(uint32_t i) { w_[i >> 6] |= uint64_t(1) << (i & 63); }
  void reset(uint32_t i) { w_[i >> 6] &= ~(uint64_t(1) << (i & 63)); }

  uint32_t count() const {
    uint64_t c = 0;
    for (uint64_t w : w_) c += std::popcount(w);
    return static_cast<uint32_t>(c);
  }

  bool any() const {
    for (uint64_t w : w_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  DenseBitset& operator|=(const DenseBitset& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  DenseBitset& operator&=(const DenseBitset& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  DenseBitset& operator^=(const DenseBitset& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
  }
  // this \ o
  DenseBitset& subtract(const DenseBitset& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
    return *this;
  }

  bool operator==(const DenseBitset& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator!=(const DenseBitset& o) const { return !(*this == o); }

  bool is_subset_of(const DenseBitset& o) const {
    for (size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }

  bool intersects(const DenseBitset& o) const {
    for (size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & o.w_[i]) return true;
    return false;
  }

  uint32_t intersection_count(const DenseBitset& o) const {
    uint64_t c = 0;
    for (size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & o.w_[i]);
    return static_cast<uint32_t>(c);
  }

  // Visit set bits in ascending index order.
  template <typename F>
  void for_each(F&& f) const {
    for (size_t wi = 0; wi < w_.size(); ++wi) {
      uint64_t w = w_[wi];
      while (w) {
        int b = std::countr_zero(w);
        f(static_cast<uint32_t>(wi * 64 + b));
        w &= w - 1;
      }
    }
  }

  // Smallest set index, or size() when empty.
  uint32_t first() const {
    for (size_t wi = 0; wi < w_.size(); ++wi)
      if (w_[wi]) return static_cast<uint32_t>(wi * 64 + std::countr_zero(w_[wi]));
    return n_;
  }

  std::vector<uint32_t> to_vector() const {
    std::vector<uint32_t> v;
    v.reserve(count());
    for_each([&](uint32_t i) { v.push_back(i); });
    return v;
  }

  // FNV-1a over the word array, length-mixed.
  uint64_t hash() const {
    uint64_t h = 14695981039346656037ull;
    auto mix = [&](uint64_t x) {
      for (int i = 0; i < 8; ++i) {
        h ^= (x >> (8 * i)) & 0xff;
        h *= 1099511628211ull;
      }
    };
    mix(n_);
    for (uint64_t w : w_) mix(w);
    return h;
  }

 private:
  uint32_t n_ = 0;
  std::vector<uint64_t> w_;
};

}  // namespace apxgrp

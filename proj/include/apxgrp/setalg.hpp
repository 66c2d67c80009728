#pragma once

#include <atomic>
#include <utility>
#include <vector>

#include "apxgrp/bitset.hpp"
#include "apxgrp/group.hpp"
#include "apxgrp/rational.hpp"

namespace apxgrp {

// A subset of a universe, carried as a dense bit vector. Values are
// immutable after construction; all operations below return fresh sets.
//
// In local mode every set tracks the number of window elements multiplied to
// produce its members (depth); products whose combined depth would exceed the
// 100-factor arity cap, or whose elements would leave the window, raise
// LocalOverflow. Table mode ignores depth.
class GroupSet {
 public:
  GroupSet(UniverseRef u, DenseBitset bits, int depth = 1)
      : u_(std::move(u)), bits_(std::move(bits)), depth_(depth) {}

  static GroupSet empty(UniverseRef u) { return GroupSet(u, DenseBitset(u->size())); }
  static GroupSet full(UniverseRef u);
  static GroupSet of(UniverseRef u, const std::vector<Eid>& ids);
  static GroupSet singleton(UniverseRef u, Eid id) { return of(u, {id}); }

  const UniverseRef& universe() const { return u_; }
  const DenseBitset& bits() const { return bits_; }
  int depth() const { return depth_; }
  GroupSet with_depth(int d) const { return GroupSet(u_, bits_, d); }

  uint32_t count() const { return bits_.count(); }
  bool empty_set() const { return bits_.none(); }
  bool contains(Eid id) const { return bits_.test(id); }
  std::vector<Eid> elements() const { return bits_.to_vector(); }

  bool operator==(const GroupSet& o) const { return bits_ == o.bits_; }
  bool operator!=(const GroupSet& o) const { return !(*this == o); }
  bool subset_of(const GroupSet& o) const { return bits_.is_subset_of(o.bits_); }

  bool symmetric() const;           // closed under inverse
  bool contains_identity() const;
  uint64_t hash() const { return bits_.hash(); }

 private:
  UniverseRef u_;
  DenseBitset bits_;
  int depth_;
  // Lazily cached flags; -1 unknown. Relaxed atomics keep concurrent reads
  // safe (the recomputation is idempotent).
  mutable std::atomic<int8_t> sym_cache_{-1};
  mutable std::atomic<int8_t> id_cache_{-1};

 public:
  GroupSet(const GroupSet& o) : u_(o.u_), bits_(o.bits_), depth_(o.depth_) {
    sym_cache_.store(o.sym_cache_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    id_cache_.store(o.id_cache_.load(std::memory_order_relaxed), std::memory_order_relaxed);
  }
  GroupSet(GroupSet&& o) noexcept : u_(std::move(o.u_)), bits_(std::move(o.bits_)), depth_(o.depth_) {
    sym_cache_.store(o.sym_cache_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    id_cache_.store(o.id_cache_.load(std::memory_order_relaxed), std::memory_order_relaxed);
  }
  GroupSet& operator=(const GroupSet& o) {
    u_ = o.u_;
    bits_ = o.bits_;
    depth_ = o.depth_;
    sym_cache_.store(o.sym_cache_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    id_cache_.store(o.id_cache_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    return *this;
  }
  GroupSet& operator=(GroupSet&& o) noexcept {
    u_ = std::move(o.u_);
    bits_ = std::move(o.bits_);
    depth_ = o.depth_;
    sym_cache_.store(o.sym_cache_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    id_cache_.store(o.id_cache_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    return *this;
  }
};

void require_same_universe(const GroupSet& a, const GroupSet& b);

// {xy : x in X, y in Y}
GroupSet product_set(const GroupSet& x, const GroupSet& y);
// n-fold product set, by square and multiply.
GroupSet power(const GroupSet& a, unsigned n);
GroupSet inverse_set(const GroupSet& x);
GroupSet sym_diff(const GroupSet& x, const GroupSet& y);
GroupSet set_union(const GroupSet& x, const GroupSet& y);
GroupSet set_intersect(const GroupSet& x, const GroupSet& y);

// g X (left) and X g (right); g_depth is the factor count of g in local mode.
GroupSet translate(Eid g, const GroupSet& x, int g_depth = 1);
GroupSet translate_right(const GroupSet& x, Eid g, int g_depth = 1);
// a^{-1} X a
GroupSet conjugate(Eid a, const GroupSet& x, int a_depth = 1);

// Counting measure normalized so that the reference set has measure exactly 1.
struct MeasureContext {
  GroupSet reference;
  Rat scale;  // 1/|reference|

  static MeasureContext normalized(const GroupSet& a);
};

Rat measure(const GroupSet& x, const MeasureContext& ctx);

// Witness (K, E) for A^2 ⊆ EA, verified element-exactly before return.
struct ApproxCertificate {
  uint64_t set_hash = 0;
  long K = 0;
  std::vector<Eid> witness;
  int witness_depth = 2;  // witnesses live in A^2
  bool verified = false;
};

// Greedy witness search; K is not guaranteed minimal.
ApproxCertificate approx_constant(const GroupSet& a);

// Replay E·A ⊇ A^2 for an arbitrary witness; used by certificate verification.
bool approx_replays(const GroupSet& a, const std::vector<Eid>& witness);

// The stabilized power ⟨A⟩ together with the least n such that A^{n+1} = A^n.
// Total group mode only.
std::pair<GroupSet, int> generated(const GroupSet& a);

}  // namespace apxgrp

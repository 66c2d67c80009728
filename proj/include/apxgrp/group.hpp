#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "apxgrp/errors.hpp"

namespace apxgrp {

using Eid = uint32_t;

inline constexpr uint32_t kMaxGroupOrder = 65536;

// A finite group as an explicit multiplication/inverse table. Element ids are
// dense 0..order-1 with the identity at id 0.
struct GroupTable {
  uint32_t order = 0;
  std::vector<Eid> mul;  // row-major, order x order
  std::vector<Eid> inv;
  Eid identity = 0;
  std::vector<std::string> labels;  // optional, empty when unnamed

  Eid at(Eid a, Eid b) const { return mul[size_t(a) * order + b]; }

  // Identity/inverse laws plus associativity: exhaustive for order <= 512,
  // sampled (>= 100000 seeded random triples) above that.
  void validate() const;
};

GroupTable build_cyclic(uint32_t n);
GroupTable build_dihedral(uint32_t n);
GroupTable build_heisenberg(uint32_t p);  // unitriangular 3x3 over Z/p
GroupTable build_symmetric(uint32_t n);   // n <= 6
GroupTable build_direct_product(const GroupTable& g, const GroupTable& h);

// Dispatch on a JSON spec {"kind": ..., "params": {...}}; validates the table.
GroupTable build_group(const nlohmann::json& spec);

// A windowed local group: the integers restricted to [-W, W], with products
// defined only when every prefix stays inside the window and at most 100
// factors are multiplied.
struct LocalGroup {
  int64_t window = 0;
  static constexpr int kArityCap = 100;

  uint32_t size() const { return static_cast<uint32_t>(2 * window + 1); }
};

struct LocalProduct {
  bool defined = false;
  int64_t value = 0;
  enum class Fail { None, Arity, WindowExit } fail = Fail::None;
  size_t prefix_len = 0;    // prefix that failed (window exits)
  int64_t prefix_sum = 0;
};

LocalProduct local_product(const LocalGroup& lg, std::span<const int64_t> elems);

// The ambient universe for all set algebra: either a finite table group or a
// windowed local group, with one dense element-id space. Local ids map the
// window to 0..2W (offset + W), keeping the bit-vector representation uniform.
class Universe {
 public:
  static std::shared_ptr<const Universe> from_table(GroupTable t);
  static std::shared_ptr<const Universe> from_window(int64_t window);

  bool is_local() const { return local_.has_value(); }
  uint32_t size() const { return size_; }
  Eid identity() const { return identity_; }

  // nullopt only in local mode, when the product leaves the window.
  std::optional<Eid> mul(Eid a, Eid b) const {
    if (table_) return table_->at(a, b);
    int64_t v = offset_of(a) + offset_of(b);
    if (v < -local_->window || v > local_->window) return std::nullopt;
    return id_of_offset(v);
  }

  Eid inv(Eid a) const {
    if (table_) return table_->inv[a];
    return id_of_offset(-offset_of(a));
  }

  const GroupTable& table() const { return *table_; }
  const LocalGroup& local() const { return *local_; }

  int64_t offset_of(Eid id) const { return int64_t(id) - local_->window; }
  Eid id_of_offset(int64_t off) const { return static_cast<Eid>(off + local_->window); }

  uint64_t content_hash() const { return hash_; }

 private:
  Universe() = default;

  std::unique_ptr<const GroupTable> table_;
  std::optional<LocalGroup> local_;
  uint32_t size_ = 0;
  Eid identity_ = 0;
  uint64_t hash_ = 0;
};

using UniverseRef = std::shared_ptr<const Universe>;

}  // namespace apxgrp

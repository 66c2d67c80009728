#pragma once

#include <vector>

#include "apxgrp/group.hpp"
#include "apxgrp/setalg.hpp"

namespace apxgrp::test {

inline UniverseRef cyclic_universe(uint32_t n) {
  return Universe::from_table(build_cyclic(n));
}

// Interval of residues [lo, hi] in a cyclic universe.
inline GroupSet interval(const UniverseRef& u, int64_t lo, int64_t hi) {
  std::vector<Eid> ids;
  int64_t n = u->size();
  for (int64_t x = lo; x <= hi; ++x)
    ids.push_back(static_cast<Eid>(((x % n) + n) % n));
  return GroupSet::of(u, ids);
}

inline GroupSet local_interval(const UniverseRef& u, int64_t lo, int64_t hi) {
  std::vector<Eid> ids;
  for (int64_t x = lo; x <= hi; ++x) ids.push_back(u->id_of_offset(x));
  return GroupSet::of(u, ids);
}

// id helper for cyclic residues
inline Eid res(const UniverseRef& u, int64_t x) {
  int64_t n = u->size();
  return static_cast<Eid>(((x % n) + n) % n);
}

}  // namespace apxgrp::test

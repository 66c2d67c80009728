#pragma once

#include <optional>

#include "apxgrp/setalg.hpp"

namespace apxgrp {

// Brute-force reference implementations, used to generate ground truth and to
// cross-check the production paths on tiny instances. Never called from
// production code.
struct OracleBudget {
  uint32_t max_universe = 24;
  uint64_t max_subsets = uint64_t(1) << 20;
  int max_P_depth = 2;
  uint64_t node_budget = uint64_t(1) << 22;
};

// Exact minimum number of translates of tile covering target, translates
// drawn from pool. nullopt when the pool cannot cover target at all.
std::optional<long> exact_min_cover(const GroupSet& target, const GroupSet& tile,
                                    const GroupSet& pool,
                                    const OracleBudget& budget = {});

// Exact min of μ(BA)/μ(A) over all B ⊆ A with μ(B) ≥ t·μ(A), with the
// first minimizer in subset-mask order as witness.
std::pair<Rat, GroupSet> exact_f(const Rat& t, const GroupSet& a,
                                 const MeasureContext& ctx,
                                 const OracleBudget& budget = {});

// Literal unmemoized recursion:
//   P_0^t(B)     iff B ≠ ∅
//   P_{n+1}^t(B) iff P_n^t(B) and A is covered by ⌊2K/t⌋ translates
//                (pool A^3) of X_{n+1}^t(B) = {g ∈ A² : P_n^{t²/2K}(gB∩B)
//                and P_n^{t²/2K}(g^{-1}B∩B)}.
bool exact_P(int n, const Rat& t, const GroupSet& b, const GroupSet& a, long k_const,
             const OracleBudget& budget = {});

}  // namespace apxgrp

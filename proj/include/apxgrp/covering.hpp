#pragma once

#include <optional>
#include <string>
#include <vector>

#include "apxgrp/setalg.hpp"

namespace apxgrp {

// A verified covering target ⊆ ⋃ z·tile. bound_claimed, when present, is the
// measure-theoretic bound the construction promises (e.g. ⌊μ(XY)/μ(Y)⌋ or
// ⌊2K/t⌋); L ≤ bound_claimed is re-checked on replay.
struct CoverCertificate {
  uint64_t target_hash = 0;
  uint64_t tile_hash = 0;
  std::vector<Eid> translates;
  long L = 0;
  std::optional<Int> bound_claimed;
  std::string pool;        // where the translates came from
  int translate_depth = 1; // local-mode factor count of the translates
  bool verified = false;
};

bool cover_replays(const GroupSet& target, const GroupSet& tile,
                   const std::vector<Eid>& translates, int translate_depth = 1);

// Ruzsa covering: a maximal family Z ⊆ X (ascending-id scan) with pairwise
// disjoint zY; then X ⊆ ZYY^{-1} and |Z| ≤ ⌊μ(XY)/μ(Y)⌋. The containment is
// verified before returning.
struct RuzsaCover {
  std::vector<Eid> translates;
  Int bound;  // ⌊μ(XY)/μ(Y)⌋
};
RuzsaCover ruzsa_cover(const GroupSet& x, const GroupSet& y, const MeasureContext& ctx);

// Greedy cover of target by translates of tile drawn from pool: repeatedly
// take the translate covering the most uncovered elements, ties to the
// smaller element id. Throws Uncoverable if the pool runs dry.
CoverCertificate cover_by_translates(const GroupSet& target, const GroupSet& tile,
                                     const GroupSet& pool,
                                     std::optional<Int> bound_claimed = std::nullopt,
                                     std::string pool_desc = "explicit");

// BB^{-1} is wide in A whenever μ(B) > 0: returns BB^{-1} and a Ruzsa cover
// of A by at most ⌊μ(AB)/μ(B)⌋ of its translates.
std::pair<GroupSet, CoverCertificate> wide_from_positive(const GroupSet& b,
                                                         const GroupSet& a,
                                                         const MeasureContext& ctx);

// Equivalence refinement for two equivalent approximate subgroups:
// B = A·A*·A, covers showing A and A* wide in B, and the least n at which
// A^n ∩ A*^n covers B within the measure bound ⌊μ(B·C)/μ(C)⌋.
struct EquivalenceResult {
  GroupSet b;
  CoverCertificate a_wide_in_b;
  CoverCertificate astar_wide_in_b;
  int n = 0;
  GroupSet intersection;  // A^n ∩ A*^n
  CoverCertificate intersection_wide_in_b;
};
EquivalenceResult equivalence_refine(const GroupSet& a, const GroupSet& astar,
                                     const MeasureContext& ctx);

// Wide symmetric B is an approximate subgroup: with B² ⊆ A^{2n}, A² ⊆ EA and
// A ⊆ YB, the composite witness E^{2n-1}Y satisfies B² ⊆ E^{2n-1}YB.
// Produces and verifies that witness.
ApproxCertificate approx_from_wide(const GroupSet& b, const GroupSet& a,
                                   const ApproxCertificate& a_witness,
                                   const CoverCertificate& a_cover_by_b);

}  // namespace apxgrp

#include "apxgrp/oracle.hpp"

#include <algorithm>

namespace apxgrp {

namespace {

void check_universe(const GroupSet& s, const OracleBudget& budget) {
  if (s.universe()->size() > budget.max_universe)
    throw BudgetExceeded("oracle universe cap exceeded");
}

// Depth-first exact set cover decision: can `uncovered` be covered with at
// most `k` of the rows? Branches on the first uncovered element.
bool coverable_with(const DenseBitset& uncovered,
                    const std::vector<std::pair<Eid, DenseBitset>>& rows, long k,
                    uint64_t& nodes, const OracleBudget& budget) {
  if (uncovered.none()) return true;
  if (k == 0) return false;
  if (++nodes > budget.node_budget) throw BudgetExceeded("oracle cover search budget");
  uint32_t pivot = uncovered.first();
  for (const auto& row : rows) {
    if (!row.second.test(pivot)) continue;
    DenseBitset rest = uncovered;
    rest.subtract(row.second);
    if (coverable_with(rest, rows, k - 1, nodes, budget)) return true;
  }
  return false;
}

}  // namespace

std::optional<long> exact_min_cover(const GroupSet& target, const GroupSet& tile,
                                    const GroupSet& pool, const OracleBudget& budget) {
  require_same_universe(target, tile);
  require_same_universe(target, pool);
  check_universe(target, budget);
  if (tile.empty_set()) throw PreconditionViolated("cover needs a nonempty tile");
  if (target.empty_set()) return 0;

  std::vector<std::pair<Eid, DenseBitset>> rows;
  DenseBitset reachable(target.universe()->size());
  pool.bits().for_each([&](Eid g) {
    DenseBitset row = translate(g, tile, pool.depth()).bits();
    if (row.intersects(target.bits())) {
      reachable |= row;
      rows.emplace_back(g, std::move(row));
    }
  });
  if (!target.bits().is_subset_of(reachable)) return std::nullopt;

  uint64_t nodes = 0;
  for (long k = 1;; ++k) {
    if (coverable_with(target.bits(), rows, k, nodes, budget)) return k;
    if (k > static_cast<long>(rows.size()))
      throw InternalInvariantBroken("cover size exceeded pool size");
  }
}

std::pair<Rat, GroupSet> exact_f(const Rat& t, const GroupSet& a,
                                 const MeasureContext& ctx, const OracleBudget& budget) {
  check_universe(a, budget);
  std::vector<Eid> elems = a.elements();
  size_t n = elems.size();
  if (n == 0) throw PreconditionViolated("exact_f needs nonempty A");
  if (n > 63 || (uint64_t(1) << n) > budget.max_subsets)
    throw BudgetExceeded("exact_f subset enumeration budget");

  Rat mu_a = measure(a, ctx);
  Rat threshold = t * mu_a;
  std::optional<Rat> best;
  std::optional<GroupSet> witness;
  for (uint64_t mask = 1; mask < (uint64_t(1) << n); ++mask) {
    if (Rat(static_cast<long>(std::popcount(mask))) * ctx.scale < threshold) continue;
    std::vector<Eid> ids;
    for (size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1) ids.push_back(elems[i]);
    GroupSet b = GroupSet::of(a.universe(), ids).with_depth(a.depth());
    Rat value = measure(product_set(b, a), ctx) / mu_a;
    if (!best || value < *best) {
      best = value;
      witness = b;
    }
  }
  if (!best) throw PreconditionViolated("no subset meets the measure threshold");
  return {*best, *witness};
}

bool exact_P(int n, const Rat& t, const GroupSet& b, const GroupSet& a, long k_const,
             const OracleBudget& budget) {
  check_universe(a, budget);
  if (n > budget.max_P_depth) throw BudgetExceeded("exact_P depth budget");
  if (b.empty_set()) return false;
  if (n == 0) return true;

  Rat t_next = t * t / rat(2 * k_const);
  if (!exact_P(n - 1, t, b, a, k_const, budget)) return false;

  GroupSet a2 = power(a, 2);
  DenseBitset xbits(a.universe()->size());
  a2.bits().for_each([&](Eid g) {
    GroupSet gb = set_intersect(translate(g, b, 2), b);
    GroupSet gib = set_intersect(translate(a.universe()->inv(g), b, 2), b);
    if (exact_P(n - 1, t_next, gb, a, k_const, budget) &&
        exact_P(n - 1, t_next, gib, a, k_const, budget))
      xbits.set(g);
  });
  GroupSet x(a.universe(), std::move(xbits), a.universe()->is_local() ? 2 : 0);
  if (x.empty_set()) return false;

  Int allowed = rat_floor(rat(2 * k_const) / t);
  GroupSet a3 = power(a, 3);
  std::optional<long> need = exact_min_cover(a, x, a3, budget);
  return need && Int(*need) <= allowed;
}

}  // namespace apxgrp

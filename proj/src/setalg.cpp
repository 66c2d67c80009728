#include "apxgrp/setalg.hpp"

#include <algorithm>
#include <string>

namespace apxgrp {

GroupSet GroupSet::full(UniverseRef u) {
  DenseBitset b(u->size());
  for (uint32_t i = 0; i < u->size(); ++i) b.set(i);
  return GroupSet(std::move(u), std::move(b));
}

GroupSet GroupSet::of(UniverseRef u, const std::vector<Eid>& ids) {
  DenseBitset b(u->size());
  for (Eid id : ids) {
    if (id >= u->size()) throw InvalidInstance("element id out of range: " + std::to_string(id));
    b.set(id);
  }
  return GroupSet(std::move(u), std::move(b));
}

bool GroupSet::symmetric() const {
  int8_t c = sym_cache_.load(std::memory_order_relaxed);
  if (c >= 0) return c != 0;
  bool sym = true;
  bits_.for_each([&](Eid x) {
    if (!bits_.test(u_->inv(x))) sym = false;
  });
  sym_cache_.store(sym ? 1 : 0, std::memory_order_relaxed);
  return sym;
}

bool GroupSet::contains_identity() const {
  int8_t c = id_cache_.load(std::memory_order_relaxed);
  if (c >= 0) return c != 0;
  bool has = bits_.test(u_->identity());
  id_cache_.store(has ? 1 : 0, std::memory_order_relaxed);
  return has;
}

void require_same_universe(const GroupSet& a, const GroupSet& b) {
  if (a.universe()->content_hash() != b.universe()->content_hash())
    throw UniverseMismatch();
}

namespace {

int combined_depth(const Universe& u, int da, int db) {
  if (!u.is_local()) return 0;
  int d = da + db;
  if (d > LocalGroup::kArityCap)
    throw LocalOverflow(LocalOverflow::Reason::Arity,
                        "product depth " + std::to_string(d) + " exceeds the 100-factor cap");
  return d;
}

[[noreturn]] void window_exit(const Universe& u, Eid a, Eid b) {
  throw LocalOverflow(LocalOverflow::Reason::WindowExit,
                      "product " + std::to_string(u.offset_of(a)) + " * " +
                          std::to_string(u.offset_of(b)) + " leaves the window");
}

}  // namespace

GroupSet product_set(const GroupSet& x, const GroupSet& y) {
  require_same_universe(x, y);
  const Universe& u = *x.universe();
  int d = combined_depth(u, x.depth(), y.depth());
  DenseBitset out(u.size());
  const DenseBitset& yb = y.bits();
  x.bits().for_each([&](Eid a) {
    yb.for_each([&](Eid b) {
      auto p = u.mul(a, b);
      if (!p) window_exit(u, a, b);
      out.set(*p);
    });
  });
  return GroupSet(x.universe(), std::move(out), d);
}

GroupSet power(const GroupSet& a, unsigned n) {
  if (n == 0) throw PreconditionViolated("power requires n >= 1");
  if (a.universe()->is_local() && n > LocalGroup::kArityCap)
    throw LocalOverflow(LocalOverflow::Reason::Arity,
                        "power " + std::to_string(n) + " exceeds the 100-factor cap");
  if (n == 1) return a;
  // Square-and-multiply over product_set; associativity makes this exact.
  GroupSet acc = a;
  GroupSet sq = a;
  unsigned remaining = n - 1;
  while (remaining) {
    if (remaining & 1) acc = product_set(acc, sq);
    remaining >>= 1;
    if (remaining) sq = product_set(sq, sq);
  }
  return acc;
}

GroupSet inverse_set(const GroupSet& x) {
  const Universe& u = *x.universe();
  DenseBitset out(u.size());
  x.bits().for_each([&](Eid a) { out.set(u.inv(a)); });
  return GroupSet(x.universe(), std::move(out), x.depth());
}

GroupSet sym_diff(const GroupSet& x, const GroupSet& y) {
  require_same_universe(x, y);
  DenseBitset out = x.bits();
  out ^= y.bits();
  return GroupSet(x.universe(), std::move(out),
                  x.universe()->is_local() ? std::max(x.depth(), y.depth()) : 0);
}

GroupSet set_union(const GroupSet& x, const GroupSet& y) {
  require_same_universe(x, y);
  DenseBitset out = x.bits();
  out |= y.bits();
  return GroupSet(x.universe(), std::move(out),
                  x.universe()->is_local() ? std::max(x.depth(), y.depth()) : 0);
}

GroupSet set_intersect(const GroupSet& x, const GroupSet& y) {
  require_same_universe(x, y);
  DenseBitset out = x.bits();
  out &= y.bits();
  return GroupSet(x.universe(), std::move(out),
                  x.universe()->is_local() ? std::min(x.depth(), y.depth()) : 0);
}

GroupSet translate(Eid g, const GroupSet& x, int g_depth) {
  const Universe& u = *x.universe();
  int d = combined_depth(u, g_depth, x.depth());
  DenseBitset out(u.size());
  x.bits().for_each([&](Eid a) {
    auto p = u.mul(g, a);
    if (!p) window_exit(u, g, a);
    out.set(*p);
  });
  return GroupSet(x.universe(), std::move(out), d);
}

GroupSet translate_right(const GroupSet& x, Eid g, int g_depth) {
  const Universe& u = *x.universe();
  int d = combined_depth(u, x.depth(), g_depth);
  DenseBitset out(u.size());
  x.bits().for_each([&](Eid a) {
    auto p = u.mul(a, g);
    if (!p) window_exit(u, a, g);
    out.set(*p);
  });
  return GroupSet(x.universe(), std::move(out), d);
}

GroupSet conjugate(Eid a, const GroupSet& x, int a_depth) {
  const Universe& u = *x.universe();
  return translate_right(translate(u.inv(a), x, a_depth), a, a_depth);
}

MeasureContext MeasureContext::normalized(const GroupSet& a) {
  if (a.empty_set()) throw PreconditionViolated("measure reference set must be nonempty");
  return MeasureContext{a, rat(1, a.count())};
}

Rat measure(const GroupSet& x, const MeasureContext& ctx) {
  require_same_universe(x, ctx.reference);
  return rat(x.count()) * ctx.scale;
}

bool approx_replays(const GroupSet& a, const std::vector<Eid>& witness) {
  GroupSet sq = power(a, 2);
  GroupSet covered = GroupSet::empty(a.universe());
  for (Eid e : witness) covered = set_union(covered, translate(e, a, 2));
  return sq.subset_of(covered);
}

ApproxCertificate approx_constant(const GroupSet& a) {
  if (!a.symmetric() || !a.contains_identity())
    throw NotSymmetric("approximate-subgroup witness needs a symmetric set containing 1");
  GroupSet sq = power(a, 2);
  // Greedy cover of A^2 by translates gA, g in A^2 (1 in A makes that pool
  // sufficient): take the translate covering the most uncovered elements,
  // ties to the smaller element id.
  DenseBitset uncovered = sq.bits();
  ApproxCertificate cert;
  cert.set_hash = a.hash();
  std::vector<std::pair<Eid, DenseBitset>> rows;
  sq.bits().for_each([&](Eid g) { rows.emplace_back(g, translate(g, a, 2).bits()); });
  while (uncovered.any()) {
    uint32_t best = 0;
    const std::pair<Eid, DenseBitset>* pick = nullptr;
    for (const auto& row : rows) {
      uint32_t c = row.second.intersection_count(uncovered);
      if (c > best) {
        best = c;
        pick = &row;
      }
    }
    if (!pick) throw InternalInvariantBroken("greedy witness search stalled");
    cert.witness.push_back(pick->first);
    uncovered.subtract(pick->second);
  }
  cert.K = static_cast<long>(cert.witness.size());
  cert.verified = approx_replays(a, cert.witness);
  if (!cert.verified) throw InternalInvariantBroken("witness failed replay");
  return cert;
}

std::pair<GroupSet, int> generated(const GroupSet& a) {
  if (a.universe()->is_local())
    throw PreconditionViolated("generated subgroup needs total group mode");
  if (!a.symmetric() || !a.contains_identity())
    throw NotSymmetric("generated subgroup needs a symmetric set containing 1");
  GroupSet prev = a;
  int n = 1;
  for (;;) {
    GroupSet next = product_set(prev, a);
    if (next == prev) return {prev, n};
    prev = std::move(next);
    ++n;
  }
}

}  // namespace apxgrp

#include "apxgrp/covering.hpp"

namespace apxgrp {

bool cover_replays(const GroupSet& target, const GroupSet& tile,
                   const std::vector<Eid>& translates, int translate_depth) {
  GroupSet covered = GroupSet::empty(target.universe());
  for (Eid z : translates)
    covered = set_union(covered, translate(z, tile, translate_depth));
  return target.subset_of(covered);
}

RuzsaCover ruzsa_cover(const GroupSet& x, const GroupSet& y, const MeasureContext& ctx) {
  require_same_universe(x, y);
  if (y.empty_set()) throw PreconditionViolated("Ruzsa cover needs nonempty Y");
  RuzsaCover out;
  if (x.empty_set()) {
    out.bound = 0;
    return out;
  }
  GroupSet xy = product_set(x, y);
  out.bound = rat_floor(measure(xy, ctx) / measure(y, ctx));

  // Maximal disjoint-translate family, ascending-id scan over X.
  DenseBitset taken(x.universe()->size());
  x.bits().for_each([&](Eid z) {
    GroupSet zy = translate(z, y, x.depth());
    if (!zy.bits().intersects(taken)) {
      out.translates.push_back(z);
      taken |= zy.bits();
    }
  });
  if (Int(static_cast<long>(out.translates.size())) > out.bound)
    throw InternalInvariantBroken("disjoint family exceeds the measure bound");

  GroupSet yy = product_set(y, inverse_set(y));
  if (!cover_replays(x, yy, out.translates, x.depth()))
    throw InternalInvariantBroken("Ruzsa cover failed replay");
  return out;
}

CoverCertificate cover_by_translates(const GroupSet& target, const GroupSet& tile,
                                     const GroupSet& pool,
                                     std::optional<Int> bound_claimed,
                                     std::string pool_desc) {
  require_same_universe(target, tile);
  require_same_universe(target, pool);
  if (tile.empty_set()) throw PreconditionViolated("cover needs a nonempty tile");

  CoverCertificate cert;
  cert.target_hash = target.hash();
  cert.tile_hash = tile.hash();
  cert.bound_claimed = std::move(bound_claimed);
  cert.pool = std::move(pool_desc);
  cert.translate_depth = pool.depth();

  std::vector<std::pair<Eid, DenseBitset>> rows;
  pool.bits().for_each([&](Eid g) {
    DenseBitset row = translate(g, tile, pool.depth()).bits();
    if (row.intersects(target.bits())) rows.emplace_back(g, std::move(row));
  });

  DenseBitset uncovered = target.bits();
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
    if (!pick)
      throw Uncoverable("pool exhausted with target still uncovered");
    cert.translates.push_back(pick->first);
    uncovered.subtract(pick->second);
  }
  cert.L = static_cast<long>(cert.translates.size());
  cert.verified = cover_replays(target, tile, cert.translates, cert.translate_depth);
  if (!cert.verified) throw InternalInvariantBroken("greedy cover failed replay");
  return cert;
}

std::pair<GroupSet, CoverCertificate> wide_from_positive(const GroupSet& b,
                                                         const GroupSet& a,
                                                         const MeasureContext& ctx) {
  require_same_universe(a, b);
  if (b.empty_set()) throw PreconditionViolated("wideness needs μ(B) > 0");
  GroupSet bb = product_set(b, inverse_set(b));
  RuzsaCover rc = ruzsa_cover(a, b, ctx);
  CoverCertificate cert;
  cert.target_hash = a.hash();
  cert.tile_hash = bb.hash();
  cert.translates = rc.translates;
  cert.L = static_cast<long>(rc.translates.size());
  cert.bound_claimed = rc.bound;
  cert.pool = "ruzsa:A";
  cert.translate_depth = a.depth();
  cert.verified = cover_replays(a, bb, cert.translates, cert.translate_depth);
  if (!cert.verified) throw InternalInvariantBroken("wideness cover failed replay");
  return {std::move(bb), std::move(cert)};
}

EquivalenceResult equivalence_refine(const GroupSet& a, const GroupSet& astar,
                                     const MeasureContext& ctx) {
  require_same_universe(a, astar);
  if (a.empty_set() || astar.empty_set())
    throw NotEquivalent("equivalence needs nonempty approximate subgroups");
  if (!a.symmetric() || !astar.symmetric() || !a.contains_identity() ||
      !astar.contains_identity())
    throw NotSymmetric("equivalence needs symmetric sets containing 1");

  // Mutual covering witnesses (the equivalence precondition).
  GroupSet pool_a = product_set(a, astar);  // {g : gA* ∩ A ≠ ∅} ⊆ A·A*
  GroupSet pool_astar = product_set(astar, a);
  CoverCertificate a_by_astar =
      cover_by_translates(a, astar, pool_a, std::nullopt, "A·A*");
  CoverCertificate astar_by_a =
      cover_by_translates(astar, a, pool_astar, std::nullopt, "A*·A");
  if (!a_by_astar.verified || !astar_by_a.verified)
    throw NotEquivalent("mutual covering precondition failed");

  EquivalenceResult res{product_set(product_set(a, astar), a),
                        CoverCertificate{}, CoverCertificate{}, 0,
                        GroupSet::empty(a.universe()), CoverCertificate{}};
  const GroupSet& b = res.b;

  // These never fail at finite scale; the achieved L is what the certificate
  // records.
  res.a_wide_in_b = cover_by_translates(b, a, product_set(b, inverse_set(a)),
                                        std::nullopt, "B·A^{-1}");
  res.astar_wide_in_b = cover_by_translates(b, astar, product_set(b, inverse_set(astar)),
                                            std::nullopt, "B·A*^{-1}");

  // Least n with A^n ∩ A*^n covering B within the Ruzsa measure bound
  // ⌊μ(B·C)/μ(C)⌋. Powers stabilize at ⟨A⟩ ∩ ⟨A*⟩, where the bound is met
  // coset-exactly, so the loop terminates.
  GroupSet pa = a, ps = astar;
  for (int n = 1;; ++n) {
    GroupSet c = set_intersect(pa, ps);
    if (!c.empty_set()) {
      Int bound = rat_floor(measure(product_set(b, c), ctx) / measure(c, ctx));
      try {
        CoverCertificate cc = cover_by_translates(
            b, c, product_set(b, inverse_set(c)), bound, "B·C^{-1}");
        if (Int(cc.L) <= bound) {
          res.n = n;
          res.intersection = c;
          res.intersection_wide_in_b = std::move(cc);
          return res;
        }
      } catch (const Uncoverable&) {
        // intersection too sparse at this power; keep growing
      }
    }
    GroupSet npa = product_set(pa, a);
    GroupSet nps = product_set(ps, astar);
    if (npa == pa && nps == ps)
      throw NotEquivalent("no power of the intersection covers B within the measure bound");
    pa = std::move(npa);
    ps = std::move(nps);
  }
}

ApproxCertificate approx_from_wide(const GroupSet& b, const GroupSet& a,
                                   const ApproxCertificate& a_witness,
                                   const CoverCertificate& a_cover_by_b) {
  require_same_universe(a, b);
  if (!b.symmetric() || !b.contains_identity())
    throw NotSymmetric("composite witness needs symmetric B containing 1");
  GroupSet bb = power(b, 2);
  // least n with B^2 ⊆ A^{2n}
  int n = 0;
  GroupSet a2 = power(a, 2);
  GroupSet acc = a2;
  for (int k = 1;; ++k) {
    if (bb.subset_of(acc)) {
      n = k;
      break;
    }
    GroupSet next = product_set(acc, a2);
    if (next == acc) throw PreconditionViolated("B^2 never enters a power of A");
    acc = std::move(next);
  }
  GroupSet e = GroupSet::of(a.universe(), a_witness.witness).with_depth(
      a.universe()->is_local() ? a_witness.witness_depth : 1);
  GroupSet y = GroupSet::of(a.universe(), a_cover_by_b.translates)
                   .with_depth(a.universe()->is_local() ? a_cover_by_b.translate_depth : 1);
  GroupSet w = product_set(power(e, static_cast<unsigned>(2 * n - 1)), y);

  ApproxCertificate cert;
  cert.set_hash = b.hash();
  cert.witness = w.elements();
  cert.witness_depth = w.depth();
  cert.K = static_cast<long>(cert.witness.size());
  GroupSet covered = product_set(w, b);
  cert.verified = bb.subset_of(covered);
  if (!cert.verified) throw InternalInvariantBroken("composite witness failed replay");
  return cert;
}

}  // namespace apxgrp

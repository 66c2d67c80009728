#include "apxgrp/normality.hpp"

#include <algorithm>

#include "apxgrp/parallel.hpp"

namespace apxgrp {

Rat AveragedMeasure::operator()(const GroupSet& x) const {
  Rat sum = 0;
  for (Eid a : elements)
    sum += rat(translate_right(x, a, element_depth).count()) * base.scale;
  return sum / rat(static_cast<long>(elements.size()));
}

AveragedMeasure averaged_measure(const MeasureContext& base, std::vector<Eid> elements,
                                 int element_depth) {
  if (elements.empty())
    throw PreconditionViolated("averaged measure needs at least one element");
  return AveragedMeasure{base, std::move(elements), element_depth};
}

namespace {

// Ruzsa scan with an arbitrary left-invariant measure for the bound; the
// disjoint-family construction itself is measure-free.
struct MuRuzsa {
  std::vector<Eid> translates;
  Int bound;
};

MuRuzsa mu_ruzsa(const GroupSet& x, const GroupSet& y, const AveragedMeasure& mu) {
  if (y.empty_set()) throw PreconditionViolated("Ruzsa cover needs nonempty Y");
  MuRuzsa out;
  GroupSet xy = product_set(x, y);
  out.bound = rat_floor(mu(xy) / mu(y));
  DenseBitset taken(x.universe()->size());
  x.bits().for_each([&](Eid z) {
    GroupSet zy = translate(z, y, x.depth());
    if (!zy.bits().intersects(taken)) {
      out.translates.push_back(z);
      taken |= zy.bits();
    }
  });
  GroupSet yy = product_set(y, inverse_set(y));
  if (!cover_replays(x, yy, out.translates, x.depth()))
    throw InternalInvariantBroken("mu-Ruzsa cover failed replay");
  return out;
}

}  // namespace

GroupSet common_conjugate_core(const std::vector<GroupSet>& xs, const std::vector<Int>& ns,
                               const GroupSet& ambient, long ambient_K,
                               const AveragedMeasure& mu, ConjugateCoreTrace* trace) {
  if (xs.empty()) throw PreconditionViolated("core needs at least one set");
  if (ns.size() != xs.size()) throw PreconditionViolated("one bound per set");
  Rat mu_ambient = mu(ambient);
  for (size_t i = 0; i < xs.size(); ++i) {
    require_same_universe(xs[i], ambient);
    if (!xs[i].subset_of(ambient))
      throw PreconditionViolated("core sets must lie in the ambient set");
    if (Rat(ns[i]) * mu(xs[i]) < mu_ambient)
      throw PreconditionViolated("measure bound N_i mu(X_i) >= mu(ambient) fails");
  }

  GroupSet d = xs[0];
  Int denom = ns[0];
  for (size_t i = 1; i < xs.size(); ++i) {
    const GroupSet& xi = xs[i];
    GroupSet tile = product_set(xi, inverse_set(xi));
    MuRuzsa cover = mu_ruzsa(ambient, xi, mu);
    if (Int(static_cast<long>(cover.translates.size())) > Int(ambient_K) * ns[i])
      throw InternalInvariantBroken("Ruzsa family exceeds K*N_i");

    // Keep the translate with the largest overlap; ascending scan order makes
    // ties deterministic.
    std::optional<Eid> best;
    Rat best_mu = 0;
    for (Eid z : cover.translates) {
      GroupSet cand = set_intersect(d, translate(z, tile, ambient.depth()));
      Rat v = mu(cand);
      if (!best || v > best_mu) {
        best = z;
        best_mu = v;
      }
    }
    if (!best) throw InternalInvariantBroken("empty Ruzsa family");
    d = set_intersect(d, translate(*best, tile, ambient.depth()));
    if (d.empty_set()) throw InternalInvariantBroken("core intersection emptied out");
    denom *= Int(ambient_K) * ns[i];
    if (trace) {
      trace->chosen_translates.push_back(*best);
      trace->cover_sizes.push_back(static_cast<long>(cover.translates.size()));
    }
  }
  if (Rat(denom) * mu(d) < mu_ambient)
    throw InternalInvariantBroken("core lost too much measure");
  if (trace) trace->measure_bound_denominator = denom;

  // D^{-1}D ⊆ X_1^{-1}X_1 ∩ ⋂_{i≥2} (X_iX_i^{-1})² — replay the containment.
  GroupSet dd = product_set(inverse_set(d), d);
  GroupSet first = product_set(inverse_set(xs[0]), xs[0]);
  if (!dd.subset_of(first))
    throw InternalInvariantBroken("core containment failed at X_1");
  for (size_t i = 1; i < xs.size(); ++i) {
    GroupSet sq = power(product_set(xs[i], inverse_set(xs[i])), 2);
    if (!dd.subset_of(sq))
      throw InternalInvariantBroken("core containment failed at X_" + std::to_string(i + 1));
  }
  return d;
}

NormalizeCertificate normalize_refine(const GroupSet& a, const GroupSet& r,
                                      const MeasureContext& ctx,
                                      const NormalizeOptions& opts) {
  require_same_universe(a, r);
  if (!r.symmetric() || !r.contains_identity())
    throw PreconditionViolated("normalized refinement needs symmetric R containing 1");
  if (!a.symmetric() || !a.contains_identity())
    throw NotSymmetric("normalized refinement needs symmetric A containing 1");

  GroupSet a4 = power(a, 4);
  GroupSet r4 = power(r, 4);
  if (!r4.subset_of(a4))
    throw PreconditionViolated("normalized refinement needs R^4 ⊆ A^4");

  ApproxCertificate a_approx = approx_constant(a);
  const long K = a_approx.K;

  // Wideness of R in A, and the composite witness making R an approximate
  // subgroup in its own right (the K^3 N route).
  GroupSet pool_r = product_set(a, r);  // ⊇ {g : gR ∩ A ≠ ∅}
  CoverCertificate r_wide = cover_by_translates(a, r, pool_r, std::nullopt, "A·R");
  ApproxCertificate r_approx = approx_from_wide(r, a, a_approx, r_wide);

  // T with T^48 ⊆ R^4.
  MeasureContext r_ctx = MeasureContext::normalized(r);
  RefineCertificate t_refine = sanders_refine(r, 48, r_ctx, opts.refine);
  const GroupSet& t = t_refine.s;
  GroupSet t4 = power(t, 4);
  bool t48_ok = power(t4, 12).subset_of(r4);

  // A ⊆ ⋃ a_i T with a_i ∈ A (1 ∈ T makes A itself a sufficient pool).
  CoverCertificate a_cover = cover_by_translates(a, t, a, std::nullopt, "A");
  std::vector<Eid> cover_elems = a_cover.translates;
  const long n = static_cast<long>(cover_elems.size());

  AveragedMeasure mu_bar = averaged_measure(ctx, cover_elems, a.depth());
  Rat mu_bar_a = mu_bar(a);
  Rat mu_a = measure(a, ctx);
  std::vector<std::string> notes;
  if (mu_bar_a > rat(K) * mu_a)
    throw InternalInvariantBroken("averaged measure exceeds K mu(A)");

  // Ambient A^6 with the product witness E^6.
  GroupSet a6 = power(a, 6);
  GroupSet e_set = GroupSet::of(a.universe(), a_approx.witness)
                       .with_depth(a.universe()->is_local() ? a_approx.witness_depth : 1);
  GroupSet e6 = power(e_set, 6);
  if (!power(a6, 2).subset_of(product_set(e6, a6)))
    throw InternalInvariantBroken("A^12 ⊆ E^6 A^6 failed replay");
  long k6 = static_cast<long>(e6.count());

  // Conjugates X_i = a_i T a_i^{-1} ⊆ A^6, each with N_i = K^6 n^2.
  std::vector<GroupSet> conjugates;
  conjugates.reserve(cover_elems.size());
  for (Eid ai : cover_elems) {
    GroupSet xi = translate_right(translate(ai, t, a.depth()), a.universe()->inv(ai), a.depth());
    if (!xi.subset_of(a6))
      throw InternalInvariantBroken("conjugate escaped A^6");
    conjugates.push_back(std::move(xi));
  }
  Int k6_pow;
  mpz_ui_pow_ui(k6_pow.get_mpz_t(), static_cast<unsigned long>(K), 6);
  Int big_n = k6_pow * Int(n) * Int(n);
  std::vector<Int> ns(conjugates.size(), big_n);
  for (const GroupSet& xi : conjugates) {
    // mu_bar(a_i T a_i^{-1}) >= mu_bar(A) / (K n^2)
    if (Rat(Int(K) * Int(n) * Int(n)) * mu_bar(xi) < mu_bar_a)
      throw InternalInvariantBroken("conjugate measure dropped below mu_bar(A)/(K n^2)");
  }

  ConjugateCoreTrace trace;
  GroupSet d = common_conjugate_core(conjugates, ns, a6, k6, mu_bar, &trace);
  GroupSet s = product_set(inverse_set(d), d);

  NormalizeCertificate cert(a, r, std::move(t_refine), std::move(d), std::move(s));
  cert.n_wide = r_wide.L;
  cert.r_approx = std::move(r_approx);
  cert.t48_in_r4 = t48_ok;
  cert.a_cover_by_t = std::move(a_cover);
  cert.cover_elements = std::move(cover_elems);
  cert.core_trace = std::move(trace);
  cert.mu_bar_a = mu_bar_a;
  cert.mu_a = mu_a;
  cert.notes = std::move(notes);

  // Containment checks, element-exact.
  const GroupSet& tt = cert.t_refine.s;
  GroupSet t6 = power(tt, 6);
  cert.conj_in_t4.reserve(cert.cover_elements.size());
  bool all_t4 = true;
  for (Eid ai : cert.cover_elements) {
    bool ok = conjugate(ai, cert.s, cert.a.depth()).subset_of(t4);
    cert.conj_in_t4.push_back(ok);
    all_t4 = all_t4 && ok;
  }
  if (!all_t4) throw InternalInvariantBroken("S^{a_i} ⊆ T^4 failed");

  // S^A = ⋃_{a∈A} a^{-1} S a, fanned out across workers with a deterministic
  // OR-merge.
  auto conj_union = [&](const GroupSet& x) {
    std::vector<Eid> elems = cert.a.elements();
    int threads = std::max(1, opts.refine.threads);
    std::vector<DenseBitset> parts(static_cast<size_t>(threads),
                                   DenseBitset(a.universe()->size()));
    parallel_chunks(elems.size(), threads, [&](size_t lo, size_t hi, size_t chunk) {
      DenseBitset& out = parts[chunk % parts.size()];
      for (size_t i = lo; i < hi; ++i)
        out |= conjugate(elems[i], x, a.depth()).bits();
    });
    DenseBitset acc(a.universe()->size());
    for (const auto& p : parts) acc |= p;
    return GroupSet(a.universe(), std::move(acc),
                    a.universe()->is_local() ? 2 * a.depth() + x.depth() : 0);
  };
  cert.s_conj_in_t6 = conj_union(cert.s).subset_of(t6);
  if (!cert.s_conj_in_t6) throw InternalInvariantBroken("S^A ⊆ T^6 failed");
  GroupSet s8 = power(cert.s, 8);
  GroupSet s8_conj = conj_union(s8);
  if (!s8_conj.subset_of(power(t4, 12)))
    throw InternalInvariantBroken("(S^8)^A ⊆ T^48 failed");
  cert.s8_conj_in_r4 = s8_conj.subset_of(r4);
  if (!cert.s8_conj_in_r4) throw InternalInvariantBroken("(S^8)^A ⊆ R^4 failed");

  // S = D^{-1}D is wide in A by the Ruzsa route on (A, D^{-1}).
  GroupSet d_inv = inverse_set(cert.d);
  RuzsaCover rz = ruzsa_cover(cert.a, d_inv, ctx);
  CoverCertificate wide;
  wide.target_hash = cert.a.hash();
  wide.tile_hash = cert.s.hash();
  wide.translates = rz.translates;
  wide.L = static_cast<long>(rz.translates.size());
  wide.bound_claimed = rz.bound;
  wide.pool = "ruzsa:A";
  wide.translate_depth = cert.a.depth();
  wide.verified = cover_replays(cert.a, cert.s, wide.translates, wide.translate_depth);
  if (!wide.verified) throw InternalInvariantBroken("S wideness cover failed replay");
  cert.wideness = std::move(wide);
  return cert;
}

}  // namespace apxgrp

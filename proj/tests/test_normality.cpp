#include <doctest.h>

#include "apxgrp/normality.hpp"
#include "helpers.hpp"

using namespace apxgrp;
using namespace apxgrp::test;

TEST_SUITE_BEGIN("normality");

TEST_CASE("averaged measure coincides with counting measure and is left-invariant") {
  UniverseRef u = cyclic_universe(64);
  GroupSet a = interval(u, -8, 8);
  MeasureContext ctx = MeasureContext::normalized(a);
  AveragedMeasure mu = averaged_measure(ctx, {0, 3, res(u, -5)});
  CHECK(mu(GroupSet::empty(u)) == rat(0));
  for (const GroupSet& x : {a, interval(u, -3, 7), GroupSet::of(u, {1, 2, 60})}) {
    CHECK(mu(x) == measure(x, ctx));
    CHECK(mu(translate(17, x)) == mu(x));
  }
}

TEST_CASE("averaged measure equals the hand sum for two elements") {
  UniverseRef u = Universe::from_table(build_dihedral(8));
  GroupSet a = GroupSet::of(u, {0, 1, 7, 8});
  MeasureContext ctx = MeasureContext::normalized(a);
  GroupSet x = GroupSet::of(u, {0, 2, 9});
  AveragedMeasure mu = averaged_measure(ctx, {1, 8});
  Rat by_hand = (measure(translate_right(x, 1), ctx) + measure(translate_right(x, 8), ctx)) /
                rat(2);
  CHECK(mu(x) == by_hand);
}

TEST_CASE("conjugate core: single set returns it unchanged") {
  UniverseRef u = cyclic_universe(64);
  GroupSet a = interval(u, -8, 8);
  MeasureContext ctx = MeasureContext::normalized(a);
  AveragedMeasure mu = averaged_measure(ctx, {0});
  GroupSet x = interval(u, -4, 4);
  GroupSet d = common_conjugate_core({x}, {Int(3)}, a, 2, mu);
  CHECK(d == x);
}

TEST_CASE("conjugate core: identical subgroups give the subgroup") {
  UniverseRef u = cyclic_universe(64);
  GroupSet h = GroupSet::of(u, {0, 16, 32, 48});
  MeasureContext ctx = MeasureContext::normalized(h);
  AveragedMeasure mu = averaged_measure(ctx, {0});
  GroupSet d = common_conjugate_core({h, h, h}, {Int(1), Int(1), Int(1)}, h, 1, mu);
  CHECK(d == h);
  CHECK(product_set(inverse_set(d), d) == h);
}

TEST_CASE("conjugate core on two translated intervals") {
  UniverseRef u = cyclic_universe(512);
  GroupSet ambient = interval(u, -64, 64);
  MeasureContext ctx = MeasureContext::normalized(ambient);
  AveragedMeasure mu = averaged_measure(ctx, {0});
  GroupSet x1 = interval(u, -40, 24);   // 65 elements
  GroupSet x2 = interval(u, -24, 40);
  Int n1 = rat_ceil(measure(ambient, ctx) / measure(x1, ctx));
  Int n2 = rat_ceil(measure(ambient, ctx) / measure(x2, ctx));
  ApproxCertificate ac = approx_constant(ambient);
  ConjugateCoreTrace trace;
  GroupSet d = common_conjugate_core({x1, x2}, {n1, n2}, ambient, ac.K, mu, &trace);
  GroupSet dd = product_set(inverse_set(d), d);
  CHECK(dd.subset_of(product_set(inverse_set(x1), x1)));
  CHECK(dd.subset_of(power(product_set(x2, inverse_set(x2)), 2)));
  CHECK(Rat(trace.measure_bound_denominator) * mu(d) >= mu(ambient));
}

TEST_CASE("conjugate core rejects a bad measure bound") {
  UniverseRef u = cyclic_universe(64);
  GroupSet a = interval(u, -8, 8);
  MeasureContext ctx = MeasureContext::normalized(a);
  AveragedMeasure mu = averaged_measure(ctx, {0});
  GroupSet x = GroupSet::of(u, {0, 1, 63});
  CHECK_THROWS_AS(common_conjugate_core({x}, {Int(1)}, a, 2, mu), PreconditionViolated);
}

TEST_CASE("normalized refinement on a subgroup is the subgroup") {
  UniverseRef u = cyclic_universe(64);
  GroupSet h = GroupSet::of(u, {0, 16, 32, 48});
  MeasureContext ctx = MeasureContext::normalized(h);
  NormalizeCertificate cert = normalize_refine(h, h, ctx);
  CHECK(cert.s == h);
  CHECK(cert.t_refine.s == h);
  CHECK(cert.s8_conj_in_r4);
  CHECK(cert.wideness.L == 1);
}

TEST_CASE("normalized refinement on an abelian interval") {
  UniverseRef u = cyclic_universe(512);
  GroupSet a = interval(u, -16, 16);
  MeasureContext ctx = MeasureContext::normalized(a);
  NormalizeCertificate cert = normalize_refine(a, a, ctx);
  CHECK(cert.s8_conj_in_r4);
  CHECK(cert.s_conj_in_t6);
  // conjugation is trivial here, so (S^8)^A = S^8
  GroupSet s8 = power(cert.s, 8);
  GroupSet conj = GroupSet::empty(u);
  a.bits().for_each([&](Eid g) { conj = set_union(conj, conjugate(g, s8)); });
  CHECK(conj == s8);
  CHECK(s8.subset_of(power(a, 4)));
  CHECK(cover_replays(a, cert.s, cert.wideness.translates));
}

TEST_CASE("normalized refinement on the heisenberg(5) ball") {
  UniverseRef u = Universe::from_table(build_heisenberg(5));
  // radius-2 ball over {1, x^{±1}, y^{±1}}
  GroupSet gens = GroupSet::of(u, {0, 25, 100, 5, 20});
  GroupSet a = power(gens, 2);
  REQUIRE(a.symmetric());
  MeasureContext ctx = MeasureContext::normalized(a);
  GroupSet r = gens;  // R^4 = gens^4 ⊆ A^4
  NormalizeCertificate cert = normalize_refine(a, r, ctx);

  GroupSet r4 = power(r, 4);
  GroupSet t4 = power(cert.t_refine.s, 4);
  CHECK(power(t4, 12).subset_of(r4));
  // every conjugation containment, replayed per element
  for (size_t i = 0; i < cert.cover_elements.size(); ++i)
    CHECK(conjugate(cert.cover_elements[i], cert.s).subset_of(t4));
  GroupSet s8 = power(cert.s, 8);
  bool all = true;
  a.bits().for_each([&](Eid g) {
    if (!conjugate(g, s8).subset_of(r4)) all = false;
  });
  CHECK(all);
  CHECK(cert.s8_conj_in_r4);
  CHECK(cert.s.symmetric());
  CHECK(cert.s.contains_identity());
  // recorded averaged-measure bound, against A's own constant
  CHECK(cert.mu_bar_a <= rat(approx_constant(a).K) * cert.mu_a);
}

TEST_CASE("normalized refinement rejects R escaping A^4") {
  UniverseRef u = cyclic_universe(64);
  GroupSet a = interval(u, -2, 2);
  MeasureContext ctx = MeasureContext::normalized(a);
  GroupSet r = interval(u, -11, 11);  // R^4 = [-44..44] ⊄ [-8..8]
  CHECK_THROWS_AS(normalize_refine(a, r, ctx), PreconditionViolated);
}

TEST_SUITE_END();

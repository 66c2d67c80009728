#include "apxgrp/certio.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace apxgrp {

std::string hash_str(uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

nlohmann::json int_str(const Int& v) { return v.get_str(); }

nlohmann::json set_to_json(const UniverseRef& u, const GroupSet& s) {
  nlohmann::json j;
  j["hash"] = hash_str(s.hash());
  j["elements"] = elements_to_json(u, s.elements());
  if (u->is_local()) j["depth"] = s.depth();
  return j;
}

GroupSet set_from_json(const UniverseRef& u, const nlohmann::json& j) {
  GroupSet s = GroupSet::of(u, elements_from_json(u, j.at("elements")));
  if (u->is_local() && j.contains("depth")) s = s.with_depth(j.at("depth").get<int>());
  return s;
}

}  // namespace

nlohmann::json approx_to_json(const UniverseRef& u, const ApproxCertificate& c) {
  nlohmann::json j;
  j["set_hash"] = hash_str(c.set_hash);
  j["K"] = c.K;
  j["witness"] = elements_to_json(u, c.witness);
  j["witness_depth"] = c.witness_depth;
  j["verified"] = c.verified;
  return j;
}

nlohmann::json cover_to_json(const UniverseRef& u, const CoverCertificate& c) {
  nlohmann::json j;
  j["target_hash"] = hash_str(c.target_hash);
  j["tile_hash"] = hash_str(c.tile_hash);
  j["translates"] = elements_to_json(u, c.translates);
  j["L"] = c.L;
  j["bound_claimed"] = c.bound_claimed ? nlohmann::json(int_str(*c.bound_claimed))
                                       : nlohmann::json(nullptr);
  j["pool"] = c.pool;
  j["translate_depth"] = c.translate_depth;
  j["verified"] = c.verified;
  return j;
}

nlohmann::json schedule_to_json(const Schedule& s) {
  nlohmann::json j;
  j["K"] = s.K;
  j["epsilon"] = rat_str(s.epsilon);
  j["n_max"] = s.n_max;
  nlohmann::json ts = nlohmann::json::array();
  for (const Rat& t : s.t_values) ts.push_back(rat_str(t));
  j["t_values"] = ts;
  j["truncation_index"] =
      s.truncation_index ? nlohmann::json(*s.truncation_index) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json refine_to_json(const UniverseRef& u, const RefineCertificate& c) {
  nlohmann::json j;
  j["m"] = c.m;
  j["epsilon"] = rat_str(c.epsilon);
  j["rho"] = rat_str(c.rho);
  j["approx"] = approx_to_json(u, c.approx);
  j["schedule"] = schedule_to_json(c.schedule);
  nlohmann::json fe = nlohmann::json::array();
  for (const FEntry& e : c.f_entries) {
    nlohmann::json je;
    je["index"] = e.index;
    je["t"] = rat_str(e.t);
    je["f"] = rat_str(e.f_hat);
    je["minimizer"] = elements_to_json(u, e.minimizer);
    je["minimizer_hash"] = hash_str(e.minimizer_hash);
    je["origin"] = e.origin;
    je["saturated"] = e.saturated;
    je["family"] = e.family_trace;
    fe.push_back(std::move(je));
  }
  j["f_entries"] = fe;
  j["chosen_index"] = c.chosen_index;
  j["t"] = rat_str(c.chosen_t);
  j["f_value"] = rat_str(c.f_value);
  j["B"] = set_to_json(u, c.near_minimizer);
  j["S"] = set_to_json(u, c.s);
  j["containment_S_pow_m_in_A4"] = c.containment_checked;
  j["wideness"] = cover_to_json(u, c.wideness);
  j["wideness_bound"] = int_str(c.wideness_bound);
  j["search_failed"] = c.search_failed;
  j["near_minimality"] = "heuristic";
  j["notes"] = c.notes;
  return j;
}

nlohmann::json normalize_to_json(const UniverseRef& u, const NormalizeCertificate& c) {
  nlohmann::json j;
  j["R"] = set_to_json(u, c.r);
  j["N_wide"] = c.n_wide;
  j["R_approx"] = approx_to_json(u, c.r_approx);
  j["T_refine"] = refine_to_json(u, c.t_refine);
  j["T48_in_R4"] = c.t48_in_r4;
  j["A_cover_by_T"] = cover_to_json(u, c.a_cover_by_t);
  j["cover_elements"] = elements_to_json(u, c.cover_elements);
  j["D"] = set_to_json(u, c.d);
  j["S"] = set_to_json(u, c.s);
  nlohmann::json trace;
  trace["chosen_translates"] = elements_to_json(u, c.core_trace.chosen_translates);
  trace["cover_sizes"] = c.core_trace.cover_sizes;
  trace["measure_bound_denominator"] = int_str(c.core_trace.measure_bound_denominator);
  j["core_trace"] = trace;
  j["conj_in_T4"] = c.conj_in_t4;
  j["S_conj_in_T6"] = c.s_conj_in_t6;
  j["S8_conj_in_R4"] = c.s8_conj_in_r4;
  j["wideness"] = cover_to_json(u, c.wideness);
  j["mu_bar_A"] = rat_str(c.mu_bar_a);
  j["mu_A"] = rat_str(c.mu_a);
  j["notes"] = c.notes;
  return j;
}

nlohmann::json chain_to_json(const UniverseRef& u, const ChainReport& r) {
  nlohmann::json j;
  j["mode"] = r.mode == ChainMode::Plain ? "plain" : "normal";
  nlohmann::json stages = nlohmann::json::array();
  for (const ChainStage& st : r.stages) {
    nlohmann::json js;
    js["index"] = st.index;
    js["S"] = set_to_json(u, st.s);
    js["H"] = set_to_json(u, st.h);
    js["mu_H"] = rat_str(st.mu_h);
    js["L"] = st.wideness_L;
    js["H_cover_in_A"] = cover_to_json(u, st.h_cover_in_a);
    if (st.refine) js["refine"] = refine_to_json(u, *st.refine);
    if (st.normalize) js["normalize"] = normalize_to_json(u, *st.normalize);
    stages.push_back(std::move(js));
  }
  j["stages"] = stages;
  j["stabilized_at"] =
      r.stabilized_at ? nlohmann::json(*r.stabilized_at) : nlohmann::json(nullptr);
  j["final_is_subgroup"] = r.final_is_subgroup;
  j["final_is_A_normalized"] = r.final_is_a_normalized
                                   ? nlohmann::json(*r.final_is_a_normalized)
                                   : nlohmann::json(nullptr);
  j["index_in_generated"] =
      r.index_in_generated ? nlohmann::json(int_str(*r.index_in_generated))
                           : nlohmann::json(nullptr);
  return j;
}

nlohmann::json ruzsa_to_json(const UniverseRef& u, const GroupSet& x, const GroupSet& y,
                             const RuzsaCover& rc) {
  nlohmann::json j;
  j["X"] = set_to_json(u, x);
  j["Y"] = set_to_json(u, y);
  j["translates"] = elements_to_json(u, rc.translates);
  j["bound"] = int_str(rc.bound);
  return j;
}

nlohmann::json wide_to_json(const UniverseRef& u, const GroupSet& b, const GroupSet& tile,
                            const CoverCertificate& c) {
  nlohmann::json j;
  j["B"] = set_to_json(u, b);
  j["tile"] = set_to_json(u, tile);
  j["cover"] = cover_to_json(u, c);
  return j;
}

nlohmann::json equiv_to_json(const UniverseRef& u, const GroupSet& astar,
                             const EquivalenceResult& r) {
  nlohmann::json j;
  j["Astar"] = set_to_json(u, astar);
  j["B"] = set_to_json(u, r.b);
  j["A_wide_in_B"] = cover_to_json(u, r.a_wide_in_b);
  j["Astar_wide_in_B"] = cover_to_json(u, r.astar_wide_in_b);
  j["n"] = r.n;
  j["intersection"] = set_to_json(u, r.intersection);
  j["intersection_wide_in_B"] = cover_to_json(u, r.intersection_wide_in_b);
  return j;
}

nlohmann::json make_certificate(const std::string& kind, const std::string& instance_path,
                                const Instance& inst, nlohmann::json payload) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = kind;
  j["instance"]["path"] = instance_path;
  j["instance"]["hash"] = hash_str(inst.hash());
  j["payload"] = std::move(payload);
  return j;
}

void write_certificate(const nlohmann::json& cert, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInstance("cannot write certificate file: " + path);
  out << cert.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Verification: replay every claim. Helpers return the name of the first
// failing check, or nullopt.

namespace {

using Fail = std::optional<std::string>;

Fail verify_cover_payload(const UniverseRef& u, const nlohmann::json& j,
                          const GroupSet& target, const GroupSet& tile,
                          const std::string& what) {
  std::vector<Eid> zs = elements_from_json(u, j.at("translates"));
  int depth = j.value("translate_depth", 1);
  if (j.at("L").get<long>() != static_cast<long>(zs.size()))
    return what + ": L differs from the translate count";
  if (!cover_replays(target, tile, zs, depth)) return what + ": cover replay";
  if (!j.at("bound_claimed").is_null()) {
    Int bound(j.at("bound_claimed").get<std::string>());
    if (Int(static_cast<long>(zs.size())) > bound) return what + ": L exceeds bound";
  }
  return std::nullopt;
}

Fail verify_approx_payload(const UniverseRef& u, const nlohmann::json& j,
                           const GroupSet& a, const std::string& what) {
  std::vector<Eid> witness = elements_from_json(u, j.at("witness"));
  if (j.at("K").get<long>() != static_cast<long>(witness.size()))
    return what + ": K differs from the witness size";
  if (!approx_replays(a, witness)) return what + ": E·A ⊇ A² replay";
  return std::nullopt;
}

Fail verify_schedule_payload(const nlohmann::json& j, const GroupSet& a) {
  long K = j.at("K").get<long>();
  Rat eps = rat_parse(j.at("epsilon").get<std::string>());
  Schedule fresh = build_schedule(K, eps, &a);
  if (fresh.n_max != j.at("n_max").get<long>()) return "schedule: n_max";
  const auto& ts = j.at("t_values");
  if (ts.size() != fresh.t_values.size()) return "schedule: t_values length";
  for (size_t k = 0; k < fresh.t_values.size(); ++k)
    if (rat_parse(ts[k].get<std::string>()) != fresh.t_values[k])
      return "schedule: t_" + std::to_string(k) + " exactness";
  if (j.at("truncation_index").is_null() != !fresh.truncation_index.has_value())
    return "schedule: truncation index";
  if (fresh.truncation_index &&
      j.at("truncation_index").get<size_t>() != *fresh.truncation_index)
    return "schedule: truncation index";
  return std::nullopt;
}

// `a` plays the ambient role: the instance set for top-level certificates, R
// for the nested refinement inside a normalization, the previous stage inside
// a chain.
Fail verify_refine_payload(const UniverseRef& u, const nlohmann::json& j,
                           const GroupSet& a) {
  int m = j.at("m").get<int>();
  if (m < 2) return "refine: m >= 2";
  Rat eps = rat_parse(j.at("epsilon").get<std::string>());
  Rat rho = rat_parse(j.at("rho").get<std::string>());
  if (eps != rat(1, 4L * m)) return "refine: epsilon = 1/(4m)";
  if (rho != rat(1, m)) return "refine: rho = 1/m";

  GroupSet s = set_from_json(u, j.at("S"));
  GroupSet a4 = power(a, 4);
  if (!power(s, static_cast<unsigned>(m)).subset_of(a4)) return "refine: S^m ⊆ A^4";
  if (!s.symmetric() || !s.contains_identity()) return "refine: S symmetric with 1";

  if (auto f = verify_approx_payload(u, j.at("approx"), a, "refine approx")) return f;
  long K = j.at("approx").at("K").get<long>();
  if (j.at("schedule").at("K").get<long>() != K) return "refine: schedule K";
  if (rat_parse(j.at("schedule").at("epsilon").get<std::string>()) != eps)
    return "refine: schedule epsilon";
  if (auto f = verify_schedule_payload(j.at("schedule"), a)) return f;

  MeasureContext ctx = MeasureContext::normalized(a);
  Rat mu_a = measure(a, ctx);
  const auto& entries = j.at("f_entries");
  if (entries.empty()) return "refine: empty f entries";
  std::vector<Rat> fvals;
  std::vector<Rat> tvals;
  for (const auto& e : entries) {
    Rat t = rat_parse(e.at("t").get<std::string>());
    Rat f = rat_parse(e.at("f").get<std::string>());
    GroupSet bk =
        GroupSet::of(u, elements_from_json(u, e.at("minimizer"))).with_depth(a.depth());
    if (!bk.subset_of(a)) return "refine: minimizer ⊆ A";
    if (measure(bk, ctx) < t * mu_a) return "refine: minimizer meets the t-threshold";
    if (measure(product_set(bk, a), ctx) != f * mu_a) return "refine: f witness replay";
    fvals.push_back(f);
    tvals.push_back(t);
  }
  size_t chosen = j.at("chosen_index").get<size_t>();
  if (chosen + 1 >= fvals.size()) return "refine: chosen index in range";
  bool failed = j.at("search_failed").get<bool>();
  if (!failed && fvals[chosen + 1] < (rat(1) - eps) * fvals[chosen])
    return "refine: plateau inequality";

  GroupSet b = set_from_json(u, j.at("B")).with_depth(a.depth());
  GroupSet chosen_min =
      GroupSet::of(u, elements_from_json(u, entries[chosen].at("minimizer")))
          .with_depth(a.depth());
  if (b != chosen_min) return "refine: B is the chosen minimizer";
  if (rat_parse(j.at("t").get<std::string>()) != tvals[chosen]) return "refine: chosen t";

  GroupSet s_fresh = stabilizer_set(b, rho, a, ctx);
  if (s_fresh != s) return "refine: stabilizer membership replay";

  // Wideness: translates from A, cover replays, bound ⌊2K/t⌋ unless flagged.
  const auto& wj = j.at("wideness");
  std::vector<Eid> zs = elements_from_json(u, wj.at("translates"));
  for (Eid z : zs)
    if (!a.contains(z)) return "refine: wideness translates drawn from A";
  if (auto f = verify_cover_payload(u, wj, a, s, "refine wideness")) return f;
  Int bound = rat_floor(rat(2 * K) / tvals[chosen]);
  if (Int(j.at("wideness_bound").get<std::string>()) != bound)
    return "refine: wideness bound value";
  if (!failed && Int(static_cast<long>(zs.size())) > bound)
    return "refine: L ≤ 2K/t";
  return std::nullopt;
}

Fail verify_normalize_payload(const UniverseRef& u, const nlohmann::json& j,
                              const GroupSet& a, const MeasureContext& ctx) {
  GroupSet r = set_from_json(u, j.at("R"));
  GroupSet s = set_from_json(u, j.at("S"));
  GroupSet d = set_from_json(u, j.at("D"));
  GroupSet r4 = power(r, 4);
  GroupSet a4 = power(a, 4);

  // Headline containment first.
  GroupSet s8 = power(s, 8);
  GroupSet conj8 = GroupSet::empty(u);
  bool per_a = true;
  a.bits().for_each([&](Eid g) {
    GroupSet c = conjugate(g, s8, a.depth());
    if (!c.subset_of(r4)) per_a = false;
    conj8 = set_union(conj8, c);
  });
  if (!per_a || !conj8.subset_of(r4)) return "normalize: (S^8)^A ⊆ R^4";

  if (!r.symmetric() || !r.contains_identity()) return "normalize: R symmetric with 1";
  if (!r4.subset_of(a4)) return "normalize: R^4 ⊆ A^4";

  // Nested refinement of R with m = 48.
  if (j.at("T_refine").at("m").get<int>() != 48) return "normalize: T refinement uses m = 48";
  if (auto f = verify_refine_payload(u, j.at("T_refine"), r)) return f;
  GroupSet t = set_from_json(u, j.at("T_refine").at("S"));
  GroupSet t4 = power(t, 4);
  if (!power(t4, 12).subset_of(r4)) return "normalize: T^48 ⊆ R^4";

  // Cover of A by translates a_i T with a_i ∈ A.
  std::vector<Eid> ais = elements_from_json(u, j.at("cover_elements"));
  for (Eid ai : ais)
    if (!a.contains(ai)) return "normalize: cover elements drawn from A";
  if (auto f = verify_cover_payload(u, j.at("A_cover_by_T"), a, t, "normalize A-cover"))
    return f;

  // S = D^{-1} D and the core containments.
  if (product_set(inverse_set(d), d) != s) return "normalize: S = D^{-1}D";
  GroupSet a6 = power(a, 6);
  if (!d.subset_of(a6)) return "normalize: D ⊆ A^6";
  std::vector<GroupSet> conjugates;
  for (Eid ai : ais)
    conjugates.push_back(
        translate_right(translate(ai, t, a.depth()), u->inv(ai), a.depth()));
  if (!conjugates.empty() && !d.subset_of(conjugates[0]))
    return "normalize: D ⊆ X_1";
  const auto& trace = j.at("core_trace");
  std::vector<Eid> picks = elements_from_json(u, trace.at("chosen_translates"));
  if (picks.size() + 1 != conjugates.size()) return "normalize: core trace length";
  for (size_t i = 1; i < conjugates.size(); ++i) {
    GroupSet tile = product_set(conjugates[i], inverse_set(conjugates[i]));
    if (!d.subset_of(translate(picks[i - 1], tile, a6.depth())))
      return "normalize: D ⊆ z_i X_iX_i^{-1}";
  }
  for (size_t i = 0; i < conjugates.size(); ++i)
    if (!conjugate(ais[i], s, a.depth()).subset_of(t4))
      return "normalize: S^{a_i} ⊆ T^4";
  GroupSet t6 = power(t, 6);
  GroupSet conj1 = GroupSet::empty(u);
  a.bits().for_each([&](Eid g) { conj1 = set_union(conj1, conjugate(g, s, a.depth())); });
  if (!conj1.subset_of(t6)) return "normalize: S^A ⊆ T^6";
  if (!conj8.subset_of(power(t4, 12))) return "normalize: (S^8)^A ⊆ T^48";

  // Core measure bound: K^{n-1} N_1..N_n mu(D) >= mu(A^6), with the averaged
  // measure over the cover elements.
  AveragedMeasure mu_bar = averaged_measure(ctx, ais, a.depth());
  Int denom(trace.at("measure_bound_denominator").get<std::string>());
  if (Rat(denom) * mu_bar(d) < mu_bar(a6)) return "normalize: core measure bound";
  if (rat_parse(j.at("mu_bar_A").get<std::string>()) != mu_bar(a))
    return "normalize: recorded mu_bar(A)";

  if (auto f = verify_approx_payload(u, j.at("R_approx"), r, "normalize R witness"))
    return f;
  if (auto f = verify_cover_payload(u, j.at("wideness"), a, s, "normalize wideness"))
    return f;
  return std::nullopt;
}

Fail verify_chain_payload(const UniverseRef& u, const nlohmann::json& j, const GroupSet& a,
                          const MeasureContext& ctx) {
  bool normal = j.at("mode").get<std::string>() == "normal";
  const auto& stages = j.at("stages");
  if (stages.empty()) return "chain: at least one stage";

  std::optional<GroupSet> prev_s;
  std::optional<GroupSet> prev_h;
  std::optional<size_t> first_stable;
  for (size_t i = 0; i < stages.size(); ++i) {
    const auto& js = stages[i];
    GroupSet s = set_from_json(u, js.at("S")).with_depth(u->is_local() ? 1 : 0);
    GroupSet h = set_from_json(u, js.at("H"));
    if (power(s, 4) != h) return "chain: H_i = S_i^4";
    if (i == 0) {
      if (s != a) return "chain: S_0 = A";
    } else {
      if (!h.subset_of(*prev_h)) return "chain: descent H_i ⊆ H_{i-1}";
      if (normal) {
        if (!js.contains("normalize")) return "chain: stage certificate present";
        GroupSet stage_r = set_from_json(u, js.at("normalize").at("R"));
        if (stage_r != *prev_s) return "chain: R is the previous stage";
        if (auto f = verify_normalize_payload(u, js.at("normalize"), a, ctx)) return f;
      } else {
        if (!js.contains("refine")) return "chain: stage certificate present";
        if (js.at("refine").at("m").get<int>() != 8) return "chain: stage uses m = 8";
        if (auto f = verify_refine_payload(u, js.at("refine"), *prev_s)) return f;
        GroupSet stage_s = set_from_json(u, js.at("refine").at("S"));
        if (stage_s != s) return "chain: stage S matches its refinement";
      }
      if (!first_stable && h == *prev_h) first_stable = i;
    }
    if (auto f = verify_cover_payload(u, js.at("H_cover_in_A"), a, h, "chain H cover"))
      return f;
    prev_s = std::move(s);
    prev_h = std::move(h);
  }

  if (j.at("stabilized_at").is_null() != !first_stable.has_value())
    return "chain: stabilization index";
  if (first_stable && j.at("stabilized_at").get<size_t>() != *first_stable)
    return "chain: stabilization index";

  const GroupSet& h = *prev_h;
  bool subgroup = product_set(h, h).subset_of(h) && h.symmetric() && h.contains_identity();
  if (j.at("final_is_subgroup").get<bool>() != subgroup) return "chain: subgroup closure";
  if (first_stable && !subgroup) return "chain: stabilized implies subgroup";

  if (normal && first_stable) {
    bool inv = true;
    a.bits().for_each([&](Eid g) {
      if (conjugate(g, h, a.depth()) != h) inv = false;
    });
    if (j.at("final_is_A_normalized").is_null() ||
        j.at("final_is_A_normalized").get<bool>() != inv)
      return "chain: A-normalization record";
    if (!inv) return "chain: aHa^{-1} = H for stabilized H";
  }

  if (!j.at("index_in_generated").is_null()) {
    if (u->is_local()) return "chain: index only in table mode";
    auto [gen, n] = generated(a);
    (void)n;
    if (Int(j.at("index_in_generated").get<std::string>()) !=
        Int(gen.count()) / Int(h.count()))
      return "chain: index in generated subgroup";
  }
  return std::nullopt;
}

Fail verify_ruzsa_payload(const UniverseRef& u, const nlohmann::json& j,
                          const MeasureContext& ctx) {
  GroupSet x = set_from_json(u, j.at("X"));
  GroupSet y = set_from_json(u, j.at("Y"));
  std::vector<Eid> zs = elements_from_json(u, j.at("translates"));
  for (Eid z : zs)
    if (!x.contains(z)) return "ruzsa: Z ⊆ X";
  std::vector<DenseBitset> rows;
  for (Eid z : zs) rows.push_back(translate(z, y, x.depth()).bits());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t k = i + 1; k < rows.size(); ++k)
      if (rows[i].intersects(rows[k])) return "ruzsa: disjoint translates";
  if (!x.empty_set()) {
    GroupSet yy = product_set(y, inverse_set(y));
    if (!cover_replays(x, yy, zs, x.depth())) return "ruzsa: X ⊆ ZYY^{-1}";
    Int bound = rat_floor(measure(product_set(x, y), ctx) / measure(y, ctx));
    if (Int(j.at("bound").get<std::string>()) != bound) return "ruzsa: bound value";
    if (Int(static_cast<long>(zs.size())) > bound) return "ruzsa: |Z| ≤ ⌊μ(XY)/μ(Y)⌋";
  }
  return std::nullopt;
}

Fail verify_wide_payload(const UniverseRef& u, const nlohmann::json& j, const GroupSet& a,
                         const MeasureContext& ctx) {
  GroupSet b = set_from_json(u, j.at("B"));
  GroupSet tile = set_from_json(u, j.at("tile"));
  if (b.empty_set()) return "wide: μ(B) > 0";
  if (product_set(b, inverse_set(b)) != tile) return "wide: tile = BB^{-1}";
  if (auto f = verify_cover_payload(u, j.at("cover"), a, tile, "wide cover")) return f;
  Int bound = rat_floor(measure(product_set(a, b), ctx) / measure(b, ctx));
  if (Int(static_cast<long>(j.at("cover").at("translates").size())) > bound)
    return "wide: L ≤ ⌊μ(AB)/μ(B)⌋";
  return std::nullopt;
}

Fail verify_equiv_payload(const UniverseRef& u, const nlohmann::json& j, const GroupSet& a,
                          const MeasureContext& ctx) {
  GroupSet astar = set_from_json(u, j.at("Astar"));
  GroupSet b = set_from_json(u, j.at("B"));
  if (product_set(product_set(a, astar), a) != b) return "equiv: B = A·A*·A";
  if (auto f = verify_cover_payload(u, j.at("A_wide_in_B"), b, a, "equiv A-wideness"))
    return f;
  if (auto f =
          verify_cover_payload(u, j.at("Astar_wide_in_B"), b, astar, "equiv A*-wideness"))
    return f;
  int n = j.at("n").get<int>();
  if (n < 1) return "equiv: n >= 1";
  GroupSet inter = set_intersect(power(a, static_cast<unsigned>(n)),
                                 power(astar, static_cast<unsigned>(n)));
  GroupSet recorded = set_from_json(u, j.at("intersection"));
  if (inter != recorded) return "equiv: intersection = A^n ∩ A*^n";
  if (auto f = verify_cover_payload(u, j.at("intersection_wide_in_B"), b, inter,
                                    "equiv intersection wideness"))
    return f;
  Int bound = rat_floor(measure(product_set(b, inter), ctx) / measure(inter, ctx));
  if (Int(static_cast<long>(j.at("intersection_wide_in_B").at("translates").size())) > bound)
    return "equiv: L within the measure bound";
  return std::nullopt;
}

}  // namespace

VerifyResult verify_certificate(const nlohmann::json& cert, const std::string& base_dir) {
  Instance inst;
  std::string kind;
  try {
    kind = cert.at("kind").get<std::string>();
    std::string path = cert.at("instance").at("path").get<std::string>();
    namespace fs = std::filesystem;
    fs::path p(path);
    if (!fs::exists(p) && !base_dir.empty() && p.is_relative() &&
        fs::exists(fs::path(base_dir) / p))
      p = fs::path(base_dir) / p;
    if (!fs::exists(p))
      return {2, "instance file not found: " + path};
    inst = load_instance_file(p.string());
    if (hash_str(inst.hash()) != cert.at("instance").at("hash").get<std::string>())
      return {2, "instance hash mismatch"};
  } catch (const Error& e) {
    return {2, e.what()};
  } catch (const nlohmann::json::exception& e) {
    return {2, std::string("certificate schema: ") + e.what()};
  }

  try {
    MaterializedInstance mat = materialize(inst);
    const auto& payload = cert.at("payload");
    Fail f;
    if (kind == "sanders")
      f = verify_refine_payload(mat.universe, payload, mat.a);
    else if (kind == "normalize")
      f = verify_normalize_payload(mat.universe, payload, mat.a, mat.ctx);
    else if (kind == "chain")
      f = verify_chain_payload(mat.universe, payload, mat.a, mat.ctx);
    else if (kind == "ruzsa")
      f = verify_ruzsa_payload(mat.universe, payload, mat.ctx);
    else if (kind == "wide")
      f = verify_wide_payload(mat.universe, payload, mat.a, mat.ctx);
    else if (kind == "equiv")
      f = verify_equiv_payload(mat.universe, payload, mat.a, mat.ctx);
    else
      return {2, "unknown certificate kind: " + kind};
    if (f) return {1, *f};
    return {0, ""};
  } catch (const nlohmann::json::exception& e) {
    return {2, std::string("certificate schema: ") + e.what()};
  } catch (const Error& e) {
    return {1, std::string("replay error: ") + e.what()};
  }
}

VerifyResult verify_certificate_file(const std::string& cert_path) {
  std::ifstream in(cert_path);
  if (!in) return {2, "cannot open certificate file: " + cert_path};
  nlohmann::json cert;
  try {
    in >> cert;
  } catch (const nlohmann::json::exception& e) {
    return {2, std::string("certificate parse error: ") + e.what()};
  }
  std::filesystem::path dir = std::filesystem::path(cert_path).parent_path();
  return verify_certificate(cert, dir.string());
}

}  // namespace apxgrp

#include "apxgrp/sanders.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>

#include "apxgrp/parallel.hpp"

namespace apxgrp {

Schedule build_schedule(long K, const Rat& epsilon, const GroupSet* a) {
  if (K < 1) throw PreconditionViolated("schedule needs K >= 1");
  if (!(epsilon > 0 && epsilon < 1))
    throw PreconditionViolated("schedule needs 0 < epsilon < 1");
  Schedule s;
  s.K = K;
  s.epsilon = epsilon;

  Rat decay = rat(1) - epsilon;
  Rat v = rat(K);
  long n = 0;
  while (v >= 1) {
    v *= decay;
    ++n;
    if (n > 1000000) throw InternalInvariantBroken("n_max runaway");
  }
  s.n_max = n;

  std::optional<Rat> floor_t;
  if (a) {
    if (a->empty_set()) throw PreconditionViolated("schedule reference set is empty");
    floor_t = rat(1, a->count());
  }
  Rat t = rat(1);
  Rat half = rat(1, 2 * K);
  // Detached schedules stop early; see the type comment.
  size_t detached_cap = static_cast<size_t>(std::min<long>(s.n_max, 12));
  for (size_t k = 0;; ++k) {
    s.t_values.push_back(t);
    if (floor_t) {
      if (t <= *floor_t) {
        s.truncation_index = k;
        break;
      }
    } else if (k >= detached_cap) {
      break;
    }
    t = t * t * half;
  }
  return s;
}

size_t find_plateau(const std::vector<Rat>& f_values, const Rat& epsilon) {
  if (f_values.size() < 2)
    throw PreconditionViolated("plateau search needs at least two values");
  Rat decay = rat(1) - epsilon;
  for (size_t i = 0; i + 1 < f_values.size(); ++i)
    if (f_values[i + 1] >= decay * f_values[i]) return i;
  throw InternalInvariantBroken("no plateau found; input outside [1, K]?");
}

PEvalContext::PEvalContext(const GroupSet& a, long k_const, uint64_t node_budget)
    : a_(a), a2_(power(a, 2)), a3_(power(a, 3)), k_(k_const), budget_(node_budget) {
  if (k_ < 1) throw PreconditionViolated("P evaluation needs K >= 1");
}

bool PEvalContext::lookup(const std::string& key, bool& value) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = memo_.find(key);
  if (it == memo_.end()) return false;
  value = it->second;
  return true;
}

void PEvalContext::store(const std::string& key, bool value) {
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(key, value);
}

void PEvalContext::charge() {
  std::lock_guard<std::mutex> lock(mu_);
  if (++nodes_ > budget_) throw BudgetExceeded("P evaluation node budget exhausted");
}

namespace {

// Decision "target coverable by <= allowed translates of tile from pool":
// greedy first, exact depth-first search when greedy overshoots.
bool coverable_within(const GroupSet& target, const GroupSet& tile, const GroupSet& pool,
                      const Int& allowed, PEvalContext& ctx) {
  if (target.empty_set()) return true;
  if (tile.empty_set() || allowed <= 0) return false;
  std::vector<DenseBitset> rows;
  DenseBitset reachable(target.universe()->size());
  pool.bits().for_each([&](Eid g) {
    DenseBitset row = translate(g, tile, pool.depth()).bits();
    if (row.intersects(target.bits())) {
      reachable |= row;
      rows.push_back(std::move(row));
    }
  });
  if (!target.bits().is_subset_of(reachable)) return false;
  if (allowed >= Int(static_cast<long>(rows.size()))) return true;

  long greedy = 0;
  DenseBitset uncovered = target.bits();
  while (uncovered.any()) {
    uint32_t best = 0;
    const DenseBitset* pick = nullptr;
    for (const auto& row : rows) {
      uint32_t c = row.intersection_count(uncovered);
      if (c > best) {
        best = c;
        pick = &row;
      }
    }
    uncovered.subtract(*pick);
    ++greedy;
  }
  if (Int(greedy) <= allowed) return true;

  // Exact decision, branching on the first uncovered element.
  long k = static_cast<long>(allowed.get_si());
  std::function<bool(const DenseBitset&, long)> rec = [&](const DenseBitset& unc,
                                                          long left) -> bool {
    if (unc.none()) return true;
    if (left == 0) return false;
    ctx.charge();
    uint32_t pivot = unc.first();
    for (const auto& row : rows) {
      if (!row.test(pivot)) continue;
      DenseBitset rest = unc;
      rest.subtract(row);
      if (rec(rest, left - 1)) return true;
    }
    return false;
  };
  return rec(target.bits(), k);
}

}  // namespace

bool eval_P(int n, const Rat& t, const GroupSet& b, PEvalContext& ctx) {
  if (n < 0) throw PreconditionViolated("P recursion depth must be >= 0");
  if (b.empty_set()) return false;
  if (n == 0) return true;

  std::string key = std::to_string(b.hash()) + "#" + std::to_string(n) + "#" + rat_str(t);
  bool cached;
  if (ctx.lookup(key, cached)) return cached;
  ctx.charge();

  bool result = eval_P(n - 1, t, b, ctx);
  if (result) {
    const Universe& u = *b.universe();
    Rat t_next = t * t / rat(2 * ctx.k_const());
    DenseBitset xbits(u.size());
    ctx.a2().bits().for_each([&](Eid g) {
      GroupSet gb = set_intersect(translate(g, b, 2), b);
      if (!eval_P(n - 1, t_next, gb, ctx)) return;
      GroupSet gib = set_intersect(translate(u.inv(g), b, 2), b);
      if (!eval_P(n - 1, t_next, gib, ctx)) return;
      xbits.set(g);
    });
    GroupSet x(b.universe(), std::move(xbits), u.is_local() ? 2 : 0);
    Int allowed = rat_floor(rat(2 * ctx.k_const()) / t);
    result = coverable_within(ctx.a(), x, ctx.a3(), allowed, ctx);
  }
  ctx.store(key, result);
  return result;
}

GroupSet stabilizer_set(const GroupSet& b, const Rat& rho, const GroupSet& a,
                        const MeasureContext& ctx, int threads) {
  require_same_universe(a, b);
  if (b.empty_set()) throw PreconditionViolated("stabilizer needs nonempty B");
  if (!b.subset_of(a)) throw PreconditionViolated("stabilizer needs B ⊆ A");
  if (!(rho > 0 && rho <= 1)) throw PreconditionViolated("stabilizer needs 0 < rho <= 1");
  (void)ctx;

  const Universe& u = *a.universe();
  GroupSet ba = product_set(b, a);
  Rat threshold = rho * rat(ba.count());  // strict: |gBA xor BA| < rho |BA|
  GroupSet a2 = power(a, 2);
  std::vector<Eid> cands = a2.elements();

  std::vector<DenseBitset> parts;
  int nchunks = std::max(1, threads);
  parts.assign(static_cast<size_t>(nchunks), DenseBitset(u.size()));
  parallel_chunks(cands.size(), threads, [&](size_t lo, size_t hi, size_t chunk) {
    DenseBitset& out = parts[chunk % parts.size()];
    for (size_t i = lo; i < hi; ++i) {
      Eid g = cands[i];
      DenseBitset moved = translate(g, ba, 2 * std::max(1, a.depth())).bits();
      moved ^= ba.bits();
      if (Rat(static_cast<long>(moved.count())) < threshold) out.set(g);
    }
  });
  DenseBitset bits(u.size());
  for (const auto& p : parts) bits |= p;
  return GroupSet(a.universe(), std::move(bits), u.is_local() ? 2 * a.depth() : 0);
}

namespace {

// b·A rows over the ambient universe, cached; the throughput kernel for the
// candidate search.
class RowCache {
 public:
  explicit RowCache(const GroupSet& a) : a_(a) {}

  const DenseBitset& row(Eid x) {
    auto it = rows_.find(x);
    if (it != rows_.end()) return it->second;
    return rows_.emplace(x, translate(x, a_, a_.depth()).bits()).first->second;
  }

 private:
  const GroupSet& a_;
  std::unordered_map<Eid, DenseBitset> rows_;
};

DenseBitset or_rows(const DenseBitset& members, RowCache& rows, uint32_t usize) {
  DenseBitset out(usize);
  members.for_each([&](Eid b) { out |= rows.row(b); });
  return out;
}

// Greedy element removal: repeatedly drop the member whose removal shrinks
// |BA| the most (ties to the smaller id) until |B| reaches target_size.
DenseBitset shrink_to(const DenseBitset& start, uint32_t target_size, RowCache& rows,
                      uint32_t usize) {
  DenseBitset b = start;
  uint32_t size = b.count();
  if (size <= target_size) return b;

  std::vector<uint32_t> cnt(usize, 0);
  b.for_each([&](Eid x) { rows.row(x).for_each([&](Eid y) { ++cnt[y]; }); });
  std::vector<uint32_t> delta(usize, 0);
  b.for_each([&](Eid x) {
    uint32_t d = 0;
    rows.row(x).for_each([&](Eid y) {
      if (cnt[y] == 1) ++d;
    });
    delta[x] = d;
  });

  while (size > target_size) {
    Eid pick = usize;
    uint32_t best = 0;
    bool first = true;
    b.for_each([&](Eid x) {
      if (first || delta[x] > best) {
        best = delta[x];
        pick = x;
        first = false;
      }
    });
    b.reset(pick);
    --size;
    rows.row(pick).for_each([&](Eid y) {
      if (--cnt[y] == 1) {
        // y's unique coverer gains shrink potential
        DenseBitset coverers = rows.row(y);  // y·A = coverer set since A = A^{-1}
        coverers &= b;
        Eid owner = coverers.first();
        if (owner < usize) ++delta[owner];
      }
    });
  }
  return b;
}

struct Candidate {
  DenseBitset bits;
  uint32_t size;
  std::string origin;
  Rat f;  // |BA| / |A|
};

}  // namespace

RefineCertificate sanders_refine(const GroupSet& a, int m, const MeasureContext& ctx,
                                 const RefineOptions& opts) {
  if (m < 2) throw PreconditionViolated("refinement needs m >= 2");
  if (!a.symmetric() || !a.contains_identity())
    throw NotSymmetric("refinement needs a symmetric set containing 1");

  const Universe& u = *a.universe();
  const uint32_t usize = u.size();
  const Rat mu_a = measure(a, ctx);

  ApproxCertificate approx = approx_constant(a);
  const long K = approx.K;
  const Rat eps = rat(1, 4L * m);
  const Rat rho = rat(1, m);
  Schedule sched = build_schedule(K, eps, &a);
  const size_t kstar = *sched.truncation_index;

  // A must be symmetric for the y·A coverer trick inside shrink_to; checked
  // above. Row cache shared across all schedule indices.
  RowCache rows(a);
  const uint32_t acount = a.count();
  auto f_of = [&](const DenseBitset& bset) {
    return rat(or_rows(bset, rows, usize).count(), acount);
  };
  GroupSet a2 = power(a, 2);

  std::vector<FEntry> entries;
  std::vector<GroupSet> minimizers;
  std::vector<Candidate> survivors;
  std::vector<std::string> notes;

  for (size_t k = 0; k <= kstar; ++k) {
    const Rat& t = sched.t_values[k];
    Rat count_threshold = t * rat(acount);  // |B| >= t|A|
    auto qualifies = [&](uint32_t size) { return Rat(static_cast<long>(size)) >= count_threshold; };

    std::vector<Candidate> family;
    std::unordered_map<uint64_t, size_t> seen;
    auto push = [&](DenseBitset bits, std::string origin) {
      uint32_t size = bits.count();
      if (size == 0 || !qualifies(size)) return;
      uint64_t h = bits.hash();
      auto it = seen.find(h);
      if (it != seen.end() && family[it->second].bits == bits) return;
      Rat f = f_of(bits);
      seen.emplace(h, family.size());
      family.push_back(Candidate{std::move(bits), size, std::move(origin), std::move(f)});
    };

    push(a.bits(), "A");
    for (const auto& s : survivors) push(s.bits, "carried");
    // Densest-translator intersections g B ∩ B from the strongest parents.
    size_t parents = std::min<size_t>(survivors.size(), 2);
    for (size_t p = 0; p < parents; ++p) {
      const DenseBitset& pb = survivors[p].bits;
      GroupSet pset(a.universe(), pb, a.depth());
      std::vector<std::pair<uint32_t, Eid>> scored;
      a2.bits().for_each([&](Eid g) {
        if (g == u.identity()) return;
        DenseBitset gb = translate(g, pset, 2 * std::max(1, a.depth())).bits();
        gb &= pb;
        uint32_t c = gb.count();
        if (c > 0 && qualifies(c)) scored.emplace_back(c, g);
      });
      std::stable_sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return x.second < y.second;
      });
      size_t width = std::min<size_t>(scored.size(), static_cast<size_t>(opts.search_width));
      for (size_t i = 0; i < width; ++i) {
        DenseBitset gb = translate(scored[i].second, pset, 2 * std::max(1, a.depth())).bits();
        gb &= pb;
        push(std::move(gb), "intersect");
      }
    }
    // Greedy shrink toward the threshold size.
    Int tgt = rat_ceil(count_threshold);
    uint32_t target_size = tgt <= 1 ? 1 : static_cast<uint32_t>(tgt.get_ui());
    push(shrink_to(a.bits(), target_size, rows, usize), "shrink:A");
    if (!survivors.empty())
      push(shrink_to(survivors[0].bits, target_size, rows, usize), "shrink:carried");

    if (family.empty()) throw InternalInvariantBroken("empty candidate family");
    size_t best = 0;
    for (size_t i = 1; i < family.size(); ++i)
      if (family[i].f < family[best].f) best = i;

    FEntry e;
    e.index = k;
    e.t = t;
    e.f_hat = family[best].f;
    e.minimizer = GroupSet(a.universe(), family[best].bits, a.depth()).elements();
    e.minimizer_hash = family[best].bits.hash();
    e.origin = family[best].origin;
    for (const Candidate& c : family)
      e.family_trace.push_back(c.origin + " size=" + std::to_string(c.size) +
                               " f=" + rat_str(c.f));
    entries.push_back(std::move(e));
    minimizers.emplace_back(a.universe(), family[best].bits, a.depth());

    // Keep the strongest candidates for the next index.
    std::vector<size_t> order(family.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t x, size_t y) { return family[x].f < family[y].f; });
    std::vector<Candidate> next;
    for (size_t i = 0; i < order.size() && i < static_cast<size_t>(opts.search_width); ++i)
      next.push_back(family[order[i]]);
    survivors = std::move(next);
  }

  // Below the truncation every singleton qualifies and the minimum is exactly
  // 1; record the tail entry with a replayable witness.
  {
    FEntry tail;
    tail.index = kstar + 1;
    tail.t = sched.t_after(kstar);
    tail.f_hat = rat(1);
    Eid b0 = a.bits().first();
    tail.minimizer = {b0};
    DenseBitset single(usize);
    single.set(b0);
    tail.minimizer_hash = single.hash();
    tail.origin = "singleton";
    tail.saturated = true;
    entries.push_back(std::move(tail));
    minimizers.push_back(GroupSet::singleton(a.universe(), b0).with_depth(a.depth()));
  }

  GroupSet a4 = power(a, 4);
  const Rat decay = rat(1) - eps;

  std::optional<size_t> chosen;
  std::optional<GroupSet> chosen_s;
  std::optional<CoverCertificate> chosen_cover;

  for (size_t i = 0; i <= kstar && !chosen; ++i) {
    if (entries[i + 1].f_hat < decay * entries[i].f_hat) continue;  // not a plateau

    const Rat& t = sched.t_values[i];
    const GroupSet& b = minimizers[i];
    GroupSet s = stabilizer_set(b, rho, a, ctx, opts.threads);
    if (!s.symmetric() || !s.contains_identity())
      throw InternalInvariantBroken("stabilizer set lost symmetry");
    if (!power(s, static_cast<unsigned>(m)).subset_of(a4))
      throw InternalInvariantBroken("stabilizer products escaped A^4");

    // Maximal family of pairwise-far translators: scan A ascending, keep a
    // when mu(aB ∩ gB) < t_{i+1} mu(A) against everything kept so far. Its
    // size is at most ⌊2K/t⌋ by the covering argument, and when the plateau
    // is genuine the family's S-translates cover A.
    Rat far_threshold = sched.t_after(i) * rat(acount);
    std::vector<Eid> fam;
    std::vector<DenseBitset> fam_rows;
    a.bits().for_each([&](Eid g) {
      DenseBitset gb = translate(g, b, a.depth()).bits();
      for (const auto& r : fam_rows)
        if (Rat(static_cast<long>(gb.intersection_count(r))) >= far_threshold) return;
      fam.push_back(g);
      fam_rows.push_back(std::move(gb));
    });
    Int bound = rat_floor(rat(2 * K) / t);
    if (Int(static_cast<long>(fam.size())) > bound)
      throw InternalInvariantBroken("far family exceeds the 2K/t bound");

    if (cover_replays(a, s, fam, a.depth())) {
      CoverCertificate cover;
      cover.target_hash = a.hash();
      cover.tile_hash = s.hash();
      cover.translates = fam;
      cover.L = static_cast<long>(fam.size());
      cover.bound_claimed = bound;
      cover.pool = "A (maximal far family)";
      cover.translate_depth = a.depth();
      cover.verified = true;
      chosen = i;
      chosen_s = std::move(s);
      chosen_cover = std::move(cover);
    } else {
      notes.push_back("index " + std::to_string(i) +
                      ": far-family translates of S do not cover A; skipping");
    }
  }

  bool failed = !chosen.has_value();
  if (failed) {
    // Best effort at the saturated index: greedy cover of A by translates of
    // S from pool A. Always verifies; the bound may be missed.
    size_t i = kstar;
    const GroupSet& b = minimizers[i];
    GroupSet s = stabilizer_set(b, rho, a, ctx, opts.threads);
    CoverCertificate cover = cover_by_translates(a, s, a, rat_floor(rat(2 * K) / sched.t_values[i]), "A");
    notes.push_back("no plateau index produced a verified-wide S; best-effort output");
    chosen = i;
    chosen_s = std::move(s);
    chosen_cover = std::move(cover);
  }

  size_t i = *chosen;
  RefineCertificate cert(a, minimizers[i], *chosen_s);
  cert.m = m;
  cert.epsilon = eps;
  cert.rho = rho;
  cert.approx = std::move(approx);
  cert.schedule = std::move(sched);
  cert.f_entries = std::move(entries);
  cert.chosen_index = i;
  cert.chosen_t = cert.schedule.t_values[i];
  cert.f_value = cert.f_entries[i].f_hat;
  cert.containment_checked = power(cert.s, static_cast<unsigned>(m)).subset_of(a4);
  cert.wideness = std::move(*chosen_cover);
  cert.wideness_bound = rat_floor(rat(2 * K) / cert.chosen_t);
  cert.search_failed = failed;
  cert.notes = std::move(notes);
  return cert;
}

}  // namespace apxgrp

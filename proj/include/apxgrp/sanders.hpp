#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "apxgrp/covering.hpp"
#include "apxgrp/setalg.hpp"

namespace apxgrp {

// The t-schedule t_0 = 1, t_{k+1} = t_k^2/(2K), so t_k = 1/(2K)^(2^k - 1),
// together with the pigeonhole horizon n_max = least n with (1-eps)^n K < 1.
// When a reference set is attached, t_values is materialized through
// truncation_index, the first k with t_k <= 1/|A| (below it the threshold
// family admits singletons and the minimum stays at 1). Detached schedules
// materialize a short prefix only; later values would have astronomically
// long denominators and nothing consumes them.
struct Schedule {
  long K = 1;
  Rat epsilon;
  long n_max = 1;
  std::vector<Rat> t_values;
  std::optional<size_t> truncation_index;

  Rat t_after(size_t k) const {  // t_{k+1} even when not materialized
    if (k + 1 < t_values.size()) return t_values[k + 1];
    return t_values.at(k) * t_values.at(k) / rat(2 * K);
  }
};

Schedule build_schedule(long K, const Rat& epsilon, const GroupSet* a = nullptr);

// Least i with f(t_{i+1}) >= (1-eps) f(t_i). Existence for i < n_max is the
// pigeonhole lemma; a miss means corrupted input.
size_t find_plateau(const std::vector<Rat>& f_values, const Rat& epsilon);

// Literal P_n^t recursion, memoized and budgeted; a cross-check facility for
// tiny instances, not a production path.
class PEvalContext {
 public:
  PEvalContext(const GroupSet& a, long k_const, uint64_t node_budget = uint64_t(1) << 20);

  const GroupSet& a() const { return a_; }
  const GroupSet& a2() const { return a2_; }
  const GroupSet& a3() const { return a3_; }
  long k_const() const { return k_; }

  bool lookup(const std::string& key, bool& value);
  void store(const std::string& key, bool value);
  void charge();  // one recursion node; throws BudgetExceeded

 private:
  GroupSet a_, a2_, a3_;
  long k_;
  uint64_t budget_;
  uint64_t nodes_ = 0;
  std::mutex mu_;
  std::map<std::string, bool> memo_;
};

bool eval_P(int n, const Rat& t, const GroupSet& b, PEvalContext& ctx);

// S = {g in A^2 : mu(gBA xor BA) < rho * mu(BA)}, strict; symmetric and
// contains 1 by construction.
GroupSet stabilizer_set(const GroupSet& b, const Rat& rho, const GroupSet& a,
                        const MeasureContext& ctx, int threads = 1);

struct FEntry {
  size_t index = 0;
  Rat t;
  Rat f_hat;                  // min mu(BA)/mu(A) over the searched family
  std::vector<Eid> minimizer;
  uint64_t minimizer_hash = 0;
  std::string origin;
  bool saturated = false;     // tail entry where singletons qualify
  std::vector<std::string> family_trace;  // "origin size=|B| f=..." per candidate
};

struct RefineOptions {
  int search_width = 8;
  int threads = 1;
};

struct RefineCertificate {
  GroupSet a;
  int m = 0;
  Rat epsilon;  // 1/(4m)
  Rat rho;      // 1/m, the strict stabilizer threshold
  ApproxCertificate approx;
  Schedule schedule;
  std::vector<FEntry> f_entries;
  size_t chosen_index = 0;
  Rat chosen_t;
  GroupSet near_minimizer;
  Rat f_value;
  GroupSet s;
  bool containment_checked = false;  // S^m ⊆ A^4, element-exact
  CoverCertificate wideness;         // cover of A by translates of S
  Int wideness_bound;                // ⌊2K/t⌋ at the chosen index
  bool search_failed = false;
  std::vector<std::string> notes;

  RefineCertificate(GroupSet a_, GroupSet b_, GroupSet s_)
      : a(std::move(a_)), near_minimizer(std::move(b_)), s(std::move(s_)) {}
};

// The refinement: walk the truncated schedule, search a candidate family for
// near-minimizers of mu(BA), and at a plateau index build the stabilizer set
// S with S^m ⊆ A^4 and a verified cover of A by at most ⌊2K/t⌋ translates
// of S.
RefineCertificate sanders_refine(const GroupSet& a, int m, const MeasureContext& ctx,
                                 const RefineOptions& opts = {});

}  // namespace apxgrp

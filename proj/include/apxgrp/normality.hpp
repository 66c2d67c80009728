#pragma once

#include <optional>
#include <string>
#include <vector>

#include "apxgrp/covering.hpp"
#include "apxgrp/sanders.hpp"
#include "apxgrp/setalg.hpp"

namespace apxgrp {

// (1/n) Σ μ(X a_i): left-invariant by construction; coincides with μ for
// counting measure, and both values are recorded in certificates.
struct AveragedMeasure {
  MeasureContext base;
  std::vector<Eid> elements;
  int element_depth = 1;

  Rat operator()(const GroupSet& x) const;
};

AveragedMeasure averaged_measure(const MeasureContext& base, std::vector<Eid> elements,
                                 int element_depth = 1);

// Iterated-intersection core: from X_1..X_n ⊆ ambient with N_i μ(X_i) ≥
// μ(ambient), produce D ⊆ X_1 with D^{-1}D ⊆ X_1^{-1}X_1 ∩ ⋂_{i≥2}(X_iX_i^{-1})²
// and K^{n-1} N_1...N_n μ(D) ≥ μ(ambient). Each step Ruzsa-covers the ambient
// by translates of X_iX_i^{-1} and keeps the translate with the largest
// overlap.
struct ConjugateCoreTrace {
  std::vector<Eid> chosen_translates;   // step i >= 2 picks
  std::vector<long> cover_sizes;
  Int measure_bound_denominator = 1;    // K^{n-1} N_1...N_n
};

GroupSet common_conjugate_core(const std::vector<GroupSet>& xs, const std::vector<Int>& ns,
                               const GroupSet& ambient, long ambient_K,
                               const AveragedMeasure& mu, ConjugateCoreTrace* trace = nullptr);

struct NormalizeCertificate {
  GroupSet a;
  GroupSet r;
  long n_wide = 0;                   // wideness of R in A (given or computed)
  ApproxCertificate r_approx;        // composite witness: R is K^3 N-approximate
  RefineCertificate t_refine;        // T = refine(R, 48).S with T^48 ⊆ R^4
  bool t48_in_r4 = false;
  CoverCertificate a_cover_by_t;     // A ⊆ ⋃ a_i T, a_i ∈ A
  std::vector<Eid> cover_elements;
  GroupSet d;
  GroupSet s;                        // D^{-1} D
  ConjugateCoreTrace core_trace;
  std::vector<bool> conj_in_t4;      // per i: S ⊆ a_i T^4 a_i^{-1}
  bool s_conj_in_t6 = false;         // S^A ⊆ T^6
  bool s8_conj_in_r4 = false;        // (S^8)^A ⊆ R^4
  CoverCertificate wideness;         // S wide in A via Ruzsa on (A, D^{-1})
  Rat mu_bar_a;                      // recorded μ̄ values
  Rat mu_a;
  std::vector<std::string> notes;

  NormalizeCertificate(GroupSet a_, GroupSet r_, RefineCertificate t_, GroupSet d_, GroupSet s_)
      : a(std::move(a_)), r(std::move(r_)), t_refine(std::move(t_)), d(std::move(d_)),
        s(std::move(s_)) {}
};

struct NormalizeOptions {
  RefineOptions refine;
};

// The normalized refinement: T = refine(R, 48).S, cover A by translates a_i T,
// average the measure over the a_i, intersect the conjugates a_i T a_i^{-1}
// via the core lemma inside the K^6-approximate ambient A^6, and return
// S = D^{-1}D with (S^8)^A ⊆ R^4, all containments replayed element-exactly.
NormalizeCertificate normalize_refine(const GroupSet& a, const GroupSet& r,
                                      const MeasureContext& ctx,
                                      const NormalizeOptions& opts = {});

}  // namespace apxgrp

#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "apxgrp/normality.hpp"
#include "apxgrp/sanders.hpp"

namespace apxgrp {

enum class ChainMode { Plain, Normal };

struct ChainStage {
  size_t index = 0;
  GroupSet s;
  GroupSet h;  // S^4
  Rat mu_h;
  long wideness_L = 0;           // the refinement's own wideness count
  CoverCertificate h_cover_in_a; // A covered by translates of H_i, replayable
  // Stage 0 carries no certificate; later stages carry the refinement that
  // produced them.
  std::shared_ptr<RefineCertificate> refine;
  std::shared_ptr<NormalizeCertificate> normalize;

  ChainStage(GroupSet s_, GroupSet h_) : s(std::move(s_)), h(std::move(h_)) {}
};

struct ChainReport {
  ChainMode mode = ChainMode::Plain;
  std::vector<ChainStage> stages;
  std::optional<size_t> stabilized_at;  // first index i>=1 with H_i = H_{i-1}
  bool final_is_subgroup = false;
  std::optional<bool> final_is_a_normalized;  // normal mode, stabilized runs
  std::optional<Int> index_in_generated;      // [⟨A⟩ : H] when H is a subgroup
};

struct ChainOptions {
  RefineOptions refine;
};

// Finite truncation of the descending core chain: S_0 = A and
//   plain:  S_{i+1} = refine(S_i, 8).S          (S_{i+1}^8 ⊆ S_i^4)
//   normal: S_{i+1} = normalize(A, R = S_i).S   ((S_{i+1}^8)^A ⊆ S_i^4)
// stopping at stabilization of H_i = S_i^4 or after max_steps stages. In
// local mode each stage's set re-enters as a depth-1 input: its elements are
// materialized window elements, and the factor budget is per refinement.
ChainReport core_chain(const GroupSet& a, int max_steps, ChainMode mode,
                       const MeasureContext& ctx, const ChainOptions& opts = {});

}  // namespace apxgrp

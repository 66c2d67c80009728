#include "apxgrp/chain.hpp"

namespace apxgrp {

ChainReport core_chain(const GroupSet& a, int max_steps, ChainMode mode,
                       const MeasureContext& ctx, const ChainOptions& opts) {
  if (max_steps < 1) throw PreconditionViolated("chain needs max_steps >= 1");
  if (!a.symmetric() || !a.contains_identity())
    throw NotSymmetric("chain needs a symmetric set containing 1");

  ChainReport report;
  report.mode = mode;

  GroupSet a0 = a.universe()->is_local() ? a.with_depth(1) : a;
  auto h_cover = [&](const GroupSet& h) {
    // 1 ∈ H makes A itself a sufficient translate pool.
    return cover_by_translates(a0, h, a0, std::nullopt, "A");
  };
  {
    ChainStage stage(a0, power(a0, 4));
    stage.index = 0;
    stage.mu_h = measure(stage.h, ctx);
    stage.wideness_L = 1;
    stage.h_cover_in_a = h_cover(stage.h);
    report.stages.push_back(std::move(stage));
  }

  for (int step = 1; step <= max_steps; ++step) {
    const ChainStage& prev = report.stages.back();
    GroupSet prev_s = prev.s;
    GroupSet prev_h = prev.h;

    ChainStage* next = nullptr;
    if (mode == ChainMode::Plain) {
      // Refinement inside the previous stage: S^8 ⊆ S_prev^4.
      GroupSet ambient = prev_s.universe()->is_local() ? prev_s.with_depth(1) : prev_s;
      MeasureContext stage_ctx = MeasureContext::normalized(ambient);
      auto cert = std::make_shared<RefineCertificate>(
          sanders_refine(ambient, 8, stage_ctx, opts.refine));
      GroupSet s = cert->s;
      if (prev_s.universe()->is_local()) s = s.with_depth(1);
      ChainStage stage(s, power(s, 4));
      stage.refine = std::move(cert);
      next = &report.stages.emplace_back(std::move(stage));
    } else {
      // Normalized refinement against the fixed ambient A with R = S_prev.
      GroupSet r = prev_s.universe()->is_local() ? prev_s.with_depth(1) : prev_s;
      auto cert = std::make_shared<NormalizeCertificate>(
          normalize_refine(a0, r, ctx, NormalizeOptions{opts.refine}));
      GroupSet s = cert->s;
      if (prev_s.universe()->is_local()) s = s.with_depth(1);
      ChainStage stage(s, power(s, 4));
      stage.normalize = std::move(cert);
      next = &report.stages.emplace_back(std::move(stage));
    }
    next->index = static_cast<size_t>(step);
    next->mu_h = measure(next->h, ctx);
    next->wideness_L = next->refine ? next->refine->wideness.L : next->normalize->wideness.L;
    next->h_cover_in_a = h_cover(next->h);

    // Descent: H_{i+1} ⊆ H_i, from S_{i+1}^8 ⊆ S_i^4 (take the identity
    // conjugate in normal mode).
    if (!next->h.subset_of(prev_h))
      throw InternalInvariantBroken("chain descent H_{i+1} ⊆ H_i failed");

    if (next->h == prev_h) {
      report.stabilized_at = next->index;
      break;
    }
  }

  // Final-stage checks.
  const GroupSet& h = report.stages.back().h;
  bool closed = product_set(h, h).subset_of(h);
  bool sym = h.symmetric() && h.contains_identity();
  report.final_is_subgroup = closed && sym;

  if (mode == ChainMode::Normal && report.stabilized_at) {
    bool normalized = true;
    a0.bits().for_each([&](Eid g) {
      if (conjugate(g, h, a0.depth()) != h) normalized = false;
    });
    report.final_is_a_normalized = normalized;
  }

  if (report.final_is_subgroup && !a.universe()->is_local()) {
    auto [gen, gen_n] = generated(a0);
    (void)gen_n;
    report.index_in_generated = Int(gen.count()) / Int(h.count());
  }
  return report;
}

}  // namespace apxgrp

#pragma once

// Helpers shared by the HOTA core and its extensions. Not installed.

#include <cstddef>

#include "trackscore/error.hpp"
#include "trackscore/hota_core.hpp"

namespace trackscore::detail {

// Association tallies for the trajectory pair behind one TP.
struct TpContext {
  std::size_t frame_index = 0;  // t - 1
  const Match* match = nullptr;
  int gt_id = 0;
  int pr_id = 0;
  int tpa = 0;
  int gt_total = 0;
  int pr_total = 0;

  int fna() const noexcept { return gt_total - tpa; }
  int fpa() const noexcept { return pr_total - tpa; }
  double assoc() const noexcept { return double(tpa) / double(gt_total + pr_total - tpa); }
  double assoc_recall() const noexcept { return double(tpa) / double(gt_total); }
  double assoc_precision() const noexcept { return double(tpa) / double(pr_total); }
};

// Visits every TP in frame order, then in match order within the frame.
template <class Fn>
void for_each_tp(const MatchSet& matches, const SequencePair& seq, const AssociationCounts& counts, Fn&& fn) {
  for (std::size_t t = 0; t < matches.frames.size(); ++t) {
    for (const auto& m : matches.frames[t]) {
      TpContext ctx;
      ctx.frame_index = t;
      ctx.match = &m;
      ctx.gt_id = seq.gt[m.gt].id;
      ctx.pr_id = seq.pr[m.pr].id;
      ctx.tpa = counts.tpa.at({ctx.gt_id, ctx.pr_id});
      ctx.gt_total = counts.gt_total.at(ctx.gt_id);
      ctx.pr_total = counts.pr_total.at(ctx.pr_id);
      fn(ctx);
    }
  }
}

// Detection-level part of the counters; association sums left at zero.
inline AlphaCounters detection_counters(const MatchSet& matches) {
  AlphaCounters c;
  c.tp = matches.tp;
  c.fn = matches.fn;
  c.fp = matches.fp;
  c.loc_sum = matches.sum_similarity;
  return c;
}

inline void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ContractViolation("alpha must lie in (0, 1)");
}

inline double ratio_or_zero(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace trackscore::detail

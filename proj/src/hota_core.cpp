#include "trackscore/hota_core.hpp"

#include <cmath>

#include "hota_internal.hpp"
#include "trackscore/assignment.hpp"
#include "trackscore/error.hpp"

namespace trackscore {

namespace {

// Scale of the similarity tier in the matching score. Per frame the tier is
// multiplied by kSimilarityTier / (n + 1) for n eligible cells, so the summed
// similarity of any pairing stays below kSimilarityTier and only decides
// between pairings whose A_max sums agree to that precision. The TP-count
// tier is exact inside solve_max.
constexpr double kSimilarityTier = 1e-6;

}  // namespace

AlphaGrid AlphaGrid::standard() {
  AlphaGrid grid;
  for (int k = 1; k <= 19; ++k) grid.values.push_back(k / 20.0);
  grid.canonical = true;
  return grid;
}

AlphaGrid AlphaGrid::custom(std::vector<double> values) {
  if (values.empty()) throw ContractViolation("alpha grid must not be empty");
  for (double a : values) detail::require_alpha(a);
  AlphaGrid grid{std::move(values), false};
  if (grid.values == standard().values) grid.canonical = true;
  return grid;
}

AlphaCounters& AlphaCounters::operator+=(const AlphaCounters& o) {
  tp += o.tp;
  fn += o.fn;
  fp += o.fp;
  loc_sum += o.loc_sum;
  ass_sum += o.ass_sum;
  ass_re_sum += o.ass_re_sum;
  ass_pr_sum += o.ass_pr_sum;
  aux_sum += o.aux_sum;
  return *this;
}

PooledCounters& PooledCounters::merge(const PooledCounters& other) {
  if (other.empty()) return *this;
  if (empty()) return *this = other;
  if (grid.values != other.grid.values) throw ContractViolation("cannot pool counters from different alpha grids");
  for (std::size_t a = 0; a < per_alpha.size(); ++a) per_alpha[a] += other.per_alpha[a];
  return *this;
}

double PotentialMatches::a_max(std::size_t gt_index, std::size_t pr_index) const {
  const int n = counts(gt_index, pr_index);
  if (n == 0) return 0.0;
  return double(n) / double(gt.totals()[gt_index] + pr.totals()[pr_index] - n);
}

PotentialMatches potential_matches(const SequencePair& seq, const SimilarityTensor& sim, double alpha) {
  PotentialMatches pm{IdIndex(seq.gt), IdIndex(seq.pr), {}};
  pm.counts = Matrix<int>(pm.gt.size(), pm.pr.size(), 0);
  for (const auto& frame : sim.frames) {
    for (std::size_t i = 0; i < frame.gt_index.size(); ++i) {
      const std::size_t g = pm.gt.index_of(seq.gt[frame.gt_index[i]].id);
      for (std::size_t j = 0; j < frame.pr_index.size(); ++j) {
        if (frame.values(i, j) >= alpha) ++pm.counts(g, pm.pr.index_of(seq.pr[frame.pr_index[j]].id));
      }
    }
  }
  return pm;
}

double a_max(int gt_id, int pr_id, const AssociationCounts& candidate) {
  auto it = candidate.tpa.find({gt_id, pr_id});
  if (it == candidate.tpa.end() || it->second == 0) return 0.0;
  const int n = it->second;
  return double(n) / double(candidate.gt_total.at(gt_id) + candidate.pr_total.at(pr_id) - n);
}

MatchSet match_alpha(const SequencePair& seq, const SimilarityTensor& sim, double alpha) {
  return match_alpha(seq, sim, alpha, AssociationWeight{});
}

MatchSet match_alpha(const SequencePair& seq, const SimilarityTensor& sim, double alpha,
                     const AssociationWeight& weight) {
  detail::require_alpha(alpha);
  const PotentialMatches pm = potential_matches(seq, sim, alpha);

  MatchSet out;
  out.alpha = alpha;
  out.frames.resize(sim.frames.size());
  for (std::size_t t = 0; t < sim.frames.size(); ++t) {
    const auto& frame = sim.frames[t];
    const std::size_t rows = frame.gt_index.size();
    const std::size_t cols = frame.pr_index.size();
    if (rows == 0 || cols == 0) continue;

    std::vector<std::size_t> g(rows), p(cols);
    for (std::size_t i = 0; i < rows; ++i) g[i] = pm.gt.index_of(seq.gt[frame.gt_index[i]].id);
    for (std::size_t j = 0; j < cols; ++j) p[j] = pm.pr.index_of(seq.pr[frame.pr_index[j]].id);

    std::size_t eligible = 0;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) eligible += frame.values(i, j) >= alpha;
    if (eligible == 0) continue;
    const double eps = kSimilarityTier / double(eligible + 1);

    ScoreMatrix score(rows, cols, kIneligible);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        const double s = frame.values(i, j);
        if (s < alpha) continue;
        const double w = weight ? weight(frame.gt_index[i], frame.pr_index[j]) : 1.0;
        score(i, j) = pm.a_max(g[i], p[j]) * w + eps * s;
      }
    }

    for (const auto& [i, j] : solve_max(score).pairs) {
      const double s = frame.values(i, j);
      out.frames[t].push_back(Match{frame.gt_index[i], frame.pr_index[j], s});
      ++out.tp;
      out.sum_similarity += s;
    }
  }
  out.fn = static_cast<std::int64_t>(seq.gt.size()) - out.tp;
  out.fp = static_cast<std::int64_t>(seq.pr.size()) - out.tp;
  return out;
}

AssociationCounts association_counts(const MatchSet& matches, const SequencePair& seq) {
  AssociationCounts counts;
  for (const auto& d : seq.gt) ++counts.gt_total[d.id];
  for (const auto& d : seq.pr) ++counts.pr_total[d.id];
  for (const auto& frame : matches.frames)
    for (const auto& m : frame) ++counts.tpa[{seq.gt[m.gt].id, seq.pr[m.pr].id}];
  return counts;
}

double assoc_score(int gt_id, int pr_id, const AssociationCounts& counts) {
  auto it = counts.tpa.find({gt_id, pr_id});
  if (it == counts.tpa.end() || it->second < 1)
    throw ContractViolation("association score requested for a pair with no true positive");
  const int tpa = it->second;
  return double(tpa) / double(counts.gt_total.at(gt_id) + counts.pr_total.at(pr_id) - tpa);
}

namespace {

// Association sums grouped by id pair. MatchSet alone cannot resolve ids, so
// the TP order used by evaluate_sequence is not available here.
AlphaCounters counters_from_pairs(const MatchSet& matches, const AssociationCounts& counts) {
  AlphaCounters c = detail::detection_counters(matches);
  for (const auto& [key, tpa] : counts.tpa) {
    const int gt_total = counts.gt_total.at(key.first);
    const int pr_total = counts.pr_total.at(key.second);
    const double a = double(tpa) / double(gt_total + pr_total - tpa);
    const double re = double(tpa) / double(gt_total);
    const double pr = double(tpa) / double(pr_total);
    for (int k = 0; k < tpa; ++k) {
      c.ass_sum += a;
      c.ass_re_sum += re;
      c.ass_pr_sum += pr;
    }
  }
  return c;
}

AlphaCounters counters_in_tp_order(const MatchSet& matches, const SequencePair& seq,
                                   const AssociationCounts& counts) {
  AlphaCounters c = detail::detection_counters(matches);
  detail::for_each_tp(matches, seq, counts, [&](const detail::TpContext& tp) {
    c.ass_sum += tp.assoc();
    c.ass_re_sum += tp.assoc_recall();
    c.ass_pr_sum += tp.assoc_precision();
  });
  return c;
}

}  // namespace

AlphaCounters alpha_counters(const MatchSet& matches, const AssociationCounts& counts) {
  return counters_from_pairs(matches, counts);
}

HotaAlphaScores scores_from_counters(const AlphaCounters& c, double w_fn, double w_fp) {
  HotaAlphaScores s;
  if (c.tp + c.fn + c.fp == 0) {
    return HotaAlphaScores{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  }
  if (c.tp == 0) {
    s.loc_a = 1.0;
    return s;
  }
  const double tp = double(c.tp);
  const double fn = w_fn * double(c.fn);
  const double fp = w_fp * double(c.fp);
  s.det_re = tp / (tp + fn);
  s.det_pr = tp / (tp + fp);
  s.det_a = tp / (tp + fn + fp);
  s.ass_a = c.ass_sum / tp;
  s.ass_re = c.ass_re_sum / tp;
  s.ass_pr = c.ass_pr_sum / tp;
  s.loc_a = c.loc_sum / tp;
  s.hota = std::sqrt(s.det_a * s.ass_a);
  return s;
}

HotaAlphaScores hota_alpha(const MatchSet& matches, const AssociationCounts& counts) {
  return scores_from_counters(alpha_counters(matches, counts));
}

HotaScores integrate(std::span<const HotaAlphaScores> per_alpha, const AlphaGrid& grid) {
  if (per_alpha.size() != grid.size() || grid.size() == 0)
    throw ContractViolation("integration needs exactly one score record per alpha value");
  HotaScores out{grid, {per_alpha.begin(), per_alpha.end()}, {}};
  auto& m = out.integrated;
  for (const auto& s : per_alpha) {
    m.hota += s.hota;
    m.det_a += s.det_a;
    m.ass_a += s.ass_a;
    m.det_re += s.det_re;
    m.det_pr += s.det_pr;
    m.ass_re += s.ass_re;
    m.ass_pr += s.ass_pr;
    m.loc_a += s.loc_a;
  }
  const double n = double(per_alpha.size());
  for (double* f : {&m.hota, &m.det_a, &m.ass_a, &m.det_re, &m.det_pr, &m.ass_re, &m.ass_pr, &m.loc_a}) *f /= n;
  return out;
}

HotaScores scores_from_counters(const PooledCounters& counters) {
  if (counters.empty()) {
    // Nothing evaluated: every threshold is vacuously perfect.
    const AlphaGrid grid = counters.grid.size() ? counters.grid : AlphaGrid::standard();
    std::vector<HotaAlphaScores> per(grid.size(), scores_from_counters(AlphaCounters{}));
    return integrate(per, grid);
  }
  std::vector<HotaAlphaScores> per;
  per.reserve(counters.per_alpha.size());
  for (const auto& c : counters.per_alpha) per.push_back(scores_from_counters(c));
  return integrate(per, counters.grid);
}

std::pair<HotaScores, PooledCounters> evaluate_sequence(const SequencePair& seq, const AlphaGrid& grid) {
  const SequencePair clean = drop_ignored(seq);
  return evaluate_sequence(clean, build_similarity(clean), grid);
}

std::pair<HotaScores, PooledCounters> evaluate_sequence(const SequencePair& seq, const SimilarityTensor& sim,
                                                        const AlphaGrid& grid) {
  PooledCounters counters{grid, {}};
  counters.per_alpha.reserve(grid.size());
  for (double alpha : grid.values) {
    const MatchSet matches = match_alpha(seq, sim, alpha);
    counters.per_alpha.push_back(counters_in_tp_order(matches, seq, association_counts(matches, seq)));
  }
  return {scores_from_counters(counters), std::move(counters)};
}

HotaScores pool(std::span<const PooledCounters> counters) {
  PooledCounters total;
  for (const auto& c : counters) total.merge(c);
  return scores_from_counters(total);
}

}  // namespace trackscore

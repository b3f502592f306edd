#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "trackscore/matrix.hpp"
#include "trackscore/track_model.hpp"

namespace trackscore {

// Localisation thresholds at which every HOTA-family score is evaluated.
struct AlphaGrid {
  std::vector<double> values;
  bool canonical = true;

  /// 0.05, 0.10, ..., 0.95 (19 values), each computed as k / 20.
  static AlphaGrid standard();
  /// Any non-empty list of thresholds in (0, 1); flagged non-canonical.
  static AlphaGrid custom(std::vector<double> values);

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const AlphaGrid&, const AlphaGrid&) = default;
};

// One true positive. gt / pr index into SequencePair::gt / ::pr.
struct Match {
  std::size_t gt = 0;
  std::size_t pr = 0;
  double similarity = 0.0;
};

struct MatchSet {
  double alpha = 0.5;
  std::vector<std::vector<Match>> frames;  // frames[t - 1]
  std::int64_t tp = 0;
  std::int64_t fn = 0;
  std::int64_t fp = 0;
  double sum_similarity = 0.0;
};

// Sufficient statistics for the association score of every TP.
struct AssociationCounts {
  std::map<std::pair<int, int>, int> tpa;  // (gtID, prID) -> matched count
  std::map<int, int> gt_total;             // gtID -> detections
  std::map<int, int> pr_total;             // prID -> detections
};

struct HotaAlphaScores {
  double hota = 0.0;
  double det_a = 0.0;
  double ass_a = 0.0;
  double det_re = 0.0;
  double det_pr = 0.0;
  double ass_re = 0.0;
  double ass_pr = 0.0;
  double loc_a = 0.0;

  friend bool operator==(const HotaAlphaScores&, const HotaAlphaScores&) = default;
};

struct HotaScores {
  AlphaGrid grid;
  std::vector<HotaAlphaScores> per_alpha;
  HotaAlphaScores integrated;  // arithmetic mean over the grid, field by field

  friend bool operator==(const HotaScores&, const HotaScores&) = default;
};

// Additive per-threshold tallies. For the extensions, ass_sum carries the
// variant's per-TP contribution and aux_sum its side score (FragA, ClaA).
struct AlphaCounters {
  std::int64_t tp = 0;
  std::int64_t fn = 0;
  std::int64_t fp = 0;
  double loc_sum = 0.0;
  double ass_sum = 0.0;
  double ass_re_sum = 0.0;
  double ass_pr_sum = 0.0;
  double aux_sum = 0.0;

  AlphaCounters& operator+=(const AlphaCounters& o);
  friend bool operator==(const AlphaCounters&, const AlphaCounters&) = default;
};

struct PooledCounters {
  AlphaGrid grid;
  std::vector<AlphaCounters> per_alpha;  // empty = identity for merge

  bool empty() const noexcept { return per_alpha.empty(); }
  /// Adds other's tallies. Throws ContractViolation if both are non-empty and
  /// their grids differ.
  PooledCounters& merge(const PooledCounters& other);
};

// Co-occurrence counts N(g, p): frames where g and p both have a detection and
// their similarity reaches alpha, ignoring bijectivity.
struct PotentialMatches {
  IdIndex gt;
  IdIndex pr;
  Matrix<int> counts;  // gt.size() x pr.size()

  /// N / (gt_total + pr_total - N), 0 when N = 0.
  double a_max(std::size_t gt_index, std::size_t pr_index) const;
};

PotentialMatches potential_matches(const SequencePair& seq, const SimilarityTensor& sim, double alpha);

/// Upper bound on the association score of (gt_id, pr_id). `candidate.tpa`
/// holds potential-match counts N(g, p) rather than matched counts.
double a_max(int gt_id, int pr_id, const AssociationCounts& candidate);

// Multiplies the A_max tier of the matching score for one (gt det, pr det)
// cell. Used by the classification-aware variants.
using AssociationWeight = std::function<double(std::size_t gt_det, std::size_t pr_det)>;

/// Per-frame optimal matching at threshold alpha. Only cells with S >= alpha
/// are eligible. The pairing maximises, in strict priority order, the number
/// of TPs, the sum of A_max (times `weight` if given) and the sum of S.
MatchSet match_alpha(const SequencePair& seq, const SimilarityTensor& sim, double alpha);
MatchSet match_alpha(const SequencePair& seq, const SimilarityTensor& sim, double alpha,
                     const AssociationWeight& weight);

AssociationCounts association_counts(const MatchSet& matches, const SequencePair& seq);

/// A(c) for a TP pairing gt_id with pr_id: |TPA| / (|TPA| + |FNA| + |FPA|).
/// Throws ContractViolation if the pair has no TP.
double assoc_score(int gt_id, int pr_id, const AssociationCounts& counts);

AlphaCounters alpha_counters(const MatchSet& matches, const AssociationCounts& counts);

/// Ratios from tallies. w_fn / w_fp scale the FN and FP terms of the detection
/// denominators (1 = plain HOTA). Degenerate conventions: no gt and no pr
/// detections gives every score 1; TP = 0 otherwise gives 0 for every score
/// except LocA, which is 1.
HotaAlphaScores scores_from_counters(const AlphaCounters& c, double w_fn = 1.0, double w_fp = 1.0);

HotaAlphaScores hota_alpha(const MatchSet& matches, const AssociationCounts& counts);

/// Field-wise mean of the per-threshold scores. DetA and AssA are averaged
/// separately; HOTA is never recombined after averaging.
HotaScores integrate(std::span<const HotaAlphaScores> per_alpha, const AlphaGrid& grid);

HotaScores scores_from_counters(const PooledCounters& counters);

/// Full pipeline over every threshold of the grid. Ground-truth rows marked
/// consider = false are dropped first.
std::pair<HotaScores, PooledCounters> evaluate_sequence(const SequencePair& seq,
                                                        const AlphaGrid& grid = AlphaGrid::standard());

/// Same, with a precomputed similarity tensor for exactly this sequence.
std::pair<HotaScores, PooledCounters> evaluate_sequence(const SequencePair& seq, const SimilarityTensor& sim,
                                                        const AlphaGrid& grid = AlphaGrid::standard());

/// Merges the tallies in order and recomputes every ratio from the totals.
HotaScores pool(std::span<const PooledCounters> counters);

}  // namespace trackscore

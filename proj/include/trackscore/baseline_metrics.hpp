#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trackscore/track_model.hpp"

namespace trackscore {

// CLEAR MOT family. Counts are kept so benchmark totals can be re-derived.
struct ClearScores {
  double mota = 1.0;
  double motp = 1.0;  // mean similarity over TPs (higher is better)
  double moda = 1.0;
  std::int64_t tp = 0;
  std::int64_t fn = 0;
  std::int64_t fp = 0;
  std::int64_t idsw = 0;
  std::int64_t idtr = 0;  // informational, never enters MOTA
  std::int64_t num_gt = 0;
  double sum_similarity = 0.0;

  /// Recomputes the ratios from the counters. With no gt the denominator is 1;
  /// MOTP is 1 when there is no TP.
  static ClearScores from_counts(std::int64_t tp, std::int64_t fn, std::int64_t fp, std::int64_t idsw,
                                 std::int64_t idtr, double sum_similarity);
  ClearScores& operator+=(const ClearScores& o);
};

/// Sequential CLEAR matching at threshold alpha. A pair matched in frame t-1
/// is kept in frame t when both detections are present and S >= alpha; the
/// remaining detections are assigned to maximise the TP count, then the sum of S.
ClearScores clear_mot(const SequencePair& seq, const SimilarityTensor& sim, double alpha = 0.5);

/// MODA written as DetRe * (2 - 1/DetPr). Throws UndefinedValue if det_pr is 0.
double moda_decomposition(double det_re, double det_pr);

struct IdentityScores {
  double idf1 = 1.0;
  double id_recall = 1.0;
  double id_precision = 1.0;
  std::int64_t idtp = 0;
  std::int64_t idfn = 0;
  std::int64_t idfp = 0;

  /// 0/0 ratios are 1 when there is nothing to score at all, else 0.
  static IdentityScores from_counts(std::int64_t idtp, std::int64_t idfn, std::int64_t idfp);
  IdentityScores& operator+=(const IdentityScores& o);
};

/// Trajectory-level bijective matching minimising IDFN + IDFP. A gt and a pr
/// trajectory overlap in the frames where both are present with S >= alpha.
IdentityScores idf1(const SequencePair& seq, const SimilarityTensor& sim, double alpha = 0.5);

// Track-mAP ---------------------------------------------------------------

enum class TrajectorySimilarity { detection, spatiotemporal };

/// |TP| / (|TP| + |FN| + |FP|) between two trajectories, a TP being a frame
/// where both are present with S >= alpha.
double s_tr_detection(const Trajectory& gt, const Trajectory& pr, double alpha = 0.5);

/// Sum over frames of box intersection area divided by the sum of union area.
/// A frame where only one trajectory is present adds its area to the union.
/// Throws ContractViolation for point geometry.
double s_tr_spatiotemporal(const Trajectory& gt, const Trajectory& pr);

struct PrPoint {
  double precision = 0.0;
  double recall = 0.0;
  double interp_precision = 0.0;
};

struct TrackMapCurve {
  double alpha_tr = 0.5;
  std::vector<PrPoint> points;  // one per ranked prTraj
  double ap = 0.0;
};

struct TrackMapScores {
  double map = 0.0;  // mean AP over the alpha_tr values
  std::vector<TrackMapCurve> curves;
};

/// Fills interp_precision (running maximum from the right) and returns the
/// 101-point average over recall levels 0.00, 0.01, ..., 1.00. A recall level
/// no point reaches contributes 0.
double average_precision(std::vector<PrPoint>& points);

/// prTraj confidence is the mean of its detections' confidences; a missing
/// confidence is a FormatError. prTrajs are ranked by confidence, ties by
/// sequence order and then first appearance. Each takes the unmatched gtTraj of
/// the same sequence with the highest S_tr >= alpha_tr (ties: lower gt id).
TrackMapScores track_map(std::span<const SequencePair> seqs, std::span<const double> alpha_tr,
                         TrajectorySimilarity variant = TrajectorySimilarity::detection);

TrackMapScores track_map(const SequencePair& seq, std::span<const double> alpha_tr,
                         TrajectorySimilarity variant = TrajectorySimilarity::detection);

}  // namespace trackscore

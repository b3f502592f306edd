#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "trackscore/hota_core.hpp"

namespace trackscore {

struct Weights {
  double w_fn = 1.0;
  double w_fp = 1.0;
  double w_fna = 1.0;
  double w_fpa = 1.0;

  /// Throws ContractViolation unless every weight lies in [0, 1].
  void validate() const;
};

// Class distribution of each predicted detection, keyed by (frame, prID).
struct ClassProbs {
  std::map<std::pair<int, int>, std::map<int, double>> probs;

  /// Probability that the detection (frame, id) belongs to class_id; 0 for a
  /// class it does not list. Throws ReferenceError for an unknown detection.
  double at(int frame, int id, int class_id) const;
  /// Throws FormatError unless every distribution sums to 1 within 1e-9 and
  /// has entries in [0, 1].
  void validate() const;
};

// Classes whose false positives count, per frame. A frame without an entry
// counts none.
struct FederationMask {
  std::map<int, std::set<int>> classes;

  bool counts(int frame, int class_id) const;
};

// HOTA-shaped result of one extension. In `scores`, ass_a carries the
// variant's per-TP term averaged over TPs and hota = sqrt(det_a * ass_a).
struct ExtensionResult {
  HotaScores scores;
  PooledCounters counters;
  std::vector<double> side_per_alpha;  // FragA or ClaA; empty when undefined
  double side = 0.0;
};

/// Scores from (possibly pooled) extension counters. w_fn / w_fp as in
/// scores_from_counters. The side score per alpha is aux_sum / TP, with the
/// degenerate conventions of HOTA (1 for empty input, 0 without TPs).
ExtensionResult finish_extension(const PooledCounters& counters, bool with_side, double w_fn = 1.0,
                                 double w_fp = 1.0);

/// A(c) of every TP using only frames up to and including the TP's frame.
/// Result is indexed like matches.frames.
std::vector<std::vector<double>> online_assoc_scores(const MatchSet& matches, const SequencePair& seq);

/// Fragment accuracy F(c) of every TP, indexed like matches.frames. A fragment
/// is a run of TPs of one (gtID, prID) in consecutive frames.
std::vector<std::vector<double>> fragment_scores(const MatchSet& matches, const SequencePair& seq);

ExtensionResult ohota(const SequencePair& seq, const SimilarityTensor& sim,
                      const AlphaGrid& grid = AlphaGrid::standard());

/// side = FragA.
ExtensionResult fa_hota(const SequencePair& seq, const SimilarityTensor& sim,
                        const AlphaGrid& grid = AlphaGrid::standard());

ExtensionResult w_hota(const SequencePair& seq, const SimilarityTensor& sim, const Weights& w,
                       const AlphaGrid& grid = AlphaGrid::standard());

/// side = ClaA. Ground-truth detections need a class id (ContractViolation
/// otherwise).
ExtensionResult ca_hota(const SequencePair& seq, const SimilarityTensor& sim, const ClassProbs& probs,
                        const AlphaGrid& grid = AlphaGrid::standard());

// Per-class tallies behind the class-averaged variants.
struct ClassTally {
  double assoc_sum = 0.0;  // sum of A(c) * C(c, cls) over TPs of gt class cls
  std::int64_t tp = 0;
  std::int64_t fn = 0;
  double fp = 0.0;  // sum of [I(f, cls) *] C(f, cls) over FPs

  ClassTally& operator+=(const ClassTally& o);
};

struct ClassPooledCounters {
  AlphaGrid grid;
  std::vector<std::map<int, ClassTally>> per_alpha;  // empty = identity for merge

  bool empty() const noexcept { return per_alpha.empty(); }
  ClassPooledCounters& merge(const ClassPooledCounters& other);
};

struct ClassAveragedResult {
  AlphaGrid grid;
  std::vector<double> per_alpha;                    // class mean at each alpha
  double score = 0.0;                               // mean over alpha
  std::map<int, std::vector<double>> per_class;     // NaN where the class is excluded
  ClassPooledCounters counters;
};

/// Class mean of the per-class scores at every alpha, then the alpha mean.
/// A class with no gt and no weighted FP at some alpha is left out of that
/// alpha's mean; with no class left the mean is 1.
ClassAveragedResult finish_class_averaged(const ClassPooledCounters& counters);

ClassAveragedResult ca2_hota(const SequencePair& seq, const SimilarityTensor& sim, const ClassProbs& probs,
                             const AlphaGrid& grid = AlphaGrid::standard());

ClassAveragedResult fed_hota(const SequencePair& seq, const SimilarityTensor& sim, const ClassProbs& probs,
                             const FederationMask& mask, const AlphaGrid& grid = AlphaGrid::standard());

struct CrHotaTerm {
  double target = 0.0;     // recall level k
  bool reachable = false;
  double threshold = 0.0;  // confidence cut; detections with conf >= threshold kept
  double hota = 0.0;
  double det_re = 0.0;
  double ratio = 0.0;      // hota / det_re, 0 when unreachable
};

struct CrHotaResult {
  double score = 0.0;
  std::vector<CrHotaTerm> terms;
};

/// Confidence-ranked HOTA over a benchmark. For each recall level k in
/// 0.05..0.95 the highest confidence cut whose pooled, alpha-integrated DetRe
/// reaches k is evaluated. Every prediction needs a confidence (FormatError).
CrHotaResult cr_hota(std::span<const SequencePair> seqs, const AlphaGrid& grid = AlphaGrid::standard());

}  // namespace trackscore

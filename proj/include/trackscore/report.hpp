#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trackscore/baseline_metrics.hpp"
#include "trackscore/hota_core.hpp"
#include "trackscore/hota_extensions.hpp"

namespace trackscore {

// What to compute. Extension names: ohota, fa, w, ca, ca2, fed, cr.
struct EvalOptions {
  bool hota = true;
  bool clear = true;
  bool identity = true;
  bool track_map = false;
  std::vector<std::string> extensions;
  AlphaGrid grid = AlphaGrid::standard();
  double clear_alpha = 0.5;  // threshold for CLEAR MOT and IDF1
  std::vector<double> track_map_alpha = {0.5};
  TrajectorySimilarity track_map_similarity = TrajectorySimilarity::detection;
  Weights weights;
  int jobs = 1;

  bool has_extension(const std::string& name) const;
  /// Throws ContractViolation for unknown extension names or bad settings.
  void validate() const;
};

/// Parses `hota,clear,identity,trackmap,ext:<name>,...` into `opts`.
/// Throws ContractViolation for unknown entries.
void select_metrics(EvalOptions& opts, const std::string& list);

// Inputs of one sequence. Class data is needed only by ca/ca2/fed.
struct SequenceInput {
  SequencePair seq;
  std::optional<ClassProbs> probs;
  std::optional<FederationMask> mask;
};

struct SequenceReport {
  std::string name;
  PooledCounters hota_counters;
  HotaScores hota;
  ClearScores clear;
  IdentityScores identity;
  std::map<std::string, ExtensionResult> extensions;            // ohota, fa, w, ca
  std::map<std::string, ClassAveragedResult> class_extensions;  // ca2, fed
};

struct ScoreReport {
  EvalOptions options;
  std::vector<SequenceReport> sequences;
  SequenceReport combined;  // recomputed from merged counters
  std::optional<TrackMapScores> track_map;
  std::optional<CrHotaResult> cr_hota;
};

SequenceReport evaluate_one(const SequenceInput& input, const EvalOptions& opts);

/// Evaluates every sequence (on opts.jobs worker threads) and reduces the
/// counters in input order, so the report does not depend on opts.jobs.
ScoreReport evaluate_benchmark(const std::vector<SequenceInput>& inputs, const EvalOptions& opts);

enum class ReportFormat { json, csv };

/// JSON: stable key order, shortest round-trip reals, per-alpha arrays under
/// "curves". CSV: one row per sequence plus COMBINED, reals with 6 decimals.
std::string emit_report(const ScoreReport& report, ReportFormat format);

/// Per-alpha table of every HOTA sub-metric for each sequence and COMBINED.
std::string emit_curves(const ScoreReport& report, ReportFormat format);

}  // namespace trackscore

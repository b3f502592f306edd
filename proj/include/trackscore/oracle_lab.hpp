#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trackscore/track_model.hpp"

namespace trackscore {

using ScenarioParams = std::map<std::string, std::string>;

// A synthetic fixture. `params` holds every parameter with defaults filled in,
// so (name, params) reproduces `seq` exactly.
struct Scenario {
  std::string name;
  ScenarioParams params;
  SequencePair seq;
};

struct ScenarioInfo {
  std::string name;
  std::string params;  // "key=default|alternatives ..." for usage text
  std::string summary;
};

const std::vector<ScenarioInfo>& scenario_registry();

/// Builds a registered scenario. Unknown names throw LookupError; unknown or
/// invalid parameters throw ContractViolation. Every box is a unit square at
/// an exact-overlap or zero-overlap position, so S is 0 or 1.
Scenario scenario(const std::string& name, const ScenarioParams& params = {});

struct ExhaustiveResult {
  double hota = 0.0;
  double det_a = 0.0;
  double ass_a = 0.0;
  std::size_t states = 0;  // distinct TPA tables reached
};

/// Best HOTA_alpha over every combination of per-frame bijective matchings on
/// cells with S >= alpha. Works on the table of TPA counts, which fully
/// determines HOTA_alpha, so equal tables reached by different matchings are
/// merged. Throws SizeError for more than 6 frames, more than 6 detections per
/// side in a frame, or more than `state_budget` distinct tables.
ExhaustiveResult exhaustive_hota(const SequencePair& seq, const SimilarityTensor& sim, double alpha,
                                 std::size_t state_budget = std::size_t{1} << 21);

enum class Formulation { jaccard, f1, moda, excl_det_assoc };

/// Throws LookupError for an unknown name.
Formulation parse_formulation(const std::string& name);
std::string to_string(Formulation f);

struct AltScores {
  double det = 0.0;
  double ass = 0.0;
  double score = 0.0;  // sqrt(det * ass); negative products keep their sign
};

/// HOTA-shaped score with a different inner/outer formulation, on the core
/// matching at `alpha`.
///  jaccard:        TP/(TP+FN+FP),            TPA/(TPA+FNA+FPA)
///  f1:             2TP/(2TP+FN+FP),          2TPA/(2TPA+FNA+FPA)
///  moda:           (TP-FP)/(TP+FN),          (TPA-FPA)/(TPA+FNA)
///  excl_det_assoc: jaccard, with FNA/FPA counting only matched detections
AltScores alt_formulation_scores(const SequencePair& seq, const SimilarityTensor& sim, double alpha, Formulation f);

struct CoveragePoint {
  double ratio = 0.0;  // len(traj 1) / len(gt)
  double a = 0.0;
  double b = 0.0;
  double a_swapped = 0.0;
  double b_swapped = 0.0;
};

/// Scores of the two-result study for ratios 1/length ... (length-1)/length.
std::vector<CoveragePoint> coverage_sweep(Formulation f, int length = 20);

struct RandomInstanceOptions {
  int max_frames = 6;
  int max_dets = 5;  // per side per frame
};

/// Seeded random instance with jittered 2x2 boxes (continuous IoU), nearby
/// objects competing for predictions, id switches and clutter.
SequencePair random_instance(std::uint64_t seed, const RandomInstanceOptions& options = {});

struct OracleMismatch {
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double core = 0.0;
  double oracle = 0.0;
};

struct OracleCheckReport {
  int trials = 0;
  int comparisons = 0;
  double max_delta = 0.0;
  std::vector<OracleMismatch> mismatches;  // |core - oracle| > tolerance
};

/// Compares the core HOTA_alpha with exhaustive_hota on `trials` instances with
/// seeds seed, seed + 1, ...
OracleCheckReport oracle_check(int trials, std::uint64_t seed, const std::vector<double>& alphas = {0.25, 0.5, 0.75},
                               double tolerance = 1e-9, const RandomInstanceOptions& options = {});

}  // namespace trackscore

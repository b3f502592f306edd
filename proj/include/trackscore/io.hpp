#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "trackscore/hota_extensions.hpp"
#include "trackscore/track_model.hpp"

namespace trackscore {

enum class Side { gt, pred };

/// MOTChallenge text: `frame,id,bb_left,bb_top,bb_width,bb_height,conf,class,visibility`.
/// Fields 7-9 are optional and anything past field 9 is ignored. For gt, field
/// 7 is the consider flag (0 drops the row), 8 the class id, 9 the visibility.
/// For predictions, field 7 is the confidence (absent or -1 leaves it unset,
/// which scores as 1.0) and fields 8-9 are ignored. Blank lines are skipped.
/// Throws ParseError (with line number) for malformed fields, ids < 1 or bad
/// boxes and FormatError for a repeated (frame, id).
std::vector<Detection> parse_mot(std::string_view text, Side side, const std::string& source = "<text>");
/// Throws IoError if the file cannot be read.
std::vector<Detection> parse_mot_file(const std::filesystem::path& path, Side side);

/// Inverse of parse_mot, sorted by (frame, id), shortest round-trip decimals.
std::string write_mot(const std::vector<Detection>& dets, Side side);

/// One record per line: `frame,id,class:prob[;class:prob]...`. Every
/// distribution must sum to 1 within 1e-9 (FormatError).
ClassProbs parse_class_probs(std::string_view text, const std::string& source = "<text>");
ClassProbs parse_class_probs_file(const std::filesystem::path& path);

/// One record per line: `frame,class[;class]...` listing the classes whose
/// false positives count in that frame. `frame,` lists none.
FederationMask parse_federation_mask(std::string_view text, const std::string& source = "<text>");
FederationMask parse_federation_mask_file(const std::filesystem::path& path);

struct SeqMapEntry {
  std::string name;
  std::filesystem::path gt_path;
  std::filesystem::path result_path;
  int num_frames = 0;  // 0 = take the largest frame number in either file
};

/// Seqmap file: one sequence name per line, optionally `name,num_frames`; a
/// first line reading `name` is a header. Ground truth is looked up as
/// <gt_dir>/<name>/gt/gt.txt, falling back to <gt_dir>/<name>.txt; results as
/// <results_dir>/<name>.txt. Duplicate names are a FormatError.
std::vector<SeqMapEntry> parse_seqmap(std::string_view text, const std::filesystem::path& gt_dir,
                                      const std::filesystem::path& results_dir, const std::string& source = "<text>");
std::vector<SeqMapEntry> parse_seqmap_file(const std::filesystem::path& path, const std::filesystem::path& gt_dir,
                                           const std::filesystem::path& results_dir);

/// Reads both files of an entry and validates the pair.
SequencePair load_sequence(const SeqMapEntry& entry);

/// Whole-file read; IoError on failure.
std::string read_text_file(const std::filesystem::path& path);
/// Creates parent directories as needed; IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace trackscore

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "trackscore/matrix.hpp"

namespace trackscore {

// Axis-aligned box in pixels, stored as (left, top, width, height) like the
// MOTChallenge text format.
struct Box2D {
  double left = 0.0;
  double top = 0.0;
  double width = 1.0;
  double height = 1.0;

  double area() const noexcept { return width * height; }
  friend bool operator==(const Box2D&, const Box2D&) = default;
};

// Ground-plane point in meters.
struct Point2D {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2D&, const Point2D&) = default;
};

using Geometry = std::variant<Box2D, Point2D>;

/// Throws InvalidGeometry unless the box has finite coordinates and positive extents.
void validate(const Box2D& box);
void validate(const Point2D& point);
void validate(const Geometry& geometry);

struct Detection {
  int frame = 1;  // 1-based
  int id = 0;     // gtID or prID
  Geometry geometry = Box2D{};
  int class_id = -1;
  // Predictions only. Empty when the source did not provide a score; use
  // score() where the 1.0 default is acceptable.
  std::optional<double> confidence;
  bool consider = true;     // ground truth only
  double visibility = -1.0;  // -1 = unset

  double score() const noexcept { return confidence.value_or(1.0); }
  friend bool operator==(const Detection&, const Detection&) = default;
};

struct SequencePair {
  std::string name;
  int num_frames = 0;
  std::vector<Detection> gt;
  std::vector<Detection> pr;

  friend bool operator==(const SequencePair&, const SequencePair&) = default;
};

/// Checks frame ranges, per-frame id uniqueness on each side and a single
/// geometry variant across the sequence. Throws FormatError.
void validate(const SequencePair& seq);

/// Copy of seq without ground-truth rows whose consider flag is false.
SequencePair drop_ignored(const SequencePair& seq);

/// Same sequence with the roles of ground truth and prediction exchanged.
SequencePair swap_sides(const SequencePair& seq);

double iou_box(const Box2D& a, const Box2D& b);

/// max(0, 1 - euclidean distance / 1 m).
double similarity_point(const Point2D& a, const Point2D& b);

/// Dispatches on the geometry variant; mixing variants is a FormatError.
double similarity(const Geometry& a, const Geometry& b);

// Similarities for one frame. Rows follow gt_index, columns pr_index; both
// index into SequencePair::gt / ::pr and are ordered by detection id.
struct FrameSimilarity {
  std::vector<std::size_t> gt_index;
  std::vector<std::size_t> pr_index;
  Matrix<double> values;
};

struct SimilarityTensor {
  // frames[t - 1] holds frame t; size equals the sequence's num_frames.
  std::vector<FrameSimilarity> frames;
};

SimilarityTensor build_similarity(const SequencePair& seq);

// Maps raw ids onto dense indices 0..n-1 in ascending id order.
class IdIndex {
public:
  IdIndex() = default;
  explicit IdIndex(const std::vector<Detection>& dets);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t index_of(int id) const;
  int id_at(std::size_t index) const { return ids_.at(index); }
  const std::vector<int>& ids() const noexcept { return ids_; }
  // Number of detections carrying each id.
  const std::vector<int>& totals() const noexcept { return totals_; }

private:
  std::vector<int> ids_;
  std::vector<int> totals_;
};

// Trajectory view used by the trajectory-level metrics.
struct Trajectory {
  int id = 0;
  // Position of the id's first detection in the source list.
  std::size_t first_position = 0;
  // Detections of this id sorted by frame.
  std::vector<Detection> detections;
};

/// Groups detections by id; trajectories are returned in ascending id order.
std::vector<Trajectory> group_trajectories(const std::vector<Detection>& dets);

}  // namespace trackscore

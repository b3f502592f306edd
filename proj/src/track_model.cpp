#include "trackscore/track_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <utility>

#include "trackscore/error.hpp"

namespace trackscore {

void validate(const Box2D& box) {
  if (!std::isfinite(box.left) || !std::isfinite(box.top) || !std::isfinite(box.width) ||
      !std::isfinite(box.height))
    throw InvalidGeometry("box has non-finite coordinates");
  if (box.width <= 0.0 || box.height <= 0.0)
    throw InvalidGeometry("box must have positive width and height");
}

void validate(const Point2D& point) {
  if (!std::isfinite(point.x) || !std::isfinite(point.y))
    throw InvalidGeometry("point has non-finite coordinates");
}

void validate(const Geometry& geometry) {
  std::visit([](const auto& g) { validate(g); }, geometry);
}

double iou_box(const Box2D& a, const Box2D& b) {
  validate(a);
  validate(b);
  const double ix = std::min(a.left + a.width, b.left + b.width) - std::max(a.left, b.left);
  const double iy = std::min(a.top + a.height, b.top + b.height) - std::max(a.top, b.top);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double similarity_point(const Point2D& a, const Point2D& b) {
  validate(a);
  validate(b);
  return std::max(0.0, 1.0 - std::hypot(a.x - b.x, a.y - b.y));
}

double similarity(const Geometry& a, const Geometry& b) {
  if (a.index() != b.index()) throw FormatError("cannot compare detections of different geometry kinds");
  if (const auto* box = std::get_if<Box2D>(&a)) return iou_box(*box, std::get<Box2D>(b));
  return similarity_point(std::get<Point2D>(a), std::get<Point2D>(b));
}

namespace {

void check_side(const std::vector<Detection>& dets, int num_frames, const char* side,
                std::optional<std::size_t>& variant) {
  std::set<std::pair<int, int>> seen;
  for (const auto& d : dets) {
    if (d.frame < 1 || d.frame > num_frames)
      throw FormatError(std::string(side) + " detection in frame " + std::to_string(d.frame) +
                        " outside 1.." + std::to_string(num_frames));
    if (d.id < 0) throw FormatError(std::string(side) + " detection has a negative id");
    if (!seen.emplace(d.frame, d.id).second)
      throw FormatError(std::string(side) + " id " + std::to_string(d.id) + " appears twice in frame " +
                        std::to_string(d.frame));
    if (!variant) variant = d.geometry.index();
    if (*variant != d.geometry.index())
      throw FormatError("sequence mixes box and point geometry");
    validate(d.geometry);
  }
}

}  // namespace

void validate(const SequencePair& seq) {
  if (seq.num_frames < 0) throw FormatError("negative frame count");
  std::optional<std::size_t> variant;
  check_side(seq.gt, seq.num_frames, "gt", variant);
  check_side(seq.pr, seq.num_frames, "pr", variant);
}

SequencePair drop_ignored(const SequencePair& seq) {
  SequencePair out{seq.name, seq.num_frames, {}, seq.pr};
  std::copy_if(seq.gt.begin(), seq.gt.end(), std::back_inserter(out.gt),
               [](const Detection& d) { return d.consider; });
  return out;
}

SequencePair swap_sides(const SequencePair& seq) {
  return SequencePair{seq.name, seq.num_frames, seq.pr, seq.gt};
}

namespace {

std::vector<std::vector<std::size_t>> by_frame(const std::vector<Detection>& dets, int num_frames) {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(num_frames));
  for (std::size_t i = 0; i < dets.size(); ++i) out[static_cast<std::size_t>(dets[i].frame - 1)].push_back(i);
  for (auto& frame : out)
    std::sort(frame.begin(), frame.end(),
              [&](std::size_t a, std::size_t b) { return dets[a].id < dets[b].id; });
  return out;
}

}  // namespace

SimilarityTensor build_similarity(const SequencePair& seq) {
  validate(seq);
  auto gt_frames = by_frame(seq.gt, seq.num_frames);
  auto pr_frames = by_frame(seq.pr, seq.num_frames);

  SimilarityTensor tensor;
  tensor.frames.resize(static_cast<std::size_t>(seq.num_frames));
  for (std::size_t t = 0; t < tensor.frames.size(); ++t) {
    auto& frame = tensor.frames[t];
    frame.gt_index = std::move(gt_frames[t]);
    frame.pr_index = std::move(pr_frames[t]);
    frame.values = Matrix<double>(frame.gt_index.size(), frame.pr_index.size());
    for (std::size_t i = 0; i < frame.gt_index.size(); ++i)
      for (std::size_t j = 0; j < frame.pr_index.size(); ++j)
        frame.values(i, j) =
            similarity(seq.gt[frame.gt_index[i]].geometry, seq.pr[frame.pr_index[j]].geometry);
  }
  return tensor;
}

IdIndex::IdIndex(const std::vector<Detection>& dets) {
  std::map<int, int> counts;
  for (const auto& d : dets) ++counts[d.id];
  ids_.reserve(counts.size());
  totals_.reserve(counts.size());
  for (const auto& [id, n] : counts) {
    ids_.push_back(id);
    totals_.push_back(n);
  }
}

std::size_t IdIndex::index_of(int id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) throw LookupError("unknown id " + std::to_string(id));
  return static_cast<std::size_t>(it - ids_.begin());
}

std::vector<Trajectory> group_trajectories(const std::vector<Detection>& dets) {
  std::map<int, Trajectory> groups;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    auto [it, inserted] = groups.try_emplace(dets[i].id);
    if (inserted) {
      it->second.id = dets[i].id;
      it->second.first_position = i;
    }
    it->second.detections.push_back(dets[i]);
  }
  std::vector<Trajectory> out;
  out.reserve(groups.size());
  for (auto& [id, traj] : groups) {
    std::stable_sort(traj.detections.begin(), traj.detections.end(),
                     [](const Detection& a, const Detection& b) { return a.frame < b.frame; });
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace trackscore

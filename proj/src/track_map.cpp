#include <algorithm>
#include <climits>

#include "trackscore/baseline_metrics.hpp"
#include "trackscore/error.hpp"

namespace trackscore {

namespace {

// Walks two frame-sorted detection lists in lockstep. fn(a, b) gets nullptr
// for the side that is absent at that frame.
template <class Fn>
void zip_frames(const Trajectory& x, const Trajectory& y, Fn&& fn) {
  std::size_t i = 0, j = 0;
  while (i < x.detections.size() || j < y.detections.size()) {
    const int fx = i < x.detections.size() ? x.detections[i].frame : INT_MAX;
    const int fy = j < y.detections.size() ? y.detections[j].frame : INT_MAX;
    if (fx == fy) {
      fn(&x.detections[i++], &y.detections[j++]);
    } else if (fx < fy) {
      fn(&x.detections[i++], nullptr);
    } else {
      fn(nullptr, &y.detections[j++]);
    }
  }
}

struct RankedTrajectory {
  std::size_t seq = 0;
  const Trajectory* traj = nullptr;
  double confidence = 0.0;
};

}  // namespace

double s_tr_detection(const Trajectory& gt, const Trajectory& pr, double alpha) {
  std::int64_t tp = 0;
  zip_frames(gt, pr, [&](const Detection* a, const Detection* b) {
    if (a && b && similarity(a->geometry, b->geometry) >= alpha) ++tp;
  });
  const auto total = static_cast<std::int64_t>(gt.detections.size() + pr.detections.size()) - tp;
  return total > 0 ? double(tp) / double(total) : 0.0;
}

double s_tr_spatiotemporal(const Trajectory& gt, const Trajectory& pr) {
  double inter_sum = 0.0, union_sum = 0.0;
  auto area = [](const Detection& d) {
    const auto* b = std::get_if<Box2D>(&d.geometry);
    if (!b) throw ContractViolation("spatiotemporal trajectory similarity needs box geometry");
    return b->area();
  };
  zip_frames(gt, pr, [&](const Detection* a, const Detection* b) {
    if (a && b) {
      const double aa = area(*a), ab = area(*b);
      const auto& x = std::get<Box2D>(a->geometry);
      const auto& y = std::get<Box2D>(b->geometry);
      const double ix = std::min(x.left + x.width, y.left + y.width) - std::max(x.left, y.left);
      const double iy = std::min(x.top + x.height, y.top + y.height) - std::max(x.top, y.top);
      const double inter = ix > 0.0 && iy > 0.0 ? ix * iy : 0.0;
      inter_sum += inter;
      union_sum += aa + ab - inter;
    } else {
      union_sum += area(a ? *a : *b);
    }
  });
  return union_sum > 0.0 ? inter_sum / union_sum : 0.0;
}

double average_precision(std::vector<PrPoint>& points) {
  double running = 0.0;
  for (auto it = points.rbegin(); it != points.rend(); ++it) {
    running = std::max(running, it->precision);
    it->interp_precision = running;
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    while (n < points.size() && points[n].recall < r) ++n;
    if (n < points.size()) sum += points[n].interp_precision;
  }
  return sum / 101.0;
}

TrackMapScores track_map(std::span<const SequencePair> seqs, std::span<const double> alpha_tr,
                         TrajectorySimilarity variant) {
  if (alpha_tr.empty()) throw ContractViolation("track_map needs at least one alpha_tr value");

  std::vector<std::vector<Trajectory>> gts, prs;
  std::vector<RankedTrajectory> ranked;
  std::size_t num_gt = 0;
  for (const auto& seq : seqs) {
    gts.push_back(group_trajectories(drop_ignored(seq).gt));
    prs.push_back(group_trajectories(seq.pr));
    num_gt += gts.back().size();
  }
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    for (const auto& traj : prs[s]) {
      double sum = 0.0;
      for (const auto& d : traj.detections) {
        if (!d.confidence) throw FormatError("track_map needs a confidence on every prediction (" + seqs[s].name + ")");
        sum += *d.confidence;
      }
      ranked.push_back({s, &traj, sum / double(traj.detections.size())});
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedTrajectory& a, const RankedTrajectory& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.seq != b.seq) return a.seq < b.seq;
    return a.traj->first_position < b.traj->first_position;
  });

  // S_tr for every ranked prTraj against every gtTraj of its sequence.
  std::vector<std::vector<double>> s_tr(ranked.size());
  for (std::size_t r = 0; r < ranked.size(); ++r)
    for (const auto& g : gts[ranked[r].seq])
      s_tr[r].push_back(variant == TrajectorySimilarity::detection ? s_tr_detection(g, *ranked[r].traj)
                                                                    : s_tr_spatiotemporal(g, *ranked[r].traj));

  TrackMapScores out;
  for (double a : alpha_tr) {
    TrackMapCurve curve;
    curve.alpha_tr = a;
    std::vector<std::vector<char>> taken(gts.size());
    for (std::size_t s = 0; s < gts.size(); ++s) taken[s].assign(gts[s].size(), 0);
    std::size_t tp = 0;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      auto& used = taken[ranked[r].seq];
      std::size_t best = used.size();
      for (std::size_t g = 0; g < used.size(); ++g) {
        if (used[g] || s_tr[r][g] < a) continue;
        if (best == used.size() || s_tr[r][g] > s_tr[r][best]) best = g;
      }
      if (best != used.size()) {
        used[best] = 1;
        ++tp;
      }
      PrPoint pt;
      pt.precision = double(tp) / double(r + 1);
      pt.recall = num_gt ? double(tp) / double(num_gt) : 0.0;
      curve.points.push_back(pt);
    }
    if (num_gt == 0) {
      curve.ap = ranked.empty() ? 1.0 : 0.0;
      for (auto& p : curve.points) p.interp_precision = p.precision;
    } else {
      curve.ap = average_precision(curve.points);
    }
    out.curves.push_back(std::move(curve));
  }
  double sum = 0.0;
  for (const auto& c : out.curves) sum += c.ap;
  out.map = sum / double(out.curves.size());
  return out;
}

TrackMapScores track_map(const SequencePair& seq, std::span<const double> alpha_tr, TrajectorySimilarity variant) {
  return track_map(std::span<const SequencePair>(&seq, 1), alpha_tr, variant);
}

}  // namespace trackscore

#pragma once

// Builders and brute-force reference computations shared by the unit tests.
// The oracles here follow the set definitions directly and share no code with
// the library beyond the data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "trackscore/track_model.hpp"

namespace ts_test {

using trackscore::Box2D;
using trackscore::Detection;
using trackscore::SequencePair;

// Unit box in slot `slot`. Equal slots overlap exactly, different slots are disjoint.
inline Detection det(int frame, int id, int slot, double conf = -1.0) {
  Detection d;
  d.frame = frame;
  d.id = id;
  d.geometry = Box2D{10.0 * slot, 0.0, 1.0, 1.0};
  if (conf >= 0.0) d.confidence = conf;
  return d;
}

inline Detection box(int frame, int id, double left, double top, double w, double h) {
  Detection d;
  d.frame = frame;
  d.id = id;
  d.geometry = Box2D{left, top, w, h};
  return d;
}

// One matched pair inside one frame, as positions into seq.gt / seq.pr.
struct RefMatch {
  int frame;
  std::size_t gt;
  std::size_t pr;
  double s;
};

struct RefScores {
  double hota = 0, det_a = 0, ass_a = 0, det_re = 0, det_pr = 0, ass_re = 0, ass_pr = 0, loc_a = 0;
};

// HOTA_alpha of a fixed matching, computing TPA/FNA/FPA as explicit sets for
// every TP (quadratic, on purpose).
inline RefScores reference_scores(const SequencePair& seq, const std::vector<RefMatch>& tps) {
  RefScores r;
  const double ngt = double(seq.gt.size());
  const double npr = double(seq.pr.size());
  const double tp = double(tps.size());
  if (ngt == 0 && npr == 0) return {1, 1, 1, 1, 1, 1, 1, 1};
  if (tps.empty()) {
    r.loc_a = 1;
    return r;
  }
  r.det_re = tp / ngt;
  r.det_pr = tp / npr;
  r.det_a = tp / (ngt + npr - tp);
  for (const auto& c : tps) {
    const int g = seq.gt[c.gt].id;
    const int p = seq.pr[c.pr].id;
    std::size_t tpa = 0, fna = 0, fpa = 0;
    for (const auto& k : tps)
      if (seq.gt[k.gt].id == g && seq.pr[k.pr].id == p) ++tpa;
    for (std::size_t i = 0; i < seq.gt.size(); ++i) {
      if (seq.gt[i].id != g) continue;
      bool with_p = false;
      for (const auto& k : tps)
        if (k.gt == i && seq.pr[k.pr].id == p) with_p = true;
      fna += !with_p;
    }
    for (std::size_t j = 0; j < seq.pr.size(); ++j) {
      if (seq.pr[j].id != p) continue;
      bool with_g = false;
      for (const auto& k : tps)
        if (k.pr == j && seq.gt[k.gt].id == g) with_g = true;
      fpa += !with_g;
    }
    r.ass_a += double(tpa) / double(tpa + fna + fpa);
    r.ass_re += double(tpa) / double(tpa + fna);
    r.ass_pr += double(tpa) / double(tpa + fpa);
    r.loc_a += c.s;
  }
  r.ass_a /= tp;
  r.ass_re /= tp;
  r.ass_pr /= tp;
  r.loc_a /= tp;
  r.hota = std::sqrt(r.det_a * r.ass_a);
  return r;
}

inline double ref_similarity(const Detection& a, const Detection& b) {
  const auto& x = std::get<Box2D>(a.geometry);
  const auto& y = std::get<Box2D>(b.geometry);
  const double ix = std::min(x.left + x.width, y.left + y.width) - std::max(x.left, y.left);
  const double iy = std::min(x.top + x.height, y.top + y.height) - std::max(x.top, y.top);
  if (ix <= 0 || iy <= 0) return 0.0;
  const double inter = ix * iy;
  return inter / (x.width * x.height + y.width * y.height - inter);
}

// Calls fn on every combination of per-frame partial bijections over cells
// with S >= alpha.
inline void for_each_matching(const SequencePair& seq, double alpha,
                              const std::function<void(const std::vector<RefMatch>&)>& fn) {
  std::vector<std::vector<std::vector<RefMatch>>> options(seq.num_frames);
  for (int t = 1; t <= seq.num_frames; ++t) {
    std::vector<std::size_t> g, p;
    for (std::size_t i = 0; i < seq.gt.size(); ++i)
      if (seq.gt[i].frame == t) g.push_back(i);
    for (std::size_t j = 0; j < seq.pr.size(); ++j)
      if (seq.pr[j].frame == t) p.push_back(j);
    auto& opts = options[t - 1];
    std::vector<RefMatch> cur;
    std::vector<char> used(p.size(), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == g.size()) {
        opts.push_back(cur);
        return;
      }
      rec(i + 1);
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (used[j]) continue;
        const double s = ref_similarity(seq.gt[g[i]], seq.pr[p[j]]);
        if (s < alpha) continue;
        used[j] = 1;
        cur.push_back({t, g[i], p[j], s});
        rec(i + 1);
        cur.pop_back();
        used[j] = 0;
      }
    };
    rec(0);
  }
  std::vector<RefMatch> all;
  std::function<void(std::size_t)> walk = [&](std::size_t t) {
    if (t == options.size()) {
      fn(all);
      return;
    }
    for (const auto& o : options[t]) {
      all.insert(all.end(), o.begin(), o.end());
      walk(t + 1);
      all.resize(all.size() - o.size());
    }
  };
  walk(0);
}

inline double brute_force_hota(const SequencePair& seq, double alpha) {
  double best = -1.0;
  for_each_matching(seq, alpha, [&](const std::vector<RefMatch>& m) {
    best = std::max(best, reference_scores(seq, m).hota);
  });
  return best;
}

// Small random box instance: a few objects drifting slightly, predictions
// jittered copies with occasional id swaps, misses and clutter.
inline SequencePair random_sequence(std::uint64_t seed, int max_frames = 4, int max_objects = 3) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  SequencePair seq;
  seq.name = "rand";
  seq.num_frames = pick(1, max_frames);
  const int objects = pick(1, max_objects);
  const int pr_ids = pick(1, objects + 1);
  for (int t = 1; t <= seq.num_frames; ++t) {
    std::set<int> used_pr;
    for (int o = 0; o < objects; ++o) {
      const double x = 3.0 * o + uni(0.0, 1.5);
      const double y = uni(0.0, 1.0);
      if (uni(0, 1) < 0.85) seq.gt.push_back(box(t, o + 1, x, y, 2.0, 2.0));
      if (uni(0, 1) < 0.8) {
        int id = (uni(0, 1) < 0.7) ? std::min(o + 1, pr_ids) : pick(1, pr_ids);
        if (used_pr.count(id)) continue;
        used_pr.insert(id);
        seq.pr.push_back(box(t, id, x + uni(-0.8, 0.8), y + uni(-0.8, 0.8), 2.0, 2.0));
      }
    }
    if (uni(0, 1) < 0.3) {
      int id = pick(1, pr_ids + 1);
      if (!used_pr.count(id)) seq.pr.push_back(box(t, id, uni(0, 3.0 * objects), uni(0, 1), 2.0, 2.0));
    }
  }
  return seq;
}

}  // namespace ts_test

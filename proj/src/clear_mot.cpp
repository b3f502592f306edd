#include <algorithm>
#include <map>
#include <unordered_map>

#include "trackscore/assignment.hpp"
#include "trackscore/baseline_metrics.hpp"
#include "trackscore/error.hpp"

namespace trackscore {

ClearScores ClearScores::from_counts(std::int64_t tp, std::int64_t fn, std::int64_t fp, std::int64_t idsw,
                                     std::int64_t idtr, double sum_similarity) {
  ClearScores s;
  s.tp = tp;
  s.fn = fn;
  s.fp = fp;
  s.idsw = idsw;
  s.idtr = idtr;
  s.num_gt = tp + fn;
  s.sum_similarity = sum_similarity;
  const double denom = double(std::max<std::int64_t>(1, s.num_gt));
  s.mota = 1.0 - double(fn + fp + idsw) / denom;
  s.moda = 1.0 - double(fn + fp) / denom;
  s.motp = tp > 0 ? sum_similarity / double(tp) : 1.0;
  return s;
}

ClearScores& ClearScores::operator+=(const ClearScores& o) {
  return *this = from_counts(tp + o.tp, fn + o.fn, fp + o.fp, idsw + o.idsw, idtr + o.idtr,
                             sum_similarity + o.sum_similarity);
}

ClearScores clear_mot(const SequencePair& seq, const SimilarityTensor& sim, double alpha) {
  std::int64_t tp = 0, idsw = 0, idtr = 0;
  double sum_s = 0.0;

  std::map<int, int> prev_pair;        // pairs matched in the previous frame, gt -> pr
  std::unordered_map<int, int> last_pr_of_gt;
  std::unordered_map<int, int> last_gt_of_pr;

  for (const auto& frame : sim.frames) {
    const std::size_t rows = frame.gt_index.size();
    const std::size_t cols = frame.pr_index.size();
    std::vector<char> row_done(rows, 0), col_done(cols, 0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    std::map<int, std::size_t> col_of_pr;
    for (std::size_t j = 0; j < cols; ++j) col_of_pr[seq.pr[frame.pr_index[j]].id] = j;

    for (std::size_t i = 0; i < rows; ++i) {
      auto it = prev_pair.find(seq.gt[frame.gt_index[i]].id);
      if (it == prev_pair.end()) continue;
      auto jt = col_of_pr.find(it->second);
      if (jt == col_of_pr.end() || frame.values(i, jt->second) < alpha) continue;
      pairs.emplace_back(i, jt->second);
      row_done[i] = 1;
      col_done[jt->second] = 1;
    }

    std::vector<std::size_t> free_rows, free_cols;
    for (std::size_t i = 0; i < rows; ++i)
      if (!row_done[i]) free_rows.push_back(i);
    for (std::size_t j = 0; j < cols; ++j)
      if (!col_done[j]) free_cols.push_back(j);
    ScoreMatrix score(free_rows.size(), free_cols.size(), kIneligible);
    for (std::size_t a = 0; a < free_rows.size(); ++a)
      for (std::size_t b = 0; b < free_cols.size(); ++b) {
        const double s = frame.values(free_rows[a], free_cols[b]);
        if (s >= alpha) score(a, b) = s;
      }
    for (auto [a, b] : solve_max(score).pairs) pairs.emplace_back(free_rows[a], free_cols[b]);
    std::sort(pairs.begin(), pairs.end());

    prev_pair.clear();
    for (auto [i, j] : pairs) {
      const int g = seq.gt[frame.gt_index[i]].id;
      const int p = seq.pr[frame.pr_index[j]].id;
      auto lg = last_pr_of_gt.find(g);
      if (lg != last_pr_of_gt.end() && lg->second != p) ++idsw;
      auto lp = last_gt_of_pr.find(p);
      if (lp != last_gt_of_pr.end() && lp->second != g) ++idtr;
      last_pr_of_gt[g] = p;
      last_gt_of_pr[p] = g;
      prev_pair[g] = p;
      ++tp;
      sum_s += frame.values(i, j);
    }
  }

  const auto num_gt = static_cast<std::int64_t>(seq.gt.size());
  const auto num_pr = static_cast<std::int64_t>(seq.pr.size());
  return ClearScores::from_counts(tp, num_gt - tp, num_pr - tp, idsw, idtr, sum_s);
}

double moda_decomposition(double det_re, double det_pr) {
  if (det_pr == 0.0) throw UndefinedValue("MODA decomposition needs DetPr > 0");
  return det_re * (2.0 - 1.0 / det_pr);
}

}  // namespace trackscore

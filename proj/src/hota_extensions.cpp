#include "trackscore/hota_extensions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <limits>

#include "hota_internal.hpp"
#include "trackscore/error.hpp"

namespace trackscore {

void Weights::validate() const {
  for (double w : {w_fn, w_fp, w_fna, w_fpa})
    if (!(w >= 0.0 && w <= 1.0)) throw ContractViolation("W-HOTA weights must lie in [0, 1]");
}

double ClassProbs::at(int frame, int id, int class_id) const {
  auto it = probs.find({frame, id});
  if (it == probs.end())
    throw ReferenceError("no class probabilities for prediction " + std::to_string(id) + " in frame " +
                         std::to_string(frame));
  auto c = it->second.find(class_id);
  return c == it->second.end() ? 0.0 : c->second;
}

void ClassProbs::validate() const {
  for (const auto& [key, dist] : probs) {
    double sum = 0.0;
    for (const auto& [cls, p] : dist) {
      if (!(p >= 0.0 && p <= 1.0)) throw FormatError("class probability outside [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw FormatError("class probabilities of prediction " + std::to_string(key.second) + " in frame " +
                        std::to_string(key.first) + " sum to " + std::to_string(sum));
  }
}

bool FederationMask::counts(int frame, int class_id) const {
  auto it = classes.find(frame);
  return it != classes.end() && it->second.count(class_id) > 0;
}

ExtensionResult finish_extension(const PooledCounters& counters, bool with_side, double w_fn, double w_fp) {
  const AlphaGrid grid = counters.empty() ? (counters.grid.size() ? counters.grid : AlphaGrid::standard())
                                          : counters.grid;
  std::vector<AlphaCounters> per = counters.per_alpha;
  if (per.empty()) per.resize(grid.size());

  ExtensionResult out;
  std::vector<HotaAlphaScores> scores;
  for (const auto& c : per) {
    scores.push_back(scores_from_counters(c, w_fn, w_fp));
    if (with_side) {
      double side = c.tp > 0 ? c.aux_sum / double(c.tp) : 0.0;
      if (c.tp + c.fn + c.fp == 0) side = 1.0;
      out.side_per_alpha.push_back(side);
    }
  }
  out.scores = integrate(scores, grid);
  out.counters = counters;
  if (with_side) {
    for (double s : out.side_per_alpha) out.side += s;
    out.side /= double(out.side_per_alpha.size());
  }
  return out;
}

namespace {

std::vector<std::vector<std::size_t>> dets_by_frame(const std::vector<Detection>& dets, std::size_t frames) {
  std::vector<std::vector<std::size_t>> out(frames);
  for (std::size_t i = 0; i < dets.size(); ++i) out[static_cast<std::size_t>(dets[i].frame - 1)].push_back(i);
  return out;
}

// Runs `per_tp` over the TPs of each alpha's matching and collects counters.
// per_tp(tp_context, counters) adds the variant's terms.
template <class Match, class PerAlpha>
ExtensionResult run_variant(const SequencePair& seq, const AlphaGrid& grid, bool with_side, Match&& match, PerAlpha&& per_alpha, double w_fn = 1.0,
                            double w_fp = 1.0) {
  PooledCounters counters{grid, {}};
  for (double alpha : grid.values) {
    const MatchSet matches = match(alpha);
    const AssociationCounts counts = association_counts(matches, seq);
    AlphaCounters c = detail::detection_counters(matches);
    per_alpha(matches, counts, c);
    counters.per_alpha.push_back(c);
  }
  return finish_extension(counters, with_side, w_fn, w_fp);
}

void require_gt_classes(const SequencePair& seq) {
  for (const auto& d : seq.gt)
    if (d.class_id < 0) throw ContractViolation("classification-aware scores need a class id on every gt detection");
}

AssociationWeight class_weight(const SequencePair& seq, const ClassProbs& probs) {
  return [&seq, &probs](std::size_t g, std::size_t p) {
    return probs.at(seq.pr[p].frame, seq.pr[p].id, seq.gt[g].class_id);
  };
}

}  // namespace

namespace {

struct OnlineTerms {
  double assoc = 0.0;
  double recall = 0.0;
  double precision = 0.0;
};

// Association terms of every TP with counts restricted to frames <= its own.
std::vector<std::vector<OnlineTerms>> online_terms(const MatchSet& matches, const SequencePair& seq) {
  const auto gt_frames = dets_by_frame(seq.gt, matches.frames.size());
  const auto pr_frames = dets_by_frame(seq.pr, matches.frames.size());
  std::map<int, int> gt_seen, pr_seen;
  std::map<std::pair<int, int>, int> tpa;
  std::vector<std::vector<OnlineTerms>> out(matches.frames.size());
  for (std::size_t t = 0; t < matches.frames.size(); ++t) {
    for (auto i : gt_frames[t]) ++gt_seen[seq.gt[i].id];
    for (auto j : pr_frames[t]) ++pr_seen[seq.pr[j].id];
    for (const auto& m : matches.frames[t]) ++tpa[{seq.gt[m.gt].id, seq.pr[m.pr].id}];
    for (const auto& m : matches.frames[t]) {
      const int g = seq.gt[m.gt].id, p = seq.pr[m.pr].id;
      const double n = tpa[{g, p}];
      out[t].push_back({n / (gt_seen[g] + pr_seen[p] - n), n / gt_seen[g], n / pr_seen[p]});
    }
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> online_assoc_scores(const MatchSet& matches, const SequencePair& seq) {
  std::vector<std::vector<double>> out;
  for (const auto& frame : online_terms(matches, seq)) {
    out.emplace_back();
    for (const auto& x : frame) out.back().push_back(x.assoc);
  }
  return out;
}

std::vector<std::vector<double>> fragment_scores(const MatchSet& matches, const SequencePair& seq) {
  const AssociationCounts counts = association_counts(matches, seq);
  // (gt, pr) -> TPs in frame order as (frame index, position in frame)
  std::map<std::pair<int, int>, std::vector<std::pair<std::size_t, std::size_t>>> runs;
  std::vector<std::vector<double>> out(matches.frames.size());
  for (std::size_t t = 0; t < matches.frames.size(); ++t) {
    out[t].resize(matches.frames[t].size());
    for (std::size_t k = 0; k < matches.frames[t].size(); ++k) {
      const auto& m = matches.frames[t][k];
      runs[{seq.gt[m.gt].id, seq.pr[m.pr].id}].emplace_back(t, k);
    }
  }
  for (const auto& [key, tps] : runs) {
    const int n = counts.tpa.at(key);
    const double den = double(counts.gt_total.at(key.first) + counts.pr_total.at(key.second) - n);
    std::size_t begin = 0;
    for (std::size_t e = 1; e <= tps.size(); ++e) {
      if (e < tps.size() && tps[e].first == tps[e - 1].first + 1) continue;
      const double f = double(e - begin) / den;
      for (std::size_t x = begin; x < e; ++x) out[tps[x].first][tps[x].second] = f;
      begin = e;
    }
  }
  return out;
}

ExtensionResult ohota(const SequencePair& seq, const SimilarityTensor& sim, const AlphaGrid& grid) {
  return run_variant(
      seq, grid, false, [&](double a) { return match_alpha(seq, sim, a); },
      [&](const MatchSet& matches, const AssociationCounts&, AlphaCounters& c) {
        for (const auto& frame : online_terms(matches, seq))
          for (const auto& x : frame) {
            c.ass_sum += x.assoc;
            c.ass_re_sum += x.recall;
            c.ass_pr_sum += x.precision;
          }
      });
}

ExtensionResult fa_hota(const SequencePair& seq, const SimilarityTensor& sim, const AlphaGrid& grid) {
  return run_variant(
      seq, grid, true, [&](double a) { return match_alpha(seq, sim, a); },
      [&](const MatchSet& matches, const AssociationCounts& counts, AlphaCounters& c) {
        const auto frag = fragment_scores(matches, seq);
        detail::for_each_tp(matches, seq, counts, [&](const detail::TpContext& tp) {
          const double f = frag[tp.frame_index][static_cast<std::size_t>(tp.match - matches.frames[tp.frame_index].data())];
          const double a = tp.assoc();
          c.ass_sum += f == a ? a : std::sqrt(a * f);
          c.ass_re_sum += tp.assoc_recall();
          c.ass_pr_sum += tp.assoc_precision();
          c.aux_sum += f;
        });
      });
}

ExtensionResult w_hota(const SequencePair& seq, const SimilarityTensor& sim, const Weights& w,
                       const AlphaGrid& grid) {
  w.validate();
  return run_variant(
      seq, grid, false, [&](double a) { return match_alpha(seq, sim, a); },
      [&](const MatchSet& matches, const AssociationCounts& counts, AlphaCounters& c) {
        detail::for_each_tp(matches, seq, counts, [&](const detail::TpContext& tp) {
          const double n = double(tp.tpa);
          c.ass_sum += n / (n + w.w_fna * double(tp.fna()) + w.w_fpa * double(tp.fpa()));
          c.ass_re_sum += n / (n + w.w_fna * double(tp.fna()));
          c.ass_pr_sum += n / (n + w.w_fpa * double(tp.fpa()));
        });
      },
      w.w_fn, w.w_fp);
}

ExtensionResult ca_hota(const SequencePair& seq, const SimilarityTensor& sim, const ClassProbs& probs,
                        const AlphaGrid& grid) {
  require_gt_classes(seq);
  probs.validate();
  const AssociationWeight weight = class_weight(seq, probs);
  return run_variant(
      seq, grid, true, [&](double a) { return match_alpha(seq, sim, a, weight); },
      [&](const MatchSet& matches, const AssociationCounts& counts, AlphaCounters& c) {
        detail::for_each_tp(matches, seq, counts, [&](const detail::TpContext& tp) {
          const double cls = weight(tp.match->gt, tp.match->pr);
          c.ass_sum += tp.assoc() * cls;
          c.ass_re_sum += tp.assoc_recall() * cls;
          c.ass_pr_sum += tp.assoc_precision() * cls;
          c.aux_sum += cls;
        });
      });
}

ClassTally& ClassTally::operator+=(const ClassTally& o) {
  assoc_sum += o.assoc_sum;
  tp += o.tp;
  fn += o.fn;
  fp += o.fp;
  return *this;
}

ClassPooledCounters& ClassPooledCounters::merge(const ClassPooledCounters& other) {
  if (other.empty()) return *this;
  if (empty()) return *this = other;
  if (grid.values != other.grid.values) throw ContractViolation("cannot pool counters from different alpha grids");
  for (std::size_t a = 0; a < per_alpha.size(); ++a)
    for (const auto& [cls, tally] : other.per_alpha[a]) per_alpha[a][cls] += tally;
  return *this;
}

ClassAveragedResult finish_class_averaged(const ClassPooledCounters& counters) {
  ClassAveragedResult out;
  out.grid = counters.empty() ? (counters.grid.size() ? counters.grid : AlphaGrid::standard()) : counters.grid;
  out.counters = counters;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t a = 0; a < out.grid.size(); ++a) {
    double sum = 0.0;
    std::size_t used = 0;
    if (!counters.empty()) {
      for (const auto& [cls, t] : counters.per_alpha[a]) {
        auto& series = out.per_class[cls];
        series.resize(out.grid.size(), nan);
        const double den = double(t.tp + t.fn) + t.fp;
        if (t.tp + t.fn == 0 && t.fp == 0.0) continue;
        series[a] = std::sqrt(t.assoc_sum / den);
        sum += series[a];
        ++used;
      }
    }
    out.per_alpha.push_back(used ? sum / double(used) : 1.0);
  }
  for (double v : out.per_alpha) out.score += v;
  out.score /= double(out.per_alpha.size());
  return out;
}

namespace {

ClassAveragedResult class_averaged(const SequencePair& seq, const SimilarityTensor& sim, const ClassProbs& probs,
                                   const FederationMask* mask, const AlphaGrid& grid) {
  require_gt_classes(seq);
  probs.validate();
  const AssociationWeight weight = class_weight(seq, probs);
  ClassPooledCounters counters{grid, {}};
  for (double alpha : grid.values) {
    const MatchSet matches = match_alpha(seq, sim, alpha, weight);
    const AssociationCounts counts = association_counts(matches, seq);
    std::map<int, ClassTally> tally;
    std::vector<char> gt_hit(seq.gt.size(), 0), pr_hit(seq.pr.size(), 0);
    detail::for_each_tp(matches, seq, counts, [&](const detail::TpContext& tp) {
      const int cls = seq.gt[tp.match->gt].class_id;
      auto& t = tally[cls];
      t.assoc_sum += tp.assoc() * weight(tp.match->gt, tp.match->pr);
      ++t.tp;
      gt_hit[tp.match->gt] = 1;
      pr_hit[tp.match->pr] = 1;
    });
    for (std::size_t i = 0; i < seq.gt.size(); ++i)
      if (!gt_hit[i]) ++tally[seq.gt[i].class_id].fn;
    for (std::size_t j = 0; j < seq.pr.size(); ++j) {
      if (pr_hit[j]) continue;
      const auto& d = seq.pr[j];
      auto it = probs.probs.find({d.frame, d.id});
      if (it == probs.probs.end())
        throw ReferenceError("no class probabilities for prediction " + std::to_string(d.id) + " in frame " +
                             std::to_string(d.frame));
      for (const auto& [cls, p] : it->second) {
        const double gate = mask ? (mask->counts(d.frame, cls) ? 1.0 : 0.0) : 1.0;
        tally[cls].fp += gate * p;
      }
    }
    counters.per_alpha.push_back(std::move(tally));
  }
  return finish_class_averaged(counters);
}

}  // namespace

ClassAveragedResult ca2_hota(const SequencePair& seq, const SimilarityTensor& sim, const ClassProbs& probs,
                             const AlphaGrid& grid) {
  return class_averaged(seq, sim, probs, nullptr, grid);
}

ClassAveragedResult fed_hota(const SequencePair& seq, const SimilarityTensor& sim, const ClassProbs& probs,
                             const FederationMask& mask, const AlphaGrid& grid) {
  return class_averaged(seq, sim, probs, &mask, grid);
}

CrHotaResult cr_hota(std::span<const SequencePair> seqs, const AlphaGrid& grid) {
  std::vector<SequencePair> clean;
  std::vector<double> levels;
  for (const auto& seq : seqs) {
    clean.push_back(drop_ignored(seq));
    for (const auto& d : seq.pr) {
      if (!d.confidence) throw FormatError("CR-HOTA needs a confidence on every prediction (" + seq.name + ")");
      levels.push_back(*d.confidence);
    }
  }
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  // Pooled integrated scores keeping predictions with confidence >= levels[i].
  std::map<std::size_t, HotaAlphaScores> memo;
  auto at_level = [&](std::size_t i) -> const HotaAlphaScores& {
    auto it = memo.find(i);
    if (it != memo.end()) return it->second;
    PooledCounters total;
    for (const auto& seq : clean) {
      SequencePair cut{seq.name, seq.num_frames, seq.gt, {}};
      for (const auto& d : seq.pr)
        if (*d.confidence >= levels[i]) cut.pr.push_back(d);
      total.merge(evaluate_sequence(cut, build_similarity(cut), grid).second);
    }
    if (total.empty()) total = PooledCounters{grid, std::vector<AlphaCounters>(grid.size())};
    return memo.emplace(i, scores_from_counters(total).integrated).first->second;
  };

  CrHotaResult out;
  for (int k = 1; k <= 19; ++k) {
    CrHotaTerm term;
    term.target = k / 20.0;
    if (!levels.empty() && at_level(levels.size() - 1).det_re >= term.target) {
      std::size_t lo = 0, hi = levels.size() - 1;  // DetRe is non-decreasing in i
      while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (at_level(mid).det_re >= term.target) hi = mid;
        else lo = mid + 1;
      }
      const auto& s = at_level(lo);
      term.reachable = true;
      term.threshold = levels[lo];
      term.hota = s.hota;
      term.det_re = s.det_re;
      term.ratio = s.hota / s.det_re;
    }
    out.score += term.ratio;
    out.terms.push_back(term);
  }
  out.score /= 19.0;
  return out;
}

}  // namespace trackscore

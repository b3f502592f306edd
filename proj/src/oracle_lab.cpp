#include "trackscore/oracle_lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "hota_internal.hpp"
#include "trackscore/error.hpp"
#include "trackscore/hota_core.hpp"

namespace trackscore {

namespace {

Detection unit(int frame, int id, int slot) {
  Detection d;
  d.frame = frame;
  d.id = id;
  d.geometry = Box2D{10.0 * slot, 0.0, 1.0, 1.0};
  return d;
}

// Reads scenario parameters, fills defaults and rejects leftovers.
class ParamReader {
public:
  ParamReader(const std::string& scenario, const ScenarioParams& in) : scenario_(scenario), in_(in) {}

  int integer(const std::string& key, int fallback, int lo, int hi) {
    const std::string text = take(key, std::to_string(fallback));
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() || v < lo || v > hi)
      fail(key, text, "an integer in " + std::to_string(lo) + ".." + std::to_string(hi));
    out_[key] = std::to_string(v);
    return v;
  }

  double real(const std::string& key, const std::string& fallback, double lo, double hi) {
    const std::string text = take(key, fallback);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() || !(v > lo && v < hi))
      fail(key, text, "a number strictly between " + std::to_string(lo) + " and " + std::to_string(hi));
    out_[key] = text;
    return v;
  }

  std::string choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& options) {
    const std::string text = take(key, fallback);
    if (std::find(options.begin(), options.end(), text) == options.end()) {
      std::string list;
      for (const auto& o : options) list += (list.empty() ? "" : "|") + o;
      fail(key, text, "one of " + list);
    }
    out_[key] = text;
    return text;
  }

  ScenarioParams finish() const {
    for (const auto& [key, value] : in_)
      if (!out_.count(key)) throw ContractViolation("scenario " + scenario_ + " has no parameter '" + key + "'");
    return out_;
  }

private:
  std::string take(const std::string& key, const std::string& fallback) const {
    auto it = in_.find(key);
    return it == in_.end() ? fallback : it->second;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& value, const std::string& want) const {
    throw ContractViolation("scenario " + scenario_ + ": " + key + "=" + value + " must be " + want);
  }

  std::string scenario_;
  const ScenarioParams& in_;
  ScenarioParams out_;
};

// One gt object (id 1, slot 0) over `length` frames; segments[i] frames of it
// are predicted with prediction id ids[i]. Id 0 leaves the frames undetected.
SequencePair segmented(const std::string& name, int length, const std::vector<int>& segments,
                       const std::vector<int>& ids) {
  SequencePair seq{name, length, {}, {}};
  for (int t = 1; t <= length; ++t) seq.gt.push_back(unit(t, 1, 0));
  int t = 1;
  for (std::size_t s = 0; s < segments.size(); ++s)
    for (int k = 0; k < segments[s]; ++k, ++t)
      if (ids[s] != 0) seq.pr.push_back(unit(t, ids[s], 0));
  return seq;
}

Scenario build_frame_rate(ParamReader& p) {
  const int k = p.integer("k", 10, 2, 1000000);
  if (k % 2) throw ContractViolation("scenario frame_rate: k must be even");
  return {"frame_rate", p.finish(), segmented("frame_rate", k, {k / 2, k / 2}, {1, 2})};
}

Scenario build_split_merge(ParamReader& p) {
  const auto variant = p.choice("variant", "split", {"split", "merge"});
  SequencePair seq{"split_merge_" + variant, 2, {}, {}};
  if (variant == "split") {
    seq.gt = {unit(1, 1, 0), unit(2, 1, 0)};
    seq.pr = {unit(1, 1, 0), unit(2, 2, 0)};
  } else {
    seq.gt = {unit(1, 1, 0), unit(2, 2, 0)};
    seq.pr = {unit(1, 1, 0), unit(2, 1, 0)};
  }
  return {"split_merge", p.finish(), seq};
}

Scenario build_self_correct(ParamReader& p) {
  const auto variant = p.choice("variant", "A", {"A", "B", "C"});
  const int length = p.integer("length", 6, 6, 1000000);
  if (length % 6) throw ContractViolation("scenario self_correct: length must be a multiple of 6");
  const int third = length / 3, half = length / 2;
  SequencePair seq;
  if (variant == "A") seq = segmented("self_correct_A", length, {third, third, third}, {1, 2, 1});
  if (variant == "B") seq = segmented("self_correct_B", length, {half, half}, {1, 2});
  if (variant == "C") seq = segmented("self_correct_C", length, {third, third, third}, {1, 2, 3});
  return {"self_correct", p.finish(), seq};
}

Scenario build_alignment(ParamReader& p) {
  const auto variant = p.choice("variant", "A", {"A", "B", "C"});
  const int length = p.integer("length", 6, 6, 1000000);
  if (length % 6) throw ContractViolation("scenario alignment: length must be a multiple of 6");
  const int first = length / 6 * (variant == "A" ? 3 : variant == "B" ? 4 : 5);
  return {"alignment", p.finish(), segmented("alignment_" + variant, length, {first, length - first}, {1, 2})};
}

Scenario build_fragmentation(ParamReader& p) {
  const auto variant = p.choice("variant", "A", {"A", "B"});
  const int length = p.integer("length", 8, 2, 1000000);
  if (length % 2) throw ContractViolation("scenario fragmentation: length must be even");
  SequencePair seq{"fragmentation_" + variant, length, {}, {}};
  for (int t = 1; t <= length; ++t) {
    seq.gt.push_back(unit(t, 1, 0));
    if (variant == "A" ? t <= length / 2 : t % 2 == 1) seq.pr.push_back(unit(t, 1, 0));
  }
  return {"fragmentation", p.finish(), seq};
}

Scenario build_idf1_detection(ParamReader& p) {
  const auto variant = p.choice("variant", "A", {"A", "B"});
  const int length = p.integer("length", 16, 2, 1000000);
  if (length % 2) throw ContractViolation("scenario idf1_detection: length must be even");
  const int half = length / 2;
  return {"idf1_detection", p.finish(),
          segmented("idf1_detection_" + variant, length, {half, half}, {1, variant == "A" ? 2 : 0})};
}

Scenario build_idf1_association(ParamReader& p) {
  const int extra = p.integer("extra_ids", 1, 1, 1000000);
  const int length = p.integer("length", 16, 2, 1000000);
  if (length % 2 || (length / 2) % extra)
    throw ContractViolation("scenario idf1_association: extra_ids must divide length / 2");
  std::vector<int> segments{length / 2}, ids{1};
  for (int i = 0; i < extra; ++i) {
    segments.push_back(length / 2 / extra);
    ids.push_back(2 + i);
  }
  return {"idf1_association", p.finish(),
          segmented("idf1_association_" + std::to_string(extra), length, segments, ids)};
}

Scenario build_coverage(ParamReader& p) {
  const auto variant = p.choice("variant", "A", {"A", "B"});
  const int length = p.integer("length", 20, 2, 1000000);
  const double ratio = p.real("ratio", "0.5", 0.0, 1.0);
  const bool swap = p.integer("swap", 0, 0, 1) == 1;
  const double exact = ratio * length;
  const int first = int(std::lround(exact));
  if (std::abs(exact - first) > 1e-9 || first < 1 || first >= length)
    throw ContractViolation("scenario coverage: ratio * length must be an integer in 1..length-1");
  SequencePair seq = segmented("coverage_" + variant, length, {first, length - first}, {1, variant == "A" ? 2 : 0});
  if (swap) {
    seq = swap_sides(seq);
    seq.name += "_swapped";
  }
  return {"coverage", p.finish(), seq};
}

Scenario build_association_counts(ParamReader& p) {
  // gt 1: frames 1-8. pr 1: frames 4-12. pr 2 takes gt 1 in frames 1-2 and
  // gt 2 takes pr 1 in frames 10-11, so the (1, 1) TPs see 5 TPA, 3 FNA, 4 FPA.
  SequencePair seq{"association_counts", 12, {}, {}};
  for (int t = 1; t <= 8; ++t) seq.gt.push_back(unit(t, 1, 0));
  for (int t = 10; t <= 11; ++t) seq.gt.push_back(unit(t, 2, 0));
  for (int t = 1; t <= 2; ++t) seq.pr.push_back(unit(t, 2, 0));
  for (int t = 4; t <= 12; ++t) seq.pr.push_back(unit(t, 1, 0));
  return {"association_counts", p.finish(), seq};
}

Scenario build_perfect(ParamReader& p) {
  const int frames = p.integer("frames", 10, 0, 1000000);
  const int objects = p.integer("objects", 1, 0, 10000);
  SequencePair seq{"perfect", frames, {}, {}};
  for (int t = 1; t <= frames; ++t)
    for (int o = 1; o <= objects; ++o) {
      seq.gt.push_back(unit(t, o, o));
      seq.pr.push_back(unit(t, o, o));
    }
  return {"perfect", p.finish(), seq};
}

using Builder = std::function<Scenario(ParamReader&)>;

const std::map<std::string, Builder>& builders() {
  static const std::map<std::string, Builder> table{
      {"frame_rate", build_frame_rate},
      {"split_merge", build_split_merge},
      {"self_correct", build_self_correct},
      {"alignment", build_alignment},
      {"fragmentation", build_fragmentation},
      {"idf1_detection", build_idf1_detection},
      {"idf1_association", build_idf1_association},
      {"coverage", build_coverage},
      {"association_counts", build_association_counts},
      {"perfect", build_perfect},
  };
  return table;
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> info{
      {"alignment", "variant=A|B|C length=6", "one switch after 3/6, 4/6 or 5/6 of the track"},
      {"association_counts", "", "TPA/FNA/FPA example, 5/3/4 for the (1, 1) TPs"},
      {"coverage", "variant=A|B ratio=0.5 length=20 swap=0", "track 1 covers ratio; A adds track 2 for the rest"},
      {"fragmentation", "variant=A|B length=8", "half the track, contiguous (A) or every other frame (B)"},
      {"frame_rate", "k=10", "k frames, one switch at k/2"},
      {"idf1_association", "extra_ids=1 length=16", "second half split over extra_ids ids"},
      {"idf1_detection", "variant=A|B length=16", "second half under a new id (A) or missed (B)"},
      {"perfect", "frames=10 objects=1", "every object tracked exactly"},
      {"split_merge", "variant=split|merge", "two frames, one object split or two objects merged"},
      {"self_correct", "variant=A|B|C length=6", "switch and switch back (A), stay (B), switch again (C)"},
  };
  return info;
}

Scenario scenario(const std::string& name, const ScenarioParams& params) {
  auto it = builders().find(name);
  if (it == builders().end()) throw LookupError("unknown scenario '" + name + "'");
  ParamReader reader(name, params);
  return it->second(reader);
}

ExhaustiveResult exhaustive_hota(const SequencePair& seq, const SimilarityTensor& sim, double alpha,
                                 std::size_t state_budget) {
  detail::require_alpha(alpha);
  if (seq.num_frames > 6) throw SizeError("exhaustive_hota handles at most 6 frames");
  const IdIndex gt(seq.gt), pr(seq.pr);

  // Distinct (gt id, pr id) pairs that are eligible somewhere, and per frame
  // every partial bijection as a list of pair indices.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> pair_index;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::vector<std::vector<std::size_t>>> frame_matchings;
  for (const auto& frame : sim.frames) {
    const std::size_t rows = frame.gt_index.size(), cols = frame.pr_index.size();
    if (rows > 6 || cols > 6) throw SizeError("exhaustive_hota handles at most 6 detections per side per frame");
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> eligible(rows);  // (col, pair)
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        if (!(frame.values(i, j) >= alpha)) continue;
        const std::pair<std::size_t, std::size_t> key{gt.index_of(seq.gt[frame.gt_index[i]].id),
                                                      pr.index_of(seq.pr[frame.pr_index[j]].id)};
        auto [it, fresh] = pair_index.emplace(key, pairs.size());
        if (fresh) pairs.push_back(key);
        eligible[i].emplace_back(j, it->second);
      }
    std::vector<std::vector<std::size_t>> all;
    std::vector<std::size_t> current;
    std::vector<char> used(cols, 0);
    std::function<void(std::size_t)> walk = [&](std::size_t row) {
      if (row == rows) {
        all.push_back(current);
        return;
      }
      walk(row + 1);
      for (auto [col, pair] : eligible[row]) {
        if (used[col]) continue;
        used[col] = 1;
        current.push_back(pair);
        walk(row + 1);
        current.pop_back();
        used[col] = 0;
      }
    };
    walk(0);
    frame_matchings.push_back(std::move(all));
  }

  std::set<std::vector<std::uint8_t>> states{std::vector<std::uint8_t>(pairs.size(), 0)};
  for (const auto& matchings : frame_matchings) {
    std::set<std::vector<std::uint8_t>> next;
    for (const auto& state : states)
      for (const auto& m : matchings) {
        auto s = state;
        for (auto k : m) ++s[k];
        next.insert(std::move(s));
        if (next.size() > state_budget) throw SizeError("exhaustive_hota exceeded its state budget");
      }
    states = std::move(next);
  }

  ExhaustiveResult best;
  best.states = states.size();
  const double num_gt = double(seq.gt.size()), num_pr = double(seq.pr.size());
  if (num_gt == 0 && num_pr == 0) {
    best.hota = best.det_a = best.ass_a = 1.0;
    return best;
  }
  bool first = true;
  for (const auto& state : states) {
    double tp = 0.0, ass = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (!state[k]) continue;
      const double n = state[k];
      tp += n;
      ass += n * n / (gt.totals()[pairs[k].first] + pr.totals()[pairs[k].second] - n);
    }
    ExhaustiveResult r;
    if (tp > 0) {
      r.det_a = tp / (num_gt + num_pr - tp);
      r.ass_a = ass / tp;
      r.hota = std::sqrt(r.det_a * r.ass_a);
    }
    if (first || r.hota > best.hota) {
      r.states = best.states;
      best = r;
      first = false;
    }
  }
  return best;
}

Formulation parse_formulation(const std::string& name) {
  if (name == "jaccard") return Formulation::jaccard;
  if (name == "f1") return Formulation::f1;
  if (name == "moda") return Formulation::moda;
  if (name == "excl_det_assoc") return Formulation::excl_det_assoc;
  throw LookupError("unknown formulation '" + name + "'");
}

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::jaccard: return "jaccard";
    case Formulation::f1: return "f1";
    case Formulation::moda: return "moda";
    case Formulation::excl_det_assoc: return "excl_det_assoc";
  }
  return "";
}

AltScores alt_formulation_scores(const SequencePair& seq, const SimilarityTensor& sim, double alpha, Formulation f) {
  const MatchSet m = match_alpha(seq, sim, alpha);
  const AssociationCounts counts = association_counts(m, seq);
  if (seq.gt.empty() && seq.pr.empty()) return {1.0, 1.0, 1.0};
  if (m.tp == 0) return {};

  std::map<int, int> tp_of_gt, tp_of_pr;
  for (const auto& [key, n] : counts.tpa) {
    tp_of_gt[key.first] += n;
    tp_of_pr[key.second] += n;
  }
  const double tp = double(m.tp), fn = double(m.fn), fp = double(m.fp);
  AltScores s;
  switch (f) {
    case Formulation::jaccard:
    case Formulation::excl_det_assoc: s.det = tp / (tp + fn + fp); break;
    case Formulation::f1: s.det = 2 * tp / (2 * tp + fn + fp); break;
    case Formulation::moda: s.det = (tp - fp) / (tp + fn); break;
  }
  double sum = 0.0;
  detail::for_each_tp(m, seq, counts, [&](const detail::TpContext& c) {
    const double n = c.tpa;
    double fna = c.fna(), fpa = c.fpa();
    switch (f) {
      case Formulation::jaccard: sum += n / (n + fna + fpa); break;
      case Formulation::f1: sum += 2 * n / (2 * n + fna + fpa); break;
      case Formulation::moda: sum += (n - fpa) / (n + fna); break;
      case Formulation::excl_det_assoc:
        fna = tp_of_gt[c.gt_id] - n;
        fpa = tp_of_pr[c.pr_id] - n;
        sum += n / (n + fna + fpa);
        break;
    }
  });
  s.ass = sum / tp;
  const double product = s.det * s.ass;
  s.score = (s.det < 0 || s.ass < 0) ? -std::sqrt(std::abs(product)) : std::sqrt(product);
  return s;
}

std::vector<CoveragePoint> coverage_sweep(Formulation f, int length) {
  std::vector<CoveragePoint> out;
  auto score = [&](const std::string& variant, int first, bool swap) {
    const auto sc = scenario("coverage", {{"variant", variant},
                                      {"length", std::to_string(length)},
                                      {"ratio", std::to_string(double(first) / length)},
                                      {"swap", swap ? "1" : "0"}});
    return alt_formulation_scores(sc.seq, build_similarity(sc.seq), 0.5, f).score;
  };
  for (int first = 1; first < length; ++first) {
    CoveragePoint pt;
    pt.ratio = double(first) / length;
    pt.a = score("A", first, false);
    pt.b = score("B", first, false);
    pt.a_swapped = score("A", first, true);
    pt.b_swapped = score("B", first, true);
    out.push_back(pt);
  }
  return out;
}

SequencePair random_instance(std::uint64_t seed, const RandomInstanceOptions& options) {
  if (options.max_frames < 1 || options.max_dets < 1) throw ContractViolation("random_instance bounds must be >= 1");
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  SequencePair seq;
  seq.name = "random_" + std::to_string(seed);
  seq.num_frames = pick(1, options.max_frames);
  const int objects = pick(1, options.max_dets);
  std::vector<double> base_x, base_y;
  double x = uni(0.0, 1.0);
  for (int o = 0; o < objects; ++o) {
    base_x.push_back(x);
    base_y.push_back(uni(0.0, 1.0));
    x += uni(1.0, 3.0);
  }
  std::vector<int> ids(static_cast<std::size_t>(objects));
  for (int o = 0; o < objects; ++o) ids[static_cast<std::size_t>(o)] = o + 1;
  int next_id = objects + 1;

  for (int t = 1; t <= seq.num_frames; ++t) {
    if (objects > 1 && uni(0, 1) < 0.25) std::swap(ids[std::size_t(pick(0, objects - 1))], ids[std::size_t(pick(0, objects - 1))]);
    if (uni(0, 1) < 0.15) ids[std::size_t(pick(0, objects - 1))] = next_id++;
    std::set<int> used;
    int pr_count = 0;
    for (int o = 0; o < objects; ++o) {
      const auto uo = static_cast<std::size_t>(o);
      const double gx = base_x[uo] + uni(-0.3, 0.3), gy = base_y[uo] + uni(-0.3, 0.3);
      if (uni(0, 1) < 0.85) {
        Detection d;
        d.frame = t;
        d.id = o + 1;
        d.geometry = Box2D{gx, gy, 2.0, 2.0};
        seq.gt.push_back(d);
      }
      if (pr_count < options.max_dets && uni(0, 1) < 0.8) {
        Detection d;
        d.frame = t;
        d.id = ids[uo];
        d.geometry = Box2D{gx + uni(-0.9, 0.9), gy + uni(-0.9, 0.9), 2.0, 2.0};
        seq.pr.push_back(d);
        used.insert(d.id);
        ++pr_count;
      }
    }
    if (pr_count < options.max_dets && uni(0, 1) < 0.3) {
      const int id = pick(1, next_id);
      if (!used.count(id)) {
        Detection d;
        d.frame = t;
        d.id = id;
        d.geometry = Box2D{uni(0.0, x), uni(0.0, 1.0), 2.0, 2.0};
        seq.pr.push_back(d);
        next_id = std::max(next_id, id + 1);
      }
    }
  }
  return seq;
}

OracleCheckReport oracle_check(int trials, std::uint64_t seed, const std::vector<double>& alphas, double tolerance,
                               const RandomInstanceOptions& options) {
  OracleCheckReport report;
  report.trials = trials;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = seed + std::uint64_t(i);
    const SequencePair seq = random_instance(s, options);
    const SimilarityTensor sim = build_similarity(seq);
    for (double alpha : alphas) {
      const MatchSet m = match_alpha(seq, sim, alpha);
      const double core = hota_alpha(m, association_counts(m, seq)).hota;
      const double oracle = exhaustive_hota(seq, sim, alpha).hota;
      const double delta = std::abs(core - oracle);
      ++report.comparisons;
      report.max_delta = std::max(report.max_delta, delta);
      if (delta > tolerance) report.mismatches.push_back({s, alpha, core, oracle});
    }
  }
  return report;
}

}  // namespace trackscore

#include "trackscore/report.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <thread>

#include <json.hpp>

#include "trackscore/error.hpp"

namespace trackscore {

namespace {

using json = nlohmann::ordered_json;

const std::vector<std::string> kExtensions = {"ohota", "fa", "w", "ca", "ca2", "fed", "cr"};

std::string display_name(const std::string& ext) {
  if (ext == "ohota") return "OHOTA";
  if (ext == "fa") return "FA-HOTA";
  if (ext == "w") return "W-HOTA";
  if (ext == "ca") return "CA-HOTA";
  if (ext == "ca2") return "CA2-HOTA";
  if (ext == "fed") return "Fed-HOTA";
  return "CR-HOTA";
}

const char* side_name(const std::string& ext) { return ext == "fa" ? "FragA" : "ClaA"; }
bool has_side(const std::string& ext) { return ext == "fa" || ext == "ca"; }

json hota_json(const HotaAlphaScores& s) {
  return json{{"HOTA", s.hota},   {"DetA", s.det_a},   {"AssA", s.ass_a},   {"DetRe", s.det_re},
              {"DetPr", s.det_pr}, {"AssRe", s.ass_re}, {"AssPr", s.ass_pr}, {"LocA", s.loc_a}};
}

json curve_json(const HotaScores& s) {
  json out = json::object();
  auto column = [&](const char* key, double HotaAlphaScores::*field) {
    json arr = json::array();
    for (const auto& a : s.per_alpha) arr.push_back(a.*field);
    out[key] = arr;
  };
  column("HOTA", &HotaAlphaScores::hota);
  column("DetA", &HotaAlphaScores::det_a);
  column("AssA", &HotaAlphaScores::ass_a);
  column("DetRe", &HotaAlphaScores::det_re);
  column("DetPr", &HotaAlphaScores::det_pr);
  column("AssRe", &HotaAlphaScores::ass_re);
  column("AssPr", &HotaAlphaScores::ass_pr);
  column("LocA", &HotaAlphaScores::loc_a);
  return out;
}

json sequence_json(const SequenceReport& r, const EvalOptions& opts) {
  json out{{"name", r.name}};
  if (opts.hota) out["HOTA"] = hota_json(r.hota.integrated);
  if (opts.clear)
    out["CLEAR"] = json{{"MOTA", r.clear.mota}, {"MOTP", r.clear.motp}, {"MODA", r.clear.moda},
                        {"TP", r.clear.tp},     {"FN", r.clear.fn},     {"FP", r.clear.fp},
                        {"IDSW", r.clear.idsw}, {"IDTR", r.clear.idtr}};
  if (opts.identity)
    out["Identity"] = json{{"IDF1", r.identity.idf1}, {"IDR", r.identity.id_recall}, {"IDP", r.identity.id_precision},
                           {"IDTP", r.identity.idtp}, {"IDFN", r.identity.idfn},     {"IDFP", r.identity.idfp}};
  json ext = json::object();
  for (const auto& name : opts.extensions) {
    if (auto it = r.extensions.find(name); it != r.extensions.end()) {
      json e = hota_json(it->second.scores.integrated);
      if (has_side(name)) e[side_name(name)] = it->second.side;
      ext[display_name(name)] = e;
    } else if (auto c = r.class_extensions.find(name); c != r.class_extensions.end()) {
      json per_class = json::object();
      for (const auto& [cls, series] : c->second.per_class) per_class[std::to_string(cls)] = series;
      ext[display_name(name)] = json{{"score", c->second.score}, {"per_alpha", c->second.per_alpha},
                                     {"per_class", per_class}};
    }
  }
  if (!ext.empty()) out["extensions"] = ext;
  return out;
}

std::string fixed6(double v) {
  if (v != v) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::string> csv_header(const ScoreReport& report) {
  const auto& o = report.options;
  std::vector<std::string> h{"seq"};
  if (o.hota) h.insert(h.end(), {"HOTA", "DetA", "AssA", "DetRe", "DetPr", "AssRe", "AssPr", "LocA"});
  if (o.clear) h.insert(h.end(), {"MOTA", "MOTP", "MODA", "CLR_TP", "CLR_FN", "CLR_FP", "IDSW", "IDTR"});
  if (o.identity) h.insert(h.end(), {"IDF1", "IDR", "IDP", "IDTP", "IDFN", "IDFP"});
  for (const auto& e : o.extensions) {
    h.push_back(display_name(e));
    if (has_side(e)) h.push_back(side_name(e));
  }
  if (report.track_map) h.push_back("TrackMAP");
  return h;
}

std::vector<std::string> csv_row(const SequenceReport& r, const ScoreReport& report, bool combined) {
  const auto& o = report.options;
  std::vector<std::string> row{r.name};
  if (o.hota) {
    const auto& s = r.hota.integrated;
    for (double v : {s.hota, s.det_a, s.ass_a, s.det_re, s.det_pr, s.ass_re, s.ass_pr, s.loc_a})
      row.push_back(fixed6(v));
  }
  if (o.clear) {
    const auto& c = r.clear;
    for (double v : {c.mota, c.motp, c.moda}) row.push_back(fixed6(v));
    for (auto v : {c.tp, c.fn, c.fp, c.idsw, c.idtr}) row.push_back(std::to_string(v));
  }
  if (o.identity) {
    const auto& i = r.identity;
    for (double v : {i.idf1, i.id_recall, i.id_precision}) row.push_back(fixed6(v));
    for (auto v : {i.idtp, i.idfn, i.idfp}) row.push_back(std::to_string(v));
  }
  for (const auto& e : o.extensions) {
    if (auto it = r.extensions.find(e); it != r.extensions.end()) {
      row.push_back(fixed6(it->second.scores.integrated.hota));
      if (has_side(e)) row.push_back(fixed6(it->second.side));
    } else if (auto c = r.class_extensions.find(e); c != r.class_extensions.end()) {
      row.push_back(fixed6(c->second.score));
    } else if (e == "cr") {
      row.push_back(combined && report.cr_hota ? fixed6(report.cr_hota->score) : "");
    }
  }
  if (report.track_map) row.push_back(combined ? fixed6(report.track_map->map) : "");
  return row;
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
  return out + "\n";
}

}  // namespace

bool EvalOptions::has_extension(const std::string& name) const {
  return std::find(extensions.begin(), extensions.end(), name) != extensions.end();
}

void EvalOptions::validate() const {
  for (const auto& e : extensions)
    if (std::find(kExtensions.begin(), kExtensions.end(), e) == kExtensions.end())
      throw ContractViolation("unknown extension '" + e + "'");
  if (!(clear_alpha > 0.0 && clear_alpha <= 1.0)) throw ContractViolation("CLEAR/IDF1 alpha must lie in (0, 1]");
  if (track_map_alpha.empty()) throw ContractViolation("Track-mAP needs at least one alpha_tr");
  for (double a : track_map_alpha)
    if (!(a > 0.0 && a <= 1.0)) throw ContractViolation("Track-mAP alpha_tr must lie in (0, 1]");
  weights.validate();
  if (jobs < 1) throw ContractViolation("jobs must be >= 1");
}

void select_metrics(EvalOptions& opts, const std::string& list) {
  opts.hota = opts.clear = opts.identity = opts.track_map = false;
  opts.extensions.clear();
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t end = list.find(',', start);
    if (end == std::string::npos) end = list.size();
    const std::string item = list.substr(start, end - start);
    start = end + 1;
    if (item.empty()) continue;
    if (item == "hota") opts.hota = true;
    else if (item == "clear") opts.clear = true;
    else if (item == "identity") opts.identity = true;
    else if (item == "trackmap") opts.track_map = true;
    else if (item.rfind("ext:", 0) == 0) {
      const std::string name = item.substr(4);
      if (std::find(kExtensions.begin(), kExtensions.end(), name) == kExtensions.end())
        throw ContractViolation("unknown extension '" + name + "'");
      if (!opts.has_extension(name)) opts.extensions.push_back(name);
    } else {
      throw ContractViolation("unknown metric '" + item + "'");
    }
  }
  // Report columns follow the canonical extension order, not the flag order.
  std::vector<std::string> ordered;
  for (const auto& e : kExtensions)
    if (opts.has_extension(e)) ordered.push_back(e);
  opts.extensions = ordered;
}

SequenceReport evaluate_one(const SequenceInput& input, const EvalOptions& opts) {
  SequenceReport r;
  r.name = input.seq.name;
  const SequencePair seq = drop_ignored(input.seq);
  const SimilarityTensor sim = build_similarity(seq);
  if (opts.hota) std::tie(r.hota, r.hota_counters) = evaluate_sequence(seq, sim, opts.grid);
  if (opts.clear) r.clear = clear_mot(seq, sim, opts.clear_alpha);
  if (opts.identity) r.identity = idf1(seq, sim, opts.clear_alpha);

  auto probs = [&]() -> const ClassProbs& {
    if (!input.probs) throw ContractViolation(r.name + ": class-aware extensions need class probabilities");
    return *input.probs;
  };
  for (const auto& e : opts.extensions) {
    if (e == "ohota") r.extensions[e] = ohota(seq, sim, opts.grid);
    if (e == "fa") r.extensions[e] = fa_hota(seq, sim, opts.grid);
    if (e == "w") r.extensions[e] = w_hota(seq, sim, opts.weights, opts.grid);
    if (e == "ca") r.extensions[e] = ca_hota(seq, sim, probs(), opts.grid);
    if (e == "ca2") r.class_extensions[e] = ca2_hota(seq, sim, probs(), opts.grid);
    if (e == "fed") {
      if (!input.mask) throw ContractViolation(r.name + ": Fed-HOTA needs a federation mask");
      r.class_extensions[e] = fed_hota(seq, sim, probs(), *input.mask, opts.grid);
    }
  }
  return r;
}

ScoreReport evaluate_benchmark(const std::vector<SequenceInput>& inputs, const EvalOptions& opts) {
  opts.validate();
  ScoreReport report;
  report.options = opts;

  std::vector<SequenceReport> results(inputs.size());
  std::vector<std::exception_ptr> errors(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      try {
        results[i] = evaluate_one(inputs[i], opts);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(std::size_t(opts.jobs), std::max<std::size_t>(inputs.size(), 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  report.sequences = std::move(results);

  // Ordered reduction.
  SequenceReport& all = report.combined;
  all.name = "COMBINED";
  all.hota_counters = PooledCounters{opts.grid, {}};
  std::map<std::string, PooledCounters> ext_counters;
  std::map<std::string, ClassPooledCounters> class_counters;
  for (const auto& e : opts.extensions) {
    if (e == "ca2" || e == "fed") class_counters[e] = ClassPooledCounters{opts.grid, {}};
    else if (e != "cr") ext_counters[e] = PooledCounters{opts.grid, {}};
  }
  bool first = true;
  for (const auto& s : report.sequences) {
    all.hota_counters.merge(s.hota_counters);
    if (first) {
      all.clear = s.clear;
      all.identity = s.identity;
      first = false;
    } else {
      all.clear += s.clear;
      all.identity += s.identity;
    }
    for (auto& [name, c] : ext_counters) c.merge(s.extensions.at(name).counters);
    for (auto& [name, c] : class_counters) c.merge(s.class_extensions.at(name).counters);
  }
  if (opts.hota) all.hota = scores_from_counters(all.hota_counters);
  for (const auto& [name, c] : ext_counters) {
    const double w_fn = name == "w" ? opts.weights.w_fn : 1.0;
    const double w_fp = name == "w" ? opts.weights.w_fp : 1.0;
    all.extensions[name] = finish_extension(c, has_side(name), w_fn, w_fp);
  }
  for (const auto& [name, c] : class_counters) all.class_extensions[name] = finish_class_averaged(c);

  std::vector<SequencePair> seqs;
  if (opts.track_map || opts.has_extension("cr"))
    for (const auto& in : inputs) seqs.push_back(in.seq);
  if (opts.track_map) report.track_map = track_map(seqs, opts.track_map_alpha, opts.track_map_similarity);
  if (opts.has_extension("cr")) report.cr_hota = cr_hota(seqs, opts.grid);
  return report;
}

std::string emit_report(const ScoreReport& report, ReportFormat format) {
  const auto& o = report.options;
  if (format == ReportFormat::csv) {
    std::string out = join(csv_header(report));
    for (const auto& s : report.sequences) out += join(csv_row(s, report, false));
    out += join(csv_row(report.combined, report, true));
    return out;
  }

  json metrics = json::array();
  if (o.hota) metrics.push_back("hota");
  if (o.clear) metrics.push_back("clear");
  if (o.identity) metrics.push_back("identity");
  if (o.track_map) metrics.push_back("trackmap");
  for (const auto& e : o.extensions) metrics.push_back("ext:" + e);

  json doc;
  doc["alpha"] = json{{"values", o.grid.values}, {"non_canonical", !o.grid.canonical}};
  doc["metrics"] = metrics;
  doc["clear_alpha"] = o.clear_alpha;
  json seqs = json::array();
  for (const auto& s : report.sequences) seqs.push_back(sequence_json(s, o));
  doc["sequences"] = seqs;
  doc["combined"] = sequence_json(report.combined, o);

  json bench = json::object();
  if (report.track_map) {
    bench["TrackMAP"] = report.track_map->map;
    json ap = json::array();
    for (const auto& c : report.track_map->curves) ap.push_back(json{{"alpha_tr", c.alpha_tr}, {"AP", c.ap}});
    bench["TrackAP"] = ap;
  }
  if (report.cr_hota) {
    json terms = json::array();
    for (const auto& t : report.cr_hota->terms)
      terms.push_back(json{{"recall", t.target},
                           {"reachable", t.reachable},
                           {"threshold", t.threshold},
                           {"HOTA", t.hota},
                           {"DetRe", t.det_re},
                           {"ratio", t.ratio}});
    bench["CR-HOTA"] = json{{"score", report.cr_hota->score}, {"terms", terms}};
  }
  if (!bench.empty()) doc["benchmark"] = bench;

  json curves{{"alpha", o.grid.values}};
  if (o.hota) {
    json per_seq = json::object();
    for (const auto& s : report.sequences) per_seq[s.name] = curve_json(s.hota);
    curves["sequences"] = per_seq;
    curves["COMBINED"] = curve_json(report.combined.hota);
  }
  if (report.track_map) {
    json pr = json::array();
    for (const auto& c : report.track_map->curves) {
      json rec = json::array(), prec = json::array(), interp = json::array();
      for (const auto& p : c.points) {
        rec.push_back(p.recall);
        prec.push_back(p.precision);
        interp.push_back(p.interp_precision);
      }
      pr.push_back(json{{"alpha_tr", c.alpha_tr}, {"recall", rec}, {"precision", prec}, {"interp_precision", interp}});
    }
    curves["track_map"] = pr;
  }
  doc["curves"] = curves;
  return doc.dump(2) + "\n";
}

std::string emit_curves(const ScoreReport& report, ReportFormat format) {
  const auto& grid = report.options.grid.values;
  std::vector<const SequenceReport*> rows;
  for (const auto& s : report.sequences) rows.push_back(&s);
  rows.push_back(&report.combined);
  if (format == ReportFormat::json) {
    json doc{{"alpha", grid}, {"non_canonical", !report.options.grid.canonical}};
    json seqs = json::object();
    for (const auto* s : rows) seqs[s->name] = curve_json(s->hota);
    doc["sequences"] = seqs;
    return doc.dump(2) + "\n";
  }
  std::string out = "seq,alpha,HOTA,DetA,AssA,DetRe,DetPr,AssRe,AssPr,LocA\n";
  for (const auto* s : rows)
    for (std::size_t a = 0; a < s->hota.per_alpha.size(); ++a) {
      const auto& v = s->hota.per_alpha[a];
      std::vector<std::string> cells{s->name, fixed6(grid[a])};
      for (double x : {v.hota, v.det_a, v.ass_a, v.det_re, v.det_pr, v.ass_re, v.ass_pr, v.loc_a})
        cells.push_back(fixed6(x));
      out += join(cells);
    }
  return out;
}

}  // namespace trackscore

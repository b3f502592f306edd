#include "trackscore/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <CLI11.hpp>

#include "trackscore/error.hpp"
#include "trackscore/io.hpp"
#include "trackscore/oracle_lab.hpp"
#include "trackscore/report.hpp"

namespace trackscore {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_reals(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError(std::string("bad ") + what + " value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(what) + " needs at least one value");
  return out;
}

int jobs_from_env() {
  const char* env = std::getenv("TRACKSCORE_JOBS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) throw UsageError("TRACKSCORE_JOBS must be an integer in 1..1024");
  return int(v);
}

ReportFormat parse_format(const std::string& f) { return f == "csv" ? ReportFormat::csv : ReportFormat::json; }

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) out << text;
  else write_text_file(out_path, text);
}

// Flags shared by eval and sweep.
struct InputArgs {
  std::string gt, results, seqmap, alpha, out, format;
  int jobs = 0;
  bool classes = false;

  void add_to(CLI::App* cmd, const std::string& default_format) {
    format = default_format;
    cmd->add_option("--gt", gt, "ground-truth directory")->required();
    cmd->add_option("--results", results, "tracker result directory")->required();
    cmd->add_option("--seqmap", seqmap, "sequence list")->required();
    cmd->add_option("--alpha", alpha, "comma-separated localisation thresholds (default: 0.05..0.95)");
    cmd->add_option("--out", out, "output file (default: stdout)");
    cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--jobs", jobs, "worker threads (default: TRACKSCORE_JOBS or 1)")->check(CLI::Range(1, 1024));
  }

  void apply(EvalOptions& opts) const {
    if (!alpha.empty() && alpha != "standard") {
      try {
        opts.grid = AlphaGrid::custom(parse_reals(alpha, "--alpha"));
      } catch (const ContractViolation& e) {
        throw UsageError(e.what());
      }
    }
    opts.jobs = jobs > 0 ? jobs : jobs_from_env();
  }

  std::vector<SequenceInput> load(bool with_classes) const {
    std::vector<SequenceInput> inputs;
    for (const auto& entry : parse_seqmap_file(seqmap, gt, results)) {
      SequenceInput in;
      in.seq = load_sequence(entry);
      if (with_classes) {
        in.probs = parse_class_probs_file(fs::path(results) / (entry.name + ".classes.txt"));
        const fs::path mask = fs::path(gt) / (entry.name + ".mask.txt");
        if (fs::exists(mask)) in.mask = parse_federation_mask_file(mask);
      }
      inputs.push_back(std::move(in));
    }
    return inputs;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tracking evaluation: HOTA, CLEAR MOT, IDF1, Track-mAP and HOTA variants", "trackscore"};
  app.require_subcommand(1);

  // eval
  InputArgs eval_in;
  std::string metrics = "hota,clear,identity", weights, trackmap_alpha = "0.5", trackmap_sim = "detection";
  double clear_alpha = 0.5;
  auto* eval = app.add_subcommand("eval", "score tracker results against ground truth");
  eval_in.add_to(eval, "json");
  eval->add_option("--metrics", metrics, "hota,clear,identity,trackmap,ext:{ohota,fa,w,ca,ca2,fed,cr}");
  eval->add_flag("--classes", eval_in.classes,
                 "read <results>/<seq>.classes.txt class probabilities and optional <gt>/<seq>.mask.txt masks");
  eval->add_option("--weights", weights, "W-HOTA weights w_fn,w_fp,w_fna,w_fpa");
  eval->add_option("--clear-alpha", clear_alpha, "similarity threshold for CLEAR MOT and IDF1");
  eval->add_option("--trackmap-alpha", trackmap_alpha, "comma-separated alpha_tr values, or 'all' for 0.05..0.95");
  eval->add_option("--trackmap-similarity", trackmap_sim, "detection or spatiotemporal")
      ->check(CLI::IsMember({"detection", "spatiotemporal"}));

  // sweep
  InputArgs sweep_in;
  auto* sweep = app.add_subcommand("sweep", "per-alpha HOTA curves");
  sweep_in.add_to(sweep, "csv");

  // scenarios
  std::string scenario_name, scenario_out;
  std::vector<std::string> scenario_params;
  bool list = false;
  auto* scen = app.add_subcommand("scenarios", "write synthetic fixtures as MOTChallenge files");
  scen->add_flag("--list", list, "list registered scenarios");
  scen->add_option("--name", scenario_name, "scenario name");
  scen->add_option("--param", scenario_params, "key=value (repeatable)");
  scen->add_option("--out", scenario_out, "output directory");

  // oracle-check
  int trials = 200;
  std::uint64_t seed = 0;
  std::string oracle_alpha = "0.25,0.5,0.75";
  double tolerance = 1e-9;
  auto* oracle = app.add_subcommand("oracle-check", "compare HOTA with the exhaustive oracle on random instances");
  oracle->add_option("--trials", trials, "number of instances")->check(CLI::Range(1, 1000000));
  oracle->add_option("--seed", seed, "first seed");
  oracle->add_option("--alpha", oracle_alpha, "comma-separated thresholds");
  oracle->add_option("--tolerance", tolerance, "allowed |difference|");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (eval->parsed()) {
      EvalOptions opts;
      try {
        select_metrics(opts, metrics);
      } catch (const ContractViolation& e) {
        throw UsageError(e.what());
      }
      eval_in.apply(opts);
      opts.clear_alpha = clear_alpha;
      if (!weights.empty()) {
        const auto w = parse_reals(weights, "--weights");
        if (w.size() != 4) throw UsageError("--weights needs four values");
        opts.weights = Weights{w[0], w[1], w[2], w[3]};
      }
      opts.track_map_alpha = trackmap_alpha == "all" ? AlphaGrid::standard().values
                                                     : parse_reals(trackmap_alpha, "--trackmap-alpha");
      opts.track_map_similarity =
          trackmap_sim == "spatiotemporal" ? TrajectorySimilarity::spatiotemporal : TrajectorySimilarity::detection;
      const bool needs_classes = opts.has_extension("ca") || opts.has_extension("ca2") || opts.has_extension("fed");
      if (needs_classes && !eval_in.classes) throw UsageError("ext:ca, ext:ca2 and ext:fed need --classes");
      const auto report = evaluate_benchmark(eval_in.load(eval_in.classes), opts);
      emit(emit_report(report, parse_format(eval_in.format)), eval_in.out, out);
      return kExitOk;
    }

    if (sweep->parsed()) {
      EvalOptions opts;
      opts.clear = opts.identity = false;
      sweep_in.apply(opts);
      const auto report = evaluate_benchmark(sweep_in.load(false), opts);
      emit(emit_curves(report, parse_format(sweep_in.format)), sweep_in.out, out);
      return kExitOk;
    }

    if (scen->parsed()) {
      if (list) {
        for (const auto& info : scenario_registry())
          out << info.name << (info.params.empty() ? "" : "  " + info.params) << "\n    " << info.summary << "\n";
        return kExitOk;
      }
      if (scenario_name.empty() || scenario_out.empty()) throw UsageError("scenarios needs --name and --out (or --list)");
      ScenarioParams params;
      for (const auto& p : scenario_params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + p + "'");
        params[p.substr(0, eq)] = p.substr(eq + 1);
      }
      const Scenario s = scenario(scenario_name, params);
      const fs::path dir(scenario_out);
      write_text_file(dir / "gt" / (s.seq.name + ".txt"), write_mot(s.seq.gt, Side::gt));
      write_text_file(dir / "results" / (s.seq.name + ".txt"), write_mot(s.seq.pr, Side::pred));
      write_text_file(dir / "seqmap.txt", "name\n" + s.seq.name + "," + std::to_string(s.seq.num_frames) + "\n");
      out << "wrote " << s.seq.name << " (";
      bool first = true;
      for (const auto& [k, v] : s.params) {
        out << (first ? "" : " ") << k << "=" << v;
        first = false;
      }
      out << ") to " << dir.string() << "\n";
      return kExitOk;
    }

    if (oracle->parsed()) {
      const auto report = oracle_check(trials, seed, parse_reals(oracle_alpha, "--alpha"), tolerance);
      out << "oracle-check: " << report.comparisons << " comparisons over " << report.trials
          << " instances, max |delta| " << report.max_delta << ", " << report.mismatches.size() << " mismatches\n";
      for (const auto& m : report.mismatches)
        out << "  seed " << m.seed << " alpha " << m.alpha << ": core " << m.core << " oracle " << m.oracle << "\n";
      return report.mismatches.empty() ? kExitOk : kExitValidation;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    err << app.help() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace trackscore

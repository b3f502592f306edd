#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "test_support.hpp"
#include "trackscore/cli.hpp"
#include "trackscore/error.hpp"
#include "trackscore/io.hpp"
#include "trackscore/oracle_lab.hpp"
#include "trackscore/report.hpp"

using namespace trackscore;
using ts_test::det;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::path(testing::TempDir()) / ("trackscore_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "trackscore");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

SequencePair perfect(int frames) {
  SequencePair s;
  s.name = "perfect";
  s.num_frames = frames;
  for (int t = 1; t <= frames; ++t) {
    s.gt.push_back(det(t, 1, 0));
    s.gt.push_back(det(t, 2, 1));
    s.pr.push_back(det(t, 5, 0));
    s.pr.push_back(det(t, 6, 1));
  }
  return s;
}

std::vector<SequenceInput> inputs_of(std::vector<SequencePair> seqs) {
  std::vector<SequenceInput> out;
  for (auto& s : seqs) out.push_back({std::move(s), std::nullopt, std::nullopt});
  return out;
}

}  // namespace

TEST(ParseMot, GtRow) {
  const auto d = parse_mot("1,2,10,20,30,40,1,1,1.0\n", Side::gt);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].frame, 1);
  EXPECT_EQ(d[0].id, 2);
  EXPECT_EQ(std::get<Box2D>(d[0].geometry), (Box2D{10, 20, 30, 40}));
  EXPECT_TRUE(d[0].consider);
  EXPECT_EQ(d[0].class_id, 1);
  EXPECT_EQ(d[0].visibility, 1.0);
}

TEST(ParseMot, ConsiderZeroDropsRow) {
  EXPECT_TRUE(parse_mot("1,2,10,20,30,40,0,1,1.0", Side::gt).empty());
}

TEST(ParseMot, PredRow) {
  const auto d = parse_mot("3,7,0,0,50,80,0.9,-1,-1", Side::pred);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].frame, 3);
  EXPECT_EQ(d[0].id, 7);
  EXPECT_EQ(d[0].confidence, 0.9);
}

TEST(ParseMot, MissingConfidenceScoresOne) {
  const auto d = parse_mot("1,1,0,0,1,1\n2,1,0,0,1,1,-1\n", Side::pred);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_FALSE(d[0].confidence);
  EXPECT_FALSE(d[1].confidence);
  EXPECT_EQ(d[1].score(), 1.0);
}

TEST(ParseMot, UnsortedBlankLinesAndTrailingFields) {
  const auto d = parse_mot("2,1,0,0,1,1,1,1,1,7,8\n\n1,1,0,0,1,1,1,1,1\r\n", Side::gt);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].frame, 2);
  EXPECT_EQ(d[1].frame, 1);
}

TEST(ParseMot, Errors) {
  try {
    parse_mot("1,1,0,0,1,1\n1,2,0,x,1,1\n", Side::gt, "f.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("f.txt:2"), std::string::npos);
  }
  EXPECT_THROW(parse_mot("1,1,0,0,1", Side::gt), ParseError);
  EXPECT_THROW(parse_mot("0,1,0,0,1,1", Side::gt), ParseError);
  EXPECT_THROW(parse_mot("1,-1,0,0,1,1", Side::pred), ParseError);
  EXPECT_THROW(parse_mot("1.5,1,0,0,1,1", Side::gt), ParseError);
  EXPECT_THROW(parse_mot("1,1,0,0,-1,1", Side::gt), ParseError);
  EXPECT_THROW(parse_mot("1,1,0,0,1,1\n1,1,5,5,1,1\n", Side::pred), FormatError);
}

TEST(ParseMot, DuplicateIsFormatNotParseError) {
  try {
    parse_mot("1,1,0,0,1,1\n1,1,5,5,1,1\n", Side::gt);
    FAIL();
  } catch (const ParseError&) {
    FAIL() << "duplicate reported as a parse error";
  } catch (const FormatError&) {
  }
}

TEST(WriteMot, RoundTrip) {
  std::vector<Detection> gt{ts_test::box(2, 1, 0.1, 0.2, 3.5, 4.25), ts_test::box(1, 3, 1e-7, 12345.678, 1, 1)};
  gt[0].class_id = 1;
  gt[0].visibility = 0.3;
  std::vector<Detection> pr{ts_test::box(1, 9, 1, 2, 3, 4), ts_test::box(1, 2, 0.1 + 0.2, 0, 1, 1)};
  pr[1].confidence = 0.123456789012345;

  auto gt2 = parse_mot(write_mot(gt, Side::gt), Side::gt);
  auto pr2 = parse_mot(write_mot(pr, Side::pred), Side::pred);
  ASSERT_EQ(gt2.size(), 2u);
  EXPECT_EQ(gt2[0], gt[1]);  // sorted by frame
  EXPECT_EQ(gt2[1], gt[0]);
  ASSERT_EQ(pr2.size(), 2u);
  EXPECT_EQ(pr2[0], pr[1]);  // sorted by id
  EXPECT_EQ(pr2[1], pr[0]);
}

TEST(WriteMot, RandomInstancesRoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto seq = random_instance(seed);
    for (auto* side : {&seq.gt, &seq.pr})
      std::sort(side->begin(), side->end(),
                [](const Detection& a, const Detection& b) { return std::pair(a.frame, a.id) < std::pair(b.frame, b.id); });
    EXPECT_EQ(parse_mot(write_mot(seq.gt, Side::gt), Side::gt), seq.gt);
    EXPECT_EQ(parse_mot(write_mot(seq.pr, Side::pred), Side::pred), seq.pr);
  }
}

TEST(ClassProbsFile, Examples) {
  const auto one_hot = parse_class_probs("1,2,1:1.0");
  EXPECT_EQ(one_hot.at(1, 2, 1), 1.0);
  EXPECT_EQ(one_hot.at(1, 2, 2), 0.0);
  const auto uniform = parse_class_probs("1,2,1:0.5;2:0.5\n");
  EXPECT_EQ(uniform.at(1, 2, 1), 0.5);
  EXPECT_EQ(uniform.at(1, 2, 2), 0.5);
  EXPECT_THROW(parse_class_probs("1,2,1:0.6;2:0.3"), FormatError);
  EXPECT_THROW(parse_class_probs("1,2,1"), ParseError);
  EXPECT_THROW(parse_class_probs("1,2,1:1\n1,2,1:1"), ParseError);
  EXPECT_THROW(parse_class_probs("1,2,1:0.5;1:0.5"), ParseError);
  EXPECT_THROW(uniform.at(1, 3, 1), ReferenceError);
}

TEST(FederationMaskFile, Parse) {
  const auto m = parse_federation_mask("1,1;2\n2,\n");
  EXPECT_TRUE(m.counts(1, 1));
  EXPECT_TRUE(m.counts(1, 2));
  EXPECT_FALSE(m.counts(1, 3));
  EXPECT_FALSE(m.counts(2, 1));
  EXPECT_THROW(parse_federation_mask("1"), ParseError);
}

TEST(SeqMap, HeaderLayoutsAndDuplicates) {
  const auto dir = scratch("seqmap");
  write_text_file(dir / "gt" / "A" / "gt" / "gt.txt", "");
  const auto entries = parse_seqmap("name\nA\nB,12\n", dir / "gt", dir / "res");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].gt_path, dir / "gt" / "A" / "gt" / "gt.txt");
  EXPECT_EQ(entries[0].num_frames, 0);
  EXPECT_EQ(entries[1].gt_path, dir / "gt" / "B.txt");
  EXPECT_EQ(entries[1].result_path, dir / "res" / "B.txt");
  EXPECT_EQ(entries[1].num_frames, 12);
  EXPECT_THROW(parse_seqmap("A\nA\n", dir, dir), FormatError);
  EXPECT_THROW(parse_seqmap("A,0\n", dir, dir), ParseError);
  EXPECT_THROW(load_sequence(entries[1]), IoError);
}

TEST(Report, SelectMetrics) {
  EvalOptions o;
  select_metrics(o, "hota,ext:w,ext:ohota,trackmap");
  EXPECT_TRUE(o.hota);
  EXPECT_FALSE(o.clear);
  EXPECT_FALSE(o.identity);
  EXPECT_TRUE(o.track_map);
  EXPECT_EQ(o.extensions, (std::vector<std::string>{"ohota", "w"}));
  EXPECT_THROW(select_metrics(o, "hota,ext:nope"), ContractViolation);
  EXPECT_THROW(select_metrics(o, "mota"), ContractViolation);
}

TEST(Report, EmptyBenchmark) {
  const auto report = evaluate_benchmark({}, EvalOptions{});
  const auto doc = nlohmann::json::parse(emit_report(report, ReportFormat::json));
  EXPECT_TRUE(doc["sequences"].empty());
  EXPECT_EQ(doc["combined"]["HOTA"]["HOTA"], 1.0);
  EXPECT_EQ(doc["combined"]["CLEAR"]["MOTA"], 1.0);
  EXPECT_EQ(doc["combined"]["Identity"]["IDF1"], 1.0);
  const auto csv = emit_report(report, ReportFormat::csv);
  EXPECT_NE(csv.find("\nCOMBINED,"), std::string::npos);
}

TEST(Report, PerfectSequence) {
  const auto report = evaluate_benchmark(inputs_of({perfect(5)}), EvalOptions{});
  const auto doc = nlohmann::json::parse(emit_report(report, ReportFormat::json));
  for (const auto& node : {doc["sequences"][0], doc["combined"]}) {
    EXPECT_EQ(node["HOTA"]["HOTA"], 1.0);
    EXPECT_EQ(node["CLEAR"]["MOTA"], 1.0);
    EXPECT_EQ(node["Identity"]["IDF1"], 1.0);
  }
  EXPECT_EQ(doc["alpha"]["non_canonical"], false);
  EXPECT_EQ(doc["curves"]["COMBINED"]["HOTA"].size(), 19u);
}

TEST(Report, FrameRateScenario) {
  auto seq = scenario("frame_rate", {{"k", "10"}}).seq;
  const auto report = evaluate_benchmark(inputs_of({seq}), EvalOptions{});
  const auto csv = emit_report(report, ReportFormat::csv);
  EXPECT_NE(csv.find("0.707107"), std::string::npos);
  EXPECT_NE(csv.find("0.900000"), std::string::npos);
  const auto doc = nlohmann::json::parse(emit_report(report, ReportFormat::json));
  EXPECT_NEAR(doc["combined"]["HOTA"]["HOTA"].get<double>(), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(doc["combined"]["CLEAR"]["MOTA"].get<double>(), 0.9, 1e-12);
}

TEST(Report, PooledFromCountersNotAveraged) {
  // A perfect sequence and a half-missed one: pooled DetA is 3/4 of the
  // detections, not the mean of 1 and 1/2.
  auto a = perfect(4);
  auto b = perfect(4);
  b.name = "half";
  b.pr.resize(4);
  const auto report = evaluate_benchmark(inputs_of({a, b}), EvalOptions{});
  EXPECT_DOUBLE_EQ(report.sequences[1].hota.integrated.det_a, 0.5);
  EXPECT_DOUBLE_EQ(report.combined.hota.integrated.det_a, 0.75);
  EXPECT_DOUBLE_EQ(report.combined.clear.mota, 0.75);
}

TEST(Report, CustomAlphaIsFlagged) {
  EvalOptions o;
  o.grid = AlphaGrid::custom({0.5});
  const auto doc = nlohmann::json::parse(emit_report(evaluate_benchmark(inputs_of({perfect(2)}), o), ReportFormat::json));
  EXPECT_EQ(doc["alpha"]["non_canonical"], true);
  EXPECT_EQ(doc["alpha"]["values"].size(), 1u);
}

TEST(Report, DeterministicAcrossJobs) {
  std::vector<SequencePair> seqs;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto s = random_instance(seed);
    s.name = "r" + std::to_string(seed);
    seqs.push_back(s);
  }
  EvalOptions o;
  select_metrics(o, "hota,clear,identity,ext:ohota,ext:fa,ext:w");
  o.jobs = 1;
  const auto serial = emit_report(evaluate_benchmark(inputs_of(seqs), o), ReportFormat::json);
  o.jobs = 4;
  const auto parallel = emit_report(evaluate_benchmark(inputs_of(seqs), o), ReportFormat::json);
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(serial, emit_report(evaluate_benchmark(inputs_of(seqs), o), ReportFormat::json));
}

TEST(Report, Curves) {
  const auto report = evaluate_benchmark(inputs_of({perfect(2)}), EvalOptions{});
  const auto csv = emit_curves(report, ReportFormat::csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "seq,alpha,HOTA,DetA,AssA,DetRe,DetPr,AssRe,AssPr,LocA");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 19);
}

TEST(Cli, MissingGtIsUsageError) {
  const auto r = cli({"eval", "--results", "x", "--seqmap", "y"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("--gt"), std::string::npos);
  EXPECT_EQ(cli({"eval"}).code, kExitUsage);
  EXPECT_EQ(cli({"bogus"}).code, kExitUsage);
  EXPECT_EQ(cli({"oracle-check", "--nope"}).code, kExitUsage);
  EXPECT_EQ(cli({}).code, kExitUsage);
}

TEST(Cli, Help) {
  const auto r = cli({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("eval"), std::string::npos);
}

TEST(Cli, ScenariosThenEval) {
  const auto dir = scratch("frame_rate");
  ASSERT_EQ(cli({"scenarios", "--name", "frame_rate", "--param", "k=10", "--out", dir.string()}).code, kExitOk);
  const std::vector<std::string> base{"eval", "--gt", (dir / "gt").string(), "--results", (dir / "results").string(),
                                      "--seqmap", (dir / "seqmap.txt").string()};
  auto args = base;
  args.insert(args.end(), {"--format", "csv"});
  const auto r = cli(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("0.707107"), std::string::npos);
  EXPECT_NE(r.out.find("0.900000"), std::string::npos);

  args = base;
  args.insert(args.end(), {"--out", (dir / "report.json").string(), "--jobs", "2"});
  ASSERT_EQ(cli(args).code, kExitOk);
  const auto doc = nlohmann::json::parse(read_text_file(dir / "report.json"));
  EXPECT_NEAR(doc["combined"]["HOTA"]["HOTA"].get<double>(), 1 / std::sqrt(2.0), 1e-12);

  args = base;
  args.insert(args.end(), {"--alpha", "0.5,0.9"});
  const auto custom = nlohmann::json::parse(cli(args).out);
  EXPECT_EQ(custom["alpha"]["non_canonical"], true);

  args = base;
  args[0] = "sweep";
  const auto sweep = cli(args);
  ASSERT_EQ(sweep.code, kExitOk);
  EXPECT_NE(sweep.out.find("frame_rate,0.500000,0.707107"), std::string::npos);
}

TEST(Cli, EvalErrors) {
  const auto dir = scratch("errors");
  ASSERT_EQ(cli({"scenarios", "--name", "perfect", "--out", dir.string()}).code, kExitOk);
  const std::vector<std::string> base{"eval", "--gt", (dir / "gt").string(), "--results", (dir / "results").string(),
                                      "--seqmap", (dir / "seqmap.txt").string()};
  auto args = base;
  args.insert(args.end(), {"--metrics", "hota,ext:ca"});
  EXPECT_EQ(cli(args).code, kExitUsage);
  args = base;
  args.insert(args.end(), {"--alpha", "0.5,abc"});
  EXPECT_EQ(cli(args).code, kExitUsage);
  args = base;
  args.insert(args.end(), {"--metrics", "hota,ext:ca", "--classes"});
  EXPECT_EQ(cli(args).code, kExitIo);  // no .classes.txt sidecar
  args = base;
  args[2] = (dir / "missing").string();
  EXPECT_EQ(cli(args).code, kExitIo);

  write_text_file(dir / "results" / "perfect.txt", "1,1,0,0,1,1\n1,1,0,0,1,1\n");
  EXPECT_EQ(cli(base).code, kExitValidation);
}

TEST(Cli, ClassSidecars) {
  const auto dir = scratch("classes");
  ASSERT_EQ(cli({"scenarios", "--name", "perfect", "--param", "frames=2", "--out", dir.string()}).code, kExitOk);
  write_text_file(dir / "gt" / "perfect.txt", "1,1,10,0,1,1,1,3,1\n2,1,10,0,1,1,1,3,1\n");
  write_text_file(dir / "results" / "perfect.classes.txt", "1,1,3:1\n2,1,3:0.25;4:0.75\n");
  write_text_file(dir / "gt" / "perfect.mask.txt", "1,3\n2,3\n");
  const auto r = cli({"eval", "--gt", (dir / "gt").string(), "--results", (dir / "results").string(), "--seqmap",
                      (dir / "seqmap.txt").string(), "--metrics", "hota,ext:ca,ext:ca2,ext:fed", "--classes"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["combined"]["HOTA"]["HOTA"], 1.0);
  // Class confidences 1 and 1/4 on the two TPs.
  EXPECT_NEAR(doc["combined"]["extensions"]["CA-HOTA"]["HOTA"].get<double>(), std::sqrt(0.625), 1e-12);
  EXPECT_NEAR(doc["combined"]["extensions"]["CA2-HOTA"]["score"].get<double>(), std::sqrt(0.625), 1e-12);
  EXPECT_EQ(doc["combined"]["extensions"]["CA2-HOTA"]["score"], doc["combined"]["extensions"]["Fed-HOTA"]["score"]);
}

TEST(Cli, ScenarioList) {
  const auto r = cli({"scenarios", "--list"});
  EXPECT_EQ(r.code, kExitOk);
  for (const auto& info : scenario_registry()) EXPECT_NE(r.out.find(info.name), std::string::npos);
  EXPECT_EQ(cli({"scenarios", "--name", "nope", "--out", scratch("nope").string()}).code, kExitValidation);
  EXPECT_EQ(cli({"scenarios", "--name", "frame_rate"}).code, kExitUsage);
}

TEST(Cli, OracleCheckReportsMismatchesAsValidationFailure) {
  // Seed 18 is a known instance where greedy matching falls short of the optimum.
  const auto bad = cli({"oracle-check", "--trials", "1", "--seed", "18", "--alpha", "0.25"});
  EXPECT_EQ(bad.code, kExitValidation);
  EXPECT_NE(bad.out.find("1 mismatches"), std::string::npos);
  const auto good = cli({"oracle-check", "--trials", "5", "--seed", "0", "--alpha", "0.5"});
  EXPECT_EQ(good.code, kExitOk) << good.out;
}

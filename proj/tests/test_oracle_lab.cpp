#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "trackscore/baseline_metrics.hpp"
#include "trackscore/error.hpp"
#include "trackscore/hota_core.hpp"
#include "trackscore/oracle_lab.hpp"

using namespace trackscore;

namespace {

SequencePair make(const std::string& name, const ScenarioParams& params = {}) { return scenario(name, params).seq; }

HotaAlphaScores hota_at(const SequencePair& seq, double alpha = 0.5) {
  const auto m = match_alpha(seq, build_similarity(seq), alpha);
  return hota_alpha(m, association_counts(m, seq));
}

ClearScores mot(const SequencePair& seq) { return clear_mot(seq, build_similarity(seq)); }
double id_f1(const SequencePair& seq) { return idf1(seq, build_similarity(seq)).idf1; }

}  // namespace

TEST(Scenario, UnknownNameAndParameters) {
  EXPECT_THROW(scenario("no_such_scenario"), LookupError);
  EXPECT_THROW(scenario("frame_rate", {{"frames", "10"}}), ContractViolation);
  EXPECT_THROW(scenario("frame_rate", {{"k", "7"}}), ContractViolation);
  EXPECT_THROW(scenario("frame_rate", {{"k", "ten"}}), ContractViolation);
  EXPECT_THROW(scenario("self_correct", {{"variant", "D"}}), ContractViolation);
  EXPECT_THROW(scenario("coverage", {{"ratio", "0.33"}}), ContractViolation);
  EXPECT_THROW(scenario("coverage", {{"ratio", "1"}}), ContractViolation);
  EXPECT_THROW(scenario("idf1_association", {{"extra_ids", "3"}}), ContractViolation);
}

TEST(Scenario, DefaultsAreRecorded) {
  const auto s = scenario("coverage");
  EXPECT_EQ(s.params.at("variant"), "A");
  EXPECT_EQ(s.params.at("length"), "20");
  EXPECT_EQ(s.params.at("ratio"), "0.5");
  EXPECT_EQ(s.params.at("swap"), "0");
  EXPECT_EQ(scenario("coverage", s.params).seq, s.seq);
}

TEST(Scenario, Deterministic) {
  for (const auto& info : scenario_registry()) {
    const auto a = scenario(info.name), b = scenario(info.name);
    EXPECT_EQ(a.seq, b.seq) << info.name;
    EXPECT_EQ(a.params, b.params) << info.name;
    EXPECT_NO_THROW(validate(a.seq)) << info.name;
  }
}

TEST(Scenario, FrameRate) {
  for (int k : {10, 100}) {
    const auto seq = make("frame_rate", {{"k", std::to_string(k)}});
    EXPECT_NEAR(mot(seq).mota, 1.0 - 1.0 / k, 1e-12);
    EXPECT_NEAR(evaluate_sequence(seq).first.integrated.hota, std::sqrt(0.5), 1e-12);
  }
  EXPECT_NEAR(mot(make("frame_rate")).mota, 0.9, 1e-12);
}

TEST(Scenario, SplitMerge) {
  const auto split = mot(make("split_merge", {{"variant", "split"}}));
  EXPECT_DOUBLE_EQ(split.mota, 0.5);
  EXPECT_EQ(split.idsw, 1);
  const auto merge = mot(make("split_merge", {{"variant", "merge"}}));
  EXPECT_DOUBLE_EQ(merge.mota, 1.0);
  EXPECT_EQ(merge.idtr, 1);
  EXPECT_EQ(merge.idsw, 0);
}

TEST(Scenario, SelfCorrect) {
  double hota[3], mota[3];
  const double ass[3] = {5.0 / 9, 1.0 / 2, 1.0 / 3};
  const char* names[3] = {"A", "B", "C"};
  for (int i = 0; i < 3; ++i) {
    const auto seq = make("self_correct", {{"variant", names[i]}});
    const auto h = hota_at(seq);
    EXPECT_NEAR(h.ass_a, ass[i], 1e-12) << names[i];
    EXPECT_EQ(h.det_a, 1.0);
    hota[i] = h.hota;
    mota[i] = mot(seq).mota;
  }
  EXPECT_EQ(mota[0], mota[2]);
  EXPECT_LT(mota[0], mota[1]);
  EXPECT_GT(hota[0], hota[1]);
  EXPECT_GT(hota[1], hota[2]);
}

TEST(Scenario, Alignment) {
  const double ass[3] = {1.0 / 2, 5.0 / 9, 13.0 / 18};
  const char* names[3] = {"A", "B", "C"};
  double hota[3];
  for (int i = 0; i < 3; ++i) {
    const auto seq = make("alignment", {{"variant", names[i]}});
    const auto h = hota_at(seq);
    EXPECT_NEAR(h.ass_a, ass[i], 1e-12);
    hota[i] = h.hota;
    EXPECT_NEAR(mot(seq).mota, 5.0 / 6, 1e-12);
    EXPECT_EQ(mot(seq).idsw, 1);
  }
  EXPECT_GT(hota[2], hota[1]);
  EXPECT_GT(hota[1], hota[0]);
}

TEST(Scenario, AssociationCounts) {
  const auto seq = make("association_counts");
  const auto m = match_alpha(seq, build_similarity(seq), 0.5);
  const auto c = association_counts(m, seq);
  const int tpa = c.tpa.at({1, 1});
  EXPECT_EQ(tpa, 5);
  EXPECT_EQ(c.gt_total.at(1) - tpa, 3);
  EXPECT_EQ(c.pr_total.at(1) - tpa, 4);
  EXPECT_NEAR(assoc_score(1, 1, c), 5.0 / 12, 1e-12);
}

TEST(Scenario, Fragmentation) {
  const auto a = make("fragmentation", {{"variant", "A"}});
  const auto b = make("fragmentation", {{"variant", "B"}});
  EXPECT_EQ(hota_at(a).hota, hota_at(b).hota);
  EXPECT_EQ(a.pr.size(), b.pr.size());
}

TEST(Scenario, Idf1Detection) {
  const auto a = make("idf1_detection", {{"variant", "A"}});
  const auto b = make("idf1_detection", {{"variant", "B"}});
  EXPECT_NEAR(id_f1(b), 2.0 / 3, 1e-12);
  EXPECT_NEAR(id_f1(a), 1.0 / 2, 1e-12);
  EXPECT_NEAR(hota_at(b).hota, 0.5, 1e-12);
  EXPECT_NEAR(hota_at(a).hota, std::sqrt(0.5), 1e-12);
}

TEST(Scenario, Idf1Association) {
  double previous = 2.0;
  for (int extra : {1, 2, 8}) {
    const auto seq = make("idf1_association", {{"extra_ids", std::to_string(extra)}});
    EXPECT_NEAR(id_f1(seq), 0.5, 1e-12);
    const auto h = hota_at(seq);
    // AssA = (4 + 4 / extra) / 16 with every detection a TP.
    EXPECT_NEAR(h.ass_a, (4.0 + 4.0 / extra) / 16, 1e-12);
    EXPECT_LT(h.hota, previous);
    previous = h.hota;
  }
}

TEST(Scenario, CoverageSwap) {
  const auto a = make("coverage", {{"ratio", "0.25"}});
  const auto a_swapped = make("coverage", {{"ratio", "0.25"}, {"swap", "1"}});
  EXPECT_EQ(a_swapped.gt, a.pr);
  EXPECT_EQ(a_swapped.pr, a.gt);
  const auto b = make("coverage", {{"ratio", "0.25"}, {"variant", "B"}});
  EXPECT_EQ(b.pr.size(), 5u);
}

TEST(Exhaustive, SinglePairMatchesCore) {
  const auto seq = make("perfect", {{"frames", "4"}});
  const auto r = exhaustive_hota(seq, build_similarity(seq), 0.5);
  EXPECT_EQ(r.hota, hota_at(seq).hota);
  EXPECT_EQ(r.states, 5u);  // TPA of the one pair ranges over 0..4
}

TEST(Exhaustive, AgreesWithTestBruteForce) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto seq = ts_test::random_sequence(seed, 3, 3);
    const auto sim = build_similarity(seq);
    for (double alpha : {0.25, 0.5, 0.75})
      EXPECT_NEAR(exhaustive_hota(seq, sim, alpha).hota, ts_test::brute_force_hota(seq, alpha), 1e-12)
          << "seed " << seed << " alpha " << alpha;
  }
}

TEST(Exhaustive, NeverBelowCore) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto seq = random_instance(seed);
    const auto sim = build_similarity(seq);
    for (double alpha : {0.25, 0.5, 0.75}) {
      const auto m = match_alpha(seq, sim, alpha);
      EXPECT_LE(hota_alpha(m, association_counts(m, seq)).hota, exhaustive_hota(seq, sim, alpha).hota + 1e-12)
          << "seed " << seed;
    }
  }
}

TEST(Exhaustive, ExposesGreedyMatchingGap) {
  // Maximum-cardinality matching in frame 2 crosses the long pair onto two
  // one-frame newcomers; keeping the long pair scores higher.
  SequencePair seq{"gap", 2, {}, {}};
  seq.gt = {ts_test::box(1, 1, 0, 0, 2, 1), ts_test::box(2, 1, 0, 0, 2, 1), ts_test::box(2, 2, 0.5, 0, 2, 1)};
  seq.pr = {ts_test::box(1, 1, 0, 0, 2, 1), ts_test::box(2, 1, 0, 0, 2, 1), ts_test::box(2, 2, -0.5, 0, 2, 1)};
  const auto sim = build_similarity(seq);
  const auto oracle = exhaustive_hota(seq, sim, 0.5);
  EXPECT_NEAR(oracle.hota, std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(hota_at(seq).hota, 2.0 / 3, 1e-12);
}

TEST(Exhaustive, Degenerate) {
  SequencePair empty{"empty", 2, {}, {}};
  EXPECT_EQ(exhaustive_hota(empty, build_similarity(empty), 0.5).hota, 1.0);
  SequencePair miss{"miss", 1, {ts_test::det(1, 1, 0)}, {ts_test::det(1, 1, 3)}};
  EXPECT_EQ(exhaustive_hota(miss, build_similarity(miss), 0.5).hota, 0.0);
}

TEST(Exhaustive, SizeLimits) {
  const auto long_seq = make("perfect", {{"frames", "7"}});
  EXPECT_THROW(exhaustive_hota(long_seq, build_similarity(long_seq), 0.5), SizeError);
  const auto crowded = make("perfect", {{"frames", "1"}, {"objects", "7"}});
  EXPECT_THROW(exhaustive_hota(crowded, build_similarity(crowded), 0.5), SizeError);
  const auto seq = random_instance(3);
  EXPECT_THROW(exhaustive_hota(seq, build_similarity(seq), 0.25, 0), SizeError);
  EXPECT_THROW(exhaustive_hota(seq, build_similarity(seq), 0.0), ContractViolation);
}

TEST(AltFormulation, JaccardEqualsCore) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto seq = random_instance(seed);
    const auto sim = build_similarity(seq);
    for (double alpha : {0.25, 0.5, 0.75}) {
      const auto alt = alt_formulation_scores(seq, sim, alpha, Formulation::jaccard);
      const auto h = hota_at(seq, alpha);
      EXPECT_NEAR(alt.score, h.hota, 1e-12);
      EXPECT_NEAR(alt.det, h.det_a, 1e-12);
      EXPECT_NEAR(alt.ass, h.ass_a, 1e-12);
    }
  }
}

TEST(AltFormulation, ClosedForms) {
  // B: track 1 alone, covering r of the gt. A: track 2 covers the rest.
  const double r = 0.75;
  const auto a = make("coverage", {{"ratio", "0.75"}});
  const auto b = make("coverage", {{"ratio", "0.75"}, {"variant", "B"}});
  auto at = [](const SequencePair& s, Formulation f) {
    return alt_formulation_scores(s, build_similarity(s), 0.5, f).score;
  };
  EXPECT_NEAR(at(b, Formulation::jaccard), r, 1e-12);
  EXPECT_NEAR(at(a, Formulation::jaccard), std::sqrt(r * r + (1 - r) * (1 - r)), 1e-12);
  EXPECT_NEAR(at(b, Formulation::f1), 2 * r / (1 + r), 1e-12);
  EXPECT_NEAR(at(a, Formulation::f1), std::sqrt(r * 2 * r / (1 + r) + (1 - r) * 2 * (1 - r) / (2 - r)), 1e-12);
  EXPECT_NEAR(at(b, Formulation::moda), r, 1e-12);
  EXPECT_NEAR(at(b, Formulation::excl_det_assoc), std::sqrt(r), 1e-12);

  // Swapped B: gt is track 1 alone, the prediction covers everything.
  const auto b_swapped = make("coverage", {{"ratio", "0.25"}, {"variant", "B"}, {"swap", "1"}});
  // det = (TP - FP) / |gt| = (5 - 15) / 5, ass = (5 - 15) / 5.
  EXPECT_NEAR(alt_formulation_scores(b_swapped, build_similarity(b_swapped), 0.5, Formulation::moda).score, -2.0,
              1e-12);
}

TEST(AltFormulation, ParseNames) {
  for (auto f : {Formulation::jaccard, Formulation::f1, Formulation::moda, Formulation::excl_det_assoc})
    EXPECT_EQ(parse_formulation(to_string(f)), f);
  EXPECT_THROW(parse_formulation("mota"), LookupError);
}

TEST(CoverageSweep, OnlyJaccardIsMonotoneAndSymmetric) {
  const auto jaccard = coverage_sweep(Formulation::jaccard);
  ASSERT_EQ(jaccard.size(), 19u);
  for (const auto& p : jaccard) {
    EXPECT_GT(p.a, p.b) << p.ratio;
    EXPECT_GT(p.a_swapped, p.b_swapped) << p.ratio;
  }
  bool f1_violates = false;
  for (const auto& p : coverage_sweep(Formulation::f1)) f1_violates |= !(p.a > p.b) || !(p.a_swapped > p.b_swapped);
  EXPECT_TRUE(f1_violates);
  bool moda_asymmetric = false;
  for (const auto& p : coverage_sweep(Formulation::moda))
    moda_asymmetric |= std::abs(p.a - p.a_swapped) > 1e-12 || std::abs(p.b - p.b_swapped) > 1e-12;
  EXPECT_TRUE(moda_asymmetric);
  bool excl_violates = false;
  for (const auto& p : coverage_sweep(Formulation::excl_det_assoc)) excl_violates |= !(p.a > p.b);
  EXPECT_TRUE(excl_violates);
}

TEST(RandomInstance, BoundsAndDeterminism) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto seq = random_instance(seed);
    EXPECT_EQ(seq, random_instance(seed));
    EXPECT_NO_THROW(validate(seq));
    EXPECT_LE(seq.num_frames, 6);
    std::map<int, int> gt_per_frame, pr_per_frame;
    for (const auto& d : seq.gt) ++gt_per_frame[d.frame];
    for (const auto& d : seq.pr) ++pr_per_frame[d.frame];
    for (const auto& [f, n] : gt_per_frame) EXPECT_LE(n, 5);
    for (const auto& [f, n] : pr_per_frame) EXPECT_LE(n, 5);
  }
  EXPECT_NE(random_instance(1), random_instance(2));
}

TEST(OracleCheck, ReportsEveryComparison) {
  const auto r = oracle_check(20, 500, {0.5, 0.75});
  EXPECT_EQ(r.trials, 20);
  EXPECT_EQ(r.comparisons, 40);
  for (const auto& m : r.mismatches) EXPECT_LT(m.core, m.oracle);
}

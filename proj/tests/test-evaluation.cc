// tests/test-evaluation.cc

// Copyright 2026  MDD Engine Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "mdd/evaluation.h"
#include "mdd/rng.h"
#include "mdd/selftest.h"
#include "test-util.h"

using namespace mdd;

namespace {

using Strings = std::vector<std::string>;

PhoneInventory Inv() {
  return BuildInventory({"dh", "iy", "d", "ah", "s", "t"},
                        AntiMode::kPerPhoneAnti);
}

std::vector<OutcomeRecord> ClassifyRecords(const Strings &canonical,
                                           const Strings &annotated,
                                           const Strings &predicted) {
  return Classify("utt", canonical, annotated, predicted, Inv()).records;
}

ConfusionCounts CountOf(const std::vector<OutcomeRecord> &records) {
  ConfusionCounts c;
  for (const auto &r : records) {
    switch (r.outcome) {
      case Outcome::kTP: ++c.tp; break;
      case Outcome::kFP: ++c.fp; break;
      case Outcome::kFN: ++c.fn; break;
      case Outcome::kTN: ++c.tn; break;
    }
  }
  return c;
}

}  // namespace

TEST_CASE("alignment worked examples") {
  const auto subs = Align({"dh", "iy"}, {"d", "ah"});
  REQUIRE(subs.size() == 2);
  CHECK(subs[0].type == EditOpType::kSubstitute);
  CHECK(subs[1].type == EditOpType::kSubstitute);
  CHECK(EditDistance(subs) == 2);

  const auto same = Align({"d", "ah"}, {"d", "ah"});
  CHECK(EditDistance(same) == 0);
  for (const auto &op : same) CHECK(op.type == EditOpType::kMatch);

  const auto del = Align({"d"}, {});
  REQUIRE(del.size() == 1);
  CHECK(del[0].type == EditOpType::kDelete);
  CHECK(del[0].ref_index == 0);
  CHECK(del[0].hyp_index == -1);

  const auto ins = Align({}, {"d"});
  REQUIRE(ins.size() == 1);
  CHECK(ins[0].type == EditOpType::kInsert);
  CHECK(ins[0].ref_index == -1);

  // One deletion inside an otherwise matching sequence.
  const auto mixed = Align({"d", "ah", "t"}, {"d", "t"});
  CHECK(EditDistance(mixed) == 1);
  REQUIRE(mixed.size() == 3);
  CHECK(mixed[0].type == EditOpType::kMatch);
  CHECK(mixed[1].type == EditOpType::kDelete);
  CHECK(mixed[2].type == EditOpType::kMatch);
}

TEST_CASE("detected and diagnosed anti-phone error is a correct TN") {
  const auto recs = ClassifyRecords({"s", "t"}, {"#s", "t"}, {"#s", "t"});
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].outcome == Outcome::kTN);
  CHECK(recs[0].diagnosis_correct);
  CHECK(recs[0].error_type == ErrorType::kNonCategorical);
  CHECK(recs[1].outcome == Outcome::kTP);
  CHECK(recs[1].error_type == ErrorType::kNone);
}

TEST_CASE("missed mispronunciations are FP, false alarms are FN") {
  const auto fp = ClassifyRecords({"s", "t"}, {"#s", "#t"}, {"s", "t"});
  CHECK(CountOf(fp).fp == 2);

  const auto fn = ClassifyRecords({"s", "t"}, {}, {"s", "d"});
  const ConfusionCounts c = CountOf(fn);
  CHECK(c.tp == 1);
  CHECK(c.fn == 1);
}

TEST_CASE("detected but misdiagnosed error is an incorrect TN") {
  const auto recs = ClassifyRecords({"s"}, {"#s"}, {"#t"});
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].outcome == Outcome::kTN);
  CHECK_FALSE(recs[0].diagnosis_correct);
}

TEST_CASE("categorical substitutions are typed by the annotated symbol") {
  const auto recs =
      ClassifyRecords({"dh", "iy"}, {"d", "ah"}, {"d", "iy"});
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].outcome == Outcome::kTN);
  CHECK(recs[0].diagnosis_correct);
  CHECK(recs[0].error_type == ErrorType::kCategorical);
  CHECK(recs[1].outcome == Outcome::kFP);
  CHECK(recs[1].error_type == ErrorType::kCategorical);
}

TEST_CASE("deletions project to the gap symbol") {
  // The model drops the middle phone: that position becomes a
  // mispronunciation call against the gap.
  const auto recs = ClassifyRecords({"s", "t", "d"}, {}, {"s", "d"});
  REQUIRE(recs.size() == 3);
  CHECK(recs[1].predicted == kGapSymbol);
  CHECK(recs[1].outcome == Outcome::kFN);

  // Annotator marked a deletion: truth MP with a non-categorical type.
  const auto recs2 = ClassifyRecords({"s", "t", "d"}, {"s", "d"}, {"s", "t", "d"});
  CHECK(recs2[1].annotated == kGapSymbol);
  CHECK(recs2[1].outcome == Outcome::kFP);
  CHECK(recs2[1].error_type == ErrorType::kNonCategorical);
}

TEST_CASE("predicted insertions stay outside the confusion matrix") {
  const UttClassification cls =
      Classify("utt", {"s", "t"}, {}, {"s", "d", "t", "ah"}, Inv());
  CHECK(cls.predicted_insertions == 2);
  CHECK(CountOf(cls.records).Total() == 2);
  CHECK(CountOf(cls.records).tp == 2);
}

TEST_CASE("classify validates symbols") {
  const PhoneInventory inv = Inv();
  CHECK_THROWS_AS(Classify("u", {}, {}, {}, inv), UsageError);
  CHECK_THROWS_AS(Classify("u", {"#s"}, {}, {"s"}, inv), DataError);
  CHECK_THROWS_AS(Classify("u", {"zz"}, {}, {"s"}, inv), DataError);
  CHECK_THROWS_AS(Classify("u", {"s"}, {"zz"}, {"s"}, inv), DataError);
  CHECK_THROWS_AS(Classify("u", {"s"}, {}, {"zz"}, inv), DataError);
}

TEST_CASE("detection metrics from a worked confusion matrix") {
  ConfusionCounts c;
  c.tp = 5, c.fp = 1, c.fn = 2, c.tn = 3;
  const DetectionMetrics m = ComputeDetectionMetrics(c);
  CHECK(m.precision == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(m.recall == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK_FALSE(m.degenerate);
}

TEST_CASE("f1 arithmetic reproduces published operating points") {
  // Pairs of (precision %, recall %) with their reported F1 %.
  const double cases[][3] = {{46.57, 70.28, 56.02},
                             {38.99, 53.12, 44.97},
                             {19.42, 52.19, 28.31},
                             {41.17, 76.48, 53.52},
                             {43.89, 64.54, 52.25}};
  for (const auto &c : cases) {
    const double f1 = 2.0 * c[0] * c[1] / (c[0] + c[1]);
    CHECK(std::abs(f1 - c[2]) <= 0.01);
  }
  CHECK(CheckMetricArithmetic() <= 0.01);
}

TEST_CASE("degenerate ratios are flagged, not crashed") {
  ConfusionCounts none;  // no positions at all
  const DetectionMetrics m0 = ComputeDetectionMetrics(none);
  CHECK(m0.degenerate);
  CHECK(m0.f1 == 0.0);

  ConfusionCounts no_tn;
  no_tn.tp = 4, no_tn.fp = 1;
  const DetectionMetrics m1 = ComputeDetectionMetrics(no_tn);
  CHECK(m1.degenerate);
  CHECK(m1.recall == 0.0);
}

TEST_CASE("diagnosis accuracy rate counts correct TNs only") {
  const auto half = ClassifyRecords({"s", "t"}, {"#s", "#t"}, {"#s", "#s"});
  const DarResult r = ComputeDar(half);
  CHECK(r.tn == 2);
  CHECK(r.correct == 1);
  CHECK(r.dar == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(r.degenerate);

  const auto all = ClassifyRecords({"s"}, {"#s"}, {"#s"});
  CHECK(ComputeDar(all).dar == 1.0);

  const auto no_tn = ClassifyRecords({"s"}, {}, {"s"});
  const DarResult d = ComputeDar(no_tn);
  CHECK(d.degenerate);
  CHECK(d.dar == 0.0);
}

TEST_CASE("error-type breakdown separates categorical rows") {
  // Position 0: non-categorical, detected and diagnosed. Position 1:
  // categorical, missed entirely.
  const auto recs = ClassifyRecords({"s", "t"}, {"#s", "d"}, {"#s", "t"});
  const ErrorBreakdown b = ComputeErrorBreakdown(recs);
  CHECK(b.non_categorical.total == 1);
  CHECK(b.non_categorical.diagnosed == 1);
  CHECK(b.categorical.total == 1);
  CHECK(b.categorical.diagnosed == 0);

  CHECK(ComputeErrorBreakdown({}).categorical.total == 0);
  CHECK(ComputeErrorBreakdown({}).non_categorical.total == 0);
}

TEST_CASE("corpus evaluation wires utterances together") {
  std::vector<ManifestEntry> refs(3);
  refs[0] = {"u1", "", {"s", "t"}, {"#s", "t"}};
  refs[1] = {"u2", "", {"d", "ah"}, {}};  // unannotated: scored as correct
  refs[2] = {"u3", "", {"iy"}, {"iy"}};
  std::map<std::string, Strings> preds = {
      {"u1", {"#s", "t"}}, {"u2", {"d", "ah"}}, {"u3", {"iy"}}};

  std::vector<OutcomeRecord> records;
  const EvalReport r = EvaluateCorpus(refs, preds, Inv(), &records);
  CHECK(r.utterances == 3);
  CHECK(r.counts.Total() == 5);
  CHECK(records.size() == 5);
  CHECK(r.counts.tp == 4);
  CHECK(r.counts.tn == 1);
  CHECK(r.counts.fp == 0);
  CHECK(r.counts.fn == 0);
  CHECK(r.dar.dar == 1.0);
  CHECK(r.detection.f1 == 1.0);

  preds["u4"] = {"s"};
  CHECK_THROWS_AS(EvaluateCorpus(refs, preds, Inv(), nullptr), DataError);
  preds.erase("u4");
  preds.erase("u1");
  CHECK_THROWS_AS(EvaluateCorpus(refs, preds, Inv(), nullptr), DataError);
}

TEST_CASE("random corpora obey the metric invariants") {
  Rng rng(404);
  const PhoneInventory inv = Inv();
  const Strings canon_pool = {"dh", "iy", "d", "ah", "s", "t"};
  for (int it = 0; it < 40; ++it) {
    std::vector<ManifestEntry> refs;
    std::map<std::string, Strings> echo_ann, echo_canon;
    long positions = 0;
    const int n_utts = 1 + rng.UniformInt(6);
    for (int u = 0; u < n_utts; ++u) {
      ManifestEntry e;
      e.id = "u" + std::to_string(u);
      const int len = 1 + rng.UniformInt(5);
      positions += len;
      for (int i = 0; i < len; ++i) {
        const std::string &p = canon_pool[rng.UniformInt(6)];
        e.canonical.push_back(p);
        const double roll = rng.Uniform(0.0, 1.0);
        if (roll < 0.2)
          e.annotated.push_back(inv.AntiOf(p));
        else if (roll < 0.35)
          e.annotated.push_back(canon_pool[rng.UniformInt(6)]);
        else
          e.annotated.push_back(p);
      }
      echo_ann[e.id] = e.annotated;
      echo_canon[e.id] = e.canonical;
      refs.push_back(std::move(e));
    }

    // Echoing the annotation back is a perfect system.
    const EvalReport perfect = EvaluateCorpus(refs, echo_ann, inv, nullptr);
    CHECK(perfect.counts.Total() == positions);
    CHECK(perfect.counts.fp == 0);
    CHECK(perfect.counts.fn == 0);
    if (perfect.counts.tn > 0) {
      CHECK(perfect.dar.dar == 1.0);
      CHECK(perfect.detection.f1 == 1.0);
    }

    // Echoing the canonical transcript never flags anything.
    const EvalReport silent = EvaluateCorpus(refs, echo_canon, inv, nullptr);
    CHECK(silent.counts.tn == 0);
    CHECK(silent.counts.fn == 0);
    CHECK(silent.detection.recall == 0.0);

    // F1 is the harmonic mean of the reported precision and recall.
    if (!perfect.detection.degenerate) {
      const double p = perfect.detection.precision,
                   r = perfect.detection.recall;
      CHECK(perfect.detection.f1 ==
            doctest::Approx(2.0 * p * r / (p + r)).epsilon(1e-6));
    }

    // Utterance order does not change the report.
    auto shuffled = refs;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(RenderReportKeyValues(EvaluateCorpus(shuffled, echo_ann, inv,
                                               nullptr)) ==
          RenderReportKeyValues(perfect));
  }
}

TEST_CASE("report rendering and record dump") {
  std::vector<ManifestEntry> refs(1);
  refs[0] = {"u1", "", {"s", "t"}, {"#s", "t"}};
  std::map<std::string, Strings> preds = {{"u1", {"#s", "t"}}};
  std::vector<OutcomeRecord> records;
  const EvalReport r = EvaluateCorpus(refs, preds, Inv(), &records);

  const std::string kv = RenderReportKeyValues(r);
  CHECK(kv.find("tn = 1\n") != std::string::npos);
  CHECK(kv.find("f1_pct = 100.00\n") != std::string::npos);
  CHECK(kv.find("dar_pct = 100.00\n") != std::string::npos);
  CHECK(kv.find("degenerate = 0\n") != std::string::npos);

  const std::string table = RenderReportTable(r);
  CHECK(table.find("truth CP") != std::string::npos);
  CHECK(table.find("DAR 100.00%") != std::string::npos);

  mdd_test::TempDir dir("evaldump");
  DumpRecordsTsv(dir.File("records.tsv"), records);
  const std::string tsv = mdd_test::ReadFileBytes(dir.File("records.tsv"));
  CHECK(tsv.find("utt_id\tposition\tcanonical\tannotated\tpredicted\t"
                 "outcome\tdiagnosis_correct\terror_type\n") == 0);
  CHECK(tsv.find("u1\t0\ts\t#s\t#s\tTN\t1\tnon-categorical\n") !=
        std::string::npos);
  CHECK(tsv.find("u1\t1\tt\tt\tt\tTP\t-\tnone\n") != std::string::npos);
}

// src/evaluation.cc

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

#include "mdd/evaluation.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mdd/common.h"

namespace mdd {

std::vector<EditOp> Align(const std::vector<std::string> &ref,
                          const std::vector<std::string> &hyp) {
  const int R = static_cast<int>(ref.size()), H = static_cast<int>(hyp.size());
  std::vector<std::vector<int>> d(R + 1, std::vector<int>(H + 1, 0));
  for (int i = 0; i <= R; ++i) d[i][0] = i;
  for (int j = 0; j <= H; ++j) d[0][j] = j;
  for (int i = 1; i <= R; ++i) {
    for (int j = 1; j <= H; ++j) {
      const int sub = d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      d[i][j] = std::min({sub, d[i - 1][j] + 1, d[i][j - 1] + 1});
    }
  }
  std::vector<EditOp> ops;
  int i = R, j = H;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] &&
        d[i][j] == d[i - 1][j - 1]) {
      ops.push_back({EditOpType::kMatch, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1) {
      ops.push_back({EditOpType::kSubstitute, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ops.push_back({EditOpType::kDelete, i - 1, -1});
      --i;
    } else {
      ops.push_back({EditOpType::kInsert, -1, j - 1});
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

int EditDistance(const std::vector<EditOp> &ops) {
  int d = 0;
  for (const auto &op : ops)
    if (op.type != EditOpType::kMatch) ++d;
  return d;
}

namespace {

// Symbol aligned to each canonical position (kGapSymbol where the hyp
// deleted it); insertions are counted separately.
std::vector<std::string> ProjectToCanonical(
    const std::vector<std::string> &canonical,
    const std::vector<std::string> &hyp, int *insertions) {
  std::vector<std::string> out(canonical.size(), kGapSymbol);
  int ins = 0;
  for (const auto &op : Align(canonical, hyp)) {
    if (op.type == EditOpType::kInsert)
      ++ins;
    else if (op.type != EditOpType::kDelete)
      out[op.ref_index] = hyp[op.hyp_index];
  }
  if (insertions != nullptr) *insertions = ins;
  return out;
}

void CheckSymbols(const std::string &utt_id, const std::vector<std::string> &seq,
                  const PhoneInventory &inv, bool canonical_only,
                  const char *what) {
  for (const auto &s : seq) {
    if (!inv.Contains(s))
      throw DataError("utterance " + utt_id + ": " + what + " symbol '" + s +
                      "' is not in the inventory");
    if (canonical_only && !inv.IsCanonical(s))
      throw DataError("utterance " + utt_id + ": " + what + " symbol '" + s +
                      "' is not a canonical phone");
  }
}

}  // namespace

UttClassification Classify(const std::string &utt_id,
                           const std::vector<std::string> &canonical,
                           const std::vector<std::string> &annotated,
                           const std::vector<std::string> &predicted,
                           const PhoneInventory &inv) {
  MDD_REQUIRE(!canonical.empty(), "canonical transcript must be non-empty");
  CheckSymbols(utt_id, canonical, inv, true, "canonical");
  CheckSymbols(utt_id, annotated, inv, false, "annotated");
  CheckSymbols(utt_id, predicted, inv, false, "predicted");

  UttClassification res;
  const std::vector<std::string> ann =
      annotated.empty() ? canonical
                        : ProjectToCanonical(canonical, annotated, nullptr);
  const std::vector<std::string> pred =
      ProjectToCanonical(canonical, predicted, &res.predicted_insertions);

  for (size_t i = 0; i < canonical.size(); ++i) {
    OutcomeRecord rec;
    rec.utt_id = utt_id;
    rec.position = static_cast<int>(i);
    rec.canonical = canonical[i];
    rec.annotated = ann[i];
    rec.predicted = pred[i];
    const bool truth_mp = ann[i] != canonical[i];
    const bool model_mp = pred[i] != canonical[i];
    if (!truth_mp)
      rec.outcome = model_mp ? Outcome::kFN : Outcome::kTP;
    else
      rec.outcome = model_mp ? Outcome::kTN : Outcome::kFP;
    if (rec.outcome == Outcome::kTN)
      rec.diagnosis_correct = pred[i] == ann[i];
    if (truth_mp)
      rec.error_type = (ann[i] != kGapSymbol && inv.Contains(ann[i]) &&
                        inv.IsCanonical(ann[i]))
                           ? ErrorType::kCategorical
                           : ErrorType::kNonCategorical;
    res.records.push_back(std::move(rec));
  }
  return res;
}

DetectionMetrics ComputeDetectionMetrics(const ConfusionCounts &c) {
  DetectionMetrics m;
  const long pr_den = c.fn + c.tn, re_den = c.fp + c.tn;
  if (pr_den == 0 || re_den == 0) m.degenerate = true;
  m.precision = pr_den == 0 ? 0.0 : static_cast<double>(c.tn) / pr_den;
  m.recall = re_den == 0 ? 0.0 : static_cast<double>(c.tn) / re_den;
  if (m.precision + m.recall <= 0.0) {
    m.f1 = 0.0;
    m.degenerate = true;
  } else {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

DarResult ComputeDar(const std::vector<OutcomeRecord> &records) {
  DarResult r;
  for (const auto &rec : records) {
    if (rec.outcome != Outcome::kTN) continue;
    ++r.tn;
    if (rec.diagnosis_correct) ++r.correct;
  }
  if (r.tn == 0) {
    r.degenerate = true;
    r.dar = 0.0;
  } else {
    r.dar = static_cast<double>(r.correct) / r.tn;
  }
  return r;
}

ErrorBreakdown ComputeErrorBreakdown(const std::vector<OutcomeRecord> &records) {
  ErrorBreakdown b;
  for (const auto &rec : records) {
    if (rec.error_type == ErrorType::kNone) continue;
    BreakdownRow &row = rec.error_type == ErrorType::kCategorical
                            ? b.categorical
                            : b.non_categorical;
    ++row.total;
    if (rec.outcome == Outcome::kTN && rec.diagnosis_correct) ++row.diagnosed;
  }
  return b;
}

EvalReport EvaluateCorpus(
    const std::vector<ManifestEntry> &refs,
    const std::map<std::string, std::vector<std::string>> &predictions,
    const PhoneInventory &inv, std::vector<OutcomeRecord> *all_records) {
  std::map<std::string, bool> seen;
  for (const auto &e : refs) seen[e.id] = false;
  for (const auto &kv : predictions) {
    auto it = seen.find(kv.first);
    if (it == seen.end())
      throw DataError("prediction for unknown utterance '" + kv.first + "'");
    it->second = true;
  }

  EvalReport report;
  std::vector<OutcomeRecord> records;
  for (const auto &e : refs) {
    auto it = predictions.find(e.id);
    if (it == predictions.end())
      throw DataError("missing prediction for utterance '" + e.id + "'");
    UttClassification cls =
        Classify(e.id, e.canonical, e.annotated, it->second, inv);
    report.predicted_insertions += cls.predicted_insertions;
    for (auto &rec : cls.records) records.push_back(std::move(rec));
    ++report.utterances;
  }

  for (const auto &rec : records) {
    switch (rec.outcome) {
      case Outcome::kTP: ++report.counts.tp; break;
      case Outcome::kFP: ++report.counts.fp; break;
      case Outcome::kFN: ++report.counts.fn; break;
      case Outcome::kTN: ++report.counts.tn; break;
    }
  }
  report.detection = ComputeDetectionMetrics(report.counts);
  report.dar = ComputeDar(records);
  report.breakdown = ComputeErrorBreakdown(records);
  if (all_records != nullptr) *all_records = std::move(records);
  return report;
}

namespace {

std::string Pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * x);
  return buf;
}

}  // namespace

std::string RenderReportKeyValues(const EvalReport &r) {
  std::ostringstream os;
  os << "utterances = " << r.utterances << "\n";
  os << "positions = " << r.counts.Total() << "\n";
  os << "tp = " << r.counts.tp << "\n";
  os << "fp = " << r.counts.fp << "\n";
  os << "fn = " << r.counts.fn << "\n";
  os << "tn = " << r.counts.tn << "\n";
  os << "precision_pct = " << Pct(r.detection.precision) << "\n";
  os << "recall_pct = " << Pct(r.detection.recall) << "\n";
  os << "f1_pct = " << Pct(r.detection.f1) << "\n";
  os << "dar_pct = " << Pct(r.dar.dar) << "\n";
  os << "dar_correct = " << r.dar.correct << "\n";
  os << "dar_total = " << r.dar.tn << "\n";
  os << "categorical_total = " << r.breakdown.categorical.total << "\n";
  os << "categorical_diagnosed = " << r.breakdown.categorical.diagnosed << "\n";
  os << "non_categorical_total = " << r.breakdown.non_categorical.total << "\n";
  os << "non_categorical_diagnosed = " << r.breakdown.non_categorical.diagnosed
     << "\n";
  os << "predicted_insertions = " << r.predicted_insertions << "\n";
  os << "degenerate = " << (r.detection.degenerate || r.dar.degenerate ? 1 : 0)
     << "\n";
  return os.str();
}

std::string RenderReportTable(const EvalReport &r) {
  std::ostringstream os;
  os << "Detection (" << r.utterances << " utterances, " << r.counts.Total()
     << " canonical positions)\n";
  os << "                     truth CP    truth MP\n";
  os << "  model CP  " << std::setw(11) << r.counts.tp << " " << std::setw(11)
     << r.counts.fp << "\n";
  os << "  model MP  " << std::setw(11) << r.counts.fn << " " << std::setw(11)
     << r.counts.tn << "\n";
  os << "  precision " << Pct(r.detection.precision) << "%  recall "
     << Pct(r.detection.recall) << "%  F1 " << Pct(r.detection.f1) << "%";
  if (r.detection.degenerate) os << "  (degenerate)";
  os << "\n";
  os << "Diagnosis\n";
  os << "  DAR " << Pct(r.dar.dar) << "% (" << r.dar.correct << "/" << r.dar.tn
     << ")";
  if (r.dar.degenerate) os << "  (degenerate)";
  os << "\n";
  auto row = [&os](const char *name, const BreakdownRow &b) {
    os << "  " << name << ": " << b.diagnosed << "/" << b.total << " diagnosed";
    if (b.total > 0)
      os << " (" << Pct(static_cast<double>(b.diagnosed) / b.total) << "%)";
    os << "\n";
  };
  row("categorical errors", r.breakdown.categorical);
  row("non-categorical errors", r.breakdown.non_categorical);
  os << "Predicted insertions (not in the matrix): " << r.predicted_insertions
     << "\n";
  return os.str();
}

void DumpRecordsTsv(const std::string &path,
                    const std::vector<OutcomeRecord> &records) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os << "utt_id\tposition\tcanonical\tannotated\tpredicted\toutcome\t"
        "diagnosis_correct\terror_type\n";
  for (const auto &r : records) {
    const char *outcome = r.outcome == Outcome::kTP   ? "TP"
                          : r.outcome == Outcome::kFP ? "FP"
                          : r.outcome == Outcome::kFN ? "FN"
                                                      : "TN";
    const char *etype = r.error_type == ErrorType::kNone ? "none"
                        : r.error_type == ErrorType::kCategorical
                            ? "categorical"
                            : "non-categorical";
    os << r.utt_id << "\t" << r.position << "\t" << r.canonical << "\t"
       << r.annotated << "\t" << r.predicted << "\t" << outcome << "\t"
       << (r.outcome == Outcome::kTN ? (r.diagnosis_correct ? "1" : "0") : "-")
       << "\t" << etype << "\n";
  }
  if (!os) throw DataError("failed writing '" + path + "'");
}

}  // namespace mdd

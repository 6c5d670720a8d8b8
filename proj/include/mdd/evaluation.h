// include/mdd/evaluation.h

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

// Hierarchical MDD scoring. Annotation and prediction are each aligned to
// the canonical transcript; at every canonical position the ground truth is
// "mispronounced" iff the annotated symbol differs from the canonical one,
// and the model's call is "mispronounced" iff the predicted symbol differs.
// The four cells: model CP/truth CP = TP, model CP/truth MP = FP, model
// MP/truth CP = FN, model MP/truth MP = TN. Diagnosis is scored on TN
// positions only. Predicted insertions fall outside the confusion matrix
// and are reported as a separate count.

#ifndef MDD_EVALUATION_H_
#define MDD_EVALUATION_H_

#include <map>
#include <string>
#include <vector>

#include "mdd/corpus.h"
#include "mdd/phone-set.h"

namespace mdd {

enum class EditOpType { kMatch, kSubstitute, kDelete, kInsert };

struct EditOp {
  EditOpType type;
  int ref_index = -1;  // -1 for insertions
  int hyp_index = -1;  // -1 for deletions
};

// Minimum-edit-distance alignment with unit costs; backtrace tie-breaking
// prefers match > substitution > deletion > insertion.
std::vector<EditOp> Align(const std::vector<std::string> &ref,
                          const std::vector<std::string> &hyp);
int EditDistance(const std::vector<EditOp> &ops);

enum class Outcome { kTP, kFP, kFN, kTN };
enum class ErrorType { kNone, kCategorical, kNonCategorical };

// A canonical position deleted by one of the alignments is scored against
// this gap marker (treated as a mispronunciation call).
inline constexpr const char *kGapSymbol = "<gap>";

struct OutcomeRecord {
  std::string utt_id;
  int position = 0;  // canonical position
  std::string canonical, annotated, predicted;
  Outcome outcome = Outcome::kTP;
  bool diagnosis_correct = false;  // defined only for TN
  ErrorType error_type = ErrorType::kNone;
};

struct ConfusionCounts {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  long Total() const { return tp + fp + fn + tn; }
};

struct UttClassification {
  std::vector<OutcomeRecord> records;  // one per canonical position
  int predicted_insertions = 0;
};

UttClassification Classify(const std::string &utt_id,
                           const std::vector<std::string> &canonical,
                           const std::vector<std::string> &annotated,
                           const std::vector<std::string> &predicted,
                           const PhoneInventory &inv);

struct DetectionMetrics {
  double precision = 0.0;  // TN / (FN + TN)
  double recall = 0.0;     // TN / (FP + TN)
  double f1 = 0.0;
  bool degenerate = false;  // some 0/0 ratio was forced to 0
};

DetectionMetrics ComputeDetectionMetrics(const ConfusionCounts &c);

struct DarResult {
  double dar = 0.0;
  long tn = 0, correct = 0;
  bool degenerate = false;
};

DarResult ComputeDar(const std::vector<OutcomeRecord> &records);

struct BreakdownRow {
  long total = 0;      // ground-truth mispronunciations (FP + TN)
  long diagnosed = 0;  // TN with correct diagnosis
};

struct ErrorBreakdown {
  BreakdownRow categorical, non_categorical;
};

ErrorBreakdown ComputeErrorBreakdown(const std::vector<OutcomeRecord> &records);

struct EvalReport {
  long utterances = 0;
  ConfusionCounts counts;
  DetectionMetrics detection;
  DarResult dar;
  ErrorBreakdown breakdown;
  long predicted_insertions = 0;
};

// predictions: utt id -> predicted phone sequence. Every manifest utterance
// needs a prediction and vice versa. Entries without annotation are scored
// as correctly pronounced (annotated = canonical).
EvalReport EvaluateCorpus(
    const std::vector<ManifestEntry> &refs,
    const std::map<std::string, std::vector<std::string>> &predictions,
    const PhoneInventory &inv, std::vector<OutcomeRecord> *all_records);

std::string RenderReportKeyValues(const EvalReport &r);
// Human-readable tables (percentages to two decimals).
std::string RenderReportTable(const EvalReport &r);
void DumpRecordsTsv(const std::string &path,
                    const std::vector<OutcomeRecord> &records);

}  // namespace mdd

#endif  // MDD_EVALUATION_H_

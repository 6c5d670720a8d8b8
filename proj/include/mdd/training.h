// include/mdd/training.h

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

// Optimizer, batching, checkpoints, and the three-stage transfer-learning
// pipeline: stage 1 trains an accent-free model on native data, stage 2
// transfers its encoder into a fresh model trained on label-shuffled CP
// data, stage 3 finetunes everything on annotated MP data.

#ifndef MDD_TRAINING_H_
#define MDD_TRAINING_H_

#include <string>
#include <vector>

#include "mdd/corpus.h"
#include "mdd/hybrid.h"

namespace mdd {

struct TrainConfig {
  ModelConfig model;
  AntiMode mode = AntiMode::kPerPhoneAnti;

  std::string corpus_dir;  // root against which feature paths resolve
  std::string phones_path;
  std::string native_manifest, cp_manifest, mp_manifest;
  std::string output_dir;

  int stage1_epochs = 10, stage2_epochs = 10, stage3_epochs = 10;
  double learning_rate = 1e-3;
  int batch_size = 8;
  double lambda = 0.5;
  double shuffle_prob = 0.3;
  double grad_clip = 5.0;  // global norm
  uint64_t seed = 0;

  static TrainConfig FromConfig(const KeyValueConfig &cfg);
  void Validate() const;
};

// Checkpoint file: magic "MDCK", u32 version, stage tag, the config text it
// was trained with, the embedded inventory and model dimensions, then all
// parameters in declared order as little-endian 64-bit floats.
struct Checkpoint {
  std::string stage;  // accent-free | stage2 | final
  std::string config_text;
  ModelParams model;
};

void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt);
Checkpoint LoadCheckpoint(const std::string &path);

// Adam with bias correction; gradients are clipped by global norm first.
class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParams &shape, double learning_rate,
                double grad_clip);
  void Step(ModelParams *params, ModelParams *grads);

 private:
  ModelParams m_, v_;
  double lr_, clip_;
  long t_ = 0;
};

struct EpochRecord {
  std::string stage;
  int epoch = 0;
  double loss = 0.0;  // per-target-symbol average
  int utts = 0;
  int skipped = 0;  // CTC-infeasible members skipped this epoch
};

using TrainLog = std::vector<EpochRecord>;

std::string FormatEpochRecord(const EpochRecord &r);

// Target ids: the annotated transcript when present, else the canonical.
std::vector<int> TrainingTargets(const Utterance &utt,
                                 const PhoneInventory &inv);

// Length-grouped batches, seeded batch-order shuffle per epoch, loss
// averaged per target symbol. CTC-infeasible members are skipped (counted
// per epoch). Throws NumericError on a non-finite loss.
ModelParams TrainOnCorpus(ModelParams model, const std::vector<Utterance> &data,
                          const TrainConfig &cfg, int epochs,
                          const std::string &stage_tag, uint64_t stage_seed,
                          TrainLog *log);

// Fresh model whose encoder parameters are copied from `donor`; attention,
// decoder and CTC head are re-initialized from the stage-2 seed.
ModelParams InitStage2From(const ModelParams &donor, const TrainConfig &cfg);

ModelParams TrainStage1(const TrainConfig &cfg, const PhoneInventory &inv,
                        const std::vector<Utterance> &native, TrainLog *log);
ModelParams TrainStage2(const ModelParams &stage1, const TrainConfig &cfg,
                        const std::vector<ManifestEntry> &cp_entries,
                        TrainLog *log);
ModelParams TrainStage3(const ModelParams &stage2, const TrainConfig &cfg,
                        const std::vector<Utterance> &mp, TrainLog *log);

struct PipelineResult {
  Checkpoint final;
  TrainLog log;
  std::string stage1_path, stage2_path, final_path, log_path;
};

// Stages 1 -> 2 -> 3 with intermediate checkpoints and an append-only
// machine-readable loss log under cfg.output_dir. start_stage > 1 resumes
// from the corresponding checkpoint on disk.
PipelineResult RunPipeline(const TrainConfig &cfg,
                           const std::string &config_text,
                           int start_stage = 1);

}  // namespace mdd

#endif  // MDD_TRAINING_H_

// include/mdd/corpus.h

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

// Corpus file formats, label-shuffling augmentation, and the seeded
// synthetic L2-corpus generator.
//
// On-disk layout under a corpus root: phones.txt, manifest.tsv (plus
// per-subset manifests), feats/. Manifests are UTF-8 TSV:
// utt_id <TAB> feature_path <TAB> canonical <TAB> annotated, phones
// space-separated, annotated may be empty, anti-phones '#'-prefixed.
// Feature files: magic "MDDF", u32 version = 1, u32 T, u32 F, then T*F
// little-endian 32-bit floats, row-major.

#ifndef MDD_CORPUS_H_
#define MDD_CORPUS_H_

#include <optional>
#include <string>
#include <vector>

#include "mdd/config.h"
#include "mdd/matrix.h"
#include "mdd/phone-set.h"
#include "mdd/rng.h"

namespace mdd {

struct ManifestEntry {
  std::string id;
  std::string feature_path;  // relative to the corpus root
  std::vector<std::string> canonical;
  std::vector<std::string> annotated;  // empty: no annotation

  bool HasAnnotation() const { return !annotated.empty(); }
};

struct Utterance {
  std::string id;
  Matrix feats;  // T x F
  std::vector<std::string> canonical;
  std::vector<std::string> annotated;  // empty: no annotation

  bool HasAnnotation() const { return !annotated.empty(); }
};

void WriteFeatures(const std::string &path, const Matrix &feats);
Matrix ReadFeatures(const std::string &path);

std::vector<ManifestEntry> ReadManifest(const std::string &path);
void WriteManifest(const std::string &path,
                   const std::vector<ManifestEntry> &entries);

// Loads features for every entry; paths resolved against root_dir.
std::vector<Utterance> LoadUtterances(const std::string &root_dir,
                                      const std::vector<ManifestEntry> &entries);

// Each position independently, with probability p, is replaced by an
// anti-phone drawn uniformly from the anti set excluding the phone's own
// anti-phone (a single "Unk" in single-Unk mode). Input must be canonical
// phones only.
std::vector<std::string> ShuffleLabels(const std::vector<std::string> &transcript,
                                       double p, const PhoneInventory &inv,
                                       Rng *rng);

// Originals plus one shuffled-label copy each (features shared via the
// feature path; the copy's shuffled transcript lands in `annotated`).
// Rejects utterances that carry mispronunciation annotations.
std::vector<ManifestEntry> AugmentCorpus(const std::vector<ManifestEntry> &cp,
                                         double p, const PhoneInventory &inv,
                                         uint64_t seed);

struct SynthSpec {
  std::vector<std::string> phones;
  AntiMode mode = AntiMode::kPerPhoneAnti;
  int train_utts = 2000;
  int dev_utts = 200;
  int test_utts = 200;
  int native_utts = 600;
  int min_phones = 3, max_phones = 6;   // phones per utterance
  int min_frames = 6, max_frames = 12;  // frames per phone
  int feat_dim = 8;
  double cat_rate = 0.1;   // categorical substitution probability
  double anti_rate = 0.1;  // non-categorical distortion probability
  // Non-categorical distortions keep most of the canonical phone: subtle
  // off-target productions, not wholesale replacements.
  double blend_min = 0.65, blend_max = 0.85;
  double noise_scale = 0.3;
  int num_l1_prototypes = 8;  // off-inventory "L1" phone prototypes
  uint64_t seed = 42;

  static SynthSpec FromConfig(const KeyValueConfig &cfg);
  void Validate() const;
};

struct SynthSummary {
  int train_cp = 0, train_mp = 0;
  int dev_cp = 0, dev_mp = 0;
  int test = 0, native_train = 0;
  long total_positions = 0;
  long cat_positions = 0, anti_positions = 0;
};

// Writes phones.txt, feats/, manifest.tsv and the subset manifests
// (native_train.tsv, train_cp.tsv, train_mp.tsv, dev_cp.tsv, dev_mp.tsv,
// test.tsv) under out_dir. Deterministic given the spec.
SynthSummary GenerateSyntheticCorpus(const SynthSpec &spec,
                                     const std::string &out_dir);

}  // namespace mdd

#endif  // MDD_CORPUS_H_

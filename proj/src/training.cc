// src/training.cc

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

#include "mdd/training.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace mdd {

namespace fs = std::filesystem;

TrainConfig TrainConfig::FromConfig(const KeyValueConfig &cfg) {
  TrainConfig c;
  c.model.feat_dim = cfg.GetInt("feat_dim", c.model.feat_dim);
  c.model.enc_layers = cfg.GetInt("enc_layers", c.model.enc_layers);
  c.model.enc_hidden = cfg.GetInt("enc_hidden", c.model.enc_hidden);
  c.model.subsample_factor =
      cfg.GetInt("subsample_factor", c.model.subsample_factor);
  c.model.dec_hidden = cfg.GetInt("dec_hidden", c.model.dec_hidden);
  c.model.embed_dim = cfg.GetInt("embed_dim", c.model.embed_dim);
  c.model.att_dim = cfg.GetInt("att_dim", c.model.att_dim);
  c.model.att_filters = cfg.GetInt("att_filters", c.model.att_filters);
  c.model.att_kernel = cfg.GetInt("att_kernel", c.model.att_kernel);

  std::string mode = cfg.GetString("mode", "anti");
  if (mode == "anti") c.mode = AntiMode::kPerPhoneAnti;
  else if (mode == "unk") c.mode = AntiMode::kSingleUnk;
  else throw UsageError("config key 'mode' must be 'anti' or 'unk'");

  c.corpus_dir = cfg.GetString("corpus_dir", "");
  c.phones_path = cfg.GetString("phones");
  c.native_manifest = cfg.GetString("native_manifest");
  c.cp_manifest = cfg.GetString("cp_manifest");
  c.mp_manifest = cfg.GetString("mp_manifest");
  c.output_dir = cfg.GetString("output_dir");

  c.stage1_epochs = cfg.GetInt("stage1_epochs", c.stage1_epochs);
  c.stage2_epochs = cfg.GetInt("stage2_epochs", c.stage2_epochs);
  c.stage3_epochs = cfg.GetInt("stage3_epochs", c.stage3_epochs);
  c.learning_rate = cfg.GetDouble("learning_rate", c.learning_rate);
  c.batch_size = cfg.GetInt("batch_size", c.batch_size);
  c.lambda = cfg.GetDouble("lambda", c.lambda);
  c.shuffle_prob = cfg.GetDouble("shuffle_prob", c.shuffle_prob);
  c.grad_clip = cfg.GetDouble("grad_clip", c.grad_clip);
  c.seed = cfg.GetU64("seed", c.seed);
  c.Validate();
  return c;
}

void TrainConfig::Validate() const {
  model.Validate();
  MDD_REQUIRE(stage1_epochs >= 0 && stage2_epochs >= 0 && stage3_epochs >= 0,
              "per-stage epochs must be >= 0");
  MDD_REQUIRE(learning_rate > 0.0, "learning_rate must be > 0");
  MDD_REQUIRE(batch_size >= 1, "batch_size must be >= 1");
  MDD_REQUIRE(lambda >= 0.0 && lambda <= 1.0, "lambda must be in [0, 1]");
  MDD_REQUIRE(shuffle_prob >= 0.0 && shuffle_prob <= 1.0,
              "shuffle_prob must be in [0, 1]");
  MDD_REQUIRE(grad_clip > 0.0, "grad_clip must be > 0");
}

// ---------------------------------------------------------------------------
// Checkpoint serialization

static constexpr char kCkptMagic[4] = {'M', 'D', 'C', 'K'};
static constexpr uint32_t kCkptVersion = 1;

static void PutU32(std::ostream &out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<char *>(b), 4);
}

static uint32_t TakeU32(std::istream &in, const std::string &path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char *>(b), 4))
    throw DataError(path + ": truncated checkpoint");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

static void PutString(std::ostream &out, const std::string &s) {
  PutU32(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

static std::string TakeString(std::istream &in, const std::string &path) {
  uint32_t n = TakeU32(in, path);
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n))
    throw DataError(path + ": truncated checkpoint string");
  return s;
}

static void PutDouble(std::ostream &out, double d) {
  uint64_t bits;
  std::memcpy(&bits, &d, 8);
  PutU32(out, static_cast<uint32_t>(bits & 0xffffffffULL));
  PutU32(out, static_cast<uint32_t>(bits >> 32));
}

static double TakeDouble(std::istream &in, const std::string &path) {
  uint64_t lo = TakeU32(in, path);
  uint64_t hi = TakeU32(in, path);
  uint64_t bits = lo | (hi << 32);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kCkptMagic, 4);
  PutU32(out, kCkptVersion);
  PutString(out, ckpt.stage);
  PutString(out, ckpt.config_text);

  const PhoneInventory &inv = ckpt.model.inv;
  PutU32(out, inv.Mode() == AntiMode::kPerPhoneAnti ? 0 : 1);
  PutU32(out, static_cast<uint32_t>(inv.Canonical().size()));
  for (const auto &p : inv.Canonical()) PutString(out, p);

  const ModelConfig &mc = ckpt.model.cfg;
  for (int v : {mc.feat_dim, mc.enc_layers, mc.enc_hidden,
                mc.subsample_factor, mc.dec_hidden, mc.embed_dim, mc.att_dim,
                mc.att_filters, mc.att_kernel})
    PutU32(out, static_cast<uint32_t>(v));

  size_t count = NumParameters(ckpt.model);
  PutU32(out, static_cast<uint32_t>(count & 0xffffffffULL));
  PutU32(out, static_cast<uint32_t>(count >> 32));
  VisitParams(const_cast<ModelParams &>(ckpt.model), [&](Vec &v) {
    for (double d : v) PutDouble(out, d);
  });
  if (!out) throw DataError("write failed: " + path);
}

Checkpoint LoadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCkptMagic, 4) != 0)
    throw DataError(path + ": bad magic (not an MDCK checkpoint)");
  uint32_t version = TakeU32(in, path);
  if (version != kCkptVersion)
    throw DataError(path + ": unsupported checkpoint version " +
                    std::to_string(version));

  Checkpoint ckpt;
  ckpt.stage = TakeString(in, path);
  ckpt.config_text = TakeString(in, path);

  AntiMode mode = TakeU32(in, path) == 0 ? AntiMode::kPerPhoneAnti
                                         : AntiMode::kSingleUnk;
  uint32_t n_canon = TakeU32(in, path);
  std::vector<std::string> canonical;
  canonical.reserve(n_canon);
  for (uint32_t i = 0; i < n_canon; ++i)
    canonical.push_back(TakeString(in, path));
  PhoneInventory inv = BuildInventory(canonical, mode);

  ModelConfig mc;
  mc.feat_dim = static_cast<int>(TakeU32(in, path));
  mc.enc_layers = static_cast<int>(TakeU32(in, path));
  mc.enc_hidden = static_cast<int>(TakeU32(in, path));
  mc.subsample_factor = static_cast<int>(TakeU32(in, path));
  mc.dec_hidden = static_cast<int>(TakeU32(in, path));
  mc.embed_dim = static_cast<int>(TakeU32(in, path));
  mc.att_dim = static_cast<int>(TakeU32(in, path));
  mc.att_filters = static_cast<int>(TakeU32(in, path));
  mc.att_kernel = static_cast<int>(TakeU32(in, path));

  ckpt.model = ModelParams(mc, inv);
  uint64_t lo = TakeU32(in, path), hi = TakeU32(in, path);
  uint64_t count = lo | (hi << 32);
  if (count != NumParameters(ckpt.model))
    throw DataError(path + ": parameter count mismatch");
  VisitParams(ckpt.model, [&](Vec &v) {
    for (auto &d : v) d = TakeDouble(in, path);
  });
  char extra;
  if (in.read(&extra, 1))
    throw DataError(path + ": trailing bytes after parameters");
  return ckpt;
}

// ---------------------------------------------------------------------------
// Optimizer

AdamOptimizer::AdamOptimizer(const ModelParams &shape, double learning_rate,
                             double grad_clip)
    : m_(ZeroLike(shape)), v_(ZeroLike(shape)), lr_(learning_rate),
      clip_(grad_clip) {}

void AdamOptimizer::Step(ModelParams *params, ModelParams *grads) {
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

  double sq = 0.0;
  VisitParams(*grads, [&](Vec &g) {
    for (double x : g) sq += x * x;
  });
  double norm = std::sqrt(sq);
  double scale = (norm > clip_) ? clip_ / norm : 1.0;

  ++t_;
  double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));

  std::vector<Vec *> ps, gs, ms, vs;
  VisitParams(*params, [&](Vec &v) { ps.push_back(&v); });
  VisitParams(*grads, [&](Vec &v) { gs.push_back(&v); });
  VisitParams(m_, [&](Vec &v) { ms.push_back(&v); });
  VisitParams(v_, [&](Vec &v) { vs.push_back(&v); });
  for (size_t i = 0; i < ps.size(); ++i) {
    Vec &p = *ps[i], &g = *gs[i], &m = *ms[i], &v = *vs[i];
    for (size_t k = 0; k < p.size(); ++k) {
      double gk = g[k] * scale;
      m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * gk;
      v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * gk * gk;
      p[k] -= lr_ * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + kEps);
    }
  }
}

// ---------------------------------------------------------------------------
// Training loop

std::string FormatEpochRecord(const EpochRecord &r) {
  std::ostringstream out;
  out.precision(12);
  out << "stage=" << r.stage << "\tepoch=" << r.epoch << "\tloss=" << r.loss
      << "\tutts=" << r.utts << "\tskipped=" << r.skipped;
  return out.str();
}

std::vector<int> TrainingTargets(const Utterance &utt,
                                 const PhoneInventory &inv) {
  const auto &symbols = utt.HasAnnotation() ? utt.annotated : utt.canonical;
  return inv.Encode(symbols);
}

static int EncodedLength(int frames, const ModelConfig &mc) {
  int s = frames;
  for (int h = 0; h < mc.NumSubsamples(); ++h) s = (s + 1) / 2;
  return s;
}

static bool CtcFeasible(const std::vector<int> &targets, int enc_frames) {
  int need = static_cast<int>(targets.size());
  for (size_t i = 1; i < targets.size(); ++i)
    if (targets[i] == targets[i - 1]) ++need;
  return enc_frames >= need;
}

ModelParams TrainOnCorpus(ModelParams model,
                          const std::vector<Utterance> &data,
                          const TrainConfig &cfg, int epochs,
                          const std::string &stage_tag, uint64_t stage_seed,
                          TrainLog *log) {
  if (epochs == 0 || data.empty()) return model;

  // Pre-encode targets once; group indices by similar length.
  std::vector<std::vector<int>> targets(data.size());
  for (size_t i = 0; i < data.size(); ++i)
    targets[i] = TrainingTargets(data[i], model.inv);

  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return data[a].feats.NumRows() < data[b].feats.NumRows();
  });
  std::vector<std::vector<int>> batches;
  for (size_t i = 0; i < order.size(); i += cfg.batch_size) {
    size_t end = std::min(order.size(), i + cfg.batch_size);
    batches.emplace_back(order.begin() + i, order.begin() + end);
  }

  AdamOptimizer opt(model, cfg.learning_rate, cfg.grad_clip);
  ModelParams grads = ZeroLike(model);
  Rng rng(stage_seed);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    // Seeded Fisher-Yates over batch order.
    std::vector<int> batch_order(batches.size());
    std::iota(batch_order.begin(), batch_order.end(), 0);
    for (int i = static_cast<int>(batch_order.size()) - 1; i > 0; --i)
      std::swap(batch_order[i], batch_order[rng.UniformInt(i + 1)]);

    double epoch_loss = 0.0;
    long epoch_symbols = 0;
    int epoch_skipped = 0;

    for (int bi : batch_order) {
      const std::vector<int> &batch = batches[bi];
      long batch_symbols = 0;
      std::vector<int> members;
      for (int idx : batch) {
        // Cheap infeasibility precheck so the member can be skipped
        // before any gradient work.
        int s = EncodedLength(data[idx].feats.NumRows(), cfg.model);
        if (cfg.lambda > 0.0 && !CtcFeasible(targets[idx], s)) {
          ++epoch_skipped;
          continue;
        }
        members.push_back(idx);
        batch_symbols += static_cast<long>(targets[idx].size()) + 1;  // +eos
      }
      if (members.empty()) continue;

      VisitParams(grads, [](Vec &v) { std::fill(v.begin(), v.end(), 0.0); });
      double batch_loss = 0.0;
      for (int idx : members) {
        HybridLossResult r =
            HybridLoss(model, data[idx].feats, targets[idx], cfg.lambda,
                       &grads, 1.0 / static_cast<double>(batch_symbols));
        if (!std::isfinite(r.loss))
          throw NumericError(stage_tag + ": non-finite loss on utterance '" +
                             data[idx].id + "'");
        batch_loss += r.loss;
      }
      opt.Step(&model, &grads);
      epoch_loss += batch_loss;
      epoch_symbols += batch_symbols;
    }

    EpochRecord rec;
    rec.stage = stage_tag;
    rec.epoch = epoch;
    rec.loss = epoch_symbols > 0 ? epoch_loss / epoch_symbols : 0.0;
    rec.utts = static_cast<int>(data.size());
    rec.skipped = epoch_skipped;
    if (!std::isfinite(rec.loss))
      throw NumericError(stage_tag + ": non-finite epoch loss");
    if (log != nullptr) log->push_back(rec);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Stages

static uint64_t StageSeed(uint64_t seed, int stage) {
  return SplitMix64(seed * 1315423911ULL + static_cast<uint64_t>(stage));
}

ModelParams TrainStage1(const TrainConfig &cfg, const PhoneInventory &inv,
                        const std::vector<Utterance> &native, TrainLog *log) {
  for (const auto &u : native) {
    for (const auto &p : u.canonical)
      if (!inv.IsCanonical(p))
        throw DataError("stage1: non-canonical symbol '" + p +
                        "' in native transcript of '" + u.id + "'");
    if (u.HasAnnotation() && u.annotated != u.canonical)
      throw DataError("stage1: native utterance '" + u.id +
                      "' carries mispronunciation annotations");
  }
  ModelParams model = InitModel(cfg.model, inv, StageSeed(cfg.seed, 100));
  return TrainOnCorpus(std::move(model), native, cfg, cfg.stage1_epochs,
                       "accent-free", StageSeed(cfg.seed, 1), log);
}

ModelParams InitStage2From(const ModelParams &donor, const TrainConfig &cfg) {
  ModelParams model =
      InitModel(donor.cfg, donor.inv, StageSeed(cfg.seed, 200));
  // Encoder transfer: elementwise copy in visit order.
  std::vector<const Vec *> src;
  VisitEncoder(const_cast<ModelParams &>(donor),
               [&](Vec &v) { src.push_back(&v); });
  size_t i = 0;
  VisitEncoder(model, [&](Vec &v) { v = *src[i++]; });
  return model;
}

ModelParams TrainStage2(const ModelParams &stage1, const TrainConfig &cfg,
                        const std::vector<ManifestEntry> &cp_entries,
                        TrainLog *log) {
  for (const auto &e : cp_entries)
    if (e.HasAnnotation() && e.annotated != e.canonical)
      throw DataError("stage2: CP utterance '" + e.id +
                      "' carries mispronunciation annotations");
  std::vector<ManifestEntry> augmented = AugmentCorpus(
      cp_entries, cfg.shuffle_prob, stage1.inv, StageSeed(cfg.seed, 20));
  std::vector<Utterance> data = LoadUtterances(cfg.corpus_dir, augmented);
  ModelParams model = InitStage2From(stage1, cfg);
  return TrainOnCorpus(std::move(model), data, cfg, cfg.stage2_epochs,
                       "stage2", StageSeed(cfg.seed, 2), log);
}

ModelParams TrainStage3(const ModelParams &stage2, const TrainConfig &cfg,
                        const std::vector<Utterance> &mp, TrainLog *log) {
  for (const auto &u : mp)
    if (!u.HasAnnotation())
      throw DataError("stage3: MP utterance '" + u.id +
                      "' is missing its annotated transcript");
  return TrainOnCorpus(stage2, mp, cfg, cfg.stage3_epochs, "final",
                       StageSeed(cfg.seed, 3), log);
}

// ---------------------------------------------------------------------------
// Pipeline

static void AppendLog(const std::string &path, const TrainLog &log,
                      size_t from) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot write loss log: " + path);
  for (size_t i = from; i < log.size(); ++i)
    out << FormatEpochRecord(log[i]) << "\n";
}

PipelineResult RunPipeline(const TrainConfig &cfg,
                           const std::string &config_text, int start_stage) {
  MDD_REQUIRE(start_stage >= 1 && start_stage <= 3,
              "start_stage must be 1, 2 or 3");
  fs::create_directories(cfg.output_dir);
  PipelineResult res;
  res.stage1_path = (fs::path(cfg.output_dir) / "stage1.mdck").string();
  res.stage2_path = (fs::path(cfg.output_dir) / "stage2.mdck").string();
  res.final_path = (fs::path(cfg.output_dir) / "final.mdck").string();
  res.log_path = (fs::path(cfg.output_dir) / "train.log").string();
  if (start_stage == 1)
    std::ofstream(res.log_path, std::ios::trunc);  // fresh log

  PhoneInventory inv =
      BuildInventory(ReadPhoneFile(cfg.phones_path), cfg.mode);

  ModelParams model;
  if (start_stage <= 1) {
    std::vector<Utterance> native;
    try {
      native = LoadUtterances(cfg.corpus_dir, ReadManifest(cfg.native_manifest));
    } catch (const DataError &e) {
      throw DataError(std::string("stage1: ") + e.what());
    }
    size_t mark = res.log.size();
    model = TrainStage1(cfg, inv, native, &res.log);
    AppendLog(res.log_path, res.log, mark);
    SaveCheckpoint(res.stage1_path, {"accent-free", config_text, model});
  } else {
    Checkpoint prev = LoadCheckpoint(
        start_stage == 2 ? res.stage1_path : res.stage2_path);
    if (!prev.model.inv.SameCanonicalSet(inv))
      throw DataError("resume: checkpoint inventory does not match config");
    model = std::move(prev.model);
  }

  if (start_stage <= 2) {
    std::vector<ManifestEntry> cp;
    try {
      cp = ReadManifest(cfg.cp_manifest);
    } catch (const DataError &e) {
      throw DataError(std::string("stage2: ") + e.what());
    }
    size_t mark = res.log.size();
    model = TrainStage2(model, cfg, cp, &res.log);
    AppendLog(res.log_path, res.log, mark);
    SaveCheckpoint(res.stage2_path, {"stage2", config_text, model});
  }

  {
    std::vector<Utterance> mp;
    try {
      mp = LoadUtterances(cfg.corpus_dir, ReadManifest(cfg.mp_manifest));
    } catch (const DataError &e) {
      throw DataError(std::string("stage3: ") + e.what());
    }
    size_t mark = res.log.size();
    model = TrainStage3(model, cfg, mp, &res.log);
    AppendLog(res.log_path, res.log, mark);
    res.final = {"final", config_text, std::move(model)};
    SaveCheckpoint(res.final_path, res.final);
  }
  return res;
}

}  // namespace mdd

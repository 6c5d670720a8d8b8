// tests/acceptance.cc

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

// Release gate: one pass/fail line per criterion, nonzero exit on any
// failure. Slow end-to-end criteria run real training on the seeded
// synthetic corpus and print their measured values for the record.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "mdd/evaluation.h"
#include "mdd/selftest.h"
#include "mdd/training.h"

using namespace mdd;

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool g_all_ok = true;

void Report(int criterion, bool ok, const std::string &detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  g_all_ok = g_all_ok && ok;
}

std::string Fmt(const char *format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

std::string ReadBytes(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// ---------------------------------------------------------------------------
// Criteria 1-3: numeric oracles

void Criterion1() {
  const auto start = Clock::now();
  const double err = CheckCtcOracle(6, 3, 4, 200, 1);
  const double secs = Seconds(start);
  const bool ok = err < 1e-10 && secs < 10.0;
  Report(1, ok,
         Fmt("ctc forward-backward vs brute-force path sum, shapes up to "
             "S=6 L=3 V=4, 200 draws: max |diff| %.3e (tol 1e-10), %.2fs "
             "(limit 10s)",
             err, secs));
}

void Criterion2() {
  const auto start = Clock::now();
  struct Entry {
    const char *name;
    double err;
  };
  const Entry entries[] = {
      {"linb", CheckLinbGradient(11)},
      {"lstm_step", CheckLstmStepGradient(12)},
      {"blstm_layer", CheckBlstmGradient(13)},
      {"attention_step", CheckAttendGradient(14)},
      {"attention_nll", CheckAttentionNllGradient(15)},
      {"ctc_loss", CheckCtcLossGradient(16)},
      {"hybrid_loss", CheckHybridGradient(17, 0.5)},
  };
  double worst = 0.0;
  std::string worst_name = "-";
  bool ok = true;
  for (const auto &e : entries) {
    if (e.err > worst) {
      worst = e.err;
      worst_name = e.name;
    }
    ok = ok && e.err < kGradTol;
  }
  const double secs = Seconds(start);
  ok = ok && secs < 60.0;
  Report(2, ok,
         Fmt("central finite differences (step 1e-5) over 7 blocks: worst "
             "%s at rel err %.3e (tol 1e-4), %.2fs (limit 60s)",
             worst_name.c_str(), worst, secs));
}

void Criterion3() {
  const double err = CheckMetricArithmetic();
  Report(3, err <= 0.01,
         Fmt("F1 from 5 published precision/recall pairs: max |diff| %.4f "
             "(tol 0.01)",
             err));
}

// ---------------------------------------------------------------------------
// Criterion 4: randomized properties, 1000 cases each

bool PropAntiCardinality(std::string *msg) {
  Rng rng(41);
  for (int it = 0; it < 1000; ++it) {
    const int n = 1 + rng.UniformInt(12);
    std::vector<std::string> phones;
    for (int i = 0; i < n; ++i) phones.push_back("p" + std::to_string(i));
    const PhoneInventory anti = BuildInventory(phones, AntiMode::kPerPhoneAnti);
    const PhoneInventory unk = BuildInventory(phones, AntiMode::kSingleUnk);
    if (anti.NumPhones() != 2 * n ||
        static_cast<int>(anti.Anti().size()) != n || unk.NumPhones() != n + 1 ||
        unk.Anti().size() != 1) {
      *msg = Fmt("cardinality wrong for n=%d", n);
      return false;
    }
  }
  *msg = "per-phone |U| = 2n, single-Unk |U| = n+1";
  return true;
}

bool PropShuffleExclusion(std::string *msg) {
  Rng rng(42);
  for (int it = 0; it < 1000; ++it) {
    const int n = 2 + rng.UniformInt(8);
    std::vector<std::string> phones;
    for (int i = 0; i < n; ++i) phones.push_back("p" + std::to_string(i));
    const PhoneInventory inv = BuildInventory(phones, AntiMode::kPerPhoneAnti);
    std::vector<std::string> transcript(1 + rng.UniformInt(8));
    for (auto &p : transcript) p = phones[rng.UniformInt(n)];
    Rng fork = rng.Fork(it);
    const auto shuffled = ShuffleLabels(transcript, 1.0, inv, &fork);
    for (size_t i = 0; i < transcript.size(); ++i) {
      if (!inv.IsAnti(shuffled[i]) || shuffled[i] == inv.AntiOf(transcript[i])) {
        *msg = Fmt("case %d position %zu: '%s' from '%s'", it, i,
                   shuffled[i].c_str(), transcript[i].c_str());
        return false;
      }
    }
  }
  *msg = "p=1 shuffle always picks an anti-phone other than the position's own";
  return true;
}

bool PropAugmentDoubling(std::string *msg) {
  Rng rng(43);
  const PhoneInventory inv =
      BuildInventory({"aa", "ae", "eh"}, AntiMode::kPerPhoneAnti);
  for (int it = 0; it < 1000; ++it) {
    const int n = 1 + rng.UniformInt(12);
    std::vector<ManifestEntry> cp(n);
    for (int i = 0; i < n; ++i) {
      cp[i].id = "u" + std::to_string(i);
      cp[i].feature_path = "feats/u" + std::to_string(i) + ".mddf";
      cp[i].canonical.resize(1 + rng.UniformInt(5));
      for (auto &p : cp[i].canonical)
        p = inv.Canonical()[rng.UniformInt(3)];
    }
    const auto out = AugmentCorpus(cp, 0.3, inv, rng.NextU64());
    if (out.size() != 2 * cp.size()) {
      *msg = Fmt("case %d: %zu in, %zu out", it, cp.size(), out.size());
      return false;
    }
  }
  *msg = "augmented corpus is exactly twice the CP corpus";
  return true;
}

bool PropAttentionSimplex(std::string *msg) {
  ModelConfig cfg;
  cfg.feat_dim = 4;
  cfg.enc_layers = 1;
  cfg.enc_hidden = 3;
  cfg.subsample_factor = 1;
  cfg.dec_hidden = 3;
  cfg.embed_dim = 3;
  cfg.att_dim = 4;
  cfg.att_filters = 2;
  cfg.att_kernel = 3;
  const PhoneInventory inv = BuildInventory({"a"}, AntiMode::kPerPhoneAnti);
  Rng rng(44);
  for (int it = 0; it < 1000; ++it) {
    const ModelParams m = InitModel(cfg, inv, rng.NextU64(), 0.5);
    const int S = 1 + rng.UniformInt(8);
    Matrix h_enc(S, cfg.EncoderOutDim());
    for (double &x : h_enc.Data()) x = rng.Uniform(-2.0, 2.0);
    Vec h_dec(cfg.dec_hidden);
    for (double &x : h_dec) x = rng.Uniform(-2.0, 2.0);
    Vec prev(S, 0.0);
    double norm = 0.0;
    for (double &x : prev) norm += (x = rng.Uniform(0.0, 1.0));
    for (double &x : prev) x /= norm;
    Vec context, align;
    Attend(m.att, h_dec, prev, h_enc, &context, &align, nullptr);
    double sum = 0.0;
    for (double a : align) {
      if (a < 0.0) {
        *msg = Fmt("case %d: negative attention weight %g", it, a);
        return false;
      }
      sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      *msg = Fmt("case %d: attention weights sum to %.12f", it, sum);
      return false;
    }
  }
  *msg = "attention weights always form a simplex";
  return true;
}

bool PropHybridAffinity(std::string *msg) {
  ModelConfig cfg;
  cfg.feat_dim = 4;
  cfg.enc_layers = 1;
  cfg.enc_hidden = 3;
  cfg.subsample_factor = 2;
  cfg.dec_hidden = 3;
  cfg.embed_dim = 3;
  cfg.att_dim = 4;
  cfg.att_filters = 2;
  cfg.att_kernel = 3;
  const PhoneInventory inv =
      BuildInventory({"a", "b"}, AntiMode::kPerPhoneAnti);
  Rng rng(45);
  for (int it = 0; it < 1000; ++it) {
    const ModelParams m = InitModel(cfg, inv, rng.NextU64());
    const int T = 6 + rng.UniformInt(6);
    Matrix feats(T, cfg.feat_dim);
    for (double &x : feats.Data()) x = rng.Uniform(-1.0, 1.0);
    const std::vector<int> targets = {rng.UniformInt(4), rng.UniformInt(4)};
    const double l0 = HybridLoss(m, feats, targets, 0.0).loss;
    const double l1 = HybridLoss(m, feats, targets, 1.0).loss;
    const double lam = rng.Uniform(0.05, 0.95);
    const double mid = HybridLoss(m, feats, targets, lam).loss;
    if (std::abs(mid - (lam * l1 + (1.0 - lam) * l0)) > 1e-9) {
      *msg = Fmt("case %d: lambda %.4f off by %.3e", it, lam,
                 std::abs(mid - (lam * l1 + (1.0 - lam) * l0)));
      return false;
    }
  }
  *msg = "loss is affine in lambda between the branch endpoints";
  return true;
}

void Criterion4() {
  struct Prop {
    const char *name;
    bool (*fn)(std::string *);
  };
  const Prop props[] = {
      {"anti-set cardinality", PropAntiCardinality},
      {"shuffle exclusion", PropShuffleExclusion},
      {"augment doubling", PropAugmentDoubling},
      {"attention simplex", PropAttentionSimplex},
      {"hybrid affinity", PropHybridAffinity},
  };
  bool ok = true;
  std::string detail = "1000 cases each:";
  for (const auto &p : props) {
    std::string msg;
    const bool pass = p.fn(&msg);
    ok = ok && pass;
    detail += Fmt(" [%s %s: %s]", pass ? "ok" : "FAILED", p.name, msg.c_str());
  }
  Report(4, ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 5: encoder transfer equality

void Criterion5() {
  TrainConfig cfg;
  cfg.seed = 42;
  const PhoneInventory inv = BuildInventory(
      {"aa", "ae", "eh", "ih", "iy", "ow", "uh", "uw"}, AntiMode::kPerPhoneAnti);
  ModelParams donor = InitModel(cfg.model, inv, 7);
  ModelParams fresh = InitStage2From(donor, cfg);

  std::vector<Vec> enc_a, enc_b;
  VisitEncoder(donor, [&enc_a](Vec &v) { enc_a.push_back(v); });
  VisitEncoder(fresh, [&enc_b](Vec &v) { enc_b.push_back(v); });
  const bool encoder_equal = enc_a == enc_b;
  const bool rest_fresh = !(fresh.dec.embed == donor.dec.embed) &&
                          !(fresh.ctc_head.w == donor.ctc_head.w);
  Report(5, encoder_equal && rest_fresh,
         Fmt("stage-2 init: encoder bitwise equal to stage-1 donor (%s), "
             "decoder and CTC head re-initialized (%s)",
             encoder_equal ? "yes" : "NO", rest_fresh ? "yes" : "NO"));
}

// ---------------------------------------------------------------------------
// Criteria 6-8: end-to-end on the seeded synthetic corpus

struct E2EOutcome {
  PipelineResult pipe;
  std::string predictions_tsv;
  EvalReport report;
  std::string report_kv;
  std::vector<OutcomeRecord> records;
  std::vector<ManifestEntry> test_entries;
  PhoneInventory inv;
  double train_secs = 0.0;
};

SynthSpec AcceptanceSpec(AntiMode mode, uint64_t seed) {
  SynthSpec spec;  // 8 canonical phones, 2000/200/200, rates 0.1/0.1
  spec.phones = {"aa", "ae", "eh", "ih", "iy", "ow", "uh", "uw"};
  spec.mode = mode;
  spec.cat_rate = 0.1;
  spec.anti_rate = 0.1;
  spec.seed = seed;
  return spec;
}

TrainConfig AcceptanceTrainConfig(AntiMode mode, uint64_t seed,
                                  const std::string &corpus,
                                  const std::string &out_dir) {
  TrainConfig cfg;
  cfg.mode = mode;
  cfg.corpus_dir = corpus;
  cfg.phones_path = corpus + "/phones.txt";
  cfg.native_manifest = corpus + "/native_train.tsv";
  cfg.cp_manifest = corpus + "/train_cp.tsv";
  cfg.mp_manifest = corpus + "/train_mp.tsv";
  cfg.output_dir = out_dir;
  cfg.stage1_epochs = 4;
  cfg.stage2_epochs = 4;
  cfg.stage3_epochs = 8;
  cfg.seed = seed;
  return cfg;
}

E2EOutcome RunEndToEnd(AntiMode mode, uint64_t seed, const std::string &root) {
  const auto start = Clock::now();
  const std::string corpus = root + "/corpus";
  const std::string run = root + "/run";
  fs::create_directories(root);
  GenerateSyntheticCorpus(AcceptanceSpec(mode, seed), corpus);
  const TrainConfig cfg = AcceptanceTrainConfig(mode, seed, corpus, run);

  E2EOutcome out;
  out.pipe = RunPipeline(cfg, "acceptance\n");
  out.train_secs = Seconds(start);

  out.inv = out.pipe.final.model.inv;
  out.test_entries = ReadManifest(corpus + "/test.tsv");
  const std::vector<Utterance> test_utts =
      LoadUtterances(corpus, out.test_entries);

  HybridConfig hcfg;
  std::map<std::string, std::vector<std::string>> predictions;
  std::ostringstream tsv;
  for (const auto &utt : test_utts) {
    const DecodeResult res =
        JointBeamDecode(out.pipe.final.model, utt.feats, hcfg);
    predictions[utt.id] = res.phones;
    tsv << utt.id << "\t";
    for (size_t i = 0; i < res.phones.size(); ++i)
      tsv << (i ? " " : "") << res.phones[i];
    tsv << "\n";
  }
  out.predictions_tsv = tsv.str();
  out.report =
      EvaluateCorpus(out.test_entries, predictions, out.inv, &out.records);
  out.report_kv = RenderReportKeyValues(out.report);
  return out;
}

// Flags every canonical position: predict each utterance's transcript with
// every phone replaced by its anti-phone.
double AlwaysFlagF1(const std::vector<ManifestEntry> &refs,
                    const PhoneInventory &inv) {
  std::map<std::string, std::vector<std::string>> preds;
  for (const auto &e : refs) {
    std::vector<std::string> p;
    for (const auto &phone : e.canonical) p.push_back(inv.AntiOf(phone));
    preds[e.id] = p;
  }
  return EvaluateCorpus(refs, preds, inv, nullptr).detection.f1;
}

// DAR restricted to non-categorical (anti-phone) ground-truth errors.
double NonCategoricalDar(const std::vector<OutcomeRecord> &records,
                         long *tn_out) {
  long tn = 0, correct = 0;
  for (const auto &r : records) {
    if (r.error_type != ErrorType::kNonCategorical ||
        r.outcome != Outcome::kTN)
      continue;
    ++tn;
    if (r.diagnosis_correct) ++correct;
  }
  if (tn_out != nullptr) *tn_out = tn;
  return tn == 0 ? 0.0 : static_cast<double>(correct) / tn;
}

void Criteria678(const std::string &work_root) {
  // Criterion 6: per-phone anti-phones, seed 42, full pipeline.
  const E2EOutcome anti = RunEndToEnd(AntiMode::kPerPhoneAnti, 42,
                                      work_root + "/anti-42");
  const double baseline = AlwaysFlagF1(anti.test_entries, anti.inv);
  const double f1 = anti.report.detection.f1;
  const double dar = anti.report.dar.dar;
  const bool ok6 = f1 >= baseline + 0.15 && dar > 1.0 / 16.0 &&
                   anti.train_secs < 1800.0;
  Report(6, ok6,
         Fmt("end-to-end seed 42 (8 phones, 2000 train / 200 test, rates "
             "0.1/0.1): F1 %.4f vs always-flag %.4f + 0.15 margin, DAR %.4f "
             "(%ld/%ld) vs 1/16, train %.0fs (limit 1800s); golden: tp=%ld "
             "fp=%ld fn=%ld tn=%ld precision %.4f recall %.4f",
             f1, baseline, dar, anti.report.dar.correct, anti.report.dar.tn,
             anti.train_secs, anti.report.counts.tp, anti.report.counts.fp,
             anti.report.counts.fn, anti.report.counts.tn,
             anti.report.detection.precision, anti.report.detection.recall));

  // Criterion 7: per-phone anti-phones diagnose non-categorical errors at
  // least as well as a single Unk symbol; majority over 5 seeds as backup.
  const E2EOutcome unk = RunEndToEnd(AntiMode::kSingleUnk, 42,
                                     work_root + "/unk-42");
  long anti_tn = 0, unk_tn = 0;
  const double anti_dar = NonCategoricalDar(anti.records, &anti_tn);
  const double unk_dar = NonCategoricalDar(unk.records, &unk_tn);
  if (anti_dar >= unk_dar) {
    Report(7, true,
           Fmt("non-categorical DAR, per-phone %.4f (over %ld TN) >= "
               "single-Unk %.4f (over %ld TN) on seed 42",
               anti_dar, anti_tn, unk_dar, unk_tn));
  } else {
    int wins = 0;
    std::string detail = Fmt("seed 42: per-phone %.4f < single-Unk %.4f;"
                             " fallback seeds:", anti_dar, unk_dar);
    for (uint64_t seed : {43, 44, 45, 46, 47}) {
      const std::string tag = std::to_string(seed);
      const E2EOutcome a =
          RunEndToEnd(AntiMode::kPerPhoneAnti, seed, work_root + "/anti-" + tag);
      const E2EOutcome u =
          RunEndToEnd(AntiMode::kSingleUnk, seed, work_root + "/unk-" + tag);
      const double ad = NonCategoricalDar(a.records, nullptr);
      const double ud = NonCategoricalDar(u.records, nullptr);
      if (ad >= ud) ++wins;
      detail += Fmt(" [%lu: %.4f vs %.4f]", (unsigned long)seed, ad, ud);
    }
    Report(7, wins >= 3, detail + Fmt(" -> %d/5 wins", wins));
  }

  // Criterion 8: bitwise reproducibility of the whole pipeline.
  const E2EOutcome rerun = RunEndToEnd(AntiMode::kPerPhoneAnti, 42,
                                       work_root + "/anti-42-rerun");
  const bool ckpts =
      ReadBytes(anti.pipe.stage1_path) == ReadBytes(rerun.pipe.stage1_path) &&
      ReadBytes(anti.pipe.stage2_path) == ReadBytes(rerun.pipe.stage2_path) &&
      ReadBytes(anti.pipe.final_path) == ReadBytes(rerun.pipe.final_path);
  const bool decodes = anti.predictions_tsv == rerun.predictions_tsv;
  const bool reports = anti.report_kv == rerun.report_kv;
  Report(8, ckpts && decodes && reports,
         Fmt("seed-42 rerun bit-identical: checkpoints %s, decode outputs "
             "%s, eval report %s",
             ckpts ? "yes" : "NO", decodes ? "yes" : "NO",
             reports ? "yes" : "NO"));
}

}  // namespace

int main() {
  const std::string work_root =
      (fs::temp_directory_path() /
       ("mdd-acceptance-" + std::to_string(::getpid())))
          .string();
  fs::remove_all(work_root);
  fs::create_directories(work_root);

  try {
    Criterion1();
    Criterion2();
    Criterion3();
    Criterion4();
    Criterion5();
    Criteria678(work_root);
  } catch (const std::exception &e) {
    std::printf("[FAIL] unexpected exception: %s\n", e.what());
    g_all_ok = false;
  }

  std::error_code ec;
  fs::remove_all(work_root, ec);
  std::printf("%s\n", g_all_ok ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
  return g_all_ok ? 0 : 1;
}

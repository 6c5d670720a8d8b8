// tools/mdd-cli.cc

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

// Batch command-line front end: corpus generation, three-stage training,
// joint beam decoding, hierarchical scoring, and the numeric self-test.
// Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numeric
// failure.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdd/evaluation.h"
#include "mdd/hybrid.h"
#include "mdd/selftest.h"
#include "mdd/training.h"

namespace {

std::string ReadTextFile(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw mdd::DataError("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string DirName(const std::string &path) {
  const size_t slash = path.find_last_of('/');
  if (slash == std::string::npos) return ".";
  if (slash == 0) return "/";
  return path.substr(0, slash);
}

mdd::AntiMode ParseMode(const std::string &mode) {
  if (mode == "anti") return mdd::AntiMode::kPerPhoneAnti;
  if (mode == "unk") return mdd::AntiMode::kSingleUnk;
  throw mdd::UsageError("mode must be 'anti' or 'unk', got '" + mode + "'");
}

int CmdGenCorpus(const std::string &spec_path, const std::string &out_dir) {
  const mdd::KeyValueConfig cfg = mdd::KeyValueConfig::ParseFile(spec_path);
  mdd::SynthSpec spec = mdd::SynthSpec::FromConfig(cfg);
  spec.Validate();
  const mdd::SynthSummary sum = mdd::GenerateSyntheticCorpus(spec, out_dir);
  std::cout << "train_cp = " << sum.train_cp << "\n"
            << "train_mp = " << sum.train_mp << "\n"
            << "dev_cp = " << sum.dev_cp << "\n"
            << "dev_mp = " << sum.dev_mp << "\n"
            << "test = " << sum.test << "\n"
            << "native_train = " << sum.native_train << "\n"
            << "total_positions = " << sum.total_positions << "\n"
            << "cat_positions = " << sum.cat_positions << "\n"
            << "anti_positions = " << sum.anti_positions << "\n";
  return 0;
}

int CmdTrain(const std::string &config_path, int start_stage) {
  const std::string text = ReadTextFile(config_path);
  const mdd::KeyValueConfig kv =
      mdd::KeyValueConfig::ParseString(text, config_path);
  mdd::TrainConfig cfg = mdd::TrainConfig::FromConfig(kv);
  cfg.Validate();
  const mdd::PipelineResult res = mdd::RunPipeline(cfg, text, start_stage);
  for (const mdd::EpochRecord &r : res.log)
    std::cerr << mdd::FormatEpochRecord(r) << "\n";
  std::cout << "stage1 = " << res.stage1_path << "\n"
            << "stage2 = " << res.stage2_path << "\n"
            << "final = " << res.final_path << "\n"
            << "log = " << res.log_path << "\n";
  return 0;
}

int CmdDecode(const std::string &ckpt_path, const std::string &manifest_path,
              const std::string &out_path, double lambda, int beam,
              bool ctc_greedy, std::string corpus_dir) {
  const mdd::Checkpoint ckpt = mdd::LoadCheckpoint(ckpt_path);
  const mdd::PhoneInventory &inv = ckpt.model.inv;
  const std::vector<mdd::ManifestEntry> entries =
      mdd::ReadManifest(manifest_path);
  for (const auto &e : entries) {
    for (const auto &sym : e.canonical)
      if (!inv.Contains(sym))
        throw mdd::DataError("utterance " + e.id + ": phone '" + sym +
                             "' is not in the checkpoint inventory");
  }
  if (corpus_dir.empty()) corpus_dir = DirName(manifest_path);
  const std::vector<mdd::Utterance> utts =
      mdd::LoadUtterances(corpus_dir, entries);

  mdd::HybridConfig hcfg;
  hcfg.lambda = lambda;
  hcfg.beam = beam;
  hcfg.Validate();

  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw mdd::DataError("cannot open '" + out_path + "' for writing");
  for (const auto &utt : utts) {
    const mdd::DecodeResult res =
        ctc_greedy ? mdd::CtcGreedyDecodeUtterance(ckpt.model, utt.feats)
                   : mdd::JointBeamDecode(ckpt.model, utt.feats, hcfg);
    os << utt.id << "\t";
    for (size_t i = 0; i < res.phones.size(); ++i)
      os << (i ? " " : "") << res.phones[i];
    os << "\n";
  }
  if (!os) throw mdd::DataError("failed writing '" + out_path + "'");
  return 0;
}

std::map<std::string, std::vector<std::string>> ReadPredictions(
    const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw mdd::DataError("cannot open '" + path + "'");
  std::map<std::string, std::vector<std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw mdd::DataError(path + ":" + std::to_string(lineno) +
                           ": expected utt_id<TAB>transcript");
    const std::string id = line.substr(0, tab);
    if (out.count(id))
      throw mdd::DataError(path + ":" + std::to_string(lineno) +
                           ": duplicate utterance '" + id + "'");
    std::istringstream ts(line.substr(tab + 1));
    std::vector<std::string> phones;
    std::string tok;
    while (ts >> tok) phones.push_back(tok);
    out[id] = phones;
  }
  return out;
}

int CmdEval(const std::string &manifest_path, const std::string &pred_path,
            const std::string &phones_path, const std::string &mode,
            const std::string &dump_path) {
  const mdd::PhoneInventory inv =
      mdd::BuildInventory(mdd::ReadPhoneFile(phones_path), ParseMode(mode));
  const std::vector<mdd::ManifestEntry> entries =
      mdd::ReadManifest(manifest_path);
  const auto predictions = ReadPredictions(pred_path);
  std::vector<mdd::OutcomeRecord> records;
  const mdd::EvalReport report =
      mdd::EvaluateCorpus(entries, predictions, inv, &records);
  std::cout << mdd::RenderReportKeyValues(report) << "\n"
            << mdd::RenderReportTable(report);
  if (!dump_path.empty()) mdd::DumpRecordsTsv(dump_path, records);
  return 0;
}

int CmdGradCheck(uint64_t seed) {
  struct Entry {
    const char *name;
    double err;
  };
  const Entry entries[] = {
      {"linb", mdd::CheckLinbGradient(seed)},
      {"lstm_step", mdd::CheckLstmStepGradient(seed + 1)},
      {"blstm_layer", mdd::CheckBlstmGradient(seed + 2)},
      {"attention_step", mdd::CheckAttendGradient(seed + 3)},
      {"attention_nll", mdd::CheckAttentionNllGradient(seed + 4)},
      {"ctc_loss", mdd::CheckCtcLossGradient(seed + 5)},
      {"hybrid_loss", mdd::CheckHybridGradient(seed + 6, 0.5)},
  };
  bool ok = true;
  for (const auto &e : entries) {
    const bool pass = e.err <= mdd::kGradTol;
    std::cout << (pass ? "PASS" : "FAIL") << " " << e.name << " (max rel err "
              << e.err << ", tol " << mdd::kGradTol << ")\n";
    ok = ok && pass;
  }
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Mispronunciation detection and diagnosis engine"};
  app.require_subcommand(1);

  std::string spec_path, out_dir;
  auto *gen = app.add_subcommand("gen-corpus",
                                 "Generate a seeded synthetic corpus");
  gen->add_option("spec", spec_path, "Generator spec file (key = value)")
      ->required();
  gen->add_option("out_dir", out_dir, "Output corpus directory")->required();

  std::string train_config;
  int start_stage = 1;
  auto *train = app.add_subcommand("train", "Run the three-stage pipeline");
  train->add_option("config", train_config, "Training config file")->required();
  train->add_option("--start-stage", start_stage,
                    "Resume from this stage (1, 2 or 3)")
      ->default_val(1);

  std::string ckpt_path, manifest_path, decode_out, corpus_dir;
  double lambda = 0.5;
  int beam = 4;
  bool ctc_greedy = false;
  auto *decode = app.add_subcommand("decode", "Joint beam decoding");
  decode->add_option("checkpoint", ckpt_path, "Model checkpoint")->required();
  decode->add_option("manifest", manifest_path, "Utterance manifest")
      ->required();
  decode->add_option("output", decode_out, "Output predictions TSV")
      ->required();
  decode->add_option("--lambda", lambda, "CTC weight in the joint score")
      ->default_val(0.5);
  decode->add_option("--beam", beam, "Beam width")->default_val(4);
  decode->add_flag("--ctc-greedy", ctc_greedy,
                   "CTC-only greedy decoding (ablation)");
  decode->add_option("--corpus-dir", corpus_dir,
                     "Corpus root for feature paths (default: manifest dir)");

  std::string eval_manifest, pred_path, phones_path, mode = "anti", dump_path;
  auto *eval = app.add_subcommand("eval", "Score predictions hierarchically");
  eval->add_option("manifest", eval_manifest, "Annotated manifest")->required();
  eval->add_option("predictions", pred_path, "Predictions TSV")->required();
  eval->add_option("--phones", phones_path, "Canonical phone-set file")
      ->required();
  eval->add_option("--mode", mode, "Anti-phone mode: anti or unk")
      ->default_val("anti");
  eval->add_option("--dump-records", dump_path,
                   "Write per-position outcome records to this TSV");

  bool corrupt = false;
  auto *selftest = app.add_subcommand("selftest", "Run the numeric self-test");
  selftest->add_flag("--corrupt-gradient", corrupt,
                     "Corrupt one analytic gradient (negative control)");

  uint64_t gc_seed = 1;
  auto *gradcheck =
      app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  gradcheck->add_option("--seed", gc_seed, "Base seed")->default_val(1);

  try {
    app.parse(argc, argv);
    if (*gen) return CmdGenCorpus(spec_path, out_dir);
    if (*train) return CmdTrain(train_config, start_stage);
    if (*decode)
      return CmdDecode(ckpt_path, manifest_path, decode_out, lambda, beam,
                       ctc_greedy, corpus_dir);
    if (*eval)
      return CmdEval(eval_manifest, pred_path, phones_path, mode, dump_path);
    if (*selftest) return mdd::RunSelftest(std::cout, corrupt);
    if (*gradcheck) return CmdGradCheck(gc_seed);
    return 1;
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const mdd::UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const mdd::DataError &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const mdd::NumericError &e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }
}

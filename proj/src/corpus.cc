// src/corpus.cc

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

#include "mdd/corpus.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mdd {

namespace fs = std::filesystem;

static constexpr char kFeatMagic[4] = {'M', 'D', 'D', 'F'};
static constexpr uint32_t kFeatVersion = 1;

static void WriteU32(std::ostream &out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<char *>(b), 4);
}

static uint32_t ReadU32(std::istream &in, const std::string &path,
                        const char *what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char *>(b), 4))
    throw DataError(path + ": truncated while reading " + std::string(what));
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

void WriteFeatures(const std::string &path, const Matrix &feats) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write feature file: " + path);
  out.write(kFeatMagic, 4);
  WriteU32(out, kFeatVersion);
  WriteU32(out, static_cast<uint32_t>(feats.NumRows()));
  WriteU32(out, static_cast<uint32_t>(feats.NumCols()));
  for (double x : feats.Data()) {
    float f = static_cast<float>(x);
    static_assert(sizeof(float) == 4);
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    WriteU32(out, bits);
  }
  if (!out) throw DataError("write failed: " + path);
}

Matrix ReadFeatures(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature file: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kFeatMagic, 4) != 0)
    throw DataError(path + ": bad magic (not an MDDF feature file)");
  uint32_t version = ReadU32(in, path, "version");
  if (version != kFeatVersion)
    throw DataError(path + ": unsupported version " + std::to_string(version));
  uint32_t rows = ReadU32(in, path, "row count");
  uint32_t cols = ReadU32(in, path, "col count");
  if (rows == 0 || cols == 0)
    throw DataError(path + ": empty shape in header");
  Matrix m(static_cast<int>(rows), static_cast<int>(cols));
  for (auto &x : m.Data()) {
    uint32_t bits = ReadU32(in, path, "payload");
    float f;
    std::memcpy(&f, &bits, 4);
    x = static_cast<double>(f);
  }
  char extra;
  if (in.read(&extra, 1))
    throw DataError(path + ": trailing bytes after payload");
  return m;
}

static std::vector<std::string> SplitPhones(const std::string &field) {
  std::istringstream in(field);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

static std::string JoinPhones(const std::vector<std::string> &phones) {
  std::string out;
  for (size_t i = 0; i < phones.size(); ++i) {
    if (i > 0) out += ' ';
    out += phones[i];
  }
  return out;
}

std::vector<ManifestEntry> ReadManifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  std::vector<ManifestEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != 4)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 4 " +
                      "tab-separated fields, got " +
                      std::to_string(fields.size()));
    ManifestEntry e;
    e.id = fields[0];
    e.feature_path = fields[1];
    e.canonical = SplitPhones(fields[2]);
    e.annotated = SplitPhones(fields[3]);
    if (e.id.empty())
      throw DataError(path + ":" + std::to_string(lineno) + ": empty utt id");
    if (e.feature_path.empty())
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": missing feature path");
    if (e.canonical.empty())
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": empty canonical transcript");
    for (const auto &p : e.canonical)
      if (p[0] == '#')
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": anti-phone '" + p + "' in canonical transcript");
    if (!e.annotated.empty() && e.annotated.size() != e.canonical.size())
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": annotated/canonical length mismatch");
    entries.push_back(std::move(e));
  }
  return entries;
}

void WriteManifest(const std::string &path,
                   const std::vector<ManifestEntry> &entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest: " + path);
  for (const auto &e : entries)
    out << e.id << '\t' << e.feature_path << '\t' << JoinPhones(e.canonical)
        << '\t' << JoinPhones(e.annotated) << '\n';
}

std::vector<Utterance> LoadUtterances(
    const std::string &root_dir, const std::vector<ManifestEntry> &entries) {
  std::vector<Utterance> utts;
  utts.reserve(entries.size());
  for (const auto &e : entries) {
    Utterance u;
    u.id = e.id;
    u.feats = ReadFeatures((fs::path(root_dir) / e.feature_path).string());
    u.canonical = e.canonical;
    u.annotated = e.annotated;
    if (u.feats.NumRows() < static_cast<int>(u.canonical.size()))
      throw DataError(e.id + ": fewer frames than transcript phones");
    utts.push_back(std::move(u));
  }
  return utts;
}

std::vector<std::string> ShuffleLabels(
    const std::vector<std::string> &transcript, double p,
    const PhoneInventory &inv, Rng *rng) {
  MDD_REQUIRE(p >= 0.0 && p <= 1.0, "shuffle probability must be in [0, 1]");
  const int C = inv.NumCanonical();
  std::vector<std::string> out;
  out.reserve(transcript.size());
  for (const auto &phone : transcript) {
    if (!inv.IsCanonical(phone))
      throw DataError("shuffle_labels: '" + phone +
                      "' is not a canonical phone");
    // Draw first so the stream consumption is position-independent.
    double u = rng->Uniform();
    if (u < p) {
      if (inv.Mode() == AntiMode::kSingleUnk) {
        out.push_back(PhoneInventory::kUnk);
      } else {
        if (C < 2)
          throw DataError("shuffle_labels: need at least two canonical "
                          "phones to draw an excluded anti-phone");
        int own = inv.IdOf(phone);
        int r = rng->UniformInt(C - 1);
        if (r >= own) ++r;  // skip the phone's own anti-phone
        out.push_back(inv.Anti()[r]);
      }
    } else {
      out.push_back(phone);
    }
  }
  return out;
}

std::vector<ManifestEntry> AugmentCorpus(const std::vector<ManifestEntry> &cp,
                                         double p, const PhoneInventory &inv,
                                         uint64_t seed) {
  for (const auto &e : cp)
    if (e.HasAnnotation() && e.annotated != e.canonical)
      throw DataError("augment_corpus: utterance '" + e.id +
                      "' carries mispronunciation annotations");
  std::vector<ManifestEntry> out;
  out.reserve(2 * cp.size());
  out.insert(out.end(), cp.begin(), cp.end());
  Rng master(seed);
  for (size_t i = 0; i < cp.size(); ++i) {
    Rng rng = master.Fork(i);
    ManifestEntry copy = cp[i];
    copy.id += "-aug";
    copy.annotated = ShuffleLabels(cp[i].canonical, p, inv, &rng);
    out.push_back(std::move(copy));
  }
  return out;
}

SynthSpec SynthSpec::FromConfig(const KeyValueConfig &cfg) {
  SynthSpec s;
  if (cfg.Has("phones")) s.phones = cfg.GetTokens("phones");
  if (s.phones.empty())
    s.phones = {"aa", "ae", "eh", "ih", "iy", "ow", "uh", "uw"};
  std::string mode = cfg.GetString("mode", "anti");
  if (mode == "anti") s.mode = AntiMode::kPerPhoneAnti;
  else if (mode == "unk") s.mode = AntiMode::kSingleUnk;
  else throw UsageError("spec key 'mode' must be 'anti' or 'unk'");
  s.train_utts = cfg.GetInt("train_utterances", s.train_utts);
  s.dev_utts = cfg.GetInt("dev_utterances", s.dev_utts);
  s.test_utts = cfg.GetInt("test_utterances", s.test_utts);
  s.native_utts = cfg.GetInt("native_utterances", s.native_utts);
  s.min_phones = cfg.GetInt("min_phones", s.min_phones);
  s.max_phones = cfg.GetInt("max_phones", s.max_phones);
  s.min_frames = cfg.GetInt("min_frames", s.min_frames);
  s.max_frames = cfg.GetInt("max_frames", s.max_frames);
  s.feat_dim = cfg.GetInt("feat_dim", s.feat_dim);
  s.cat_rate = cfg.GetDouble("cat_rate", s.cat_rate);
  s.anti_rate = cfg.GetDouble("anti_rate", s.anti_rate);
  s.blend_min = cfg.GetDouble("blend_min", s.blend_min);
  s.blend_max = cfg.GetDouble("blend_max", s.blend_max);
  s.noise_scale = cfg.GetDouble("noise_scale", s.noise_scale);
  s.num_l1_prototypes = cfg.GetInt("l1_prototypes", s.num_l1_prototypes);
  s.seed = cfg.GetU64("seed", s.seed);
  s.Validate();
  return s;
}

void SynthSpec::Validate() const {
  MDD_REQUIRE(!phones.empty(), "spec: empty phone set");
  MDD_REQUIRE(train_utts >= 0 && dev_utts >= 0 && test_utts >= 0 &&
                  native_utts >= 0,
              "spec: utterance counts must be >= 0");
  MDD_REQUIRE(min_phones >= 1 && max_phones >= min_phones,
              "spec: phones-per-utterance range is empty (min_phones/"
              "max_phones)");
  MDD_REQUIRE(min_frames >= 1 && max_frames >= min_frames,
              "spec: frames-per-phone range is empty (min_frames/max_frames)");
  MDD_REQUIRE(feat_dim >= 1, "spec: feat_dim must be >= 1");
  MDD_REQUIRE(cat_rate >= 0.0 && cat_rate <= 1.0,
              "spec: cat_rate must be in [0, 1]");
  MDD_REQUIRE(anti_rate >= 0.0 && anti_rate <= 1.0,
              "spec: anti_rate must be in [0, 1]");
  MDD_REQUIRE(cat_rate + anti_rate <= 1.0,
              "spec: cat_rate + anti_rate must be <= 1");
  MDD_REQUIRE(blend_min >= 0.0 && blend_max <= 1.0 && blend_min <= blend_max,
              "spec: blend range must be a non-empty subrange of [0, 1]");
  MDD_REQUIRE(noise_scale >= 0.0, "spec: noise_scale must be >= 0");
  MDD_REQUIRE(num_l1_prototypes >= 1, "spec: l1_prototypes must be >= 1");
  if (cat_rate > 0.0 && phones.size() < 2)
    throw DataError("spec: categorical substitutions need >= 2 phones");
}

namespace {

struct GenResult {
  ManifestEntry entry;
  int errors = 0;
  int cat = 0, anti = 0;
};

GenResult GenerateUtterance(const SynthSpec &spec, const PhoneInventory &inv,
                            const std::vector<Vec> &protos,
                            const std::vector<Vec> &l1_protos,
                            const std::string &id, bool error_free, Rng rng,
                            const std::string &out_dir) {
  const int C = static_cast<int>(spec.phones.size());
  const int L = spec.min_phones + rng.UniformInt(spec.max_phones -
                                                 spec.min_phones + 1);
  GenResult res;
  res.entry.id = id;
  res.entry.feature_path = "feats/" + id + ".mddf";

  std::vector<Vec> frames;
  for (int pos = 0; pos < L; ++pos) {
    int phone = rng.UniformInt(C);
    res.entry.canonical.push_back(spec.phones[phone]);

    double outcome = error_free ? 1.0 : rng.Uniform();
    Vec mean;
    std::string annotated;
    if (outcome < spec.cat_rate) {
      // Categorical: realized as a different phone, annotated as it.
      int other = rng.UniformInt(C - 1);
      if (other >= phone) ++other;
      mean = protos[other];
      annotated = spec.phones[other];
      ++res.cat;
      ++res.errors;
    } else if (outcome < spec.cat_rate + spec.anti_rate) {
      // Non-categorical: a blend of the phone and an off-inventory "L1"
      // prototype, annotated with the anti-phone. The L1 prototype is a
      // fixed function of the phone: L2 distortions are systematic, each
      // canonical phone drifting toward a particular L1 sound.
      double alpha = rng.Uniform(spec.blend_min, spec.blend_max);
      const Vec &l1 = l1_protos[phone % l1_protos.size()];
      mean.resize(spec.feat_dim);
      for (int d = 0; d < spec.feat_dim; ++d)
        mean[d] = alpha * protos[phone][d] + (1.0 - alpha) * l1[d];
      annotated = inv.AntiOf(spec.phones[phone]);
      ++res.anti;
      ++res.errors;
    } else {
      mean = protos[phone];
      annotated = spec.phones[phone];
    }
    res.entry.annotated.push_back(annotated);

    int n_frames = spec.min_frames + rng.UniformInt(spec.max_frames -
                                                    spec.min_frames + 1);
    for (int f = 0; f < n_frames; ++f) {
      Vec frame(spec.feat_dim);
      for (int d = 0; d < spec.feat_dim; ++d)
        frame[d] = mean[d] + spec.noise_scale * rng.Gaussian();
      frames.push_back(std::move(frame));
    }
  }

  Matrix feats(static_cast<int>(frames.size()), spec.feat_dim);
  for (size_t t = 0; t < frames.size(); ++t)
    feats.SetRow(static_cast<int>(t), frames[t]);
  WriteFeatures((fs::path(out_dir) / res.entry.feature_path).string(), feats);
  return res;
}

}  // namespace

SynthSummary GenerateSyntheticCorpus(const SynthSpec &spec,
                                     const std::string &out_dir) {
  spec.Validate();
  const PhoneInventory inv = BuildInventory(spec.phones, spec.mode);

  fs::create_directories(fs::path(out_dir) / "feats");
  WritePhoneFile((fs::path(out_dir) / "phones.txt").string(), spec.phones);

  Rng master(spec.seed);
  const int C = static_cast<int>(spec.phones.size());
  std::vector<Vec> protos(C), l1_protos(spec.num_l1_prototypes);
  for (int i = 0; i < C; ++i) {
    protos[i].resize(spec.feat_dim);
    for (auto &x : protos[i]) x = master.Gaussian();
  }
  for (auto &l1 : l1_protos) {
    l1.resize(spec.feat_dim);
    for (auto &x : l1) x = master.Gaussian();
  }

  SynthSummary sum;
  std::vector<ManifestEntry> all, train_cp, train_mp, dev_cp, dev_mp, test,
      native;
  uint64_t stream = 0;
  auto next_id = [](const char *prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%06d", prefix, i);
    return std::string(buf);
  };

  for (int i = 0; i < spec.train_utts; ++i) {
    GenResult r = GenerateUtterance(spec, inv, protos, l1_protos,
                                    next_id("u", i), false,
                                    master.Fork(stream++), out_dir);
    sum.total_positions += static_cast<long>(r.entry.canonical.size());
    sum.cat_positions += r.cat;
    sum.anti_positions += r.anti;
    (r.errors == 0 ? train_cp : train_mp).push_back(r.entry);
    all.push_back(std::move(r.entry));
  }
  for (int i = 0; i < spec.dev_utts; ++i) {
    GenResult r = GenerateUtterance(spec, inv, protos, l1_protos,
                                    next_id("d", i), false,
                                    master.Fork(stream++), out_dir);
    (r.errors == 0 ? dev_cp : dev_mp).push_back(r.entry);
    all.push_back(std::move(r.entry));
  }
  for (int i = 0; i < spec.test_utts; ++i) {
    GenResult r = GenerateUtterance(spec, inv, protos, l1_protos,
                                    next_id("t", i), false,
                                    master.Fork(stream++), out_dir);
    test.push_back(r.entry);
    all.push_back(std::move(r.entry));
  }
  for (int i = 0; i < spec.native_utts; ++i) {
    GenResult r = GenerateUtterance(spec, inv, protos, l1_protos,
                                    next_id("n", i), true,
                                    master.Fork(stream++), out_dir);
    r.entry.annotated.clear();  // native data carries no annotation
    native.push_back(r.entry);
    all.push_back(std::move(r.entry));
  }

  sum.train_cp = static_cast<int>(train_cp.size());
  sum.train_mp = static_cast<int>(train_mp.size());
  sum.dev_cp = static_cast<int>(dev_cp.size());
  sum.dev_mp = static_cast<int>(dev_mp.size());
  sum.test = static_cast<int>(test.size());
  sum.native_train = static_cast<int>(native.size());

  auto w = [&](const char *name, const std::vector<ManifestEntry> &e) {
    WriteManifest((fs::path(out_dir) / name).string(), e);
  };
  w("manifest.tsv", all);
  w("train_cp.tsv", train_cp);
  w("train_mp.tsv", train_mp);
  w("dev_cp.tsv", dev_cp);
  w("dev_mp.tsv", dev_mp);
  w("test.tsv", test);
  w("native_train.tsv", native);
  return sum;
}

}  // namespace mdd

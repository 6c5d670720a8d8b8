// include/mdd/phone-set.h

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

#ifndef MDD_PHONE_SET_H_
#define MDD_PHONE_SET_H_

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mdd/common.h"

namespace mdd {

enum class AntiMode {
  kPerPhoneAnti,  // one "#phone" anti-phone per canonical phone
  kSingleUnk,     // a single "Unk" symbol covers all distortions
};

// The augmented phone vocabulary: canonical phones, their derived
// anti-phones, and the special symbols used by the two model branches.
// Immutable after construction; ids are assigned canonical first (input
// order), then anti-phones in the same order, then blank/sos/eos, so that
// checkpoints and corpora are stable across runs.
class PhoneInventory {
 public:
  static constexpr const char *kBlank = "<blk>";
  static constexpr const char *kSos = "<sos>";
  static constexpr const char *kEos = "<eos>";
  static constexpr const char *kUnk = "Unk";

  PhoneInventory() = default;

  AntiMode Mode() const { return mode_; }
  const std::vector<std::string> &Canonical() const { return canonical_; }
  const std::vector<std::string> &Anti() const { return anti_; }

  // |U| = |canonical| + |anti|; excludes the specials.
  int NumPhones() const {
    return static_cast<int>(canonical_.size() + anti_.size());
  }
  int NumCanonical() const { return static_cast<int>(canonical_.size()); }
  // Total symbol range including blank/sos/eos.
  int NumSymbols() const { return NumPhones() + 3; }

  int BlankId() const { return NumPhones(); }
  int SosId() const { return NumPhones() + 1; }
  int EosId() const { return NumPhones() + 2; }

  int IdOf(const std::string &symbol) const;
  const std::string &SymbolOf(int id) const;
  bool Contains(const std::string &symbol) const {
    return id_of_.count(symbol) > 0;
  }

  bool IsCanonical(const std::string &symbol) const;
  bool IsCanonicalId(int id) const { return id >= 0 && id < NumCanonical(); }
  bool IsAnti(const std::string &symbol) const;
  bool IsAntiId(int id) const {
    return id >= NumCanonical() && id < NumPhones();
  }

  // "#phone" in per-phone mode, "Unk" in single-Unk mode. Rejects
  // non-canonical input.
  std::string AntiOf(const std::string &phone) const;
  int AntiIdOf(int canonical_id) const;

  // Canonical phone underlying an anti-phone; identity on canonical phones;
  // nullopt for "Unk" (it carries no base phone).
  std::optional<std::string> BaseOf(const std::string &symbol) const;

  std::vector<int> Encode(const std::vector<std::string> &symbols) const;
  std::vector<std::string> Decode(const std::vector<int> &ids) const;

  bool SameCanonicalSet(const PhoneInventory &other) const {
    return canonical_ == other.canonical_ && mode_ == other.mode_;
  }

  friend PhoneInventory BuildInventory(const std::vector<std::string> &,
                                       AntiMode);

 private:
  AntiMode mode_ = AntiMode::kPerPhoneAnti;
  std::vector<std::string> canonical_;
  std::vector<std::string> anti_;
  std::vector<std::string> symbols_;  // full id -> symbol table
  std::unordered_map<std::string, int> id_of_;
};

// Validates and builds the inventory. Rejects empty or duplicated phone
// lists, symbols starting with '#', and symbols clashing with the specials.
PhoneInventory BuildInventory(const std::vector<std::string> &canonical,
                              AntiMode mode);

// Phone-set file: one canonical symbol per line, UTF-8, ';' comments.
// Anti-phones are never listed; they are derived.
std::vector<std::string> ReadPhoneFile(const std::string &path);
void WritePhoneFile(const std::string &path,
                    const std::vector<std::string> &canonical);

}  // namespace mdd

#endif  // MDD_PHONE_SET_H_

// src/phone-set.cc

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

#include "mdd/phone-set.h"

#include <fstream>
#include <set>

namespace mdd {

int PhoneInventory::IdOf(const std::string &symbol) const {
  auto it = id_of_.find(symbol);
  if (it == id_of_.end())
    throw DataError("unknown symbol '" + symbol + "'");
  return it->second;
}

const std::string &PhoneInventory::SymbolOf(int id) const {
  if (id < 0 || id >= static_cast<int>(symbols_.size()))
    throw DataError("symbol id " + std::to_string(id) + " out of range");
  return symbols_[id];
}

bool PhoneInventory::IsCanonical(const std::string &symbol) const {
  auto it = id_of_.find(symbol);
  return it != id_of_.end() && IsCanonicalId(it->second);
}

bool PhoneInventory::IsAnti(const std::string &symbol) const {
  auto it = id_of_.find(symbol);
  return it != id_of_.end() && IsAntiId(it->second);
}

std::string PhoneInventory::AntiOf(const std::string &phone) const {
  if (!IsCanonical(phone))
    throw DataError("anti_of: '" + phone + "' is not a canonical phone");
  if (mode_ == AntiMode::kSingleUnk) return kUnk;
  return anti_[IdOf(phone)];
}

int PhoneInventory::AntiIdOf(int canonical_id) const {
  if (!IsCanonicalId(canonical_id))
    throw DataError("anti_id_of: id " + std::to_string(canonical_id) +
                    " is not canonical");
  if (mode_ == AntiMode::kSingleUnk) return NumCanonical();
  return NumCanonical() + canonical_id;
}

std::optional<std::string> PhoneInventory::BaseOf(
    const std::string &symbol) const {
  int id = IdOf(symbol);
  if (IsCanonicalId(id)) return symbol;
  if (IsAntiId(id)) {
    if (mode_ == AntiMode::kSingleUnk) return std::nullopt;
    return canonical_[id - NumCanonical()];
  }
  throw DataError("base_of: '" + symbol + "' is a special symbol");
}

std::vector<int> PhoneInventory::Encode(
    const std::vector<std::string> &symbols) const {
  std::vector<int> ids;
  ids.reserve(symbols.size());
  for (const auto &s : symbols) ids.push_back(IdOf(s));
  return ids;
}

std::vector<std::string> PhoneInventory::Decode(
    const std::vector<int> &ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(SymbolOf(id));
  return out;
}

PhoneInventory BuildInventory(const std::vector<std::string> &canonical,
                              AntiMode mode) {
  if (canonical.empty())
    throw DataError("build_inventory: empty canonical phone set");
  std::set<std::string> seen;
  for (const auto &p : canonical) {
    if (p.empty()) throw DataError("build_inventory: empty phone symbol");
    if (p[0] == '#')
      throw DataError("build_inventory: phone '" + p +
                      "' starts with reserved marker '#'");
    for (char c : p)
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
        throw DataError("build_inventory: phone '" + p +
                        "' contains whitespace");
    if (p == PhoneInventory::kBlank || p == PhoneInventory::kSos ||
        p == PhoneInventory::kEos ||
        (mode == AntiMode::kSingleUnk && p == PhoneInventory::kUnk))
      throw DataError("build_inventory: phone '" + p +
                      "' clashes with a reserved symbol");
    if (!seen.insert(p).second)
      throw DataError("build_inventory: duplicate phone '" + p + "'");
  }

  PhoneInventory inv;
  inv.mode_ = mode;
  inv.canonical_ = canonical;
  if (mode == AntiMode::kPerPhoneAnti) {
    inv.anti_.reserve(canonical.size());
    for (const auto &p : canonical) inv.anti_.push_back("#" + p);
  } else {
    inv.anti_.push_back(PhoneInventory::kUnk);
  }

  inv.symbols_ = inv.canonical_;
  inv.symbols_.insert(inv.symbols_.end(), inv.anti_.begin(), inv.anti_.end());
  inv.symbols_.push_back(PhoneInventory::kBlank);
  inv.symbols_.push_back(PhoneInventory::kSos);
  inv.symbols_.push_back(PhoneInventory::kEos);
  for (int i = 0; i < static_cast<int>(inv.symbols_.size()); ++i)
    inv.id_of_[inv.symbols_[i]] = i;
  return inv;
}

std::vector<std::string> ReadPhoneFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open phone file: " + path);
  std::vector<std::string> phones;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto semi = line.find(';');
    if (semi != std::string::npos) line = line.substr(0, semi);
    // trim
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    std::string tok = line.substr(b, e - b + 1);
    if (tok.find_first_of(" \t") != std::string::npos)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": multiple tokens on one line");
    phones.push_back(tok);
  }
  return phones;
}

void WritePhoneFile(const std::string &path,
                    const std::vector<std::string> &canonical) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write phone file: " + path);
  out << "; canonical phone set (anti-phones are derived, never listed)\n";
  for (const auto &p : canonical) out << p << "\n";
}

}  // namespace mdd

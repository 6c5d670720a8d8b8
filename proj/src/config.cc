// src/config.cc

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

#include "mdd/config.h"

#include <fstream>
#include <sstream>

namespace mdd {

static std::string Trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

KeyValueConfig KeyValueConfig::ParseFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseString(ss.str(), path);
}

KeyValueConfig KeyValueConfig::ParseString(const std::string &text,
                                           const std::string &origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError(origin + ":" + std::to_string(lineno) +
                      ": expected 'key = value'");
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    if (key.empty())
      throw DataError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

std::string KeyValueConfig::GetString(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw UsageError("missing required config key '" + key + "' (" + origin_ +
                     ")");
  return it->second;
}

std::string KeyValueConfig::GetString(const std::string &key,
                                      const std::string &dflt) const {
  auto it = values_.find(key);
  return it == values_.end() ? dflt : it->second;
}

double KeyValueConfig::GetDouble(const std::string &key) const {
  const std::string s = GetString(key);
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    throw UsageError("config key '" + key + "': '" + s + "' is not a number");
  }
}

double KeyValueConfig::GetDouble(const std::string &key, double dflt) const {
  return Has(key) ? GetDouble(key) : dflt;
}

int KeyValueConfig::GetInt(const std::string &key) const {
  const std::string s = GetString(key);
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    throw UsageError("config key '" + key + "': '" + s +
                     "' is not an integer");
  }
}

int KeyValueConfig::GetInt(const std::string &key, int dflt) const {
  return Has(key) ? GetInt(key) : dflt;
}

uint64_t KeyValueConfig::GetU64(const std::string &key, uint64_t dflt) const {
  if (!Has(key)) return dflt;
  const std::string s = GetString(key);
  try {
    size_t pos = 0;
    uint64_t v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    throw UsageError("config key '" + key + "': '" + s +
                     "' is not an unsigned integer");
  }
}

std::vector<std::string> KeyValueConfig::GetTokens(
    const std::string &key) const {
  std::istringstream in(GetString(key));
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

}  // namespace mdd

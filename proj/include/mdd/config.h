// include/mdd/config.h

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

#ifndef MDD_CONFIG_H_
#define MDD_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mdd/common.h"

namespace mdd {

// Flat "key = value" text config, UTF-8, '#' comments.
class KeyValueConfig {
 public:
  static KeyValueConfig ParseFile(const std::string &path);
  static KeyValueConfig ParseString(const std::string &text,
                                    const std::string &origin = "<string>");

  bool Has(const std::string &key) const { return values_.count(key) > 0; }

  std::string GetString(const std::string &key) const;
  std::string GetString(const std::string &key, const std::string &dflt) const;
  double GetDouble(const std::string &key) const;
  double GetDouble(const std::string &key, double dflt) const;
  int GetInt(const std::string &key) const;
  int GetInt(const std::string &key, int dflt) const;
  uint64_t GetU64(const std::string &key, uint64_t dflt) const;
  std::vector<std::string> GetTokens(const std::string &key) const;

  void Set(const std::string &key, const std::string &value) {
    values_[key] = value;
  }

  const std::map<std::string, std::string> &Values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

}  // namespace mdd

#endif  // MDD_CONFIG_H_

// Copyright 2026 The mmg Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Minimal structured-text config format: '#' comments, [section] tables,
// key = value lines.  Values are bools, integers, floats, quoted or bare
// strings, and [..] lists of numbers (which may span lines).  Keys are
// addressed as "section.key".

#ifndef MMG_SUPPORT_MINICONF_H_
#define MMG_SUPPORT_MINICONF_H_

#include <map>
#include <string>
#include <vector>

namespace mmg {

class ConfigMap {
 public:
  static ConfigMap Parse(const std::string& text);
  static ConfigMap LoadFile(const std::string& path);

  bool Has(const std::string& key) const;

  bool GetBool(const std::string& key, bool fallback) const;
  long long GetInt(const std::string& key, long long fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  std::string GetString(const std::string& key,
                        const std::string& fallback) const;
  std::vector<double> GetDoubleList(
      const std::string& key, const std::vector<double>& fallback) const;

  // Throwing accessors for keys that must be present.
  double RequireDouble(const std::string& key) const;
  std::vector<double> RequireDoubleList(const std::string& key) const;

  void SetBool(const std::string& key, bool v);
  void SetInt(const std::string& key, long long v);
  void SetDouble(const std::string& key, double v);
  void SetString(const std::string& key, const std::string& v);
  void SetDoubleList(const std::string& key, const std::vector<double>& v);

  // Renders '[section]' tables with keys sorted inside each table; parsing
  // the result reproduces this map exactly.
  std::string Serialize() const;
  void SaveFile(const std::string& path) const;

  std::vector<std::string> Keys() const;

 private:
  struct Value {
    enum class Kind { kBool, kInt, kDouble, kString, kList };
    Kind kind = Kind::kString;
    bool b = false;
    long long i = 0;
    double d = 0.0;
    std::string s;
    std::vector<double> list;
  };

  const Value* Find(const std::string& key) const;

  std::map<std::string, Value> values_;
};

}  // namespace mmg

#endif  // MMG_SUPPORT_MINICONF_H_

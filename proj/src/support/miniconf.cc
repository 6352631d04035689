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

#include "mmg/support/miniconf.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mmg/core/check.h"

namespace mmg {
namespace {

std::string Trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string StripComment(const std::string& line) {
  bool in_quote = false;
  for (size_t k = 0; k < line.size(); ++k) {
    if (line[k] == '"') in_quote = !in_quote;
    if (line[k] == '#' && !in_quote) return line.substr(0, k);
  }
  return line;
}

bool ParseLongLong(const std::string& s, long long* out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, *out);
  return ec == std::errc() && p == e;
}

bool ParseDouble(const std::string& s, double* out) {
  try {
    size_t pos = 0;
    *out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

std::vector<double> ParseNumberList(const std::string& body, int line_no) {
  std::vector<double> out;
  std::string token;
  auto flush = [&] {
    const std::string t = Trim(token);
    token.clear();
    if (t.empty()) return;
    double d = 0.0;
    MMG_CHECK_MSG(ParseDouble(t, &d),
                  "config line " << line_no << ": bad number '" << t << "'");
    out.push_back(d);
  };
  for (char c : body) {
    if (c == ',') {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  return out;
}

void AppendValueText(std::ostream& os, double d) {
  std::ostringstream oss;
  oss << std::setprecision(17) << d;
  std::string s = oss.str();
  // Keep floats round-trippable as floats (an integral double still parses
  // back as kDouble only with a decimal point or exponent).
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  os << s;
}

}  // namespace

ConfigMap ConfigMap::Parse(const std::string& text) {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = Trim(StripComment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      MMG_CHECK_MSG(line.back() == ']',
                    "config line " << line_no << ": unterminated section");
      section = Trim(line.substr(1, line.size() - 2));
      MMG_CHECK_MSG(!section.empty(),
                    "config line " << line_no << ": empty section name");
      continue;
    }
    const size_t eq = line.find('=');
    MMG_CHECK_MSG(eq != std::string::npos,
                  "config line " << line_no << ": expected key = value");
    std::string key = Trim(line.substr(0, eq));
    MMG_CHECK_MSG(!key.empty(), "config line " << line_no << ": empty key");
    if (!section.empty()) key = section + "." + key;
    std::string val = Trim(line.substr(eq + 1));

    Value v;
    if (!val.empty() && val.front() == '[') {
      // Number list; may continue over following lines until ']'.
      std::string body = val.substr(1);
      while (body.find(']') == std::string::npos) {
        MMG_CHECK_MSG(std::getline(in, raw),
                      "config line " << line_no << ": unterminated list");
        ++line_no;
        body += Trim(StripComment(raw));
      }
      body = body.substr(0, body.find(']'));
      v.kind = Value::Kind::kList;
      v.list = ParseNumberList(body, line_no);
    } else if (val == "true" || val == "false") {
      v.kind = Value::Kind::kBool;
      v.b = (val == "true");
    } else if (long long i = 0; ParseLongLong(val, &i)) {
      v.kind = Value::Kind::kInt;
      v.i = i;
    } else if (double d = 0.0; ParseDouble(val, &d)) {
      v.kind = Value::Kind::kDouble;
      v.d = d;
    } else {
      v.kind = Value::Kind::kString;
      if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
        val = val.substr(1, val.size() - 2);
      v.s = val;
    }
    cfg.values_[key] = std::move(v);
  }
  return cfg;
}

ConfigMap ConfigMap::LoadFile(const std::string& path) {
  std::ifstream in(path);
  MMG_CHECK_MSG(in.good(), "cannot open config file '" << path << "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

const ConfigMap::Value* ConfigMap::Find(const std::string& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

bool ConfigMap::Has(const std::string& key) const { return Find(key); }

bool ConfigMap::GetBool(const std::string& key, bool fallback) const {
  const Value* v = Find(key);
  if (!v) return fallback;
  MMG_CHECK_MSG(v->kind == Value::Kind::kBool, "key '" << key << "' not bool");
  return v->b;
}

long long ConfigMap::GetInt(const std::string& key, long long fallback) const {
  const Value* v = Find(key);
  if (!v) return fallback;
  MMG_CHECK_MSG(v->kind == Value::Kind::kInt, "key '" << key << "' not int");
  return v->i;
}

double ConfigMap::GetDouble(const std::string& key, double fallback) const {
  const Value* v = Find(key);
  if (!v) return fallback;
  if (v->kind == Value::Kind::kInt) return static_cast<double>(v->i);
  MMG_CHECK_MSG(v->kind == Value::Kind::kDouble,
                "key '" << key << "' not numeric");
  return v->d;
}

std::string ConfigMap::GetString(const std::string& key,
                                 const std::string& fallback) const {
  const Value* v = Find(key);
  if (!v) return fallback;
  MMG_CHECK_MSG(v->kind == Value::Kind::kString,
                "key '" << key << "' not string");
  return v->s;
}

std::vector<double> ConfigMap::GetDoubleList(
    const std::string& key, const std::vector<double>& fallback) const {
  const Value* v = Find(key);
  if (!v) return fallback;
  MMG_CHECK_MSG(v->kind == Value::Kind::kList, "key '" << key << "' not list");
  return v->list;
}

double ConfigMap::RequireDouble(const std::string& key) const {
  MMG_CHECK_MSG(Has(key), "missing required config key '" << key << "'");
  return GetDouble(key, 0.0);
}

std::vector<double> ConfigMap::RequireDoubleList(const std::string& key) const {
  MMG_CHECK_MSG(Has(key), "missing required config key '" << key << "'");
  return GetDoubleList(key, {});
}

void ConfigMap::SetBool(const std::string& key, bool v) {
  Value val;
  val.kind = Value::Kind::kBool;
  val.b = v;
  values_[key] = val;
}

void ConfigMap::SetInt(const std::string& key, long long v) {
  Value val;
  val.kind = Value::Kind::kInt;
  val.i = v;
  values_[key] = val;
}

void ConfigMap::SetDouble(const std::string& key, double v) {
  Value val;
  val.kind = Value::Kind::kDouble;
  val.d = v;
  values_[key] = val;
}

void ConfigMap::SetString(const std::string& key, const std::string& v) {
  Value val;
  val.kind = Value::Kind::kString;
  val.s = v;
  values_[key] = val;
}

void ConfigMap::SetDoubleList(const std::string& key,
                              const std::vector<double>& v) {
  Value val;
  val.kind = Value::Kind::kList;
  val.list = v;
  values_[key] = val;
}

std::string ConfigMap::Serialize() const {
  // Sectionless keys must precede every [section] header, otherwise they
  // would reparse as members of whatever section came before them.
  std::vector<std::pair<std::string, const Value*>> ordered;
  for (const auto& [key, v] : values_)
    if (key.rfind('.') == std::string::npos) ordered.emplace_back(key, &v);
  for (const auto& [key, v] : values_)
    if (key.rfind('.') != std::string::npos) ordered.emplace_back(key, &v);

  std::ostringstream os;
  std::string section;
  bool first = true;
  for (const auto& [key, vp] : ordered) {
    const Value& v = *vp;
    const size_t dot = key.rfind('.');
    const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
    const std::string leaf = dot == std::string::npos ? key
                                                      : key.substr(dot + 1);
    if (sec != section || first) {
      if (!first) os << "\n";
      if (!sec.empty()) os << "[" << sec << "]\n";
      section = sec;
      first = false;
    }
    os << leaf << " = ";
    switch (v.kind) {
      case Value::Kind::kBool:
        os << (v.b ? "true" : "false");
        break;
      case Value::Kind::kInt:
        os << v.i;
        break;
      case Value::Kind::kDouble:
        AppendValueText(os, v.d);
        break;
      case Value::Kind::kString:
        os << '"' << v.s << '"';
        break;
      case Value::Kind::kList: {
        os << "[";
        for (size_t k = 0; k < v.list.size(); ++k) {
          if (k) os << ", ";
          AppendValueText(os, v.list[k]);
        }
        os << "]";
        break;
      }
    }
    os << "\n";
  }
  return os.str();
}

void ConfigMap::SaveFile(const std::string& path) const {
  std::ofstream out(path);
  MMG_CHECK_MSG(out.good(), "cannot write config file '" << path << "'");
  out << Serialize();
}

std::vector<std::string> ConfigMap::Keys() const {
  std::vector<std::string> keys;
  keys.reserve(values_.size());
  for (const auto& [key, v] : values_) keys.push_back(key);
  return keys;
}

}  // namespace mmg

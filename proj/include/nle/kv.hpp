// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <type_traits>

#include "nle/error.hpp"

/// Plain-text key=value configuration: one pair per line, '#' comments.
namespace nle::kv {

using Map = std::map<std::string, std::string>;

inline std::string str(bool v) { return v ? "true" : "false"; }

template <typename T>
  requires std::is_arithmetic_v<T>
std::string str(T v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string str(const std::string& v) { return v; }

inline void parse_value(const std::string& key, const std::string& s, bool& out) {
  if (s == "true" || s == "1") out = true;
  else if (s == "false" || s == "0") out = false;
  else throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

inline void parse_value(const std::string&, const std::string& s, std::string& out) { out = s; }

template <typename T>
  requires std::is_arithmetic_v<T>
void parse_value(const std::string& key, const std::string& s, T& out) {
  T v{};
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError(key + ": cannot parse '" + s + "'");
  }
  out = v;
}

template <typename T>
void read(const Map& m, const std::string& key, T& out) {
  auto it = m.find(key);
  if (it != m.end()) parse_value(key, it->second, out);
}

inline std::string serialize(const Map& m) {
  std::string out;
  for (const auto& [k, v] : m) out += k + "=" + v + "\n";
  return out;
}

inline Map parse(const std::string& text, const std::string& origin = "<memory>") {
  Map m;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw IoError(origin, "line " + std::to_string(lineno) + " is not key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    m[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return m;
}

inline Map load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError(path, "cannot open config");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

}  // namespace nle::kv

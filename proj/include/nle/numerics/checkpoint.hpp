// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nle/error.hpp"
#include "nle/numerics/tensor.hpp"

namespace nle {

/// Flat tensor archive.
///
/// Layout (all integers little-endian):
///   "NLECKPT1"
///   u64 manifest byte length, manifest text ("key=value\n" lines, sorted)
///   u64 entry count
///   per entry: u32 name length, name, u8 element width (4 or 8),
///              u32 rank, u64 dims[rank], raw little-endian IEEE values
class Checkpoint {
 public:
  struct Entry {
    std::string name;
    Shape shape;
    std::uint8_t width = 8;
    std::vector<std::uint8_t> raw;
  };

  std::map<std::string, std::string> manifest;

  template <typename T>
  void put(const std::string& name, const Shape& shape, std::span<const T> values) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    if (shape_numel(shape) != values.size()) {
      throw DimensionError("checkpoint entry " + name + ": shape " + shape_str(shape) +
                           " does not match " + std::to_string(values.size()) + " values");
    }
    Entry e{name, shape, static_cast<std::uint8_t>(sizeof(T)), {}};
    e.raw.resize(values.size() * sizeof(T));
    for (std::size_t i = 0; i < values.size(); ++i) write_le(values[i], e.raw.data() + i * sizeof(T));
    index_[name] = entries_.size();
    entries_.push_back(std::move(e));
  }

  template <typename T>
  void put(const std::string& name, const Tensor<T>& t) {
    put<T>(name, t.shape(), t.data());
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  const Entry& entry(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("checkpoint has no entry '" + name + "'");
    return entries_[it->second];
  }

  /// Values converted to T; exact when the stored width matches.
  template <typename T>
  std::vector<T> get(const std::string& name) const {
    const Entry& e = entry(name);
    const std::size_t n = shape_numel(e.shape);
    std::vector<T> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (e.width == 4) {
        out[i] = static_cast<T>(read_le<float>(e.raw.data() + i * 4));
      } else {
        out[i] = static_cast<T>(read_le<double>(e.raw.data() + i * 8));
      }
    }
    return out;
  }

  std::string serialize() const {
    std::string out = "NLECKPT1";
    std::string man;
    for (const auto& [k, v] : manifest) man += k + "=" + v + "\n";
    append_u64(out, man.size());
    out += man;
    append_u64(out, entries_.size());
    for (const auto& e : entries_) {
      append_u32(out, static_cast<std::uint32_t>(e.name.size()));
      out += e.name;
      out.push_back(static_cast<char>(e.width));
      append_u32(out, static_cast<std::uint32_t>(e.shape.size()));
      for (auto d : e.shape) append_u64(out, d);
      out.append(reinterpret_cast<const char*>(e.raw.data()), e.raw.size());
    }
    return out;
  }

  static Checkpoint deserialize(const std::string& bytes, const std::string& origin = "<memory>") {
    Checkpoint ck;
    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
      if (pos + n > bytes.size()) throw IoError(origin, "truncated checkpoint");
    };
    need(8);
    if (bytes.compare(0, 8, "NLECKPT1") != 0) throw IoError(origin, "not a checkpoint archive");
    pos = 8;
    auto u64 = [&] {
      need(8);
      std::uint64_t v = 0;
      for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(bytes[pos + i]);
      pos += 8;
      return v;
    };
    auto u32 = [&] {
      need(4);
      std::uint32_t v = 0;
      for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(bytes[pos + i]);
      pos += 4;
      return v;
    };
    const std::uint64_t man_len = u64();
    need(man_len);
    std::istringstream man(bytes.substr(pos, man_len));
    pos += man_len;
    for (std::string line; std::getline(man, line);) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw IoError(origin, "malformed manifest line '" + line + "'");
      ck.manifest[line.substr(0, eq)] = line.substr(eq + 1);
    }
    const std::uint64_t count = u64();
    for (std::uint64_t k = 0; k < count; ++k) {
      Entry e;
      const std::uint32_t name_len = u32();
      need(name_len);
      e.name = bytes.substr(pos, name_len);
      pos += name_len;
      need(1);
      e.width = static_cast<std::uint8_t>(bytes[pos++]);
      if (e.width != 4 && e.width != 8) throw IoError(origin, "bad element width in " + e.name);
      const std::uint32_t rank = u32();
      for (std::uint32_t r = 0; r < rank; ++r) e.shape.push_back(u64());
      const std::size_t nbytes = shape_numel(e.shape) * e.width;
      need(nbytes);
      e.raw.assign(bytes.begin() + pos, bytes.begin() + pos + nbytes);
      pos += nbytes;
      ck.index_[e.name] = ck.entries_.size();
      ck.entries_.push_back(std::move(e));
    }
    if (pos != bytes.size()) throw IoError(origin, "trailing bytes after checkpoint");
    return ck;
  }

  void save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(path, "cannot open for writing");
    const std::string bytes = serialize();
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError(path, "write failed");
  }

  static Checkpoint load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(path, "cannot open for reading");
    std::ostringstream ss;
    ss << f.rdbuf();
    return deserialize(ss.str(), path);
  }

 private:
  template <typename T>
  static void write_le(T v, std::uint8_t* out) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    const U bits = std::bit_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) out[i] = static_cast<std::uint8_t>(bits >> (8 * i));
  }

  template <typename T>
  static T read_le(const std::uint8_t* in) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(in[i]) << (8 * i);
    return std::bit_cast<T>(bits);
  }

  static void append_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  static void append_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }

  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace nle

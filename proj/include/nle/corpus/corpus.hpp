// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nle/corpus/lexicon.hpp"
#include "nle/error.hpp"
#include "nle/numerics/rng.hpp"
#include "nle/numerics/tensor.hpp"
#include "nle/vocab.hpp"

namespace nle::corpus {

struct NoiseProfile {
  double sub = 0.10;
  double del = 0.05;
  double ins = 0.05;

  double total() const noexcept { return sub + del + ins; }
  bool operator==(const NoiseProfile&) const = default;
};

inline void validate(const NoiseProfile& p) {
  for (double r : {p.sub, p.del, p.ins}) {
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("noise rates must lie in [0, 1)");
  }
  if (!(p.total() < 1.0)) throw ConfigError("noise rates must sum to less than 1");
}

/// How pseudo-acoustic frames are rendered from a reference.
struct FrameSpec {
  std::size_t repeat_factor = 4;
  double sigma = 0.3;
  std::size_t noise_dims = 2;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(Vocab::size) + noise_dims; }
};

/// Noisy channel over content symbols. Each reference symbol independently
/// is substituted by a uniformly chosen different symbol (sub), dropped
/// (del), or kept with a random symbol inserted after it (ins).
inline Tokens corrupt(std::span<const TokenId> reference, const NoiseProfile& p, std::uint64_t seed) {
  validate(p);
  Rng rng = Rng(seed).split("corrupt");
  Tokens out;
  out.reserve(reference.size() + reference.size() / 8 + 1);
  for (TokenId t : reference) {
    const double u = rng.uniform();
    if (u < p.sub) {
      TokenId r = Vocab::content(static_cast<int>(rng.below(Vocab::num_content - 1)));
      if (r >= t) ++r;
      out.push_back(r);
    } else if (u < p.sub + p.del) {
      continue;
    } else if (u < p.total()) {
      out.push_back(t);
      out.push_back(Vocab::content(static_cast<int>(rng.below(Vocab::num_content))));
    } else {
      out.push_back(t);
    }
  }
  return out;
}

/// Stand-in for encoder hidden states: every reference symbol becomes
/// `repeat_factor` rows of its one-hot vector plus N(0, sigma²) noise on all
/// `dim()` features. Rendered from the reference, so frames carry information
/// the corrupted hypothesis lost.
template <typename T>
Tensor<T> render_frames(std::span<const TokenId> reference, const FrameSpec& spec, std::uint64_t seed) {
  if (spec.repeat_factor == 0) throw ConfigError("repeat_factor must be at least 1");
  const std::size_t d = spec.dim();
  const std::size_t rows = reference.size() * spec.repeat_factor;
  std::vector<T> data(rows * d, T{0});
  Rng rng = Rng(seed).split("frames");
  for (std::size_t i = 0; i < reference.size(); ++i) {
    for (std::size_t r = 0; r < spec.repeat_factor; ++r) {
      T* row = data.data() + (i * spec.repeat_factor + r) * d;
      row[reference[i]] = T{1};
      if (spec.sigma > 0.0)
        for (std::size_t c = 0; c < d; ++c) row[c] += static_cast<T>(spec.sigma * rng.normal());
    }
  }
  return Tensor<T>({rows, d}, std::move(data));
}

/// Frames multiplied by zero; same shape.
template <typename T>
Tensor<T> zero_frames(const Tensor<T>& frames) {
  return Tensor<T>(frames.shape());
}

/// Seeded first-order Markov chain over the bundled lexicon. Each word has a
/// small successor set, which produces recurring bigrams and repeated words.
class TextGenerator {
 public:
  explicit TextGenerator(std::uint64_t seed, std::size_t successors = 6, double follow = 0.75)
      : follow_(follow) {
    const std::size_t n = kLexicon.size();
    double acc = 0.0;
    zipf_cdf_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      acc += 1.0 / static_cast<double>(i + 1);
      zipf_cdf_[i] = acc;
    }
    for (auto& c : zipf_cdf_) c /= acc;
    Rng rng = Rng(seed).split("markov");
    next_.resize(n);
    for (std::size_t w = 0; w < n; ++w)
      for (std::size_t k = 0; k < successors; ++k) next_[w].push_back(zipf(rng));
  }

  std::string sentence(std::size_t words, Rng& rng) const {
    std::string out;
    std::size_t w = zipf(rng);
    for (std::size_t i = 0; i < words; ++i) {
      if (i) {
        out.push_back(' ');
        w = rng.uniform() < follow_ ? next_[w][rng.below(next_[w].size())] : zipf(rng);
      }
      out += kLexicon[w];
    }
    return out;
  }

 private:
  std::size_t zipf(Rng& rng) const {
    const double u = rng.uniform();
    return static_cast<std::size_t>(std::upper_bound(zipf_cdf_.begin(), zipf_cdf_.end(), u) - zipf_cdf_.begin()) %
           zipf_cdf_.size();
  }

  double follow_;
  std::vector<double> zipf_cdf_;
  std::vector<std::vector<std::size_t>> next_;
};

struct CorpusSpec {
  std::size_t n_utts = 20000;
  std::size_t min_words = 2;
  std::size_t max_words = 5;
  NoiseProfile noise;
  std::uint64_t seed = 7;
  FrameSpec frames;
};

struct Utterance {
  std::string id;
  std::string reference;
  std::string hypothesis;
  NoiseProfile noise;
  std::uint64_t seed = 0;

  Tokens reference_tokens() const { return Vocab::encode(reference); }
  Tokens hypothesis_tokens() const { return Vocab::encode(hypothesis); }
  bool operator==(const Utterance&) const = default;
};

enum class Split { train, valid, test };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
  }
  return "?";
}

inline Split split_from_string(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "valid") return Split::valid;
  if (s == "test") return Split::test;
  throw ConfigError("unknown split '" + std::string(s) + "'");
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(where + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

inline std::uint64_t parse_u64(std::string_view s, const std::string& where) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(where + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// One record per line: tab-separated key=value fields
/// id, reference, hypothesis, noise_profile (sub,del,ins), seed.
inline std::string serialize(const Utterance& u) {
  return "id=" + u.id + "\treference=" + u.reference + "\thypothesis=" + u.hypothesis +
         "\tnoise_profile=" + detail::format_double(u.noise.sub) + "," +
         detail::format_double(u.noise.del) + "," + detail::format_double(u.noise.ins) +
         "\tseed=" + std::to_string(u.seed);
}

inline Utterance parse_record(std::string_view line) {
  Utterance u;
  std::map<std::string_view, std::string_view> kv;
  for (auto field : detail::split(line, '\t')) {
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) throw Error("corpus record field without '=': " + std::string(field));
    kv[field.substr(0, eq)] = field.substr(eq + 1);
  }
  for (const char* key : {"id", "reference", "hypothesis", "noise_profile", "seed"}) {
    if (!kv.count(key)) throw Error(std::string("corpus record missing field ") + key);
  }
  u.id = kv["id"];
  u.reference = kv["reference"];
  u.hypothesis = kv["hypothesis"];
  const auto rates = detail::split(kv["noise_profile"], ',');
  if (rates.size() != 3) throw Error("noise_profile needs three rates in record " + u.id);
  u.noise = {detail::parse_double(rates[0], u.id), detail::parse_double(rates[1], u.id),
             detail::parse_double(rates[2], u.id)};
  u.seed = detail::parse_u64(kv["seed"], u.id);
  return u;
}

/// A generated corpus with its rank-by-hash train/valid/test partition.
class Corpus {
 public:
  Corpus() = default;
  Corpus(CorpusSpec spec, std::vector<Utterance> utts) : spec_(spec), utts_(std::move(utts)) { assign_splits(); }

  const CorpusSpec& spec() const noexcept { return spec_; }
  const std::vector<Utterance>& utterances() const noexcept { return utts_; }
  std::size_t size() const noexcept { return utts_.size(); }

  /// Indices of one split, in file order.
  const std::vector<std::size_t>& indices(Split s) const { return split_idx_[static_cast<int>(s)]; }

  std::vector<Utterance> split(Split s) const {
    std::vector<Utterance> out;
    for (auto i : indices(s)) out.push_back(utts_[i]);
    return out;
  }

  std::string header() const {
    const auto& s = spec_;
    return "# nle-corpus v1 n=" + std::to_string(s.n_utts) + " min_words=" + std::to_string(s.min_words) +
           " max_words=" + std::to_string(s.max_words) + " sub=" + detail::format_double(s.noise.sub) +
           " del=" + detail::format_double(s.noise.del) + " ins=" + detail::format_double(s.noise.ins) +
           " seed=" + std::to_string(s.seed) + " repeat_factor=" + std::to_string(s.frames.repeat_factor) +
           " frame_sigma=" + detail::format_double(s.frames.sigma) +
           " noise_dims=" + std::to_string(s.frames.noise_dims);
  }

  std::string serialize() const {
    std::string out = header() + "\n";
    for (const auto& u : utts_) out += corpus::serialize(u) + "\n";
    return out;
  }

  static Corpus parse(const std::string& text, const std::string& origin = "<memory>") {
    std::istringstream in(text);
    std::string line;
    CorpusSpec spec;
    if (!std::getline(in, line) || !line.starts_with("# nle-corpus v1")) {
      throw IoError(origin, "missing corpus header");
    }
    for (auto tok : detail::split(std::string_view(line).substr(16), ' ')) {
      const auto eq = tok.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "n") spec.n_utts = detail::parse_u64(val, origin);
      else if (key == "min_words") spec.min_words = detail::parse_u64(val, origin);
      else if (key == "max_words") spec.max_words = detail::parse_u64(val, origin);
      else if (key == "sub") spec.noise.sub = detail::parse_double(val, origin);
      else if (key == "del") spec.noise.del = detail::parse_double(val, origin);
      else if (key == "ins") spec.noise.ins = detail::parse_double(val, origin);
      else if (key == "seed") spec.seed = detail::parse_u64(val, origin);
      else if (key == "repeat_factor") spec.frames.repeat_factor = detail::parse_u64(val, origin);
      else if (key == "frame_sigma") spec.frames.sigma = detail::parse_double(val, origin);
      else if (key == "noise_dims") spec.frames.noise_dims = detail::parse_u64(val, origin);
    }
    std::vector<Utterance> utts;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      utts.push_back(parse_record(line));
    }
    return Corpus(spec, std::move(utts));
  }

  static Corpus load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError(path, "cannot open corpus");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
  }

  /// Content hash of the serialized corpus, for run manifests.
  std::uint64_t fingerprint() const { return stable_hash(serialize()); }

 private:
  // Utterances are ordered by a stable hash of their id and the first 90%
  // go to train, the next 5% to valid, the rest to test. Counts are exact up
  // to rounding, independent of the hash distribution.
  void assign_splits() {
    std::vector<std::pair<std::uint64_t, std::size_t>> order;
    order.reserve(utts_.size());
    for (std::size_t i = 0; i < utts_.size(); ++i) order.emplace_back(stable_hash(utts_[i].id, 0x5711), i);
    std::sort(order.begin(), order.end());
    const std::size_t n = utts_.size();
    const std::size_t n_train = (n * 90 + 50) / 100;
    const std::size_t n_valid = (n * 5 + 50) / 100;
    for (auto& v : split_idx_) v.clear();
    for (std::size_t r = 0; r < n; ++r) {
      const int s = r < n_train ? 0 : (r < n_train + n_valid ? 1 : 2);
      split_idx_[s].push_back(order[r].second);
    }
    for (auto& v : split_idx_) std::sort(v.begin(), v.end());
  }

  CorpusSpec spec_;
  std::vector<Utterance> utts_;
  std::vector<std::size_t> split_idx_[3];
};

inline std::string utterance_id(std::size_t i) {
  std::string s = std::to_string(i);
  return "utt" + std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s;
}

/// Generates the corpus in memory. Utterance i derives all of its randomness
/// from (spec.seed, i), so generation order does not matter.
inline Corpus generate(const CorpusSpec& spec) {
  validate(spec.noise);
  if (spec.min_words == 0 || spec.max_words < spec.min_words) {
    throw ConfigError("word count range must satisfy 1 <= min <= max");
  }
  const TextGenerator text(spec.seed);
  const Rng root(spec.seed);
  std::vector<Utterance> utts;
  utts.reserve(spec.n_utts);
  for (std::size_t i = 0; i < spec.n_utts; ++i) {
    Utterance u;
    u.id = utterance_id(i);
    u.seed = root.split(static_cast<std::uint64_t>(i)).next_u64();
    Rng rng = Rng(u.seed).split("text");
    const std::size_t words = spec.min_words + rng.below(spec.max_words - spec.min_words + 1);
    u.reference = text.sentence(words, rng);
    u.noise = spec.noise;
    u.hypothesis = Vocab::decode(corrupt(Vocab::encode(u.reference), spec.noise, u.seed));
    utts.push_back(std::move(u));
  }
  return Corpus(spec, std::move(utts));
}

/// Writes `generate(spec)` to `path`; returns the corpus.
inline Corpus generate_corpus(const CorpusSpec& spec, const std::string& path) {
  Corpus c = generate(spec);
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) throw IoError(parent.string(), ec.message());
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError(path, "cannot open for writing");
  f << c.serialize();
  if (!f) throw IoError(path, "write failed");
  return c;
}

}  // namespace nle::corpus

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nle/ctc/ctc.hpp"
#include "nle/error.hpp"
#include "nle/vocab.hpp"

namespace nle {

struct InterleaveOptions {
  /// One insertion slot per `density` content tokens.
  std::size_t density = 1;
  /// Short inputs are right-padded with ε content up to this many positions.
  std::size_t min_content = 8;
};

/// Token sequence with explicit insertion slots. With density 1 the layout is
/// (ε, x1, ε, x2, ..., ε, xN, ε).
struct InterleavedSequence {
  Tokens tokens;
  std::size_t density = 1;
  std::size_t source_len = 0;   ///< content tokens before padding
  std::size_t content_len = 0;  ///< content positions after padding
  std::vector<bool> slot;       ///< true at insertion-slot positions

  std::size_t size() const noexcept { return tokens.size(); }
  std::size_t num_slots() const noexcept { return static_cast<std::size_t>(std::count(slot.begin(), slot.end(), true)); }
};

/// Interleaves `tokens` with blank slots: a slot before every group of
/// `density` content tokens and one terminal slot. A final partial group is
/// followed by the terminal slot.
inline InterleavedSequence build_interleaved(std::span<const TokenId> tokens, TokenId blank,
                                             InterleaveOptions opt = {}) {
  if (opt.density == 0) throw ConfigError("blank density must be positive");
  for (TokenId t : tokens)
    if (t == blank) throw InvalidTargetError("interleaving input already contains ε");
  InterleavedSequence out;
  out.density = opt.density;
  out.source_len = tokens.size();
  out.content_len = std::max(tokens.size(), opt.min_content);
  const std::size_t groups = (out.content_len + opt.density - 1) / opt.density;
  out.tokens.reserve(out.content_len + groups + 1);
  for (std::size_t i = 0; i < out.content_len; ++i) {
    if (i % opt.density == 0) {
      out.tokens.push_back(blank);
      out.slot.push_back(true);
    }
    out.tokens.push_back(i < tokens.size() ? tokens[i] : blank);
    out.slot.push_back(false);
  }
  out.tokens.push_back(blank);
  out.slot.push_back(true);
  return out;
}

/// Feeds a decoded output back through the same layout for another pass.
inline InterleavedSequence reinterleave(std::span<const TokenId> decoded, TokenId blank,
                                        InterleaveOptions opt = {}) {
  return build_interleaved(decoded, blank, opt);
}

/// [x1..xN, ε, ..., ε] with the same length as the density-1 interleaved
/// layout; all free positions sit after the content.
inline Tokens end_padded_layout(std::span<const TokenId> tokens, TokenId blank,
                                std::size_t min_content = 8) {
  const std::size_t content = std::max(tokens.size(), min_content);
  Tokens out(tokens.begin(), tokens.end());
  out.resize(2 * content + 1, blank);
  return out;
}

struct InsertionEdit {
  Tokens labels;               ///< per-position relabeling of the layout
  std::size_t changed_count;   ///< positions whose label differs from the input
};

/// Cheapest relabeling of a density-1 layout that collapses to the original
/// content with `insert` placed in gap `gap` (gap k sits between x_k and
/// x_{k+1}; gap 0 precedes x_1). Cost is the number of relabeled positions,
/// minimized exactly over every CTC-valid labeling.
inline InsertionEdit insertion_oracle(const InterleavedSequence& seq, std::size_t gap,
                                      std::span<const TokenId> insert, TokenId blank) {
  if (seq.density != 1) throw ConfigError("insertion_oracle requires blank density 1");
  const std::size_t capacity = seq.num_slots();
  if (insert.size() > capacity) {
    throw InfeasibleInsertError("inserting " + std::to_string(insert.size()) + " tokens exceeds " +
                                std::to_string(capacity) + " insertion slots");
  }
  const Tokens source = ctc::collapse(seq.tokens, blank);
  if (gap > source.size()) throw ConfigError("gap " + std::to_string(gap) + " beyond sequence end");
  Tokens target(source.begin(), source.begin() + static_cast<std::ptrdiff_t>(gap));
  target.insert(target.end(), insert.begin(), insert.end());
  target.insert(target.end(), source.begin() + static_cast<std::ptrdiff_t>(gap), source.end());
  for (TokenId t : insert)
    if (t == blank) throw InvalidTargetError("inserted tokens may not be ε");

  const std::size_t P = seq.size();
  if (!ctc::feasible(P, target)) {
    throw InfeasibleInsertError("edited sequence no longer fits in " + std::to_string(P) + " positions");
  }
  const auto ext = ctc::detail::extend(target, blank);
  const std::size_t S = ext.size();
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max() / 2;
  std::vector<std::size_t> cost(P * S, inf), back(P * S, 0);
  auto emit = [&](std::size_t t, std::size_t s) { return ext[s] != seq.tokens[t] ? 1u : 0u; };
  cost[0] = emit(0, 0);
  if (S > 1) cost[1] = emit(0, 1);
  for (std::size_t t = 1; t < P; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      std::size_t best = cost[(t - 1) * S + s], arg = s;
      if (s >= 1 && cost[(t - 1) * S + s - 1] < best) best = cost[(t - 1) * S + (arg = s - 1)];
      if (ctc::detail::can_skip(ext, s, blank) && cost[(t - 1) * S + s - 2] < best) {
        best = cost[(t - 1) * S + (arg = s - 2)];
      }
      if (best >= inf) continue;
      cost[t * S + s] = best + emit(t, s);
      back[t * S + s] = arg;
    }
  }
  std::size_t s = S - 1;
  if (S > 1 && cost[(P - 1) * S + S - 2] < cost[(P - 1) * S + S - 1]) s = S - 2;
  InsertionEdit out{Tokens(P), cost[(P - 1) * S + s]};
  for (std::size_t t = P; t-- > 0;) {
    out.labels[t] = ext[s];
    s = back[t * S + s];
  }
  return out;
}

}  // namespace nle

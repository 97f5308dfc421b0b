// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "nle/ctc/ctc.hpp"
#include "nle/editor/model.hpp"

namespace nle::baselines {

using editor::EditorModel;

/// Causal decoder over [projected frames; BOS, y1 … yM] with the editor's
/// backbone and projector.
template <typename T>
using ARModel = EditorModel<T>;

template <typename T>
ARModel<T> make_ar_model(editor::EditorConfig cfg, std::uint64_t seed) {
  cfg.bidirectional = false;
  return ARModel<T>(cfg, seed);
}

/// Teacher-forced input [BOS, reference…].
inline Tokens ar_input(std::span<const TokenId> reference) {
  Tokens in{Vocab::bos};
  in.insert(in.end(), reference.begin(), reference.end());
  return in;
}

/// Next-token targets for every position of [acoustic; BOS, reference…].
/// Acoustic entries are placeholders (-1); the loss never reads them.
inline std::vector<int> ar_targets(std::size_t acoustic, std::span<const TokenId> reference) {
  std::vector<int> t(acoustic, -1);
  t.insert(t.end(), reference.begin(), reference.end());
  t.push_back(Vocab::eos);
  return t;
}

template <typename T>
std::size_t ar_positions(const ARModel<T>& m, const Tensor<T>& frames, std::span<const TokenId> reference) {
  const auto& c = m.config();
  const std::size_t na = c.acoustic_positions(frames.dim(0));
  if (!c.fits(na, 0)) return c.max_positions + 1;
  return c.first_text_position(na) + reference.size() + 1;
}

/// Mean cross-entropy over the text positions. `targets` spans the whole
/// concatenated sequence; entries at acoustic positions are ignored.
template <typename T>
Tensor<T> ar_loss(const ARModel<T>& m, const Tensor<T>& frames, std::span<const TokenId> reference,
                  std::span<const int> targets, const editor::RunOptions& run_opt = {}) {
  editor::RunOptions opt = run_opt;
  opt.causal = true;
  const auto acoustic = m.project(frames, opt);
  const std::size_t na = acoustic.dim(0);
  if (targets.size() != na + reference.size() + 1) {
    throw DimensionError("ar_loss: " + std::to_string(targets.size()) + " targets for " +
                         std::to_string(na + reference.size() + 1) + " positions");
  }
  const auto in = ar_input(reference);
  const auto logits = m.run(acoustic, in, opt);
  return ops::cross_entropy(logits, targets.subspan(na));
}

template <typename T>
Tensor<T> ar_loss(const ARModel<T>& m, const Tensor<T>& frames, std::span<const TokenId> reference) {
  const auto t = ar_targets(m.config().acoustic_positions(frames.dim(0)), reference);
  return ar_loss(m, frames, reference, std::span<const int>(t));
}

template <typename T>
struct ARExample {
  Tensor<T> frames;
  Tokens reference;
};

/// Batch loss: mean over utterances that fit in max_positions.
template <typename T>
Tensor<T> ar_train_step(const ARModel<T>& m, std::span<const ARExample<T>> batch, std::size_t* skipped = nullptr) {
  Tensor<T> sum;
  std::size_t used = 0;
  for (const auto& ex : batch) {
    if (ar_positions(m, ex.frames, ex.reference) > m.config().max_positions) {
      if (skipped) ++*skipped;
      continue;
    }
    const auto l = ar_loss(m, ex.frames, ex.reference);
    sum = sum.defined() ? ops::add(sum, l) : l;
    ++used;
  }
  if (used == 0) return {};
  return ops::scale(sum, static_cast<T>(1.0 / static_cast<double>(used)));
}

struct ARDecode {
  Tokens tokens;
  std::uint64_t forward_calls = 0;
  bool truncated = false;  // max_len reached before EOS
};

/// Greedy decoding, one full forward pass per generated token (no cache).
template <typename T>
ARDecode ar_decode(const ARModel<T>& m, const Tensor<T>& frames, std::size_t max_len, bool zero_acoustic = false) {
  if (max_len == 0) throw ConfigError("ar_decode needs max_len >= 1");
  NoGradGuard ng;
  editor::RunOptions opt;
  opt.causal = true;
  opt.zero_acoustic = zero_acoustic;
  const auto acoustic = m.project(frames, opt);
  const std::size_t start = m.config().first_text_position(acoustic.dim(0));
  const std::size_t room = m.config().max_positions - std::min(m.config().max_positions, start);
  ARDecode r;
  Tokens seq{Vocab::bos};
  while (true) {
    const auto logits = m.run(acoustic, seq, opt);
    ++r.forward_calls;
    const std::size_t V = logits.dim(1), last = logits.dim(0) - 1;
    TokenId best = 0;
    for (std::size_t k = 1; k < V; ++k)
      if (logits.at(last, k) > logits.at(last, static_cast<std::size_t>(best))) best = static_cast<TokenId>(k);
    if (best == Vocab::eos) break;
    r.tokens.push_back(best);
    seq.push_back(best);
    if (r.tokens.size() >= max_len || seq.size() >= room) {
      r.truncated = true;
      break;
    }
  }
  return r;
}

/// The uncorrected hypothesis.
inline Tokens passthrough(std::span<const TokenId> hypothesis) { return Tokens(hypothesis.begin(), hypothesis.end()); }

}  // namespace nle::baselines

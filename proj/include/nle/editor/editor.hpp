// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "nle/ctc/ctc.hpp"
#include "nle/editor/model.hpp"
#include "nle/interleave/interleave.hpp"

namespace nle::editor {

/// How the hypothesis is laid out on the text positions.
enum class Layout {
  interleaved,  // ε x1 ε x2 … ε
  end_padding,  // x1 … xN ε … ε
  blanks,       // every position ε; the hypothesis is withheld
};

struct LayoutOptions {
  Layout layout = Layout::interleaved;
  std::size_t density = 1;
  std::size_t min_content = 8;
};

inline Tokens text_input(std::span<const TokenId> hypothesis, const LayoutOptions& o) {
  switch (o.layout) {
    case Layout::interleaved:
      return build_interleaved(hypothesis, Vocab::blank, {o.density, o.min_content}).tokens;
    case Layout::end_padding:
      return end_padded_layout(hypothesis, Vocab::blank, o.min_content);
    case Layout::blanks:
      return Tokens(build_interleaved(hypothesis, Vocab::blank, {o.density, o.min_content}).size(), Vocab::blank);
  }
  throw ConfigError("unknown layout");
}

/// One training or evaluation utterance as the model sees it.
template <typename T>
struct Example {
  Tensor<T> frames;
  Tokens text;       // model input, also the copy-regularization target
  Tokens reference;  // CTC target
};

struct LossOptions {
  double lambda = 0.02;
  bool use_ctc = true;  // false: copy-regularization only
  bool zero_acoustic = false;
};

template <typename T>
struct LossParts {
  Tensor<T> total;  // differentiable
  double ctc = 0.0;
  double cr = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

/// Why an example cannot contribute a loss term, if it cannot.
template <typename T>
std::optional<std::string> unusable(const EditorModel<T>& m, const Example<T>& ex, const LossOptions& o) {
  const auto& c = m.config();
  if (!c.fits(c.acoustic_positions(ex.frames.dim(0)), ex.text.size())) return "length";
  if (o.use_ctc && !ctc::feasible(ex.text.size(), ex.reference)) return "infeasible";
  return std::nullopt;
}

/// total = CTC(text logits, reference) + λ · mean CE(text logits, text).
/// Undefined `total` when the example is unusable.
template <typename T>
LossParts<T> utterance_loss(const EditorModel<T>& m, const Example<T>& ex, const LossOptions& o,
                            RunOptions run = {}) {
  LossParts<T> out;
  if (unusable(m, ex, o)) {
    out.skipped = 1;
    return out;
  }
  run.zero_acoustic = o.zero_acoustic;
  const auto logits = m.forward(ex.frames, ex.text, run);
  Tensor<T> total;
  if (o.use_ctc) {
    total = ctc::ctc_loss(logits, ex.reference, Vocab::blank);
    out.ctc = static_cast<double>(total.item());
  }
  if (o.lambda > 0.0) {
    const auto cr = ops::cross_entropy(logits, ex.text);
    out.cr = static_cast<double>(cr.item());
    const auto weighted = ops::scale(cr, static_cast<T>(o.lambda));
    total = total.defined() ? ops::add(total, weighted) : weighted;
  }
  if (!total.defined()) throw ConfigError("loss has neither a CTC nor a copy term");
  out.total = total;
  out.used = 1;
  return out;
}

/// Batch loss: means over the usable utterances. `ctc` and `cr` are the
/// component means; total == ctc + λ·cr.
template <typename T>
LossParts<T> loss(const EditorModel<T>& m, std::span<const Example<T>> batch, const LossOptions& o,
                  const RunOptions& run = {}) {
  LossParts<T> out;
  Tensor<T> sum;
  for (const auto& ex : batch) {
    auto u = utterance_loss(m, ex, o, run);
    out.skipped += u.skipped;
    if (!u.used) continue;
    ++out.used;
    out.ctc += u.ctc;
    out.cr += u.cr;
    sum = sum.defined() ? ops::add(sum, u.total) : u.total;
  }
  if (out.used == 0) return out;
  const double inv = 1.0 / static_cast<double>(out.used);
  out.ctc *= inv;
  out.cr *= inv;
  out.total = ops::scale(sum, static_cast<T>(inv));
  return out;
}

struct EditResult {
  Tokens tokens;
  std::uint64_t forward_calls = 0;
};

/// One parallel forward pass followed by greedy collapse.
template <typename T>
EditResult edit(const EditorModel<T>& m, const Tensor<T>& frames, std::span<const TokenId> hypothesis,
                const LayoutOptions& layout = {}, bool zero_acoustic = false) {
  NoGradGuard ng;
  const auto before = thread_forward_calls();
  RunOptions run;
  run.zero_acoustic = zero_acoustic;
  const auto logits = m.forward(frames, text_input(hypothesis, layout), run);
  EditResult r{ctc::greedy_collapse(logits, Vocab::blank), thread_forward_calls() - before};
  if (r.forward_calls != 1) throw Error("edit made " + std::to_string(r.forward_calls) + " forward calls");
  return r;
}

struct MultiStepResult {
  Tokens tokens;               // final decode
  std::vector<Tokens> steps;   // decode after each step
  std::uint64_t forward_calls = 0;
};

/// Repeated edit → reinterleave with the same frames.
template <typename T>
MultiStepResult multi_step_edit(const EditorModel<T>& m, const Tensor<T>& frames, std::span<const TokenId> hypothesis,
                                std::size_t steps, const LayoutOptions& layout = {}, bool zero_acoustic = false) {
  if (steps == 0) throw ConfigError("multi_step_edit needs at least one step");
  MultiStepResult r;
  Tokens cur(hypothesis.begin(), hypothesis.end());
  for (std::size_t s = 0; s < steps; ++s) {
    auto e = edit(m, frames, cur, layout, zero_acoustic);
    r.forward_calls += e.forward_calls;
    cur = std::move(e.tokens);
    r.steps.push_back(cur);
  }
  r.tokens = cur;
  return r;
}

}  // namespace nle::editor

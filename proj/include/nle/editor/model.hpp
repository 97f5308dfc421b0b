// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <atomic>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "nle/editor/config.hpp"
#include "nle/numerics/checkpoint.hpp"
#include "nle/numerics/ops.hpp"
#include "nle/numerics/rng.hpp"

namespace nle::editor {

namespace detail {

inline std::uint64_t& thread_forward_calls() {
  thread_local std::uint64_t n = 0;
  return n;
}

}  // namespace detail

/// Model forward invocations made by the calling thread so far.
inline std::uint64_t thread_forward_calls() { return detail::thread_forward_calls(); }

/// Which parameter groups receive gradients.
struct Trainable {
  bool base = false;
  bool lora = true;
  bool projector = true;
};

struct RunOptions {
  bool causal = false;
  bool lora = true;
  std::size_t pos_offset = 0;
  bool zero_acoustic = false;
  bool training = false;  // enables projector dropout
  Rng* dropout_rng = nullptr;
};

/// Transformer backbone with tied embeddings, LoRA adapters and a
/// mean-pool + linear projector for frame features. The editor runs it
/// bidirectionally over [projected frames; interleaved text]; the AR
/// baseline and base-model pretraining run it causally.
template <typename T>
class EditorModel {
 public:
  struct Dense {
    Tensor<T> w, b, lora_a, lora_b;

    Tensor<T> operator()(const Tensor<T>& x, bool lora, T scale) const {
      auto y = ops::linear(x, w, b);
      if (lora && lora_a.defined()) {
        y = ops::add(y, ops::scale(ops::matmul(ops::matmul(x, lora_a), lora_b), scale));
      }
      return y;
    }
  };

  struct Block {
    Tensor<T> ln1_g, ln1_b, ln2_g, ln2_b;
    Dense q, k, v, o, up, down;
  };

  EditorModel(EditorConfig cfg, std::uint64_t seed) : cfg_(cfg), calls_(std::make_unique<std::atomic<std::uint64_t>>(0)) {
    cfg_.validate();
    build(seed);
    set_trainable({});
  }

  EditorModel(EditorModel&&) noexcept = default;
  EditorModel& operator=(EditorModel&&) noexcept = default;

  const EditorConfig& config() const noexcept { return cfg_; }
  std::vector<Parameter<T>>& parameters() noexcept { return params_; }
  const std::vector<Parameter<T>>& parameters() const noexcept { return params_; }

  const Parameter<T>& parameter(const std::string& name) const {
    for (const auto& p : params_)
      if (p.name == name) return p;
    throw Error("no parameter named '" + name + "'");
  }

  bool lora_enabled() const noexcept { return lora_enabled_; }
  void set_lora_enabled(bool on) noexcept { lora_enabled_ = on; }

  void set_trainable(Trainable t) {
    trainable_ = t;
    for (auto& p : params_) {
      const bool proj = p.name.starts_with("editor.proj.");
      p.tensor.set_requires_grad(p.is_lora() ? t.lora : proj ? t.projector : t.base);
    }
  }
  Trainable trainable() const noexcept { return trainable_; }

  std::size_t num_parameters(bool trainable_only = false) const {
    std::size_t n = 0;
    for (const auto& p : params_)
      if (!trainable_only || p.tensor.requires_grad()) n += p.tensor.numel();
    return n;
  }

  std::uint64_t forward_calls() const noexcept { return calls_->load(); }
  void reset_forward_calls() noexcept { calls_->store(0); }

  /// Mean-pools frames by the downsampling window, then maps them to d_model.
  Tensor<T> project(const Tensor<T>& frames, const RunOptions& opt = {}) const {
    if (frames.rank() != 2 || frames.dim(1) != cfg_.d_frame) {
      throw DimensionError("frames must be [T x " + std::to_string(cfg_.d_frame) + "], got " +
                           shape_str(frames.shape()));
    }
    auto h = ops::linear(ops::mean_pool_rows(frames, cfg_.projector_downsample), proj_w_, proj_b_);
    if (opt.training && cfg_.dropout > 0.0 && opt.dropout_rng != nullptr) {
      h = ops::dropout(h, cfg_.dropout, *opt.dropout_rng, true);
    }
    if (opt.zero_acoustic) h = ops::scale(h, T{0});
    return h;
  }

  /// Logits [|tokens| x V] for the token positions of [acoustic; tokens].
  /// `acoustic` may be undefined (text only). Counts as one forward call.
  Tensor<T> run(const Tensor<T>& acoustic, std::span<const TokenId> tokens, const RunOptions& opt) const {
    ++*calls_;
    ++detail::thread_forward_calls();
    const std::size_t na = acoustic.defined() ? acoustic.dim(0) : 0;
    const std::size_t n = na + tokens.size();
    if (tokens.empty()) throw LengthError("model input has no token positions");
    if (na > 0 && !cfg_.fits(na, tokens.size())) {
      throw LengthError(std::to_string(na) + " acoustic and " + std::to_string(tokens.size()) +
                        " text positions do not fit max_positions " + std::to_string(cfg_.max_positions) +
                        " (text starts at " + std::to_string(cfg_.first_text_position(na)) + ")");
    }
    if (opt.pos_offset + n > cfg_.max_positions) {
      throw LengthError("sequence of " + std::to_string(n) + " positions (offset " + std::to_string(opt.pos_offset) +
                        ") exceeds max_positions " + std::to_string(cfg_.max_positions));
    }
    auto x = ops::embedding(tok_emb_, tokens);
    if (na > 0) x = ops::concat_rows(acoustic, x);
    std::vector<int> pos(n);
    std::iota(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(na), static_cast<int>(opt.pos_offset));
    std::iota(pos.begin() + static_cast<std::ptrdiff_t>(na), pos.end(),
              static_cast<int>(opt.pos_offset + cfg_.first_text_position(na)));
    x = ops::add(x, ops::embedding(pos_emb_, pos));
    const bool lora = opt.lora && lora_enabled_;
    const T s = static_cast<T>(cfg_.lora_scale());
    for (const auto& b : blocks_) {
      auto h = ops::layer_norm(x, b.ln1_g, b.ln1_b);
      auto a = ops::attention(b.q(h, lora, s), b.k(h, lora, s), b.v(h, lora, s), cfg_.heads, opt.causal);
      x = ops::add(x, b.o(a, lora, s));
      h = ops::layer_norm(x, b.ln2_g, b.ln2_b);
      x = ops::add(x, b.down(ops::gelu(b.up(h, lora, s)), lora, s));
    }
    if (na > 0) x = ops::slice_rows(x, na, tokens.size());
    x = ops::layer_norm(x, lnf_g_, lnf_b_);
    return cfg_.tie_embeddings ? ops::matmul_nt(x, tok_emb_) : ops::matmul_nt(x, lm_head_);
  }

  /// Editor forward: logits over the text positions only, attention mode
  /// from the config.
  Tensor<T> forward(const Tensor<T>& frames, std::span<const TokenId> text, RunOptions opt = {}) const {
    opt.causal = !cfg_.bidirectional;
    return run(project(frames, opt), text, opt);
  }

  /// The unadapted causal language model: LoRA off, causal mask, no frames.
  Tensor<T> base_mode_forward(std::span<const TokenId> prefix, std::size_t pos_offset = 0) const {
    RunOptions opt;
    opt.causal = true;
    opt.lora = false;
    opt.pos_offset = pos_offset;
    return run(Tensor<T>(), prefix, opt);
  }

  /// Copies of all non-adapter, non-projector weights.
  std::vector<std::vector<T>> base_snapshot() const {
    std::vector<std::vector<T>> out;
    for (const auto& p : params_)
      if (p.name.starts_with("base.")) out.emplace_back(p.tensor.data().begin(), p.tensor.data().end());
    return out;
  }

  void save(Checkpoint& ck) const {
    for (auto& [k, v] : cfg_.to_kv()) ck.manifest[k] = v;
    for (const auto& p : params_) ck.put(p.name, p.tensor);
  }

  /// Loads every parameter present in the archive; with `only_base`, only
  /// names under "base.".
  void load(const Checkpoint& ck, bool only_base = false) {
    for (auto& p : params_) {
      if (only_base && !p.name.starts_with("base.")) continue;
      const auto& e = ck.entry(p.name);
      if (e.shape != p.tensor.shape()) {
        throw DimensionError("checkpoint entry " + p.name + " has shape " + shape_str(e.shape) + ", model expects " +
                             shape_str(p.tensor.shape()));
      }
      const auto vals = ck.get<T>(p.name);
      std::copy(vals.begin(), vals.end(), p.tensor.mutable_data().begin());
    }
  }

  static EditorConfig config_from(const Checkpoint& ck) {
    EditorConfig c;
    c.apply(ck.manifest);
    return c;
  }

 private:
  Tensor<T> add_param(const std::string& name, Shape shape, double stddev, const Rng& root, double fill = 0.0) {
    std::vector<T> v(shape_numel(shape), static_cast<T>(fill));
    if (stddev > 0.0) {
      Rng r = root.split(name);
      for (auto& x : v) x = static_cast<T>(stddev * r.normal());
    }
    Tensor<T> t(std::move(shape), std::move(v));
    params_.push_back({name, t});
    return t;
  }

  Dense dense(const std::string& base, const std::string& lora, std::size_t in, std::size_t out, double stddev,
              bool adapt, const Rng& root) {
    Dense d;
    d.w = add_param(base + ".weight", {in, out}, stddev, root);
    d.b = add_param(base + ".bias", {out}, 0.0, root);
    if (adapt && cfg_.lora_rank > 0) {
      d.lora_a = add_param(lora + ".lora_a", {in, cfg_.lora_rank}, 1.0 / std::sqrt(static_cast<double>(in)), root);
      d.lora_b = add_param(lora + ".lora_b", {cfg_.lora_rank, out}, 0.0, root);
    }
    return d;
  }

  void build(std::uint64_t seed) {
    const Rng root = Rng(seed).split("init");
    const std::size_t d = cfg_.d_model;
    const double w_std = 1.0 / std::sqrt(static_cast<double>(d));
    const double out_std = w_std / std::sqrt(2.0 * static_cast<double>(cfg_.layers));
    tok_emb_ = add_param("base.tok_emb", {cfg_.vocab_size, d}, cfg_.embedding_std, root);
    // learned, initialized sinusoidally so a fixed position shift is a
    // linear map the attention can pick up
    pos_emb_ = add_param("base.pos_emb", {cfg_.max_positions, d}, 0.0, root);
    {
      auto pd = pos_emb_.mutable_data();
      for (std::size_t p = 0; p < cfg_.max_positions; ++p)
        for (std::size_t i = 0; i + 1 < d; i += 2) {
          const double f = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(d));
          pd[p * d + i] = static_cast<T>(cfg_.embedding_std * std::sin(static_cast<double>(p) * f));
          pd[p * d + i + 1] = static_cast<T>(cfg_.embedding_std * std::cos(static_cast<double>(p) * f));
        }
    }
    for (std::size_t l = 0; l < cfg_.layers; ++l) {
      const std::string b = "base.layer" + std::to_string(l), e = "editor.layer" + std::to_string(l);
      const bool att = cfg_.lora_targets.attention, mlp = cfg_.lora_targets.mlp;
      Block blk;
      blk.ln1_g = add_param(b + ".ln1.gain", {d}, 0.0, root, 1.0);
      blk.ln1_b = add_param(b + ".ln1.bias", {d}, 0.0, root);
      blk.q = dense(b + ".attn.q", e + ".attn.q", d, d, w_std, att, root);
      blk.k = dense(b + ".attn.k", e + ".attn.k", d, d, w_std, att, root);
      blk.v = dense(b + ".attn.v", e + ".attn.v", d, d, w_std, att, root);
      blk.o = dense(b + ".attn.o", e + ".attn.o", d, d, out_std, att, root);
      blk.ln2_g = add_param(b + ".ln2.gain", {d}, 0.0, root, 1.0);
      blk.ln2_b = add_param(b + ".ln2.bias", {d}, 0.0, root);
      blk.up = dense(b + ".mlp.up", e + ".mlp.up", d, cfg_.d_ff, w_std, mlp, root);
      blk.down = dense(b + ".mlp.down", e + ".mlp.down", cfg_.d_ff, d,
                       out_std * std::sqrt(static_cast<double>(d) / static_cast<double>(cfg_.d_ff)), mlp, root);
      blocks_.push_back(std::move(blk));
    }
    lnf_g_ = add_param("base.ln_f.gain", {d}, 0.0, root, 1.0);
    lnf_b_ = add_param("base.ln_f.bias", {d}, 0.0, root);
    if (!cfg_.tie_embeddings) lm_head_ = add_param("base.lm_head", {cfg_.vocab_size, d}, w_std, root);
    proj_w_ = add_param("editor.proj.weight", {cfg_.d_frame, d}, 1.0 / std::sqrt(static_cast<double>(cfg_.d_frame)),
                        root);
    proj_b_ = add_param("editor.proj.bias", {d}, 0.0, root);
  }

  EditorConfig cfg_;
  std::vector<Parameter<T>> params_;
  Tensor<T> tok_emb_, pos_emb_, lnf_g_, lnf_b_, lm_head_, proj_w_, proj_b_;
  std::vector<Block> blocks_;
  bool lora_enabled_ = true;
  Trainable trainable_;
  std::unique_ptr<std::atomic<std::uint64_t>> calls_;
};

}  // namespace nle::editor

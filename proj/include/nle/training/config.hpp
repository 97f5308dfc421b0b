// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "nle/editor/config.hpp"
#include "nle/editor/editor.hpp"
#include "nle/kv.hpp"
#include "nle/numerics/rng.hpp"

namespace nle::training {

enum class Objective { editor, ar, copy_only };

inline std::string to_string(Objective o) {
  switch (o) {
    case Objective::editor: return "editor";
    case Objective::ar: return "ar";
    case Objective::copy_only: return "copy_only";
  }
  return "?";
}

inline Objective objective_from_string(const std::string& s) {
  if (s == "editor") return Objective::editor;
  if (s == "ar") return Objective::ar;
  if (s == "copy_only") return Objective::copy_only;
  throw ConfigError("unknown objective '" + s + "'");
}

struct Ablations {
  bool no_cr = false;
  bool no_bidirect = false;
  bool end_padding = false;
  bool no_audio_emb = false;
  bool no_ctc_hyp = false;
  bool no_lora = false;

  bool any() const { return no_cr || no_bidirect || end_padding || no_audio_emb || no_ctc_hyp || no_lora; }

  /// "full" or the '+'-joined flag names.
  std::string name() const {
    std::string s;
    auto add = [&](bool on, const char* n) {
      if (!on) return;
      if (!s.empty()) s += "+";
      s += n;
    };
    add(no_cr, "NoCR");
    add(no_bidirect, "NoBidirect");
    add(end_padding, "EndPadding");
    add(no_audio_emb, "NoAudioEmb");
    add(no_ctc_hyp, "NoCTCHyp");
    add(no_lora, "NoLoRA");
    return s.empty() ? "full" : s;
  }
};

struct TrainConfig {
  Objective objective = Objective::editor;
  std::size_t steps = 5000;
  std::size_t batch_size = 16;
  double peak_lr = 3e-3;
  double warmup_frac = 0.05;
  double min_lr_frac = 0.01;
  double weight_decay = 0.0;
  double lambda_cr = 0.02;
  std::uint64_t seed = 7;
  Ablations ablations;
  std::size_t density = 1;
  std::size_t min_content = 8;
  std::size_t eval_every = 500;
  std::size_t checkpoint_every = 500;
  std::size_t valid_max = 400;  // validation subset size; 0 = whole split

  // causal-LM pretraining of the frozen base
  std::size_t base_steps = 1000;
  double base_lr = 2e-3;
  std::string base_checkpoint;  // reuse instead of pretraining

  std::size_t halt_after = 0;  // stop after this step, as if interrupted
  bool resume = false;

  editor::EditorConfig model;

  void validate() const {
    if (steps == 0) throw ConfigError("steps must be positive");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(peak_lr > 0.0)) throw ConfigError("peak_lr must be positive");
    if (!(warmup_frac >= 0.0 && warmup_frac < 1.0)) throw ConfigError("warmup_frac must lie in [0, 1)");
    if (!(min_lr_frac >= 0.0 && min_lr_frac <= 1.0)) throw ConfigError("min_lr_frac must lie in [0, 1]");
    if (lambda_cr < 0.0) throw ConfigError("lambda_cr must be non-negative");
    if (density == 0) throw ConfigError("density must be positive");
    if (eval_every == 0) throw ConfigError("eval_every must be positive");
    model.validate();
  }

  /// The model configuration with ablations applied.
  editor::EditorConfig effective_model() const {
    auto m = model;
    if (objective == Objective::ar || ablations.no_bidirect) m.bidirectional = false;
    return m;
  }

  editor::LayoutOptions layout() const {
    editor::LayoutOptions l;
    l.density = density;
    l.min_content = min_content;
    if (ablations.end_padding) l.layout = editor::Layout::end_padding;
    if (ablations.no_ctc_hyp) l.layout = editor::Layout::blanks;
    return l;
  }

  editor::LossOptions loss_options() const {
    editor::LossOptions o;
    o.lambda = ablations.no_cr ? 0.0 : lambda_cr;
    o.zero_acoustic = ablations.no_audio_emb;
    if (objective == Objective::copy_only) {
      o.lambda = 1.0;
      o.use_ctc = false;
    }
    return o;
  }

  kv::Map to_kv() const {
    kv::Map m = model.to_kv();
    m["train.objective"] = to_string(objective);
    m["train.steps"] = kv::str(steps);
    m["train.batch_size"] = kv::str(batch_size);
    m["train.peak_lr"] = kv::str(peak_lr);
    m["train.warmup_frac"] = kv::str(warmup_frac);
    m["train.min_lr_frac"] = kv::str(min_lr_frac);
    m["train.weight_decay"] = kv::str(weight_decay);
    m["train.lambda_cr"] = kv::str(lambda_cr);
    m["train.seed"] = kv::str(seed);
    m["train.no_cr"] = kv::str(ablations.no_cr);
    m["train.no_bidirect"] = kv::str(ablations.no_bidirect);
    m["train.end_padding"] = kv::str(ablations.end_padding);
    m["train.no_audio_emb"] = kv::str(ablations.no_audio_emb);
    m["train.no_ctc_hyp"] = kv::str(ablations.no_ctc_hyp);
    m["train.no_lora"] = kv::str(ablations.no_lora);
    m["train.density"] = kv::str(density);
    m["train.min_content"] = kv::str(min_content);
    m["train.eval_every"] = kv::str(eval_every);
    m["train.checkpoint_every"] = kv::str(checkpoint_every);
    m["train.valid_max"] = kv::str(valid_max);
    m["train.base_steps"] = kv::str(base_steps);
    m["train.base_lr"] = kv::str(base_lr);
    return m;
  }

  void apply(const kv::Map& m) {
    model.apply(m);
    std::string obj = to_string(objective);
    kv::read(m, "train.objective", obj);
    objective = objective_from_string(obj);
    kv::read(m, "train.steps", steps);
    kv::read(m, "train.batch_size", batch_size);
    kv::read(m, "train.peak_lr", peak_lr);
    kv::read(m, "train.warmup_frac", warmup_frac);
    kv::read(m, "train.min_lr_frac", min_lr_frac);
    kv::read(m, "train.weight_decay", weight_decay);
    kv::read(m, "train.lambda_cr", lambda_cr);
    kv::read(m, "train.seed", seed);
    kv::read(m, "train.no_cr", ablations.no_cr);
    kv::read(m, "train.no_bidirect", ablations.no_bidirect);
    kv::read(m, "train.end_padding", ablations.end_padding);
    kv::read(m, "train.no_audio_emb", ablations.no_audio_emb);
    kv::read(m, "train.no_ctc_hyp", ablations.no_ctc_hyp);
    kv::read(m, "train.no_lora", ablations.no_lora);
    kv::read(m, "train.density", density);
    kv::read(m, "train.min_content", min_content);
    kv::read(m, "train.eval_every", eval_every);
    kv::read(m, "train.checkpoint_every", checkpoint_every);
    kv::read(m, "train.valid_max", valid_max);
    kv::read(m, "train.base_steps", base_steps);
    kv::read(m, "train.base_lr", base_lr);
  }

  /// Hash of everything that shapes the optimisation trajectory.
  std::uint64_t hash() const { return stable_hash(kv::serialize(to_kv())); }
};

}  // namespace nle::training

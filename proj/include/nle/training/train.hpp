// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "nle/baselines/baselines.hpp"
#include "nle/corpus/corpus.hpp"
#include "nle/editor/editor.hpp"
#include "nle/numerics/checkpoint.hpp"
#include "nle/numerics/optim.hpp"
#include "nle/training/config.hpp"
#include "nle/version.hpp"

namespace nle::training {

/// Materialises model inputs for corpus utterances on demand.
template <typename T>
class Data {
 public:
  Data(const corpus::Corpus& c, const TrainConfig& cfg) : corpus_(&c), layout_(cfg.layout()) {}

  const corpus::Corpus& corpus() const noexcept { return *corpus_; }

  Tensor<T> frames(std::size_t i) const {
    const auto& u = corpus_->utterances()[i];
    return corpus::render_frames<T>(u.reference_tokens(), corpus_->spec().frames, u.seed);
  }

  editor::Example<T> example(std::size_t i) const {
    const auto& u = corpus_->utterances()[i];
    return {frames(i), editor::text_input(u.hypothesis_tokens(), layout_), u.reference_tokens()};
  }

  baselines::ARExample<T> ar_example(std::size_t i) const {
    return {frames(i), corpus_->utterances()[i].reference_tokens()};
  }

 private:
  const corpus::Corpus* corpus_;
  editor::LayoutOptions layout_;
};

/// Batch composition depends only on (seed, label, step).
inline std::vector<std::size_t> batch_indices(const std::vector<std::size_t>& pool, std::size_t batch,
                                              std::uint64_t seed, std::string_view label, std::size_t step) {
  if (pool.empty()) throw ConfigError("training split is empty");
  Rng r = Rng(seed).split(label).split(static_cast<std::uint64_t>(step));
  std::vector<std::size_t> out(batch);
  for (auto& i : out) i = pool[r.below(pool.size())];
  return out;
}

inline std::vector<std::size_t> valid_indices(const corpus::Corpus& c, std::size_t max) {
  auto v = c.indices(corpus::Split::valid);
  if (max > 0 && v.size() > max) v.resize(max);
  return v;
}

struct LossStats {
  double total = 0.0, ctc = 0.0, cr = 0.0;
  std::size_t used = 0, skipped = 0;
};

/// Sums per-utterance loss terms; with `backward`, also accumulates the
/// gradient of the batch mean.
template <typename T>
LossStats batch_loss(const editor::EditorModel<T>& m, const TrainConfig& cfg, const Data<T>& data,
                     std::span<const std::size_t> idx, bool backward, Rng* dropout_rng = nullptr) {
  LossStats s;
  const auto lo = cfg.loss_options();
  editor::RunOptions run;
  run.training = backward;
  run.dropout_rng = dropout_rng;
  run.zero_acoustic = lo.zero_acoustic;
  if (cfg.objective == Objective::ar) {
    std::vector<baselines::ARExample<T>> ex;
    for (auto i : idx) {
      auto e = data.ar_example(i);
      if (baselines::ar_positions(m, e.frames, e.reference) > m.config().max_positions) {
        ++s.skipped;
        continue;
      }
      ex.push_back(std::move(e));
    }
    s.used = ex.size();
    for (const auto& e : ex) {
      const auto t = baselines::ar_targets(m.config().acoustic_positions(e.frames.dim(0)), e.reference);
      const auto l = baselines::ar_loss(m, e.frames, e.reference, std::span<const int>(t), run);
      s.total += static_cast<double>(l.item());
      if (backward) ops::scale(l, static_cast<T>(1.0 / static_cast<double>(s.used))).backward();
    }
  } else {
    std::vector<editor::Example<T>> ex;
    for (auto i : idx) {
      auto e = data.example(i);
      if (editor::unusable(m, e, lo)) {
        ++s.skipped;
        continue;
      }
      ex.push_back(std::move(e));
    }
    s.used = ex.size();
    for (const auto& e : ex) {
      auto u = editor::utterance_loss(m, e, lo, run);
      s.total += static_cast<double>(u.total.item());
      s.ctc += u.ctc;
      s.cr += u.cr;
      if (backward) ops::scale(u.total, static_cast<T>(1.0 / static_cast<double>(s.used))).backward();
    }
  }
  if (s.used > 0) {
    const double inv = 1.0 / static_cast<double>(s.used);
    s.total *= inv;
    s.ctc *= inv;
    s.cr *= inv;
  }
  return s;
}

template <typename T>
LossStats validation_loss(const editor::EditorModel<T>& m, const TrainConfig& cfg, const Data<T>& data,
                          const std::vector<std::size_t>& idx) {
  NoGradGuard ng;
  return batch_loss(m, cfg, data, idx, false);
}

namespace detail {

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir, ec.message());
}

inline std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline std::string fmt(double v) { return std::isfinite(v) ? kv::str(v) : (std::isnan(v) ? "nan" : "inf"); }

}  // namespace detail

/// Full training state: weights, optimizer moments and loop bookkeeping.
template <typename T>
void save_state(const std::string& path, const editor::EditorModel<T>& m, const AdamW<T>& opt,
                const TrainConfig& cfg, const kv::Map& extra) {
  Checkpoint ck;
  m.save(ck);
  // the run config (pre-ablation model fields) takes precedence over the
  // model's effective config
  for (auto& [k, v] : cfg.to_kv()) ck.manifest[k] = v;
  for (auto& [k, v] : extra) ck.manifest[k] = v;
  ck.manifest["code.version"] = kVersion;
  ck.manifest["config.hash"] = kv::str(cfg.hash());
  ck.manifest["adam.steps"] = kv::str(opt.steps_taken());
  for (const auto& [name, mo] : opt.moments()) {
    ck.put<T>("adam.m." + name, {mo.m.size()}, mo.m);
    ck.put<T>("adam.v." + name, {mo.v.size()}, mo.v);
  }
  ck.save(path);
}

template <typename T>
void restore_optimizer(const Checkpoint& ck, AdamW<T>& opt) {
  std::size_t steps = 0;
  kv::read(ck.manifest, "adam.steps", steps);
  opt.set_steps_taken(steps);
  opt.moments().clear();
  for (const auto& e : ck.entries()) {
    if (!e.name.starts_with("adam.m.")) continue;
    const std::string name = e.name.substr(7);
    auto& mo = opt.moments()[name];
    mo.m = ck.get<T>(e.name);
    mo.v = ck.get<T>("adam.v." + name);
  }
}

/// A model and its training configuration, restored from a checkpoint.
template <typename T>
struct Trained {
  editor::EditorModel<T> model;
  TrainConfig config;
};

template <typename T>
Trained<T> load_trained(const std::string& path) {
  const auto ck = Checkpoint::load(path);
  TrainConfig cfg;
  cfg.apply(ck.manifest);
  editor::EditorModel<T> m(cfg.effective_model(), cfg.seed);
  m.load(ck);
  m.set_lora_enabled(!cfg.ablations.no_lora);
  return {std::move(m), cfg};
}

/// Causal next-token pretraining of the base weights (LoRA off, projector
/// unused). Positions are offset at random so every positional embedding
/// the editor will use receives training.
template <typename T>
void pretrain_base(editor::EditorModel<T>& m, const TrainConfig& cfg, const corpus::Corpus& c,
                   const std::string& out_dir, std::ostream* log) {
  const auto saved = m.trainable();
  const bool saved_lora = m.lora_enabled();
  m.set_trainable({true, false, false});
  m.set_lora_enabled(false);
  AdamW<T> opt;
  std::ofstream csv;
  if (!out_dir.empty()) {
    csv.open(detail::path_in(out_dir, "base_metrics.csv"), std::ios::trunc);
    csv << "step,lr,loss\n";
  }
  const auto& pool = c.indices(corpus::Split::train);
  const std::size_t P = m.config().max_positions;
  for (std::size_t step = 1; step <= cfg.base_steps; ++step) {
    Rng r = Rng(cfg.seed).split("base-offset").split(static_cast<std::uint64_t>(step));
    std::vector<std::pair<Tokens, std::vector<int>>> seqs;
    for (auto i : batch_indices(pool, cfg.batch_size, cfg.seed, "base-batch", step)) {
      Tokens seq = baselines::ar_input(c.utterances()[i].reference_tokens());
      seq.push_back(Vocab::eos);
      if (seq.size() - 1 > P) continue;
      Tokens in(seq.begin(), seq.end() - 1);
      seqs.emplace_back(std::move(in), std::vector<int>(seq.begin() + 1, seq.end()));
    }
    double total = 0.0;
    for (const auto& [in, tg] : seqs) {
      const std::size_t off = r.below(P - in.size() + 1);
      const auto l = ops::cross_entropy(m.base_mode_forward(in, off), tg);
      total += static_cast<double>(l.item());
      ops::scale(l, static_cast<T>(1.0 / static_cast<double>(seqs.size()))).backward();
    }
    total /= static_cast<double>(std::max<std::size_t>(1, seqs.size()));
    if (!std::isfinite(total)) throw NumericError("non-finite base pretraining loss at step " + std::to_string(step), "");
    const double lr = cosine_lr(step, cfg.base_steps, cfg.base_lr, cfg.warmup_frac, cfg.min_lr_frac);
    opt.step(m.parameters(), lr);
    if (csv.is_open()) csv << step << "," << detail::fmt(lr) << "," << detail::fmt(total) << "\n";
    if (log && (step % 250 == 0 || step == cfg.base_steps)) {
      *log << "base step " << step << "/" << cfg.base_steps << " loss " << total << "\n" << std::flush;
    }
  }
  m.set_trainable(saved);
  m.set_lora_enabled(saved_lora);
}

struct TrainResult {
  std::size_t steps_done = 0;
  bool halted = false;
  double final_valid_total = std::numeric_limits<double>::quiet_NaN();
  double final_valid_ctc = std::numeric_limits<double>::quiet_NaN();
  double final_valid_cr = std::numeric_limits<double>::quiet_NaN();
  double final_train_total = std::numeric_limits<double>::quiet_NaN();
  double best_valid = std::numeric_limits<double>::infinity();
  std::size_t best_step = 0;
  std::size_t skipped = 0;
  std::string out_dir;
  std::string base_checkpoint;
  double seconds = 0.0;
};

/// Deterministic training run. Writes metrics.csv, base.ckpt (unless a base
/// is supplied), best.ckpt, last.ckpt and manifest.txt under out_dir.
template <typename T>
TrainResult train(TrainConfig cfg, const corpus::Corpus& c, const std::string& out_dir, std::ostream* log = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.model.d_frame = c.spec().frames.dim();
  cfg.validate();
  detail::ensure_dir(out_dir);
  const Data<T> data(c, cfg);
  const auto& pool = c.indices(corpus::Split::train);
  const auto vidx = valid_indices(c, cfg.valid_max);

  editor::EditorModel<T> m(cfg.effective_model(), cfg.seed);
  TrainResult res;
  res.out_dir = out_dir;
  const std::string last_path = detail::path_in(out_dir, "last.ckpt");
  const std::string best_path = detail::path_in(out_dir, "best.ckpt");
  const std::string csv_path = detail::path_in(out_dir, "metrics.csv");

  std::size_t start = 0;
  AdamW<T> opt(AdamWHyper{0.9, 0.999, 1e-8, cfg.weight_decay});
  if (cfg.resume) {
    const auto ck = Checkpoint::load(last_path);
    TrainConfig saved;
    saved.apply(ck.manifest);
    saved.resume = cfg.resume;
    saved.halt_after = cfg.halt_after;
    saved.base_checkpoint = cfg.base_checkpoint;
    saved.model.d_frame = cfg.model.d_frame;
    if (saved.hash() != cfg.hash()) throw ConfigError("resume: configuration differs from " + last_path);
    m.load(ck);
    restore_optimizer(ck, opt);
    kv::read(ck.manifest, "train.step", start);
    kv::read(ck.manifest, "train.best_valid", res.best_valid);
    kv::read(ck.manifest, "train.best_step", res.best_step);
    kv::read(ck.manifest, "train.skipped", res.skipped);
    kv::read(ck.manifest, "base.checkpoint", res.base_checkpoint);
    // keep the log rows up to the checkpointed step
    std::ifstream in(csv_path);
    std::string line, kept;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line.starts_with("step")) {
        kept += line + "\n";
        continue;
      }
      if (std::stoull(line.substr(0, line.find(','))) <= start) kept += line + "\n";
    }
    in.close();
    std::ofstream(csv_path, std::ios::trunc) << kept;
  } else {
    if (!cfg.base_checkpoint.empty()) {
      m.load(Checkpoint::load(cfg.base_checkpoint), true);
      res.base_checkpoint = cfg.base_checkpoint;
    } else if (cfg.objective != Objective::copy_only && cfg.base_steps > 0) {
      pretrain_base(m, cfg, c, out_dir, log);
      Checkpoint ck;
      m.save(ck);
      ck.manifest["code.version"] = kVersion;
      res.base_checkpoint = detail::path_in(out_dir, "base.ckpt");
      ck.save(res.base_checkpoint);
    }
    std::ofstream(csv_path, std::ios::trunc) << "step,lr,total,ctc,cr,valid_total\n";
  }

  m.set_lora_enabled(!cfg.ablations.no_lora);
  m.set_trainable({false, !cfg.ablations.no_lora, true});

  auto extra = [&](std::size_t step) {
    return kv::Map{{"train.step", kv::str(step)},
                   {"train.best_valid", detail::fmt(res.best_valid)},
                   {"train.best_step", kv::str(res.best_step)},
                   {"train.skipped", kv::str(res.skipped)},
                   {"base.checkpoint", res.base_checkpoint},
                   {"corpus.fingerprint", kv::str(c.fingerprint())}};
  };

  std::ofstream csv(csv_path, std::ios::app);
  bool have_last = cfg.resume;
  for (std::size_t step = start + 1; step <= cfg.steps; ++step) {
    const auto idx = batch_indices(pool, cfg.batch_size, cfg.seed, "batch", step);
    Rng drop = Rng(cfg.seed).split("dropout").split(static_cast<std::uint64_t>(step));
    const auto s = batch_loss(m, cfg, data, idx, true, &drop);
    res.skipped += s.skipped;
    if (!std::isfinite(s.total)) {
      throw NumericError("non-finite training loss at step " + std::to_string(step), have_last ? last_path : "");
    }
    const double lr = cosine_lr(step, cfg.steps, cfg.peak_lr, cfg.warmup_frac, cfg.min_lr_frac);
    opt.step(m.parameters(), lr);
    res.final_train_total = s.total;

    std::string valid_field;
    if (step % cfg.eval_every == 0 || step == cfg.steps) {
      const auto v = validation_loss(m, cfg, data, vidx);
      if (!std::isfinite(v.total)) {
        throw NumericError("non-finite validation loss at step " + std::to_string(step), have_last ? last_path : "");
      }
      res.final_valid_total = v.total;
      res.final_valid_ctc = v.ctc;
      res.final_valid_cr = v.cr;
      valid_field = detail::fmt(v.total);
      if (v.total < res.best_valid) {
        res.best_valid = v.total;
        res.best_step = step;
        save_state(best_path, m, opt, cfg, extra(step));
      }
      if (log) {
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        *log << to_string(cfg.objective) << "[" << cfg.ablations.name() << "] step " << step << "/" << cfg.steps
             << " lr " << lr << " train " << s.total << " valid " << v.total << " (ctc " << v.ctc << ") "
             << static_cast<int>(sec) << "s\n"
             << std::flush;
      }
    }
    csv << step << "," << detail::fmt(lr) << "," << detail::fmt(s.total) << "," << detail::fmt(s.ctc) << ","
        << detail::fmt(s.cr) << "," << valid_field << "\n"
        << std::flush;

    const bool halt = cfg.halt_after > 0 && step == cfg.halt_after && step < cfg.steps;
    if (step % cfg.checkpoint_every == 0 || step == cfg.steps || halt) {
      save_state(last_path, m, opt, cfg, extra(step));
      have_last = true;
    }
    res.steps_done = step;
    if (halt) {
      res.halted = true;
      break;
    }
  }

  if (!res.halted) {
    kv::Map man = cfg.to_kv();
    for (auto& [k, v] : extra(res.steps_done)) man[k] = v;
    man["code.version"] = kVersion;
    man["config.hash"] = kv::str(cfg.hash());
    man["result.final_valid_total"] = detail::fmt(res.final_valid_total);
    man["result.final_valid_ctc"] = detail::fmt(res.final_valid_ctc);
    man["result.final_valid_cr"] = detail::fmt(res.final_valid_cr);
    man["result.trainable_parameters"] = kv::str(m.num_parameters(true));
    man["result.parameters"] = kv::str(m.num_parameters());
    std::ofstream(detail::path_in(out_dir, "manifest.txt"), std::ios::trunc) << kv::serialize(man);
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

struct AblationRow {
  std::string variant;
  double valid_total = 0.0;
  double valid_ctc = 0.0;
  double best_valid = 0.0;
};

inline std::vector<Ablations> ablation_variants() {
  std::vector<Ablations> v(7);
  v[1].no_cr = true;
  v[2].no_bidirect = true;
  v[3].end_padding = true;
  v[4].no_audio_emb = true;
  v[5].no_ctc_hyp = true;
  v[6].no_lora = true;
  return v;
}

/// Trains the full model and the six single-flag ablations from one shared
/// base and seed. Writes ablations.csv under out_dir.
template <typename T>
std::vector<AblationRow> ablation_suite(TrainConfig base_cfg, const corpus::Corpus& c, const std::string& out_dir,
                                        std::ostream* log = nullptr) {
  detail::ensure_dir(out_dir);
  base_cfg.ablations = {};
  base_cfg.objective = Objective::editor;
  if (base_cfg.base_checkpoint.empty()) {
    base_cfg.model.d_frame = c.spec().frames.dim();
    editor::EditorModel<T> m(base_cfg.effective_model(), base_cfg.seed);
    const std::string dir = detail::path_in(out_dir, "base");
    detail::ensure_dir(dir);
    pretrain_base(m, base_cfg, c, dir, log);
    Checkpoint ck;
    m.save(ck);
    ck.manifest["code.version"] = kVersion;
    base_cfg.base_checkpoint = detail::path_in(dir, "base.ckpt");
    ck.save(base_cfg.base_checkpoint);
  }
  std::vector<AblationRow> rows;
  for (const auto& a : ablation_variants()) {
    TrainConfig cfg = base_cfg;
    cfg.ablations = a;
    const auto r = train<T>(cfg, c, detail::path_in(out_dir, a.name()), log);
    rows.push_back({a.name(), r.final_valid_total, r.final_valid_ctc, r.best_valid});
  }
  std::ofstream f(detail::path_in(out_dir, "ablations.csv"), std::ios::trunc);
  f << "variant,valid_total,valid_ctc,best_valid\n";
  for (const auto& r : rows) {
    f << r.variant << "," << detail::fmt(r.valid_total) << "," << detail::fmt(r.valid_ctc) << ","
      << detail::fmt(r.best_valid) << "\n";
  }
  return rows;
}

}  // namespace nle::training

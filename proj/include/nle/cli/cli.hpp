// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nle/baselines/baselines.hpp"
#include "nle/corpus/corpus.hpp"
#include "nle/eval/eval.hpp"
#include "nle/kv.hpp"
#include "nle/selftest.hpp"
#include "nle/training/train.hpp"
#include "nle/version.hpp"

namespace nle::cli {

inline constexpr const char* kProgram = "nle-desk";

/// Every flag of every subcommand. Options bind into this struct; whether a
/// flag was given is read back from the parser.
struct Flags {
  std::string config;
  std::uint64_t seed = 7;
  std::string out;
  std::string corpus;
  std::string checkpoint;
  std::string ar_checkpoint;
  std::string base_checkpoint;
  std::string objective = "editor";
  std::string system;
  std::string split = "test";
  std::size_t density = 1;
  std::vector<std::size_t> densities{1, 2, 3};
  std::size_t steps = 0;
  std::size_t workers = 1;
  std::size_t limit = 0;
  std::size_t batch = 16;
  double lr = 3e-3;
  std::size_t base_steps = 1000;
  std::size_t halt_after = 0;
  bool resume = false;

  // gen
  std::size_t n = 20000;
  double sub = 0.10, del = 0.05, ins = 0.05;
  std::size_t min_words = 2, max_words = 5;

  training::Ablations ablations;
};

namespace detail {

inline void add_common(CLI::App* c, Flags& f) {
  c->add_option("--seed", f.seed, "Seed for every random draw (default 7)");
  c->add_option("--out", f.out, "Output directory");
}

inline void add_corpus(CLI::App* c, Flags& f) {
  c->add_option("--corpus", f.corpus, "Corpus file written by gen")->required();
}

inline void add_training(CLI::App* c, Flags& f) {
  c->add_option("--config", f.config, "key=value file with train.* and model.* settings; flags override it");
  c->add_option("--batch", f.batch, "Utterances per optimizer step (default 16)");
  c->add_option("--lr", f.lr, "Peak learning rate (default 3e-3)");
  c->add_option("--base-steps", f.base_steps, "Causal-LM pretraining steps for the frozen base (default 1000)");
  c->add_option("--base-checkpoint", f.base_checkpoint, "Reuse a pretrained base instead of pretraining");
}

inline void add_ablations(CLI::App* c, Flags& f) {
  c->add_flag("--no-cr,--NoCR", f.ablations.no_cr, "Drop the copying regularizer (lambda = 0)");
  c->add_flag("--no-bidirect,--NoBidirect", f.ablations.no_bidirect, "Keep the causal attention mask");
  c->add_flag("--end-padding,--EndPadding", f.ablations.end_padding,
              "Append all insertion slots after the hypothesis instead of interleaving");
  c->add_flag("--no-audio-emb,--NoAudioEmb", f.ablations.no_audio_emb, "Zero the projected acoustic embeddings");
  c->add_flag("--no-ctc-hyp,--NoCTCHyp", f.ablations.no_ctc_hyp, "Replace the hypothesis tokens with blanks");
  c->add_flag("--no-lora,--NoLoRA", f.ablations.no_lora, "Train the projector only; adapters stay off");
}

inline std::unique_ptr<CLI::App> make_app(Flags& f) {
  auto app = std::make_unique<CLI::App>("Non-autoregressive transcript editing with CTC over insertion slots.", kProgram);
  app->require_subcommand(1);
  app->fallthrough(false);
  app->set_version_flag("--version", std::string(kVersion));

  auto* gen = app->add_subcommand("gen", "Generate a synthetic noisy-channel corpus");
  gen->add_option("--n", f.n, "Number of utterances (default 20000)");
  gen->add_option("--sub", f.sub, "Substitution rate per reference symbol (default 0.10)");
  gen->add_option("--del", f.del, "Deletion rate per reference symbol (default 0.05)");
  gen->add_option("--ins", f.ins, "Insertion rate per reference symbol (default 0.05)");
  gen->add_option("--min-words", f.min_words, "Fewest words per utterance (default 2)");
  gen->add_option("--max-words", f.max_words, "Most words per utterance (default 5)");
  add_common(gen, f);
  gen->get_option("--out")->required();

  auto* train = app->add_subcommand("train", "Train the editor, the AR baseline or a copy-only model");
  add_corpus(train, f);
  add_common(train, f);
  train->get_option("--out")->required();
  add_training(train, f);
  train->add_option("--steps", f.steps, "Optimizer steps (default 5000)");
  train->add_option("--density", f.density, "One insertion slot per K hypothesis tokens (default 1)");
  train->add_option("--objective", f.objective, "editor | ar | copy_only (default editor)");
  train->add_option("--halt-after", f.halt_after, "Stop after this step, leaving a resumable checkpoint");
  train->add_flag("--resume", f.resume, "Continue from <out>/last.ckpt");
  add_ablations(train, f);

  auto* ev = app->add_subcommand("eval", "Score a system on a corpus split (WER, CER, ins/del/sub rates)");
  add_corpus(ev, f);
  add_common(ev, f);
  ev->add_option("--checkpoint", f.checkpoint, "Trained model; omit to score the passthrough hypothesis");
  ev->add_option("--system", f.system, "passthrough | editor | ar (default: from the checkpoint)");
  ev->add_option("--split", f.split, "train | valid | test (default test)");
  ev->add_option("--steps", f.steps, "Editor refinement passes (default 1)");
  ev->add_option("--density", f.density, "Insertion-slot density (default: from the checkpoint)");
  ev->add_option("--limit", f.limit, "Score only the first N utterances of the split (0 = all)");
  ev->add_option("--workers", f.workers, "Parallel decoding threads (default 1)");
  add_ablations(ev, f);

  auto* ab = app->add_subcommand("ablate", "Train the full model and the six single-flag ablations");
  add_corpus(ab, f);
  add_common(ab, f);
  ab->get_option("--out")->required();
  add_training(ab, f);
  ab->add_option("--steps", f.steps, "Optimizer steps per variant (default 5000)");

  auto* ds = app->add_subcommand("density-sweep", "Train and score one editor per insertion-slot density");
  add_corpus(ds, f);
  add_common(ds, f);
  ds->get_option("--out")->required();
  add_training(ds, f);
  ds->add_option("--density", f.densities, "Comma-separated densities (default 1,2,3)")->delimiter(',');
  ds->add_option("--steps", f.steps, "Optimizer steps per density (default 5000)");
  ds->add_option("--limit", f.limit, "Score only the first N test utterances (0 = all)");
  ds->add_option("--workers", f.workers, "Parallel decoding threads (default 1)");

  auto* ms = app->add_subcommand("multistep-sweep", "Score 0..S refinement passes of a trained editor");
  add_corpus(ms, f);
  add_common(ms, f);
  ms->add_option("--checkpoint", f.checkpoint, "Trained editor")->required();
  ms->add_option("--steps", f.steps, "Largest number of passes (default 3)");
  ms->add_option("--limit", f.limit, "Score only the first N test utterances (0 = all)");
  ms->add_option("--workers", f.workers, "Parallel decoding threads (default 1)");

  auto* bench = app->add_subcommand("bench", "Forward calls and wall time: editor versus AR decoding");
  add_corpus(bench, f);
  add_common(bench, f);
  bench->add_option("--checkpoint", f.checkpoint, "Trained editor")->required();
  bench->add_option("--ar-checkpoint", f.ar_checkpoint, "Trained AR baseline")->required();
  bench->add_option("--limit", f.limit, "Number of test utterances (default 200)");

  auto* show = app->add_subcommand("show-edits", "Print reference, hypothesis and edited output with error tags");
  add_corpus(show, f);
  show->add_option("--checkpoint", f.checkpoint, "Trained editor")->required();
  show->add_option("--split", f.split, "train | valid | test (default test)");
  show->add_option("--steps", f.steps, "Editor refinement passes (default 1)");
  show->add_option("--limit", f.limit, "Number of utterances (default 10)");

  app->add_subcommand("selftest", "Run the oracle and property checks; nonzero exit on failure");

  app->footer(
      "Environment:\n  NLE_DESK_PRECISION=f32|f64  floating point width of model math (default f32)\n\n"
      "Exit status: 0 success, 1 runtime error or failed invariant, 2 usage error.");
  return app;
}

inline bool given(const CLI::App& sub, const std::string& name) {
  const auto* o = sub.get_option_no_throw(name);
  return o != nullptr && o->count() > 0;
}

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

/// Training configuration: defaults, then --config, then explicit flags.
inline training::TrainConfig train_config(const Flags& f, const CLI::App& sub) {
  training::TrainConfig cfg;
  if (!f.config.empty()) cfg.apply(kv::load(f.config));
  if (given(sub, "--seed")) cfg.seed = f.seed;
  if (given(sub, "--steps")) cfg.steps = f.steps;
  if (given(sub, "--density")) cfg.density = f.density;
  if (given(sub, "--batch")) cfg.batch_size = f.batch;
  if (given(sub, "--lr")) cfg.peak_lr = f.lr;
  if (given(sub, "--base-steps")) cfg.base_steps = f.base_steps;
  if (given(sub, "--base-checkpoint")) cfg.base_checkpoint = f.base_checkpoint;
  if (given(sub, "--objective")) cfg.objective = training::objective_from_string(f.objective);
  if (given(sub, "--halt-after")) cfg.halt_after = f.halt_after;
  cfg.resume = f.resume;
  auto& a = cfg.ablations;
  a.no_cr = a.no_cr || f.ablations.no_cr;
  a.no_bidirect = a.no_bidirect || f.ablations.no_bidirect;
  a.end_padding = a.end_padding || f.ablations.end_padding;
  a.no_audio_emb = a.no_audio_emb || f.ablations.no_audio_emb;
  a.no_ctc_hyp = a.no_ctc_hyp || f.ablations.no_ctc_hyp;
  a.no_lora = a.no_lora || f.ablations.no_lora;
  return cfg;
}

inline std::vector<std::size_t> split_indices(const corpus::Corpus& c, const std::string& split, std::size_t limit) {
  auto idx = c.indices(corpus::split_from_string(split));
  if (limit > 0 && idx.size() > limit) idx.resize(limit);
  return idx;
}

inline std::ofstream open_out(const std::string& dir, const std::string& name) {
  training::detail::ensure_dir(dir);
  const auto path = training::detail::path_in(dir, name);
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError(path, "cannot open for writing");
  return f;
}

inline void write_report(const eval::EvalReport& r, const std::string& dir, const std::string& label) {
  auto csv = open_out(dir, "eval.csv");
  csv << "id,reference,hypothesis,output,ins,del,sub,char_errors,forward_calls,failed\n";
  for (const auto& u : r.records) {
    csv << u.id << "," << u.reference << "," << u.hypothesis << "," << u.output << "," << u.word.ins << ","
        << u.word.del << "," << u.word.sub << "," << u.char_errors << "," << u.forward_calls << ","
        << (u.failed ? 1 : 0) << "\n";
  }
  auto sum = open_out(dir, "summary.txt");
  sum << "system=" << label << "\nutterances=" << r.n_utts << "\nfailed=" << r.n_failed
      << "\nreference_words=" << r.n_ref_words << "\nwer=" << kv::str(r.wer) << "\nins_rate=" << kv::str(r.ins_rate)
      << "\ndel_rate=" << kv::str(r.del_rate) << "\nsub_rate=" << kv::str(r.sub_rate) << "\ncer=" << kv::str(r.cer)
      << "\nforward_calls_per_utt=" << kv::str(r.forward_calls_per_utt)
      << "\nidentity_holds=" << kv::str(r.identity_holds()) << "\n";
}

// Word-level tags. In the hypothesis line a word not matching the reference
// is [ERR:w]. In the edited line a matching word the hypothesis got wrong is
// [FIX:w], a non-matching word is [ERR:w], and a reference word the
// hypothesis had right but the edit lost is reported as [LOST:w].
inline std::string tag_hypothesis(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  const auto m = eval::align_matches(ref, hyp);
  std::string s;
  for (std::size_t j = 0; j < hyp.size(); ++j) {
    if (j) s += ' ';
    s += m[j] >= 0 ? hyp[j] : "[ERR:" + hyp[j] + "]";
  }
  return s;
}

inline std::string tag_edit(const std::vector<std::string>& ref, const std::vector<std::string>& hyp,
                            const std::vector<std::string>& out) {
  const auto mh = eval::align_matches(ref, hyp), mo = eval::align_matches(ref, out);
  std::vector<bool> hyp_ok(ref.size(), false), out_ok(ref.size(), false);
  for (auto i : mh)
    if (i >= 0) hyp_ok[static_cast<std::size_t>(i)] = true;
  for (auto i : mo)
    if (i >= 0) out_ok[static_cast<std::size_t>(i)] = true;
  std::string s;
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (j) s += ' ';
    if (mo[j] < 0) s += "[ERR:" + out[j] + "]";
    else if (!hyp_ok[static_cast<std::size_t>(mo[j])]) s += "[FIX:" + out[j] + "]";
    else s += out[j];
  }
  for (std::size_t i = 0; i < ref.size(); ++i)
    if (hyp_ok[i] && !out_ok[i]) s += (s.empty() ? "" : " ") + std::string("[LOST:") + ref[i] + "]";
  return s;
}

template <typename T>
int cmd_train(const Flags& f, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const auto c = corpus::Corpus::load(f.corpus);
  const auto cfg = train_config(f, sub);
  const auto r = training::train<T>(cfg, c, f.out, &err);
  out << "train: " << to_string(cfg.objective) << "[" << cfg.ablations.name() << "] " << r.steps_done << " steps"
      << (r.halted ? " (halted)" : "") << ", final valid " << fixed(r.final_valid_total) << ", best valid "
      << fixed(r.best_valid) << " at step " << r.best_step << ", skipped " << r.skipped << ", " << fixed(r.seconds, 1)
      << "s -> " << f.out << "\n";
  return 0;
}

template <typename T>
int cmd_eval(const Flags& f, const CLI::App& sub, std::ostream& out) {
  const auto c = corpus::Corpus::load(f.corpus);
  const auto idx = split_indices(c, f.split, f.limit);
  eval::EvalOptions<T> o;
  o.workers = f.workers;
  std::unique_ptr<training::Trained<T>> t;
  std::string label = "passthrough";
  if (!f.checkpoint.empty()) {
    t = std::make_unique<training::Trained<T>>(training::load_trained<T>(f.checkpoint));
    o.model = &t->model;
    o.system = t->config.objective == training::Objective::ar ? eval::System::ar : eval::System::editor;
    o.layout = t->config.layout();
    o.zero_acoustic = t->config.ablations.no_audio_emb;
  }
  if (given(sub, "--system")) {
    if (f.system == "passthrough") o.system = eval::System::passthrough;
    else if (f.system == "editor") o.system = eval::System::editor;
    else if (f.system == "ar") o.system = eval::System::ar;
    else throw ConfigError("unknown system '" + f.system + "'");
  }
  if (o.system != eval::System::passthrough && o.model == nullptr) throw ConfigError("--system " + f.system + " needs --checkpoint");
  if (o.system == eval::System::editor) label = "editor";
  if (o.system == eval::System::ar) label = "ar";
  if (given(sub, "--steps")) o.steps = f.steps;
  if (given(sub, "--density")) o.layout.density = f.density;
  if (f.ablations.no_audio_emb) o.zero_acoustic = true;
  const auto r = eval::evaluate(c, idx, o);
  if (!f.out.empty()) write_report(r, f.out, label);
  out << "eval: " << label << " on " << f.split << " (" << r.n_utts << " utts, " << r.n_failed << " failed): wer "
      << fixed(r.wer) << " = ins " << fixed(r.ins_rate) << " + del " << fixed(r.del_rate) << " + sub "
      << fixed(r.sub_rate) << ", cer " << fixed(r.cer) << ", calls/utt " << fixed(r.forward_calls_per_utt, 2) << "\n";
  return r.identity_holds() ? 0 : 1;
}

template <typename T>
int cmd_ablate(const Flags& f, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const auto c = corpus::Corpus::load(f.corpus);
  const auto rows = training::ablation_suite<T>(train_config(f, sub), c, f.out, &err);
  const double full = rows.front().valid_total;
  std::size_t worse = 0;
  for (const auto& r : rows) {
    out << "  " << std::left << std::setw(12) << r.variant << " valid " << fixed(r.valid_total) << " (ctc "
        << fixed(r.valid_ctc) << ")";
    if (r.variant != "full") {
      out << "  margin " << fixed(r.valid_total - full);
      if (r.valid_total < full) {
        ++worse;
        out << "  [full model not lowest]";
      }
    }
    out << "\n";
  }
  out << "ablate: " << rows.size() << " variants, full model lowest against " << (rows.size() - 1 - worse) << " of "
      << rows.size() - 1 << " -> " << f.out << "/ablations.csv\n";
  return 0;
}

template <typename T>
int cmd_density(const Flags& f, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const auto c = corpus::Corpus::load(f.corpus);
  const auto idx = split_indices(c, "test", f.limit);
  auto cfg = train_config(f, sub);
  auto train_for = [&](std::size_t K) {
    auto k = cfg;
    k.density = K;
    const auto dir = training::detail::path_in(f.out, "K" + std::to_string(K));
    training::train<T>(k, c, dir, &err);
    return std::move(training::load_trained<T>(training::detail::path_in(dir, "last.ckpt")).model);
  };
  const auto rows = eval::density_sweep<T>(train_for, c, idx, f.densities, f.workers);
  auto csv = open_out(f.out, "density.csv");
  csv << "density,wer,positions_per_utt\n";
  for (const auto& r : rows) {
    csv << r.density << "," << kv::str(r.wer) << "," << kv::str(r.positions_per_utt) << "\n";
    out << "  K=" << r.density << " wer " << fixed(r.wer) << " positions/utt " << fixed(r.positions_per_utt, 1) << "\n";
  }
  out << "density-sweep: " << rows.size() << " densities -> " << f.out << "/density.csv\n";
  return 0;
}

template <typename T>
int cmd_multistep(const Flags& f, const CLI::App& sub, std::ostream& out) {
  const auto c = corpus::Corpus::load(f.corpus);
  const auto idx = split_indices(c, "test", f.limit);
  const auto t = training::load_trained<T>(f.checkpoint);
  eval::EvalOptions<T> base;
  base.layout = t.config.layout();
  base.workers = f.workers;
  base.zero_acoustic = t.config.ablations.no_audio_emb;
  const std::size_t S = given(sub, "--steps") ? f.steps : 3;
  const auto rows = eval::multistep_sweep(t.model, c, idx, S, base);
  bool calls_ok = true;
  std::ofstream csv;
  if (!f.out.empty()) {
    csv = open_out(f.out, "multistep.csv");
    csv << "steps,wer,ins_rate,del_rate,sub_rate,forward_calls_per_utt\n";
  }
  for (const auto& r : rows) {
    calls_ok = calls_ok && r.forward_calls == static_cast<double>(r.steps);
    if (csv.is_open()) {
      csv << r.steps << "," << kv::str(r.wer) << "," << kv::str(r.report.ins_rate) << ","
          << kv::str(r.report.del_rate) << "," << kv::str(r.report.sub_rate) << "," << kv::str(r.forward_calls)
          << "\n";
    }
    out << "  steps=" << r.steps << " wer " << fixed(r.wer) << " calls/utt " << fixed(r.forward_calls, 2) << "\n";
  }
  out << "multistep-sweep: " << rows.size() << " rows, call counts " << (calls_ok ? "exact" : "MISMATCH") << "\n";
  return calls_ok ? 0 : 1;
}

template <typename T>
int cmd_bench(const Flags& f, const CLI::App& sub, std::ostream& out) {
  const auto c = corpus::Corpus::load(f.corpus);
  const auto idx = split_indices(c, "test", given(sub, "--limit") ? f.limit : 200);
  const auto ed = training::load_trained<T>(f.checkpoint);
  const auto ar = training::load_trained<T>(f.ar_checkpoint);
  const auto r = eval::parallelism_bench(ed.model, ar.model, c, idx, ed.config.layout());
  std::ofstream csv;
  if (!f.out.empty()) {
    csv = open_out(f.out, "bench.csv");
    csv << "system,forward_calls_per_utt,wall_ms_per_utt,mean_output_len\n";
  }
  for (const auto& row : r.rows) {
    if (csv.is_open()) {
      csv << row.system << "," << kv::str(row.forward_calls_per_utt) << "," << kv::str(row.wall_ms_per_utt) << ","
          << kv::str(row.mean_output_len) << "\n";
    }
    out << "  " << std::left << std::setw(7) << row.system << " calls/utt " << fixed(row.forward_calls_per_utt, 2)
        << "  ms/utt " << fixed(row.wall_ms_per_utt, 2) << "  output len " << fixed(row.mean_output_len, 1) << "\n";
  }
  const bool ok = r.editor_calls_ok && r.ar_calls_ok;
  out << "bench: " << idx.size() << " utts, editor 1 call/utt " << (r.editor_calls_ok ? "ok" : "VIOLATED")
      << ", ar len+1 calls " << (r.ar_calls_ok ? "ok" : "VIOLATED") << " (" << r.ar_truncated << " truncated)\n";
  return ok ? 0 : 1;
}

template <typename T>
int cmd_show(const Flags& f, const CLI::App& sub, std::ostream& out) {
  const auto c = corpus::Corpus::load(f.corpus);
  const auto idx = split_indices(c, f.split, given(sub, "--limit") ? f.limit : 10);
  const auto t = training::load_trained<T>(f.checkpoint);
  const std::size_t steps = given(sub, "--steps") ? f.steps : 1;
  for (auto i : idx) {
    const auto& u = c.utterances()[i];
    const auto frames = corpus::render_frames<T>(u.reference_tokens(), c.spec().frames, u.seed);
    const auto r = editor::multi_step_edit(t.model, frames, u.hypothesis_tokens(), steps, t.config.layout(),
                                           t.config.ablations.no_audio_emb);
    const auto ref = eval::words(u.reference), hyp = eval::words(u.hypothesis),
               edited = eval::words(Vocab::decode(r.tokens));
    out << u.id << "\n  REF  " << u.reference << "\n  HYP  " << tag_hypothesis(ref, hyp) << "\n  EDIT "
        << tag_edit(ref, hyp, edited) << "\n";
  }
  out << "show-edits: " << idx.size() << " utterances from " << f.split << "\n";
  return 0;
}

inline int cmd_selftest(std::ostream& out) {
  const auto checks = selftest::run_all();
  std::size_t failed = 0;
  for (const auto& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    if (!c.pass) ++failed;
  }
  out << "selftest: " << checks.size() - failed << "/" << checks.size() << " passed\n";
  return failed == 0 ? 0 : 1;
}

inline int cmd_gen(const Flags& f, std::ostream& out) {
  corpus::CorpusSpec s;
  s.n_utts = f.n;
  s.noise = {f.sub, f.del, f.ins};
  s.seed = f.seed;
  s.min_words = f.min_words;
  s.max_words = f.max_words;
  training::detail::ensure_dir(f.out);
  const auto path = training::detail::path_in(f.out, "corpus.txt");
  const auto c = corpus::generate_corpus(s, path);
  out << "gen: " << c.size() << " utterances (train " << c.indices(corpus::Split::train).size() << ", valid "
      << c.indices(corpus::Split::valid).size() << ", test " << c.indices(corpus::Split::test).size()
      << "), fingerprint " << c.fingerprint() << " -> " << path << "\n";
  return 0;
}

template <typename T>
int dispatch(const Flags& f, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const std::string name = sub.get_name();
  if (name == "train") return cmd_train<T>(f, sub, out, err);
  if (name == "eval") return cmd_eval<T>(f, sub, out);
  if (name == "ablate") return cmd_ablate<T>(f, sub, out, err);
  if (name == "density-sweep") return cmd_density<T>(f, sub, out, err);
  if (name == "multistep-sweep") return cmd_multistep<T>(f, sub, out);
  if (name == "bench") return cmd_bench<T>(f, sub, out);
  if (name == "show-edits") return cmd_show<T>(f, sub, out);
  throw Error("unhandled subcommand " + name);
}

}  // namespace detail

/// Full help text: the top-level summary followed by every subcommand.
inline std::string usage() {
  Flags f;
  auto app = detail::make_app(f);
  return app->help("", CLI::AppFormatMode::All);
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Flags f;
  auto app = detail::make_app(f);
  try {
    app->parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << usage();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << usage();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kProgram << " " << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << usage();
    return 2;
  }
  const auto subs = app->get_subcommands();
  const CLI::App& sub = *subs.front();
  try {
    const std::string name = sub.get_name();
    if (name == "gen") return detail::cmd_gen(f, out);
    if (name == "selftest") return detail::cmd_selftest(out);
    return precision_from_env() == Precision::f64 ? detail::dispatch<double>(f, sub, out, err)
                                                  : detail::dispatch<float>(f, sub, out, err);
  } catch (const NumericError& e) {
    err << "error: " << e.what();
    if (!e.last_good_checkpoint().empty()) err << " (last good checkpoint: " << e.last_good_checkpoint() << ")";
    err << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace nle::cli

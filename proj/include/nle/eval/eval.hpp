// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "nle/baselines/baselines.hpp"
#include "nle/corpus/corpus.hpp"
#include "nle/editor/editor.hpp"

namespace nle::eval {

struct EditCounts {
  std::size_t ins = 0, del = 0, sub = 0;
  std::size_t total() const { return ins + del + sub; }
  bool operator==(const EditCounts&) const = default;
};

/// Unit-cost Levenshtein alignment of hypothesis against reference. On equal
/// cost the backtrace prefers substitution (or match), then deletion, then
/// insertion.
template <typename Seq>
EditCounts edit_distance_decompose(const Seq& ref, const Seq& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1), at(i - 1, j) + 1, at(i, j - 1) + 1});
  EditCounts c;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++c.sub;
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++c.del;
      --i;
    } else {
      ++c.ins;
      --j;
    }
  }
  return c;
}

/// For each hypothesis item, the index of the reference item it matches
/// exactly under the same backtrace as edit_distance_decompose, or -1.
template <typename Seq>
std::vector<long> align_matches(const Seq& ref, const Seq& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1), at(i - 1, j) + 1, at(i, j - 1) + 1});
  std::vector<long> match(m, -1);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] == hyp[j - 1]) match[j - 1] = static_cast<long>(i - 1);
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      --i;
    } else {
      --j;
    }
  }
  return match;
}

inline std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

struct UtteranceRecord {
  std::string id;
  std::string reference;
  std::string hypothesis;
  std::string output;
  EditCounts word;
  std::size_t char_errors = 0;
  std::uint64_t forward_calls = 0;
  bool failed = false;
  std::string error;
};

/// Micro-averaged word and character error rates. Rates are counts over the
/// number of reference words (characters for cer).
struct EvalReport {
  std::size_t n_utts = 0;
  std::size_t n_failed = 0;
  std::size_t n_ref_words = 0;
  std::size_t n_ref_chars = 0;
  EditCounts word;
  std::size_t char_errors = 0;
  double ins_rate = 0.0, del_rate = 0.0, sub_rate = 0.0, wer = 0.0, cer = 0.0;
  double forward_calls_per_utt = 0.0;
  std::vector<UtteranceRecord> records;

  /// wer as the sum of the three rates, so the identity is exact.
  void finalize() {
    const double n = static_cast<double>(std::max<std::size_t>(1, n_ref_words));
    ins_rate = static_cast<double>(word.ins) / n;
    del_rate = static_cast<double>(word.del) / n;
    sub_rate = static_cast<double>(word.sub) / n;
    wer = ins_rate + del_rate + sub_rate;
    cer = static_cast<double>(char_errors) / static_cast<double>(std::max<std::size_t>(1, n_ref_chars));
  }

  bool identity_holds() const {
    std::size_t ins = 0, del = 0, sub = 0, tot = 0;
    for (const auto& r : records) {
      if (r.failed) continue;
      ins += r.word.ins;
      del += r.word.del;
      sub += r.word.sub;
      tot += r.word.total();
    }
    return word.total() == word.ins + word.del + word.sub && tot == ins + del + sub && ins == word.ins &&
           del == word.del && sub == word.sub && wer == ins_rate + del_rate + sub_rate;
  }
};

enum class System { passthrough, editor, ar };

template <typename T>
struct EvalOptions {
  System system = System::passthrough;
  const editor::EditorModel<T>* model = nullptr;  // editor or AR model
  editor::LayoutOptions layout;
  std::size_t steps = 1;  // editor refinement passes
  bool zero_acoustic = false;
  std::size_t max_len = 200;  // AR decode cap
  std::size_t workers = 1;
};

/// Scores one decoded output against its utterance.
inline UtteranceRecord score(const corpus::Utterance& u, const std::string& output) {
  UtteranceRecord r;
  r.id = u.id;
  r.reference = u.reference;
  r.hypothesis = u.hypothesis;
  r.output = output;
  r.word = edit_distance_decompose(words(u.reference), words(output));
  r.char_errors = edit_distance_decompose(std::string(u.reference), output).total();
  return r;
}

inline EvalReport aggregate(std::vector<UtteranceRecord> records, const std::vector<std::size_t>& ref_words,
                            const std::vector<std::size_t>& ref_chars) {
  EvalReport rep;
  rep.n_utts = records.size();
  std::uint64_t calls = 0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.failed) {
      ++rep.n_failed;
      continue;
    }
    ++ok;
    rep.word.ins += r.word.ins;
    rep.word.del += r.word.del;
    rep.word.sub += r.word.sub;
    rep.char_errors += r.char_errors;
    rep.n_ref_words += ref_words[i];
    rep.n_ref_chars += ref_chars[i];
    calls += r.forward_calls;
  }
  rep.forward_calls_per_utt = ok ? static_cast<double>(calls) / static_cast<double>(ok) : 0.0;
  rep.records = std::move(records);
  rep.finalize();
  return rep;
}

/// Decodes every utterance of `idx` with the selected system. Results are
/// ordered by position in `idx`, whatever the worker count.
template <typename T>
EvalReport evaluate(const corpus::Corpus& c, const std::vector<std::size_t>& idx, const EvalOptions<T>& opt) {
  if (opt.system != System::passthrough && opt.model == nullptr) throw ConfigError("evaluate: model required");
  std::vector<UtteranceRecord> records(idx.size());
  std::vector<std::size_t> ref_words(idx.size()), ref_chars(idx.size());
  auto work = [&](std::size_t k) {
    const auto& u = c.utterances()[idx[k]];
    ref_words[k] = words(u.reference).size();
    ref_chars[k] = u.reference.size();
    try {
      Tokens out;
      std::uint64_t calls = 0;
      if (opt.system == System::passthrough) {
        out = baselines::passthrough(u.hypothesis_tokens());
      } else {
        const auto frames = corpus::render_frames<T>(u.reference_tokens(), c.spec().frames, u.seed);
        if (opt.system == System::editor) {
          auto r = editor::multi_step_edit(*opt.model, frames, u.hypothesis_tokens(), opt.steps, opt.layout,
                                           opt.zero_acoustic);
          out = std::move(r.tokens);
          calls = r.forward_calls;
        } else {
          auto r = baselines::ar_decode(*opt.model, frames, opt.max_len, opt.zero_acoustic);
          out = std::move(r.tokens);
          calls = r.forward_calls;
        }
      }
      records[k] = score(u, Vocab::decode(out));
      records[k].forward_calls = calls;
    } catch (const Error& e) {
      records[k] = UtteranceRecord{};
      records[k].id = u.id;
      records[k].reference = u.reference;
      records[k].hypothesis = u.hypothesis;
      records[k].failed = true;
      records[k].error = e.what();
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(opt.workers, idx.size()));
  if (workers == 1) {
    for (std::size_t k = 0; k < idx.size(); ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < idx.size(); k += workers) work(k);
      });
    for (auto& t : pool) t.join();
  }
  auto rep = aggregate(std::move(records), ref_words, ref_chars);
  if (rep.n_failed > 0) std::cerr << "warning: " << rep.n_failed << " utterances failed to decode\n";
  return rep;
}

/// Mean text positions per utterance for the interleaved layout at density K.
inline double mean_text_positions(const corpus::Corpus& c, const std::vector<std::size_t>& idx, std::size_t density,
                                  std::size_t min_content = 8) {
  double s = 0.0;
  for (auto i : idx) {
    s += static_cast<double>(
        build_interleaved(c.utterances()[i].hypothesis_tokens(), Vocab::blank, {density, min_content}).size());
  }
  return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
}

struct DensityRow {
  std::size_t density = 1;
  double wer = 0.0;
  double positions_per_utt = 0.0;
};

/// One model per K from `train_for(K)`, each scored on `idx` at its density.
template <typename T, typename TrainFn>
std::vector<DensityRow> density_sweep(TrainFn&& train_for, const corpus::Corpus& c, const std::vector<std::size_t>& idx,
                                      const std::vector<std::size_t>& Ks, std::size_t workers = 1) {
  std::vector<DensityRow> rows;
  for (auto K : Ks) {
    const editor::EditorModel<T> m = train_for(K);
    EvalOptions<T> o;
    o.system = System::editor;
    o.model = &m;
    o.layout.density = K;
    o.workers = workers;
    rows.push_back({K, evaluate(c, idx, o).wer, mean_text_positions(c, idx, K)});
  }
  return rows;
}

struct MultiStepRow {
  std::size_t steps = 0;
  double wer = 0.0;
  double forward_calls = 0.0;  // per utterance
  EvalReport report;
};

template <typename T>
std::vector<MultiStepRow> multistep_sweep(const editor::EditorModel<T>& m, const corpus::Corpus& c,
                                          const std::vector<std::size_t>& idx, std::size_t max_steps = 3,
                                          EvalOptions<T> base = {}) {
  std::vector<MultiStepRow> rows;
  EvalOptions<T> p;
  p.workers = base.workers;
  auto pass = evaluate(c, idx, p);
  rows.push_back({0, pass.wer, 0.0, std::move(pass)});
  for (std::size_t s = 1; s <= max_steps; ++s) {
    EvalOptions<T> o = base;
    o.system = System::editor;
    o.model = &m;
    o.steps = s;
    auto r = evaluate(c, idx, o);
    rows.push_back({s, r.wer, r.forward_calls_per_utt, std::move(r)});
  }
  return rows;
}

struct BenchRow {
  std::string system;
  double forward_calls_per_utt = 0.0;
  double wall_ms_per_utt = 0.0;
  double mean_output_len = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  bool editor_calls_ok = true;  // exactly one call per utterance
  bool ar_calls_ok = true;      // output length + 1 per utterance (EOS reached)
  std::size_t ar_truncated = 0;
};

template <typename T>
BenchResult parallelism_bench(const editor::EditorModel<T>& ed, const editor::EditorModel<T>& ar, const corpus::Corpus& c,
                              const std::vector<std::size_t>& idx, const editor::LayoutOptions& layout = {},
                              std::size_t max_len = 200) {
  using clock = std::chrono::steady_clock;
  BenchResult res;
  double ed_ms = 0.0, ar_ms = 0.0, ed_calls = 0.0, ar_calls = 0.0, ed_len = 0.0, ar_len = 0.0;
  for (auto i : idx) {
    const auto& u = c.utterances()[i];
    const auto frames = corpus::render_frames<T>(u.reference_tokens(), c.spec().frames, u.seed);
    const auto hyp = u.hypothesis_tokens();
    auto t0 = clock::now();
    const auto e = editor::edit(ed, frames, hyp, layout);
    auto t1 = clock::now();
    const auto a = baselines::ar_decode(ar, frames, max_len);
    auto t2 = clock::now();
    ed_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
    ar_ms += std::chrono::duration<double, std::milli>(t2 - t1).count();
    ed_calls += static_cast<double>(e.forward_calls);
    ar_calls += static_cast<double>(a.forward_calls);
    ed_len += static_cast<double>(e.tokens.size());
    ar_len += static_cast<double>(a.tokens.size());
    res.editor_calls_ok = res.editor_calls_ok && e.forward_calls == 1;
    if (a.truncated) ++res.ar_truncated;
    else res.ar_calls_ok = res.ar_calls_ok && a.forward_calls == a.tokens.size() + 1;
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, idx.size()));
  res.rows.push_back({"editor", ed_calls / n, ed_ms / n, ed_len / n});
  res.rows.push_back({"ar", ar_calls / n, ar_ms / n, ar_len / n});
  return res;
}

}  // namespace nle::eval

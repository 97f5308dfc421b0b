// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nle/baselines/baselines.hpp"
#include "nle/corpus/corpus.hpp"
#include "nle/ctc/ctc.hpp"
#include "nle/editor/editor.hpp"
#include "nle/eval/eval.hpp"
#include "nle/interleave/interleave.hpp"
#include "nle/oracles/edit_script.hpp"
#include "nle/oracles/gradcheck.hpp"

namespace nle::selftest {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

using T64 = Tensor<double>;

inline T64 random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = scale * rng.normal();
  return T64(std::move(shape), v);
}

inline std::string num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

inline editor::EditorConfig tiny_model() {
  editor::EditorConfig c;
  c.d_model = 16;
  c.heads = 2;
  c.d_ff = 32;
  c.lora_rank = 4;
  c.lora_alpha = 4;
  c.max_positions = 128;
  return c;
}

inline void perturb_lora(editor::EditorModel<double>& m, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& p : m.parameters())
    if (p.name.ends_with(".lora_b"))
      for (auto& v : p.tensor.mutable_data()) v = 0.1 * rng.normal();
}

// Central differences on every `stride`-th entry of the named parameters.
inline double param_fd(editor::EditorModel<double>& m, const std::vector<std::string>& names,
                       const std::function<double()>& f, const std::function<void()>& backward,
                       std::size_t stride = 3) {
  for (auto& p : m.parameters()) p.tensor.zero_grad();
  backward();
  double worst = 0.0;
  for (const auto& name : names) {
    auto& t = const_cast<T64&>(m.parameter(name).tensor);
    const std::vector<double> g = t.has_grad() ? std::vector<double>(t.grad().begin(), t.grad().end())
                                               : std::vector<double>(t.numel(), 0.0);
    double d2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < t.numel(); i += stride) {
      const double keep = t.raw()[i];
      t.mutable_data()[i] = keep + 1e-6;
      const double up = f();
      t.mutable_data()[i] = keep - 1e-6;
      const double down = f();
      t.mutable_data()[i] = keep;
      const double numd = (up - down) / 2e-6;
      d2 += (numd - g[i]) * (numd - g[i]);
      a2 += g[i] * g[i];
      n2 += numd * numd;
    }
    worst = std::max(worst, std::sqrt(d2) / std::max({std::sqrt(a2), std::sqrt(n2), 1e-8}));
  }
  return worst;
}

}  // namespace detail

/// ctc_loss against exhaustive path enumeration on random feasible instances
/// (P ≤ 6, V ≤ 4, |target| ≤ 3).
inline Check ctc_oracle_equivalence(std::size_t instances = 500, std::uint64_t seed = 2025, double tol = 1e-10) {
  Rng rng(seed);
  std::size_t checked = 0;
  double worst = 0.0;
  while (checked < instances) {
    const std::size_t P = 1 + rng.below(6), V = 2 + rng.below(3), U = rng.below(4);
    Tokens target(U);
    for (auto& t : target) t = 1 + static_cast<TokenId>(rng.below(V - 1));
    if (!ctc::feasible(P, target)) continue;
    const auto logits = detail::random_tensor({P, V}, rng, 2.0);
    const double a = ctc::ctc_loss(logits, target, 0).item();
    const double b = ctc::ctc_oracle(logits, target, 0);
    worst = std::max(worst, std::abs(a - b));
    ++checked;
  }
  return {"ctc oracle equivalence", worst < tol,
          std::to_string(checked) + " instances, max |diff| " + detail::num(worst) + " (tol " + detail::num(tol) + ")"};
}

/// Finite differences against reverse mode for every differentiable op, the
/// CTC loss, the editor loss and the AR loss, all in 64-bit.
inline std::vector<Check> gradient_checks(double tol = 1e-4) {
  using detail::T64;
  using V = std::vector<T64>;
  Rng rng(2024);
  std::vector<Check> out;
  auto check = [&](const std::string& name, const std::function<T64(const V&)>& f, V in) {
    const auto r = oracles::gradcheck(f, std::move(in));
    out.push_back({"gradcheck " + name, r.max_rel_err < tol, "rel err " + detail::num(r.max_rel_err)});
  };
  const T64 weights = detail::random_tensor({3, 4}, rng);
  auto weighted = [weights](const T64& t) { return ops::sum(ops::mul(t, weights)); };
  auto R = [&](Shape s, double sc = 1.0) { return detail::random_tensor(std::move(s), rng, sc); };

  check("matmul", [&](const V& i) { return ops::sum(ops::gelu(ops::matmul(i[0], i[1]))); }, {R({3, 4}), R({4, 3})});
  check("matmul_nt", [&](const V& i) { return weighted(ops::matmul_nt(i[0], i[1])); }, {R({3, 5}), R({4, 5})});
  check("linear", [&](const V& i) { return weighted(ops::linear(i[0], i[1], i[2])); }, {R({3, 5}), R({5, 4}), R({4})});
  check("add", [&](const V& i) { return weighted(ops::add(i[0], i[1])); }, {R({3, 4}), R({3, 4})});
  check("add_row", [&](const V& i) { return weighted(ops::add_row(i[0], i[1])); }, {R({3, 4}), R({4})});
  check("mul", [&](const V& i) { return weighted(ops::mul(i[0], i[1])); }, {R({3, 4}), R({3, 4})});
  check("scale", [&](const V& i) { return weighted(ops::scale(i[0], 1.7)); }, {R({3, 4})});
  check("mean", [](const V& i) { return ops::mean(ops::mul(i[0], i[0])); }, {R({3, 4})});
  check("gelu", [&](const V& i) { return weighted(ops::gelu(i[0])); }, {R({3, 4}, 2.0)});
  check("layer_norm", [&](const V& i) { return weighted(ops::layer_norm(i[0], i[1], i[2])); },
        {R({3, 4}), R({4}), R({4})});
  check("softmax", [&](const V& i) { return weighted(ops::softmax(i[0])); }, {R({3, 4})});
  check("log_softmax", [&](const V& i) { return weighted(ops::log_softmax(i[0])); }, {R({3, 4})});
  const std::vector<int> ids{2, 0, 2}, tg{1, 3, 0};
  check("embedding", [&](const V& i) { return weighted(ops::embedding(i[0], ids)); }, {R({3, 4})});
  check("cross_entropy", [&](const V& i) { return ops::cross_entropy(i[0], tg); }, {R({3, 4})});
  check("concat_rows", [&](const V& i) { return weighted(ops::concat_rows(i[0], i[1])); }, {R({1, 4}), R({2, 4})});
  check("slice_rows", [&](const V& i) { return weighted(ops::slice_rows(i[0], 1, 3)); }, {R({5, 4})});
  check("mean_pool_rows", [&](const V& i) { return weighted(ops::mean_pool_rows(i[0], 3)); }, {R({8, 4})});
  check("attention", [&](const V& i) { return weighted(ops::attention(i[0], i[1], i[2], 2, false)); },
        {R({3, 4}), R({3, 4}), R({3, 4})});
  check("attention causal", [&](const V& i) { return weighted(ops::attention(i[0], i[1], i[2], 2, true)); },
        {R({3, 4}), R({3, 4}), R({3, 4})});
  for (const Tokens& target : {Tokens{1, 2}, Tokens{1, 1}, Tokens{}}) {
    check("ctc_loss |y|=" + std::to_string(target.size()),
          [target](const V& i) { return ctc::ctc_loss(i[0], target, 0); }, {R({5, 3})});
  }

  {
    editor::EditorModel<double> m(detail::tiny_model(), 17);
    detail::perturb_lora(m, 5);
    auto ex = [](const std::string& ref, const std::string& hyp) {
      return editor::Example<double>{corpus::render_frames<double>(Vocab::encode(ref), corpus::FrameSpec{}, 1),
                                     editor::text_input(Vocab::encode(hyp), {}), Vocab::encode(ref)};
    };
    const std::vector<editor::Example<double>> batch{ex("abc", "abd"), ex("hi you", "hi yu")};
    const editor::LossOptions lo{0.02};
    const double e = detail::param_fd(
        m, {"editor.layer0.attn.q.lora_a", "editor.layer1.mlp.down.lora_b", "editor.proj.weight"},
        [&] { return editor::loss<double>(m, batch, lo).total.item(); },
        [&] { editor::loss<double>(m, batch, lo).total.backward(); });
    out.push_back({"gradcheck editor loss (ctc + cr)", e < tol, "rel err " + detail::num(e)});
  }
  {
    auto m = baselines::make_ar_model<double>(detail::tiny_model(), 9);
    detail::perturb_lora(m, 6);
    const auto frames = corpus::render_frames<double>(Vocab::encode("hi you"), corpus::FrameSpec{}, 1);
    const auto ref = Vocab::encode("hi you");
    const double e = detail::param_fd(
        m, {"editor.layer0.attn.v.lora_a", "editor.layer1.mlp.up.lora_b", "editor.proj.bias"},
        [&] { return baselines::ar_loss(m, frames, ref).item(); },
        [&] { baselines::ar_loss(m, frames, ref).backward(); });
    out.push_back({"gradcheck ar cross-entropy", e < tol, "rel err " + detail::num(e)});
  }
  return out;
}

/// Layout length 2N+1 at K=1, the 2m−1 relabeling count on the worked
/// insertion pattern for m = 1..4, and the N+1 capacity bound.
inline std::vector<Check> interleave_laws() {
  std::vector<Check> out;
  const TokenId e = Vocab::blank;
  bool len_ok = true;
  for (std::size_t n = 0; n <= 20; ++n) {
    Tokens x;
    for (std::size_t i = 0; i < n; ++i) x.push_back(Vocab::content(static_cast<int>(i % 26)));
    len_ok = len_ok && build_interleaved(x, e, {1, 0}).size() == 2 * n + 1;
  }
  out.push_back({"interleave length 2N+1", len_ok, "N = 0..20"});

  Tokens x;
  for (int i = 0; i < 6; ++i) x.push_back(Vocab::content(i));
  const auto s = build_interleaved(x, e, {1, 0});
  std::string counts;
  bool ins_ok = true;
  for (std::size_t m = 1; m <= 4; ++m) {
    Tokens ins;
    for (std::size_t j = 0; j < m; ++j) ins.push_back(Vocab::content(static_cast<int>(10 + j)));
    const auto r = insertion_oracle(s, 3, ins, e);
    Tokens want(x.begin(), x.begin() + 3);
    want.insert(want.end(), ins.begin(), ins.end());
    want.insert(want.end(), x.begin() + 3, x.end());
    ins_ok = ins_ok && r.changed_count == 2 * m - 1 && ctc::collapse(r.labels, e) == want;
    counts += (m > 1 ? "," : "") + std::to_string(r.changed_count);
  }
  out.push_back({"insertion changed_count 2m-1", ins_ok, "m=1..4 -> " + counts});

  const Tokens three{Vocab::content(0), Vocab::content(1), Vocab::content(2)};
  const auto s3 = build_interleaved(three, e, {1, 0});
  bool cap_ok = true;
  try {
    Tokens four;
    for (int j = 0; j < 4; ++j) four.push_back(Vocab::content(10 + j));
    insertion_oracle(s3, 1, four, e);
    Tokens five = four;
    five.push_back(Vocab::content(20));
    insertion_oracle(s3, 1, five, e);
    cap_ok = false;
  } catch (const InfeasibleInsertError&) {
  }
  out.push_back({"insertion capacity N+1", cap_ok, "N=3: 4 fits, 5 rejected"});
  return out;
}

/// Edit-distance decomposition against exhaustive edit-script search on all
/// random pairs of combined length ≤ 10, and the wer identity on a report.
inline std::vector<Check> eval_identity(std::size_t pairs = 2000, std::uint64_t seed = 11) {
  std::vector<Check> out;
  Rng rng(seed);
  std::size_t bad = 0;
  for (std::size_t it = 0; it < pairs; ++it) {
    const std::size_t n = rng.below(6), m = rng.below(11 - n);
    std::vector<int> a(n), b(m);
    for (auto& v : a) v = static_cast<int>(rng.below(3));
    for (auto& v : b) v = static_cast<int>(rng.below(3));
    const auto got = eval::edit_distance_decompose(a, b);
    const auto all = oracles::minimal_edit_scripts(a, b);
    const auto any = *all.begin();
    if (got.total() != any[0] + any[1] + any[2] || !all.count({got.ins, got.del, got.sub})) ++bad;
  }
  out.push_back({"decomposition vs brute force", bad == 0,
                 std::to_string(pairs) + " pairs, " + std::to_string(bad) + " mismatches"});

  corpus::CorpusSpec spec;
  spec.n_utts = 400;
  const auto c = corpus::generate(spec);
  const auto rep = eval::evaluate(c, c.indices(corpus::Split::test), eval::EvalOptions<float>{});
  out.push_back({"wer == ins+del+sub", rep.identity_holds(), "passthrough wer " + detail::num(rep.wer)});
  return out;
}

inline std::vector<Check> run_all() {
  std::vector<Check> out{ctc_oracle_equivalence()};
  for (auto& v : {gradient_checks(), interleave_laws(), eval_identity()}) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace nle::selftest

// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "nle/ctc/ctc.hpp"
#include "nle/oracles/gradcheck.hpp"

using namespace nle;
using T64 = Tensor<double>;

namespace {

constexpr TokenId kBlank = 0;

T64 random_logits(std::size_t P, std::size_t V, Rng& rng) {
  std::vector<double> v(P * V);
  for (auto& x : v) x = 2.0 * rng.normal();
  return T64({P, V}, std::move(v));
}

T64 path_logits(const Tokens& path, std::size_t V, double peak = 10.0) {
  T64 t({path.size(), V});
  for (std::size_t i = 0; i < path.size(); ++i) t.mutable_data()[i * V + path[i]] = peak;
  return t;
}

// all sequences over labels 1..V-1 of length ≤ max_len
void enumerate_targets(std::size_t V, std::size_t max_len, Tokens& cur, std::vector<Tokens>& out) {
  out.push_back(cur);
  if (cur.size() == max_len) return;
  for (TokenId k = 1; k < static_cast<TokenId>(V); ++k) {
    cur.push_back(k);
    enumerate_targets(V, max_len, cur, out);
    cur.pop_back();
  }
}

}  // namespace

TEST(CtcLoss, SingleAlignment) {
  // p(a) = 0.7 at the only position
  T64 logits({1, 2}, {std::log(0.3), std::log(0.7)});
  EXPECT_NEAR(ctc::ctc_loss(logits, Tokens{1}, kBlank).item(), -std::log(0.7), 1e-12);
}

TEST(CtcLoss, TwoPositionsUniform) {
  // paths aa, aε, εa collapse to [a]: 3 of 4 equiprobable paths
  T64 logits({2, 2});
  EXPECT_NEAR(ctc::ctc_loss(logits, Tokens{1}, kBlank).item(), -std::log(0.75), 1e-12);
}

TEST(CtcLoss, EmptyTargetAllBlankPath) {
  T64 logits({2, 2});
  EXPECT_NEAR(ctc::ctc_loss(logits, Tokens{}, kBlank).item(), -std::log(0.25), 1e-12);
  EXPECT_NEAR(ctc::ctc_oracle(logits, Tokens{}, kBlank), -std::log(0.25), 1e-12);
}

TEST(CtcLoss, MatchesOracleFourByThree) {
  Rng rng(17);
  auto logits = random_logits(4, 3, rng);
  const Tokens target{1, 2};
  EXPECT_NEAR(ctc::ctc_loss(logits, target, kBlank).item(), ctc::ctc_oracle(logits, target, kBlank), 1e-10);
}

TEST(CtcLoss, OracleEquivalenceProperty) {
  Rng rng(2025);
  int checked = 0;
  for (int iter = 0; iter < 5000 && checked < 500; ++iter) {
    const std::size_t P = 1 + rng.below(6);
    const std::size_t V = 2 + rng.below(3);
    const std::size_t U = rng.below(4);
    Tokens target(U);
    for (auto& t : target) t = 1 + static_cast<TokenId>(rng.below(V - 1));
    auto logits = random_logits(P, V, rng);
    const double oracle = ctc::ctc_oracle(logits, target, kBlank);
    if (!ctc::feasible(P, target)) {
      EXPECT_TRUE(std::isinf(oracle));
      EXPECT_THROW(ctc::ctc_loss(logits, target, kBlank), InfeasibleTargetError);
      continue;
    }
    EXPECT_NEAR(ctc::ctc_loss(logits, target, kBlank).item(), oracle, 1e-10)
        << "P=" << P << " V=" << V << " U=" << U;
    ++checked;
  }
  EXPECT_GE(checked, 500);
}

TEST(CtcLoss, UnreachableTargetIsInfeasible) {
  T64 logits({2, 3});
  const Tokens target{1, 2, 1};
  EXPECT_TRUE(std::isinf(ctc::ctc_oracle(logits, target, kBlank)));
  EXPECT_THROW(ctc::ctc_loss(logits, target, kBlank), InfeasibleTargetError);
  // repeats need a separating blank: [a,a] does not fit in 2 positions
  EXPECT_THROW(ctc::ctc_loss(logits, Tokens{1, 1}, kBlank), InfeasibleTargetError);
}

TEST(CtcLoss, BlankInTargetRejected) {
  T64 logits({3, 3});
  EXPECT_THROW(ctc::ctc_loss(logits, Tokens{1, 0}, kBlank), InvalidTargetError);
}

TEST(CtcLoss, OracleGuard) {
  T64 logits({13, 3});
  EXPECT_THROW(ctc::ctc_oracle(logits, Tokens{1}, kBlank), ConfigError);
}

TEST(CtcLoss, GradientMatchesFiniteDifferences) {
  Rng rng(8);
  for (const Tokens& target : {Tokens{1, 2}, Tokens{1, 1}, Tokens{}, Tokens{2, 1, 2}}) {
    auto logits = random_logits(6, 3, rng);
    const auto res = oracles::gradcheck(
        [&](const std::vector<T64>& in) { return ctc::ctc_loss(in[0], target, kBlank); }, {logits});
    EXPECT_LT(res.max_rel_err, 1e-4);
  }
}

TEST(CtcLoss, NormalizesOverCollapsePartition) {
  Rng rng(4);
  const std::size_t P = 4, V = 3;
  auto logits = random_logits(P, V, rng);
  std::vector<Tokens> targets;
  Tokens cur;
  enumerate_targets(V, P, cur, targets);
  double mass = 0.0;
  for (const auto& t : targets) {
    if (!ctc::feasible(P, t)) continue;  // zero mass by construction
    const double p = std::exp(-ctc::ctc_loss(logits, t, kBlank).item());
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
    mass += p;
  }
  EXPECT_NEAR(mass, 1.0, 1e-8);
}

TEST(GreedyCollapse, Examples) {
  // a=1, b=2, c=3
  EXPECT_EQ(ctc::greedy_collapse(path_logits({1, 1, 0, 1, 2, 2}, 4), kBlank), (Tokens{1, 1, 2}));
  EXPECT_EQ(ctc::greedy_collapse(path_logits({0, 0, 0}, 4), kBlank), Tokens{});
  EXPECT_EQ(ctc::greedy_collapse(path_logits({0, 3, 0, 3, 0}, 4), kBlank), (Tokens{3, 3}));
}

TEST(GreedyCollapse, TiesGoToLowestId) {
  T64 logits({2, 3}, {1, 1, 1, 0, 2, 2});
  EXPECT_EQ(ctc::argmax_path(logits), (Tokens{0, 1}));
}

TEST(GreedyCollapse, InvariantUnderRowShift) {
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    auto logits = random_logits(7, 4, rng);
    auto shifted = logits.detach();
    for (std::size_t r = 0; r < 7; ++r) {
      const double c = 100.0 * rng.normal();
      for (std::size_t k = 0; k < 4; ++k) shifted.mutable_data()[r * 4 + k] += c;
    }
    EXPECT_EQ(ctc::greedy_collapse(logits, kBlank), ctc::greedy_collapse(shifted, kBlank));
  }
}

TEST(BestAlignment, PeakedOnTarget) {
  const Tokens target{1, 2, 3};
  EXPECT_EQ(ctc::best_alignment(path_logits(target, 4), target, kBlank), target);
}

TEST(BestAlignment, SingleLabelInTheMiddle) {
  // ε favoured at positions 1 and 3, a at position 2
  T64 logits({3, 2}, {2, 0, 0, 3, 2, 0});
  EXPECT_EQ(ctc::best_alignment(logits, Tokens{1}, kBlank), (Tokens{0, 1, 0}));
}

TEST(BestAlignment, RepeatForcesBlank) {
  T64 logits({3, 2});
  EXPECT_EQ(ctc::best_alignment(logits, Tokens{1, 1}, kBlank), (Tokens{1, 0, 1}));
}

TEST(BestAlignment, CollapsesToTargetAndIsMaximal) {
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    auto logits = random_logits(5, 3, rng);
    const Tokens target{1 + static_cast<TokenId>(rng.below(2)), 1 + static_cast<TokenId>(rng.below(2))};
    const auto path = ctc::best_alignment(logits, target, kBlank);
    EXPECT_EQ(ctc::collapse(path, kBlank), target);
  }
}

TEST(BestAlignment, InfeasibleRejected) {
  T64 logits({1, 3});
  EXPECT_THROW(ctc::best_alignment(logits, Tokens{1, 2}, kBlank), InfeasibleTargetError);
}

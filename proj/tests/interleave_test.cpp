// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "nle/interleave/interleave.hpp"

using namespace nle;

namespace {

constexpr TokenId e = Vocab::blank;
const InterleaveOptions kNoPad{1, 0};

Tokens random_tokens(Rng& rng, std::size_t n, int alphabet = 26) {
  Tokens t(n);
  for (auto& x : t) x = Vocab::first_letter + static_cast<TokenId>(rng.below(alphabet));
  return t;
}

}  // namespace

TEST(BuildInterleaved, TwoTokensDensityOne) {
  const auto s = build_interleaved(Tokens{10, 11}, e, kNoPad);
  EXPECT_EQ(s.tokens, (Tokens{e, 10, e, 11, e}));
  EXPECT_EQ(s.source_len, 2u);
  EXPECT_EQ(s.num_slots(), 3u);
}

TEST(BuildInterleaved, EmptyInputPadsToEightContentPositions) {
  const auto s = build_interleaved(Tokens{}, e);
  EXPECT_EQ(s.size(), 17u);
  EXPECT_EQ(s.tokens, Tokens(17, e));
  EXPECT_EQ(s.content_len, 8u);
}

TEST(BuildInterleaved, DensityThree) {
  const auto s = build_interleaved(Tokens{10, 11, 12}, e, {3, 0});
  EXPECT_EQ(s.tokens, (Tokens{e, 10, 11, 12, e}));
}

TEST(BuildInterleaved, PartialFinalGroupGetsTerminalSlot) {
  const auto s = build_interleaved(Tokens{10, 11, 12, 13}, e, {3, 0});
  EXPECT_EQ(s.tokens, (Tokens{e, 10, 11, 12, e, 13, e}));
  EXPECT_EQ(s.num_slots(), 3u);  // ⌈4/3⌉ + 1
}

TEST(BuildInterleaved, PaddingIsTrailing) {
  const auto s = build_interleaved(Tokens{10, 11}, e);
  Tokens expect{e, 10, e, 11};
  expect.resize(17, e);
  EXPECT_EQ(s.tokens, expect);
}

TEST(BuildInterleaved, ZeroDensityRejected) {
  EXPECT_THROW(build_interleaved(Tokens{10}, e, {0, 8}), ConfigError);
}

TEST(BuildInterleaved, LayoutLaws) {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = rng.below(20);
    const auto x = random_tokens(rng, n, 3);
    const auto s1 = build_interleaved(x, e);
    EXPECT_EQ(s1.size(), 2 * std::max<std::size_t>(n, 8) + 1);
    for (std::size_t j = 0; j < s1.size(); j += 2) EXPECT_EQ(s1.tokens[j], e);
    for (std::size_t j = 0; j < s1.size(); ++j) EXPECT_EQ(s1.slot[j], j % 2 == 0);
    for (std::size_t k = 1; k <= 4; ++k) {
      const auto sk = build_interleaved(x, e, {k, 8});
      const std::size_t content = std::max<std::size_t>(n, 8);
      EXPECT_EQ(sk.num_slots(), (content + k - 1) / k + 1);
      EXPECT_EQ(sk.size(), content + sk.num_slots());
      EXPECT_LE(ctc::collapse(sk.tokens, e).size(), x.size());
      Tokens content_only;
      for (std::size_t j = 0; j < sk.size(); ++j)
        if (!sk.slot[j] && sk.tokens[j] != e) content_only.push_back(sk.tokens[j]);
      EXPECT_EQ(content_only, x);  // order preserved
    }
    EXPECT_EQ(ctc::collapse(s1.tokens, e), x);
  }
}

TEST(BuildInterleaved, SparseDensityMergesRepeatsWithinAGroup) {
  // without a slot between them, equal neighbours collapse into one
  const Tokens x{10, 10, 11};
  EXPECT_EQ(ctc::collapse(build_interleaved(x, e, {2, 0}).tokens, e), (Tokens{10, 11}));
  EXPECT_EQ(ctc::collapse(build_interleaved(x, e, {1, 0}).tokens, e), x);
}

TEST(BuildInterleaved, SparseDensityCollapseIdentityWithoutRepeats) {
  const Tokens x{10, 11, 12, 13, 14};
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto sk = build_interleaved(x, e, {k, 0});
    EXPECT_EQ(ctc::collapse(sk.tokens, e), x);
  }
}

TEST(BuildInterleaved, CollapseIdentityWithRepeats) {
  // the interleaved slots keep adjacent duplicates apart
  const Tokens x{10, 10, 11, 11, 11};
  const auto s = build_interleaved(x, e);
  EXPECT_EQ(ctc::collapse(s.tokens, e), x);
  const Tokens aa{10, 10};
  EXPECT_EQ(ctc::collapse(build_interleaved(aa, e, kNoPad).tokens, e), aa);
}

TEST(Reinterleave, SameAsBuild) {
  EXPECT_EQ(reinterleave(Tokens{10, 11}, e, kNoPad).tokens, (Tokens{e, 10, e, 11, e}));
  EXPECT_EQ(reinterleave(Tokens{}, e).tokens, Tokens(17, e));
  Rng rng(3);
  const auto x = random_tokens(rng, 12);
  EXPECT_EQ(ctc::collapse(reinterleave(x, e).tokens, e), x);
}

TEST(EndPadding, ContentThenBlanks) {
  EXPECT_EQ(end_padded_layout(Tokens{10, 11}, e, 0), (Tokens{10, 11, e, e, e}));
  EXPECT_EQ(end_padded_layout(Tokens{10, 11}, e).size(), 17u);
}

TEST(InsertionOracle, SingleTokenFillsOneSlot) {
  const auto s = build_interleaved(Tokens{10, 11, 12, 13}, e, kNoPad);
  const auto r = insertion_oracle(s, 2, Tokens{20}, e);
  EXPECT_EQ(r.changed_count, 1u);
  EXPECT_EQ(r.labels, (Tokens{e, 10, e, 11, 20, 12, e, 13, e}));
}

TEST(InsertionOracle, WorkedPatternTwoMMinusOne) {
  const Tokens x{10, 11, 12, 13, 14, 15};
  const auto s = build_interleaved(x, e, kNoPad);
  for (std::size_t m = 1; m <= 4; ++m) {
    Tokens ins;
    for (std::size_t j = 0; j < m; ++j) ins.push_back(20 + static_cast<TokenId>(j));
    const auto r = insertion_oracle(s, 3, ins, e);
    EXPECT_EQ(r.changed_count, 2 * m - 1) << "m=" << m;
    Tokens want(x.begin(), x.begin() + 3);
    want.insert(want.end(), ins.begin(), ins.end());
    want.insert(want.end(), x.begin() + 3, x.end());
    EXPECT_EQ(ctc::collapse(r.labels, e), want);
  }
  // (…, x_k, a, b, c, x_{k+1}, …): the changed positions form one contiguous
  // block of 2m−1 around the gap; everything outside it is untouched
  const auto r3 = insertion_oracle(s, 3, Tokens{20, 21, 22}, e);
  std::size_t first = s.size(), last = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (r3.labels[i] != s.tokens[i]) {
      first = std::min(first, i);
      last = std::max(last, i);
    }
  }
  EXPECT_EQ(last - first + 1, 5u);
}

TEST(InsertionOracle, CapacityIsNPlusOne) {
  const Tokens x{10, 11, 12};
  const auto s = build_interleaved(x, e, kNoPad);
  const Tokens four{20, 21, 22, 23};
  const auto r = insertion_oracle(s, 1, four, e);
  EXPECT_EQ(ctc::collapse(r.labels, e).size(), 7u);
  EXPECT_THROW(insertion_oracle(s, 1, Tokens{20, 21, 22, 23, 24}, e), InfeasibleInsertError);
}

TEST(InsertionOracle, RequiresDensityOne) {
  const auto s = build_interleaved(Tokens{10, 11, 12}, e, {2, 0});
  EXPECT_THROW(insertion_oracle(s, 1, Tokens{20}, e), ConfigError);
}

TEST(InsertionOracle, BoundHoldsOnRandomSequences) {
  Rng rng(77);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t n = 4 + rng.below(10);
    auto x = random_tokens(rng, n, 10);  // letters 4..13
    // adjacent duplicates would need extra blanks once neighbours shift
    for (std::size_t j = 1; j < n; ++j)
      if (x[j] == x[j - 1]) x[j] = x[j] == 13 ? 4 : x[j] + 1;
    const auto s = build_interleaved(x, e, kNoPad);
    const std::size_t m = 1 + rng.below(4);
    const std::size_t gap = rng.below(n + 1);
    Tokens ins(m);
    for (std::size_t j = 0; j < m; ++j) ins[j] = 20 + static_cast<TokenId>(j);  // never equal to content
    const auto r = insertion_oracle(s, gap, ins, e);
    EXPECT_LE(r.changed_count, 2 * m - 1);
    // fresh tokens cannot reuse any position, so neighbours must shift
    EXPECT_EQ(r.changed_count, 2 * m - 1);
  }
}

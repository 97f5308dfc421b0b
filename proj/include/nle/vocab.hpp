// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nle/error.hpp"

namespace nle {

using TokenId = int;
using Tokens = std::vector<TokenId>;

/// Character inventory shared by corpus, editor and baselines.
///
/// Ids 0..2 are reserved: blank (ε, which also fills insertion slots), BOS
/// and EOS. Id 3 is the word separator, 4..29 the letters a-z.
struct Vocab {
  static constexpr TokenId blank = 0;
  static constexpr TokenId bos = 1;
  static constexpr TokenId eos = 2;
  static constexpr TokenId space = 3;
  static constexpr TokenId first_letter = 4;
  static constexpr int size = 30;

  /// Content symbols a corrupted hypothesis may contain: space and letters.
  static constexpr int num_content = 27;
  static constexpr TokenId content(int i) { return space + i; }

  static constexpr bool is_content(TokenId t) { return t >= space && t < size; }

  static TokenId encode_char(char c) {
    if (c == ' ') return space;
    if (c >= 'a' && c <= 'z') return first_letter + (c - 'a');
    throw Error(std::string("character '") + c + "' is not in the vocabulary");
  }

  static char decode_char(TokenId t) {
    if (t == space) return ' ';
    if (t >= first_letter && t < size) return static_cast<char>('a' + (t - first_letter));
    throw Error("token " + std::to_string(t) + " has no character form");
  }

  static Tokens encode(std::string_view text) {
    Tokens out;
    out.reserve(text.size());
    for (char c : text) out.push_back(encode_char(c));
    return out;
  }

  /// Text of the content tokens; reserved ids are skipped.
  static std::string decode(std::span<const TokenId> tokens) {
    std::string out;
    out.reserve(tokens.size());
    for (TokenId t : tokens)
      if (is_content(t)) out.push_back(decode_char(t));
    return out;
  }

  /// Every position rendered, ε as '_', BOS/EOS as '^'/'$'.
  static std::string render(std::span<const TokenId> tokens) {
    std::string out;
    for (TokenId t : tokens) {
      if (t == blank) out.push_back('_');
      else if (t == bos) out.push_back('^');
      else if (t == eos) out.push_back('$');
      else out.push_back(decode_char(t));
    }
    return out;
  }
};

/// Text-to-token mapping used before interleaving. Only the identity
/// character tokenizer ships; the interface leaves room for subword units.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual Tokens encode(std::string_view text) const = 0;
  virtual std::string decode(std::span<const TokenId> tokens) const = 0;
};

class CharTokenizer final : public Tokenizer {
 public:
  Tokens encode(std::string_view text) const override { return Vocab::encode(text); }
  std::string decode(std::span<const TokenId> tokens) const override { return Vocab::decode(tokens); }
};

}  // namespace nle

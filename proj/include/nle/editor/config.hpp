// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "nle/kv.hpp"
#include "nle/error.hpp"
#include "nle/vocab.hpp"

namespace nle::editor {

struct LoraTargets {
  bool attention = true;
  bool mlp = true;
};

struct EditorConfig {
  std::size_t layers = 2;
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t d_ff = 256;
  std::size_t vocab_size = Vocab::size;
  std::size_t lora_rank = 16;
  double lora_alpha = 16.0;  // adapter output scaled by alpha / rank
  LoraTargets lora_targets;
  bool bidirectional = true;
  bool tie_embeddings = true;
  std::size_t projector_downsample = 2;
  std::size_t max_positions = 256;
  // Position id of the first text token when frames are present; 0 places
  // text right after the acoustic block. A fixed start keeps the offset
  // between a text slot and its frames independent of utterance length.
  std::size_t text_position_start = 80;
  std::size_t d_frame = 32;
  double embedding_std = 0.3;  // token init std; also the sinusoid amplitude of the position table
  double dropout = 0.0;  // on projector output

  void validate() const {
    if (layers == 0 || d_model == 0 || heads == 0 || d_ff == 0) throw ConfigError("model sizes must be positive");
    if (d_model % heads != 0) {
      throw ConfigError("d_model " + std::to_string(d_model) + " not divisible by " + std::to_string(heads) +
                        " heads");
    }
    if (vocab_size < 2) throw ConfigError("vocabulary needs blank plus one symbol");
    if (projector_downsample == 0) throw ConfigError("projector_downsample must be positive");
    if (max_positions == 0) throw ConfigError("max_positions must be positive");
    if (text_position_start >= max_positions) throw ConfigError("text_position_start must be below max_positions");
    if (lora_rank > 0 && !(lora_alpha > 0.0)) throw ConfigError("lora_alpha must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
    if (!(embedding_std > 0.0)) throw ConfigError("embedding_std must be positive");
  }

  double lora_scale() const { return lora_rank == 0 ? 0.0 : lora_alpha / static_cast<double>(lora_rank); }

  std::size_t acoustic_positions(std::size_t frames) const {
    return (frames + projector_downsample - 1) / projector_downsample;
  }

  /// Position id of the first text token after `acoustic` acoustic positions.
  std::size_t first_text_position(std::size_t acoustic) const {
    return acoustic == 0 || text_position_start == 0 ? acoustic : text_position_start;
  }

  /// Whether [acoustic; text] fits the position table.
  bool fits(std::size_t acoustic, std::size_t text) const {
    if (text_position_start > 0 && acoustic > text_position_start) return false;
    return first_text_position(acoustic) + text <= max_positions;
  }

  kv::Map to_kv() const {
    return {{"model.layers", kv::str(layers)},
            {"model.d_model", kv::str(d_model)},
            {"model.heads", kv::str(heads)},
            {"model.d_ff", kv::str(d_ff)},
            {"model.vocab_size", kv::str(vocab_size)},
            {"model.lora_rank", kv::str(lora_rank)},
            {"model.lora_alpha", kv::str(lora_alpha)},
            {"model.lora_attention", kv::str(lora_targets.attention)},
            {"model.lora_mlp", kv::str(lora_targets.mlp)},
            {"model.bidirectional", kv::str(bidirectional)},
            {"model.tie_embeddings", kv::str(tie_embeddings)},
            {"model.projector_downsample", kv::str(projector_downsample)},
            {"model.max_positions", kv::str(max_positions)},
            {"model.text_position_start", kv::str(text_position_start)},
            {"model.d_frame", kv::str(d_frame)},
            {"model.dropout", kv::str(dropout)},
            {"model.embedding_std", kv::str(embedding_std)}};
  }

  /// Overrides fields present in `m`; other keys are ignored.
  void apply(const kv::Map& m) {
    kv::read(m, "model.layers", layers);
    kv::read(m, "model.d_model", d_model);
    kv::read(m, "model.heads", heads);
    kv::read(m, "model.d_ff", d_ff);
    kv::read(m, "model.vocab_size", vocab_size);
    kv::read(m, "model.lora_rank", lora_rank);
    kv::read(m, "model.lora_alpha", lora_alpha);
    kv::read(m, "model.lora_attention", lora_targets.attention);
    kv::read(m, "model.lora_mlp", lora_targets.mlp);
    kv::read(m, "model.bidirectional", bidirectional);
    kv::read(m, "model.tie_embeddings", tie_embeddings);
    kv::read(m, "model.projector_downsample", projector_downsample);
    kv::read(m, "model.max_positions", max_positions);
    kv::read(m, "model.text_position_start", text_position_start);
    kv::read(m, "model.d_frame", d_frame);
    kv::read(m, "model.dropout", dropout);
    kv::read(m, "model.embedding_std", embedding_std);
  }
};

}  // namespace nle::editor

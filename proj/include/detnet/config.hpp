#pragma once

#include <string>

#include "detnet/errors.hpp"

namespace detnet {

// Which detector stack a model runs with.
//   S:     sentence detector only (sentences as instances, documents as bags)
//   F:     adds the word detector and the upward gate
//   FPlus: adds definition-based prior scores and the prior gate
enum class Variant { S, F, FPlus };

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::S: return "detnet-s";
    case Variant::F: return "detnet-f";
    case Variant::FPlus: return "detnet-f+";
  }
  return "?";
}

inline Variant variant_from_name(const std::string& s) {
  if (s == "detnet-s") return Variant::S;
  if (s == "detnet-f") return Variant::F;
  if (s == "detnet-f+") return Variant::FPlus;
  throw UsageError("unknown detnet variant: " + s);
}

struct ModelConfig {
  int embed_dim = 256;   // d_x = d_z = d_h
  int ffn_dim = 512;
  int heads = 4;
  int layers = 3;        // standard layers; one attention-only layer follows
  int max_doc_len = 100;
  int max_sent_len = 60;
  double gate_gamma = 0.1;
  double gate_lambda = 0.1;
  double dropout = 0.1;
  bool positional_encoding = true;
  Variant variant = Variant::FPlus;

  int head_dim() const { return embed_dim / heads; }

  void validate() const {
    if (embed_dim < 1 || heads < 1 || layers < 1 || ffn_dim < 1)
      throw UsageError("model dimensions must be positive");
    if (embed_dim % heads != 0)
      throw UsageError("head count must divide embed_dim");
    if (gate_gamma <= 0.0 || gate_gamma > 1.0 || gate_lambda <= 0.0 ||
        gate_lambda > 1.0)
      throw UsageError("gate scaling factors must lie in (0, 1]");
    if (dropout < 0.0 || dropout >= 1.0)
      throw UsageError("dropout must lie in [0, 1)");
    if (max_doc_len < 1 || max_sent_len < 1)
      throw UsageError("clipping lengths must be positive");
  }
};

}  // namespace detnet

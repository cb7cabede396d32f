#pragma once

#include <string>
#include <vector>

#include "detnet/config.hpp"
#include "detnet/tape.hpp"

namespace detnet {

using ParamSet = std::vector<Tensor*>;

// One standard encoder layer: multi-head self-attention and a position-wise
// feed-forward network, each wrapped in residual + layer norm. Per-head
// projections are packed into d x d matrices as row blocks.
struct EncoderLayerParams {
  Tensor Wq, Wk, Wv, Wo;
  Tensor Wff1, bff1, Wff2, bff2;
  Tensor ln1_gain, ln1_bias, ln2_gain, ln2_bias;

  EncoderLayerParams(const std::string& prefix, const ModelConfig& cfg);
  void collect(ParamSet& out);
};

// A full self-attentive encoder stack: `layers` standard layers plus a final
// attention-only layer whose attention matrices feed salience pooling.
struct EncoderStackParams {
  std::vector<EncoderLayerParams> layers;
  Tensor attn_Wq, attn_Wk;

  EncoderStackParams(const std::string& prefix, const ModelConfig& cfg);
  void collect(ParamSet& out);
};

// Tape-side encoding result for one sequence (a sentence of words or a
// document of sentence embeddings).
struct SequenceEncoding {
  Var states;                 // d x len contextual representations (Z or H)
  std::vector<Var> attention; // r row-stochastic len x len matrices (A or B)
  Var salience_row;           // 1 x len distribution (alpha or beta)
  Var salience_col;           // len x 1, same values
};

// Sinusoidal positional signal, deterministic in d and n.
Mat positional_encoding(int d, int n);

// softmax(Q^T K / sqrt(d)) used as mixing weights over V's columns; each
// output column is a convex combination of value vectors.
Mat single_head_attention(const Mat& Q, const Mat& K, const Mat& V);

// Salience from a set of row-stochastic attention matrices: per-position
// received attention summed over heads, scaled by 1/sqrt(len * heads), then
// softmax.
std::vector<double> pool_salience(const std::vector<Mat>& attention);

// Bare multi-head attention: per-head projections of x, attention-mixed,
// concatenated and output-projected. No residual or normalization.
Var multi_head_attention(Tape& t, EncoderLayerParams& p, Var x, int heads);

// Position-wise feed-forward: Wff2 * relu(Wff1 * x + b1) + b2.
Var position_wise_ffn(Tape& t, EncoderLayerParams& p, Var x);

// Core stack application. x0 must already carry positional information when
// enabled. Exposed for the model implementations.
SequenceEncoding encode_sequence(Tape& t, EncoderStackParams& p, Var x0,
                                 const ModelConfig& cfg);

// Embeds a tokenized sentence, adds positions, and runs the word encoder.
SequenceEncoding encode_words(Tape& t, EncoderStackParams& p,
                              Tensor& embeddings, const std::vector<int>& ids,
                              const ModelConfig& cfg);

// g = Z * alpha.
Var sentence_embedding(Tape& t, const SequenceEncoding& words);

// Adds positions to the sentence-embedding matrix G and runs the sentence
// encoder.
SequenceEncoding encode_sentences(Tape& t, EncoderStackParams& p, Var g,
                                  const ModelConfig& cfg);

// Encodes each definition (a list of tokenized sentences) as a miniature
// document with the shared encoders and pools it to one column; returns the
// d x C definition matrix in label order.
Var encode_definitions(Tape& t, EncoderStackParams& word_enc,
                       EncoderStackParams& sent_enc, Tensor& embeddings,
                       const std::vector<std::vector<std::vector<int>>>& defs,
                       const ModelConfig& cfg);

}  // namespace detnet

#include "detnet/encoder.hpp"

#include <cmath>

#include "detnet/check.hpp"

namespace detnet {

namespace {
constexpr double kLayerNormEps = 1e-5;

Var layer_norm(Tape& t, Var x, Tensor& gain, Tensor& bias) {
  // Normalizes each column over the feature dimension.
  Var mu = t.col_mean(x);
  Var xc = t.sub_row(x, mu);
  Var var = t.col_mean(t.mul(xc, xc));
  Var sd = t.sqrt(t.add_scalar(var, kLayerNormEps));
  Var xn = t.div_row(xc, sd);
  return t.add_col(t.mul_col(xn, t.param(gain)), t.param(bias));
}

// Attention weights for all heads of one projected (Q, K) pair.
std::vector<Var> head_attention(Tape& t, Var q, Var k, int heads) {
  const int dh = t.value(q).rows() / heads;
  std::vector<Var> mats;
  mats.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    Var qh = t.slice_rows(q, h * dh, dh);
    Var kh = t.slice_rows(k, h * dh, dh);
    Var scores = t.scale(t.matmul_tn(qh, kh), 1.0 / std::sqrt(double(dh)));
    mats.push_back(t.softmax_rows(scores));
  }
  return mats;
}

Var multi_head_layer(Tape& t, EncoderLayerParams& lp, Var x,
                     const ModelConfig& cfg) {
  Var mixed = multi_head_attention(t, lp, x, cfg.heads);
  Var x1 = layer_norm(t, t.add(x, mixed), lp.ln1_gain, lp.ln1_bias);
  Var ffn = position_wise_ffn(t, lp, x1);
  return layer_norm(t, t.add(x1, ffn), lp.ln2_gain, lp.ln2_bias);
}

Var salience_from_attention(Tape& t, const std::vector<Var>& mats, int len,
                            int heads) {
  Var total = t.col_sum(mats[0]);
  for (size_t i = 1; i < mats.size(); ++i)
    total = t.add(total, t.col_sum(mats[i]));
  return t.softmax_rows(t.scale(total, 1.0 / std::sqrt(double(len) * heads)));
}

}  // namespace

Var multi_head_attention(Tape& t, EncoderLayerParams& lp, Var x, int heads) {
  Var q = t.matmul(t.param(lp.Wq), x);
  Var k = t.matmul(t.param(lp.Wk), x);
  Var v = t.matmul(t.param(lp.Wv), x);
  const int dh = t.value(q).rows() / heads;
  std::vector<Var> outputs;
  outputs.reserve(heads);
  std::vector<Var> weights = head_attention(t, q, k, heads);
  for (int h = 0; h < heads; ++h) {
    Var vh = t.slice_rows(v, h * dh, dh);
    outputs.push_back(t.matmul_nt(vh, weights[h]));
  }
  return t.matmul(t.param(lp.Wo), t.vconcat(outputs));
}

Var position_wise_ffn(Tape& t, EncoderLayerParams& lp, Var x) {
  Var inner = t.relu(t.add_col(t.matmul(t.param(lp.Wff1), x), t.param(lp.bff1)));
  return t.add_col(t.matmul(t.param(lp.Wff2), inner), t.param(lp.bff2));
}

EncoderLayerParams::EncoderLayerParams(const std::string& prefix,
                                       const ModelConfig& cfg)
    : Wq(prefix + ".Wq", cfg.embed_dim, cfg.embed_dim),
      Wk(prefix + ".Wk", cfg.embed_dim, cfg.embed_dim),
      Wv(prefix + ".Wv", cfg.embed_dim, cfg.embed_dim),
      Wo(prefix + ".Wo", cfg.embed_dim, cfg.embed_dim),
      Wff1(prefix + ".Wff1", cfg.ffn_dim, cfg.embed_dim),
      bff1(prefix + ".bff1", cfg.ffn_dim, 1, InitKind::Zero),
      Wff2(prefix + ".Wff2", cfg.embed_dim, cfg.ffn_dim),
      bff2(prefix + ".bff2", cfg.embed_dim, 1, InitKind::Zero),
      ln1_gain(prefix + ".ln1_gain", cfg.embed_dim, 1, InitKind::One),
      ln1_bias(prefix + ".ln1_bias", cfg.embed_dim, 1, InitKind::Zero),
      ln2_gain(prefix + ".ln2_gain", cfg.embed_dim, 1, InitKind::One),
      ln2_bias(prefix + ".ln2_bias", cfg.embed_dim, 1, InitKind::Zero) {}

void EncoderLayerParams::collect(ParamSet& out) {
  for (Tensor* t : {&Wq, &Wk, &Wv, &Wo, &Wff1, &bff1, &Wff2, &bff2, &ln1_gain,
                    &ln1_bias, &ln2_gain, &ln2_bias})
    out.push_back(t);
}

EncoderStackParams::EncoderStackParams(const std::string& prefix,
                                       const ModelConfig& cfg)
    : attn_Wq(prefix + ".attn.Wq", cfg.embed_dim, cfg.embed_dim),
      attn_Wk(prefix + ".attn.Wk", cfg.embed_dim, cfg.embed_dim) {
  for (int i = 0; i < cfg.layers; ++i)
    layers.emplace_back(prefix + ".layer" + std::to_string(i), cfg);
}

void EncoderStackParams::collect(ParamSet& out) {
  for (auto& l : layers) l.collect(out);
  out.push_back(&attn_Wq);
  out.push_back(&attn_Wk);
}

Mat positional_encoding(int d, int n) {
  Mat pe(d, n);
  for (int pos = 0; pos < n; ++pos) {
    for (int i = 0; i + 1 < d; i += 2) {
      const double rate = std::pow(10000.0, double(i) / d);
      pe(i, pos) = std::sin(pos / rate);
      pe(i + 1, pos) = std::cos(pos / rate);
    }
    if (d % 2 == 1) pe(d - 1, pos) = std::sin(pos / std::pow(10000.0, double(d - 1) / d));
  }
  return pe;
}

Mat single_head_attention(const Mat& Q, const Mat& K, const Mat& V) {
  DETNET_CHECK(Q.rows() == K.rows() && K.cols() == V.cols(),
               "attention shapes must conform");
  Tape t;
  Var s = t.softmax_rows(
      t.scale(t.matmul_tn(t.input(Q), t.input(K)), 1.0 / std::sqrt(double(Q.rows()))));
  return t.value(t.matmul_nt(t.input(V), s));
}

std::vector<double> pool_salience(const std::vector<Mat>& attention) {
  DETNET_CHECK(!attention.empty(), "pool_salience needs attention matrices");
  Tape t;
  std::vector<Var> mats;
  for (const Mat& a : attention) mats.push_back(t.input(a));
  Var row = salience_from_attention(t, mats, attention[0].cols(),
                                    int(attention.size()));
  const Mat& v = t.value(row);
  return std::vector<double>(v.data(), v.data() + v.size());
}

SequenceEncoding encode_sequence(Tape& t, EncoderStackParams& p, Var x0,
                                 const ModelConfig& cfg) {
  Var x = x0;
  for (auto& layer : p.layers) x = multi_head_layer(t, layer, x, cfg);

  Var q = t.matmul(t.param(p.attn_Wq), x);
  Var k = t.matmul(t.param(p.attn_Wk), x);
  SequenceEncoding enc;
  enc.states = x;
  enc.attention = head_attention(t, q, k, cfg.heads);
  enc.salience_row =
      salience_from_attention(t, enc.attention, t.value(x).cols(), cfg.heads);
  enc.salience_col = t.transpose(enc.salience_row);
  return enc;
}

SequenceEncoding encode_words(Tape& t, EncoderStackParams& p,
                              Tensor& embeddings, const std::vector<int>& ids,
                              const ModelConfig& cfg) {
  DETNET_CHECK(!ids.empty(), "cannot encode an empty sentence");
  Var x = t.embed(embeddings, ids);
  if (cfg.positional_encoding)
    x = t.add(x, t.input(positional_encoding(cfg.embed_dim, int(ids.size()))));
  return encode_sequence(t, p, x, cfg);
}

Var sentence_embedding(Tape& t, const SequenceEncoding& words) {
  return t.matmul(words.states, words.salience_col);
}

SequenceEncoding encode_sentences(Tape& t, EncoderStackParams& p, Var g,
                                  const ModelConfig& cfg) {
  Var x = g;
  if (cfg.positional_encoding)
    x = t.add(x, t.input(positional_encoding(cfg.embed_dim, t.value(g).cols())));
  return encode_sequence(t, p, x, cfg);
}

Var encode_definitions(Tape& t, EncoderStackParams& word_enc,
                       EncoderStackParams& sent_enc, Tensor& embeddings,
                       const std::vector<std::vector<std::vector<int>>>& defs,
                       const ModelConfig& cfg) {
  std::vector<Var> columns;
  columns.reserve(defs.size());
  for (const auto& def : defs) {
    DETNET_CHECK(!def.empty(), "definition without sentences");
    std::vector<Var> gs;
    gs.reserve(def.size());
    for (const auto& sent : def) {
      SequenceEncoding words = encode_words(t, word_enc, embeddings, sent, cfg);
      gs.push_back(sentence_embedding(t, words));
    }
    SequenceEncoding sents = encode_sentences(t, sent_enc, t.hconcat(gs), cfg);
    columns.push_back(t.matmul(sents.states, sents.salience_col));
  }
  return t.hconcat(columns);
}

}  // namespace detnet

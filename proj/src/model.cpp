#include "detnet/model.hpp"

#include <cmath>

#include "detnet/check.hpp"

namespace detnet {

Var multilabel_loss(Tape& t, Var scores, const Mat& targets) {
  const Mat& sv = t.value(scores);
  DETNET_CHECK(sv.same_shape(targets), "loss target shape");
  Mat neg(targets.rows(), targets.cols());
  for (size_t i = 0; i < neg.size(); ++i) neg.data()[i] = -targets.data()[i];
  Var margins = t.mul(scores, t.input(std::move(neg)));
  return t.scale(t.sum_all(t.softplus(margins)), 1.0 / targets.cols());
}

double multilabel_loss_value(const Mat& scores, const Mat& targets) {
  DETNET_CHECK(scores.same_shape(targets), "loss target shape");
  double total = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    const double x = -scores.data()[i] * targets.data()[i];
    total += x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  }
  return total / scores.cols();
}

DetNetModel::DetNetModel(ModelConfig cfg, DomainLabelSet labels, int vocab_size)
    : cfg_(cfg),
      labels_(std::move(labels)),
      embeddings_("embeddings", cfg.embed_dim, vocab_size, InitKind::Embedding),
      word_enc_("word_enc", cfg),
      sent_enc_("sent_enc", cfg),
      Wh_("det.Wh", labels_.size(), cfg.embed_dim),
      bn_h_("det.bn_h", cfg.embed_dim) {
  cfg_.validate();
  const int C = labels_.size();
  const int d = cfg_.embed_dim;
  if (cfg_.variant != Variant::S) {
    Wz_.emplace("det.Wz", C, d);
    bn_z_.emplace("det.bn_z", d);
    Wl_.emplace("det.Wl", C, d + 2 * C);
    bl_.emplace("det.bl", C, 1, InitKind::Zero);
  }
  if (cfg_.variant == Variant::FPlus) {
    Wu_.emplace("det.Wu", d, d);  // d_u = d_h
    Wgp_.emplace("det.Wgp", C, d + 2 * C);
    bgp_.emplace("det.bgp", C, 1, InitKind::Zero);
  }

  params_.push_back(&embeddings_);
  word_enc_.collect(params_);
  sent_enc_.collect(params_);
  params_.push_back(&Wh_);
  bn_h_.collect(params_);
  if (Wz_) {
    params_.push_back(&*Wz_);
    bn_z_->collect(params_);
    params_.push_back(&*Wl_);
    params_.push_back(&*bl_);
  }
  if (Wu_) {
    params_.push_back(&*Wu_);
    params_.push_back(&*Wgp_);
    params_.push_back(&*bgp_);
  }
}

void DetNetModel::set_definitions(const DefinitionSet& defs,
                                  const Vocabulary& vocab) {
  def_ids_.clear();
  def_texts_ = defs;
  for (const auto& code : labels_.codes()) {
    auto it = defs.find(code);
    if (it == defs.end())
      throw DataError("missing definition for domain " + code);
    std::vector<std::vector<int>> sentences;
    for (const auto& sent : definition_sentences(it->second)) {
      std::vector<int> ids;
      for (const auto& tok : sent) {
        if (int(ids.size()) >= cfg_.max_sent_len) break;
        ids.push_back(vocab.index(tok));
      }
      if (!ids.empty()) sentences.push_back(std::move(ids));
    }
    if (sentences.empty())
      throw DataError("definition for domain " + code + " is empty");
    def_ids_.push_back(std::move(sentences));
  }
}

std::vector<std::pair<std::string, Mat*>> DetNetModel::buffers() {
  std::vector<std::pair<std::string, Mat*>> out{
      {"det.bn_h.running_mean", &bn_h_.running_mean},
      {"det.bn_h.running_var", &bn_h_.running_var}};
  if (bn_z_) {
    out.emplace_back("det.bn_z.running_mean", &bn_z_->running_mean);
    out.emplace_back("det.bn_z.running_var", &bn_z_->running_var);
  }
  return out;
}

std::vector<DetNetModel::DocVars> DetNetModel::forward(
    Tape& t, const std::vector<const IndexedDocument*>& docs, Mode mode,
    Rng* dropout_rng, Var* definition_matrix) {
  DETNET_CHECK(!docs.empty(), "empty batch");
  const bool word_level = cfg_.variant != Variant::S;
  const bool with_prior = cfg_.variant == Variant::FPlus;

  std::vector<DocVars> out(docs.size());

  // Encode every sentence and every document.
  for (size_t d = 0; d < docs.size(); ++d) {
    DETNET_CHECK(!docs[d]->sentences.empty(), "document without sentences");
    std::vector<Var> gs;
    gs.reserve(docs[d]->sentences.size());
    for (const auto& ids : docs[d]->sentences) {
      SequenceEncoding enc = encode_words(t, word_enc_, embeddings_, ids, cfg_);
      gs.push_back(sentence_embedding(t, enc));
      out[d].words.push_back(std::move(enc));
    }
    out[d].sents = encode_sentences(t, sent_enc_, t.hconcat(gs), cfg_);
  }

  Var u;
  if (with_prior) {
    DETNET_CHECK(!def_ids_.empty(),
                 "the prior variant needs definitions before forward");
    u = encode_definitions(t, word_enc_, sent_enc_, embeddings_, def_ids_, cfg_);
    if (definition_matrix) *definition_matrix = u;
  }

  // Word detector on batch-normalized word features.
  std::vector<std::vector<Var>> instance_cols(docs.size());
  if (word_level) {
    std::vector<Var> zs;
    for (const auto& doc : out)
      for (const auto& w : doc.words) zs.push_back(w.states);
    Var zcat = t.hconcat(zs);
    Var zin_all = dropout(t, batch_norm(t, *bn_z_, zcat, mode), cfg_.dropout,
                          mode, dropout_rng);
    int offset = 0;
    for (size_t d = 0; d < docs.size(); ++d) {
      for (size_t s = 0; s < out[d].words.size(); ++s) {
        const int n = t.value(out[d].words[s].states).cols();
        Var zin = t.slice_cols(zin_all, offset, n);
        offset += n;
        Var p_self = self_scores(t, *Wz_, zin);
        out[d].P_self.push_back(p_self);
        Var p = p_self;
        if (with_prior) {
          Var p_prior = word_prior_scores(t, *Wu_, u, out[d].words[s].states);
          Var gamma =
              gate(t, *Wgp_, *bgp_, {zin, p_self, p_prior}, cfg_.gate_gamma);
          p = fuse_scores(t, gamma, p_prior, p_self);
          out[d].P_prior.push_back(p_prior);
          out[d].Gamma.push_back(gamma);
        }
        out[d].P.push_back(p);
        instance_cols[d].push_back(
            sentence_instance_scores(t, p, out[d].words[s].salience_col));
      }
    }
  }

  // Sentence detector on batch-normalized sentence features.
  std::vector<Var> hs;
  for (const auto& doc : out) hs.push_back(doc.sents.states);
  Var hcat = t.hconcat(hs);
  Var hin_all = dropout(t, batch_norm(t, bn_h_, hcat, mode), cfg_.dropout,
                        mode, dropout_rng);
  int offset = 0;
  for (size_t d = 0; d < docs.size(); ++d) {
    const int s = t.value(out[d].sents.states).cols();
    Var hin = t.slice_cols(hin_all, offset, s);
    offset += s;
    Var q_self = self_scores(t, Wh_, hin);
    out[d].Q_self = q_self;
    Var q = q_self;
    if (word_level) {
      Var q_instc = t.hconcat(instance_cols[d]);
      Var lambda =
          gate(t, *Wl_, *bl_, {hin, q_instc, q_self}, cfg_.gate_lambda);
      q = fuse_scores(t, lambda, q_instc, q_self);
      out[d].Q_instc = q_instc;
      out[d].Lambda = lambda;
    }
    out[d].Q = q;
    out[d].y = document_scores(t, q, out[d].sents.salience_col);
  }
  return out;
}

Var DetNetModel::batch_scores(Tape& t,
                              const std::vector<const IndexedDocument*>& docs,
                              Mode mode, Rng* dropout_rng) {
  std::vector<DocVars> fwd = forward(t, docs, mode, dropout_rng);
  std::vector<Var> ys;
  ys.reserve(fwd.size());
  for (const auto& doc : fwd) ys.push_back(doc.y);
  return t.hconcat(ys);
}

namespace {
std::vector<double> to_vec(const Mat& column) {
  return std::vector<double>(column.data(), column.data() + column.size());
}
}  // namespace

ScoreSet DetNetModel::score_document(const IndexedDocument& doc) {
  Tape t;
  std::vector<const IndexedDocument*> batch{&doc};
  std::vector<DocVars> fwd = forward(t, batch, Mode::Eval, nullptr);
  const DocVars& dv = fwd[0];

  ScoreSet set;
  const int s = int(doc.sentences.size());
  set.beta = to_vec(t.value(dv.sents.salience_row));
  set.y = to_vec(t.value(dv.y));
  set.Q = t.value(dv.Q);
  set.Q_self = t.value(dv.Q_self);
  if (dv.Q_instc.valid()) set.Q_instc = t.value(dv.Q_instc);
  if (dv.Lambda.valid()) set.Lambda = t.value(dv.Lambda);

  set.sentences.resize(s);
  for (int i = 0; i < s; ++i) {
    SentenceScores& sent = set.sentences[i];
    sent.alpha = to_vec(t.value(dv.words[i].salience_row));
    if (!dv.P.empty()) {
      sent.P = t.value(dv.P[i]);
      sent.P_self = t.value(dv.P_self[i]);
      if (!dv.P_prior.empty()) {
        sent.P_prior = t.value(dv.P_prior[i]);
        sent.Gamma = t.value(dv.Gamma[i]);
      }
    } else {
      // Sentence-level variants broadcast sentence scores over words.
      const int n = int(doc.sentences[i].size());
      sent.P = Mat(labels_.size(), n);
      for (int c = 0; c < labels_.size(); ++c)
        for (int j = 0; j < n; ++j) sent.P(c, j) = set.Q(c, i);
    }
  }
  return set;
}

}  // namespace detnet

#include "detnet/baselines.hpp"

#include "detnet/check.hpp"

namespace detnet {

namespace {
std::vector<double> to_vec(const Mat& column) {
  return std::vector<double>(column.data(), column.data() + column.size());
}

Mat broadcast_cols(const std::vector<double>& col, int n) {
  Mat m(int(col.size()), n);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < n; ++j) m(i, j) = col[i];
  return m;
}
}  // namespace

// --- HierNet -----------------------------------------------------------------

HierNetModel::HierNetModel(ModelConfig cfg, DomainLabelSet labels, int vocab_size)
    : cfg_(cfg),
      labels_(std::move(labels)),
      embeddings_("embeddings", cfg.embed_dim, vocab_size, InitKind::Embedding),
      word_enc_("word_enc", cfg),
      sent_enc_("sent_enc", cfg),
      Wdoc_("doc.Wdoc", labels_.size(), cfg.embed_dim) {
  cfg_.validate();
  params_.push_back(&embeddings_);
  word_enc_.collect(params_);
  sent_enc_.collect(params_);
  params_.push_back(&Wdoc_);
}

Var HierNetModel::doc_score(Tape& t, const IndexedDocument& doc,
                            SequenceEncoding* sents_out,
                            std::vector<SequenceEncoding>* words_out) {
  std::vector<Var> gs;
  gs.reserve(doc.sentences.size());
  for (const auto& ids : doc.sentences) {
    SequenceEncoding enc = encode_words(t, word_enc_, embeddings_, ids, cfg_);
    gs.push_back(sentence_embedding(t, enc));
    if (words_out) words_out->push_back(std::move(enc));
  }
  SequenceEncoding sents = encode_sentences(t, sent_enc_, t.hconcat(gs), cfg_);
  Var d = t.matmul(sents.states, sents.salience_col);
  Var y = t.tanh(t.matmul(t.param(Wdoc_), d));
  if (sents_out) *sents_out = sents;
  return y;
}

Var HierNetModel::batch_scores(Tape& t,
                               const std::vector<const IndexedDocument*>& docs,
                               Mode, Rng*) {
  std::vector<Var> ys;
  ys.reserve(docs.size());
  for (const IndexedDocument* doc : docs)
    ys.push_back(doc_score(t, *doc, nullptr, nullptr));
  return t.hconcat(ys);
}

ScoreSet HierNetModel::score_document(const IndexedDocument& doc) {
  Tape t;
  SequenceEncoding sents;
  std::vector<SequenceEncoding> words;
  Var y = doc_score(t, doc, &sents, &words);

  ScoreSet set;
  set.y = to_vec(t.value(y));
  set.beta = to_vec(t.value(sents.salience_row));
  // Document predictions broadcast to all sentences and words.
  set.Q = broadcast_cols(set.y, int(doc.sentences.size()));
  set.sentences.resize(doc.sentences.size());
  for (size_t i = 0; i < doc.sentences.size(); ++i) {
    set.sentences[i].alpha = to_vec(t.value(words[i].salience_row));
    set.sentences[i].P = broadcast_cols(set.y, int(doc.sentences[i].size()));
  }
  return set;
}

// --- MilNet ------------------------------------------------------------------

MilNetModel::MilNetModel(ModelConfig cfg, DomainLabelSet labels, int vocab_size)
    : cfg_(cfg),
      labels_(std::move(labels)),
      embeddings_("embeddings", cfg.embed_dim, vocab_size, InitKind::Embedding),
      sent_enc_("sent_enc", cfg),
      Wm_("mil.Wm", labels_.size(), cfg.embed_dim) {
  cfg_.validate();
  params_.push_back(&embeddings_);
  sent_enc_.collect(params_);
  params_.push_back(&Wm_);
}

MilNetModel::DocVars MilNetModel::doc_forward(Tape& t, const IndexedDocument& doc) {
  std::vector<Var> gs;
  gs.reserve(doc.sentences.size());
  for (const auto& ids : doc.sentences)
    gs.push_back(t.row_mean(t.embed(embeddings_, ids)));
  Var g = t.hconcat(gs);
  DocVars dv;
  dv.Q = t.tanh(t.matmul(t.param(Wm_), g));  // context-free sentence scores
  dv.sents = encode_sentences(t, sent_enc_, g, cfg_);
  dv.y = t.matmul(dv.Q, dv.sents.salience_col);
  return dv;
}

Var MilNetModel::batch_scores(Tape& t,
                              const std::vector<const IndexedDocument*>& docs,
                              Mode, Rng*) {
  std::vector<Var> ys;
  ys.reserve(docs.size());
  for (const IndexedDocument* doc : docs) ys.push_back(doc_forward(t, *doc).y);
  return t.hconcat(ys);
}

ScoreSet MilNetModel::score_document(const IndexedDocument& doc) {
  Tape t;
  DocVars dv = doc_forward(t, doc);
  ScoreSet set;
  set.y = to_vec(t.value(dv.y));
  set.beta = to_vec(t.value(dv.sents.salience_row));
  set.Q = t.value(dv.Q);
  set.sentences.resize(doc.sentences.size());
  for (size_t i = 0; i < doc.sentences.size(); ++i) {
    const int n = int(doc.sentences[i].size());
    // Sentence scores broadcast over words; no word-level attention exists.
    set.sentences[i].P = broadcast_cols(set.Q.column(int(i)), n);
    set.sentences[i].alpha.assign(n, 1.0 / n);
  }
  return set;
}

// --- Major -------------------------------------------------------------------

MajorModel::MajorModel(ModelConfig cfg, DomainLabelSet labels)
    : cfg_(cfg),
      labels_(std::move(labels)),
      scores_("major.scores", labels_.size(), 1, InitKind::Zero) {
  scores_.value.fill(-1.0);
  scores_.value(0, 0) = 1.0;
  params_.push_back(&scores_);
}

void MajorModel::fit(const std::vector<IndexedDocument>& train_docs) {
  DETNET_CHECK(!train_docs.empty(), "major baseline needs a training corpus");
  std::vector<long long> counts(labels_.size(), 0);
  for (const auto& doc : train_docs)
    for (int c = 0; c < labels_.size(); ++c)
      if (doc.label_vector[c] > 0.0) ++counts[c];
  int best = 0;
  for (int c = 1; c < labels_.size(); ++c)
    if (counts[c] > counts[best]) best = c;
  scores_.value.fill(-1.0);
  scores_.value(best, 0) = 1.0;
}

int MajorModel::majority_index() const {
  for (int c = 0; c < scores_.value.rows(); ++c)
    if (scores_.value(c, 0) > 0.0) return c;
  return 0;
}

Var MajorModel::batch_scores(Tape& t,
                             const std::vector<const IndexedDocument*>& docs,
                             Mode, Rng*) {
  Var col = t.param(scores_);
  std::vector<Var> ys(docs.size(), col);
  return t.hconcat(ys);
}

ScoreSet MajorModel::score_document(const IndexedDocument& doc) {
  ScoreSet set;
  set.y = to_vec(scores_.value);
  const int s = int(doc.sentences.size());
  set.Q = broadcast_cols(set.y, s);
  set.beta.assign(s, 1.0 / s);
  set.sentences.resize(s);
  for (int i = 0; i < s; ++i) {
    const int n = int(doc.sentences[i].size());
    set.sentences[i].P = broadcast_cols(set.y, n);
    set.sentences[i].alpha.assign(n, 1.0 / n);
  }
  return set;
}

}  // namespace detnet

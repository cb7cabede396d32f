#pragma once

#include "detnet/model.hpp"

namespace detnet {

// Document-only model: attentively pooled document embedding d = H * beta,
// scores tanh(Wdoc * d). Sentence and word predictions inherit the document
// scores.
class HierNetModel final : public Model {
 public:
  HierNetModel(ModelConfig cfg, DomainLabelSet labels, int vocab_size);
  HierNetModel(const HierNetModel&) = delete;
  HierNetModel& operator=(const HierNetModel&) = delete;

  std::string kind() const override { return "hiernet"; }
  const ModelConfig& config() const override { return cfg_; }
  const DomainLabelSet& labels() const override { return labels_; }
  ParamSet& params() override { return params_; }

  Var batch_scores(Tape& t, const std::vector<const IndexedDocument*>& docs,
                   Mode mode, Rng* dropout_rng) override;
  ScoreSet score_document(const IndexedDocument& doc) override;

  Var doc_score(Tape& t, const IndexedDocument& doc, SequenceEncoding* sents_out,
                std::vector<SequenceEncoding>* words_out);

 private:
  ModelConfig cfg_;
  DomainLabelSet labels_;
  Tensor embeddings_;
  EncoderStackParams word_enc_, sent_enc_;
  Tensor Wdoc_;
  ParamSet params_;
};

// Sentence-instance model with context-free sentence embeddings: g is the
// plain mean of word embeddings (no word encoder), sentence scores come from
// tanh(Wm * g) before the sentence encoder, which only contributes beta.
class MilNetModel final : public Model {
 public:
  MilNetModel(ModelConfig cfg, DomainLabelSet labels, int vocab_size);
  MilNetModel(const MilNetModel&) = delete;
  MilNetModel& operator=(const MilNetModel&) = delete;

  std::string kind() const override { return "milnet"; }
  const ModelConfig& config() const override { return cfg_; }
  const DomainLabelSet& labels() const override { return labels_; }
  ParamSet& params() override { return params_; }

  Var batch_scores(Tape& t, const std::vector<const IndexedDocument*>& docs,
                   Mode mode, Rng* dropout_rng) override;
  ScoreSet score_document(const IndexedDocument& doc) override;

  struct DocVars {
    Var Q, y;
    SequenceEncoding sents;
  };
  DocVars doc_forward(Tape& t, const IndexedDocument& doc);

 private:
  ModelConfig cfg_;
  DomainLabelSet labels_;
  Tensor embeddings_;
  EncoderStackParams sent_enc_;
  Tensor Wm_;
  ParamSet params_;
};

// Constant predictor: the most frequent training label applies to every
// document, sentence, and word. Frequency ties break toward the lowest label
// index.
class MajorModel final : public Model {
 public:
  MajorModel(ModelConfig cfg, DomainLabelSet labels);
  MajorModel(const MajorModel&) = delete;
  MajorModel& operator=(const MajorModel&) = delete;

  void fit(const std::vector<IndexedDocument>& train_docs);
  int majority_index() const;

  std::string kind() const override { return "major"; }
  const ModelConfig& config() const override { return cfg_; }
  const DomainLabelSet& labels() const override { return labels_; }
  ParamSet& params() override { return params_; }

  Var batch_scores(Tape& t, const std::vector<const IndexedDocument*>& docs,
                   Mode mode, Rng* dropout_rng) override;
  ScoreSet score_document(const IndexedDocument& doc) override;

 private:
  ModelConfig cfg_;
  DomainLabelSet labels_;
  Tensor scores_;  // C x 1, +1 for the majority label, -1 elsewhere
  ParamSet params_;
};

}  // namespace detnet

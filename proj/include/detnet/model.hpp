#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "detnet/corpus.hpp"
#include "detnet/detector.hpp"

namespace detnet {

// Trainable scoring model: DetNet variants and the learned baselines all
// expose document scores on a tape (for the shared trainer) plus full
// per-granularity scores for inference.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string kind() const = 0;
  virtual const ModelConfig& config() const = 0;
  virtual const DomainLabelSet& labels() const = 0;

  // Learnable tensors in a stable registration order.
  virtual ParamSet& params() = 0;
  // Non-learnable named state (batch-norm running statistics).
  virtual std::vector<std::pair<std::string, Mat*>> buffers() { return {}; }

  // C x N document score matrix for a batch.
  virtual Var batch_scores(Tape& t,
                           const std::vector<const IndexedDocument*>& docs,
                           Mode mode, Rng* dropout_rng) = 0;

  // Deterministic full scoring of one document (Eval mode).
  virtual ScoreSet score_document(const IndexedDocument& doc) = 0;
};

// mean over documents of sum_c log(1 + exp(-score * target)).
// scores and targets are C x N; targets take values in {-1, +1}.
Var multilabel_loss(Tape& t, Var scores, const Mat& targets);
double multilabel_loss_value(const Mat& scores, const Mat& targets);

class DetNetModel final : public Model {
 public:
  DetNetModel(ModelConfig cfg, DomainLabelSet labels, int vocab_size);
  DetNetModel(const DetNetModel&) = delete;
  DetNetModel& operator=(const DetNetModel&) = delete;

  // Required before any forward pass of the F+ variant.
  void set_definitions(const DefinitionSet& defs, const Vocabulary& vocab);
  bool has_definitions() const { return !def_ids_.empty(); }
  const DefinitionSet& definition_texts() const { return def_texts_; }

  std::string kind() const override { return variant_name(cfg_.variant); }
  const ModelConfig& config() const override { return cfg_; }
  const DomainLabelSet& labels() const override { return labels_; }
  ParamSet& params() override { return params_; }
  std::vector<std::pair<std::string, Mat*>> buffers() override;

  Var batch_scores(Tape& t, const std::vector<const IndexedDocument*>& docs,
                   Mode mode, Rng* dropout_rng) override;
  ScoreSet score_document(const IndexedDocument& doc) override;

  // Tape-side outputs for one document; exposed for tests and inference.
  struct DocVars {
    std::vector<SequenceEncoding> words;
    SequenceEncoding sents;
    std::vector<Var> P, P_self, P_prior, Gamma;  // per sentence; empty under S
    Var Q_instc, Q_self, Lambda, Q, y;
  };
  std::vector<DocVars> forward(Tape& t,
                               const std::vector<const IndexedDocument*>& docs,
                               Mode mode, Rng* dropout_rng,
                               Var* definition_matrix = nullptr);

  Tensor& embeddings() { return embeddings_; }

 private:
  ModelConfig cfg_;
  DomainLabelSet labels_;
  Tensor embeddings_;
  EncoderStackParams word_enc_, sent_enc_;

  Tensor Wh_;               // sentence self-scoring
  BatchNormParams bn_h_;

  std::optional<Tensor> Wz_;               // word detector (F, F+)
  std::optional<BatchNormParams> bn_z_;
  std::optional<Tensor> Wl_, bl_;          // upward gate

  std::optional<Tensor> Wu_, Wgp_, bgp_;   // prior path (F+)

  std::vector<std::vector<std::vector<int>>> def_ids_;  // per domain
  DefinitionSet def_texts_;

  ParamSet params_;
};

}  // namespace detnet

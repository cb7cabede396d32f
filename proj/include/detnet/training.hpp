#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "detnet/metrics.hpp"
#include "detnet/model.hpp"

namespace detnet {

struct TrainConfig {
  ModelConfig model;
  std::vector<std::string> labels;  // empty = default domain label set
  int batch_size = 16;
  int epochs = 10;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double grad_clip = 0.0;  // global-norm threshold; 0 disables clipping
  uint64_t seed = 42;
  int vocab_max_size = 50000;
  int vocab_min_freq = 1;

  void validate() const;
};

// JSON config file mirroring TrainConfig; missing keys keep their defaults.
TrainConfig load_train_config(const std::string& path);
std::string train_config_to_json(const TrainConfig& cfg);

// Weight matrices: uniform in +-1/sqrt(fan_in); biases zero; norm gains one;
// embeddings uniform in +-0.1. Deterministic in the seed and registration
// order.
void init_params(ParamSet& params, uint64_t seed);

class AdamOptimizer {
 public:
  AdamOptimizer(ParamSet& params, double lr, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);
  void zero_grad();
  void step();
  long long steps_taken() const { return t_; }

 private:
  ParamSet* params_;
  std::vector<Mat> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  long long t_ = 0;
};

// C x N target matrix in {-1, +1} from document label vectors.
Mat batch_targets(const std::vector<const IndexedDocument*>& docs);

// Gold label-index sets per document.
std::vector<std::vector<int>> gold_label_sets(
    const std::vector<IndexedDocument>& docs);

// Predicted label-index sets per document (Eval mode, threshold 0).
std::vector<std::vector<int>> predict_label_sets(
    Model& model, const std::vector<IndexedDocument>& docs);

struct EpochLog {
  int epoch;
  double loss;
  double dev_f1;
};

struct TrainResult {
  int best_epoch = 0;
  double best_dev_f1 = 0.0;
  std::vector<EpochLog> log;
};

// Epochs of shuffled minibatches with Adam updates; the dev macro F1 is
// computed each epoch and the best-scoring parameters are restored into the
// model before returning. Throws on divergence (non-finite loss). When
// log_stream is non-null one JSON line {epoch, loss, dev_f1} is written per
// epoch.
TrainResult train_model(Model& model, const std::vector<IndexedDocument>& train,
                        const std::vector<IndexedDocument>& dev,
                        const TrainConfig& cfg, std::ostream* log_stream = nullptr);

// --- gradient verification ----------------------------------------------------

struct GradCheckEntry {
  std::string tensor;
  size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  GradCheckEntry worst;
  std::vector<GradCheckEntry> failures;  // entries above tolerance
  bool ok() const { return failures.empty(); }
};

// Central finite differences against the analytic gradient on sampled
// coordinates of every parameter tensor. Runs in Eval mode (deterministic
// batch norm, no dropout). The relative error uses a small denominator floor
// so that near-zero gradients compare on an absolute scale.
GradCheckResult gradient_check(Model& model,
                               const std::vector<const IndexedDocument*>& batch,
                               double eps = 1e-5, int coords_per_tensor = 20,
                               uint64_t seed = 1, double tolerance = 1e-4);

}  // namespace detnet

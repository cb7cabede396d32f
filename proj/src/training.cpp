#include "detnet/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <ostream>

#include "detnet/check.hpp"
#include "detnet/rng.hpp"

namespace detnet {

using nlohmann::json;

void TrainConfig::validate() const {
  model.validate();
  if (batch_size < 1) throw UsageError("batch_size must be >= 1");
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (learning_rate <= 0.0) throw UsageError("learning_rate must be positive");
  if (vocab_max_size < 2) throw UsageError("vocab_max_size must be >= 2");
}

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path + ": malformed JSON: " + std::string(e.what()));
  }
  TrainConfig cfg;
  read_if(j, "labels", cfg.labels);
  read_if(j, "batch_size", cfg.batch_size);
  read_if(j, "epochs", cfg.epochs);
  read_if(j, "learning_rate", cfg.learning_rate);
  read_if(j, "adam_beta1", cfg.adam_beta1);
  read_if(j, "adam_beta2", cfg.adam_beta2);
  read_if(j, "adam_eps", cfg.adam_eps);
  read_if(j, "grad_clip", cfg.grad_clip);
  read_if(j, "seed", cfg.seed);
  read_if(j, "vocab_max_size", cfg.vocab_max_size);
  read_if(j, "vocab_min_freq", cfg.vocab_min_freq);
  read_if(j, "embed_dim", cfg.model.embed_dim);
  read_if(j, "ffn_dim", cfg.model.ffn_dim);
  read_if(j, "heads", cfg.model.heads);
  read_if(j, "layers", cfg.model.layers);
  read_if(j, "max_doc_len", cfg.model.max_doc_len);
  read_if(j, "max_sent_len", cfg.model.max_sent_len);
  read_if(j, "gate_gamma", cfg.model.gate_gamma);
  read_if(j, "gate_lambda", cfg.model.gate_lambda);
  read_if(j, "dropout", cfg.model.dropout);
  read_if(j, "positional_encoding", cfg.model.positional_encoding);
  if (j.contains("variant"))
    cfg.model.variant = variant_from_name(j.at("variant").get<std::string>());
  cfg.validate();
  return cfg;
}

std::string train_config_to_json(const TrainConfig& cfg) {
  json j;
  if (!cfg.labels.empty()) j["labels"] = cfg.labels;
  j["batch_size"] = cfg.batch_size;
  j["epochs"] = cfg.epochs;
  j["learning_rate"] = cfg.learning_rate;
  j["adam_beta1"] = cfg.adam_beta1;
  j["adam_beta2"] = cfg.adam_beta2;
  j["adam_eps"] = cfg.adam_eps;
  j["grad_clip"] = cfg.grad_clip;
  j["seed"] = cfg.seed;
  j["vocab_max_size"] = cfg.vocab_max_size;
  j["vocab_min_freq"] = cfg.vocab_min_freq;
  j["embed_dim"] = cfg.model.embed_dim;
  j["ffn_dim"] = cfg.model.ffn_dim;
  j["heads"] = cfg.model.heads;
  j["layers"] = cfg.model.layers;
  j["max_doc_len"] = cfg.model.max_doc_len;
  j["max_sent_len"] = cfg.model.max_sent_len;
  j["gate_gamma"] = cfg.model.gate_gamma;
  j["gate_lambda"] = cfg.model.gate_lambda;
  j["dropout"] = cfg.model.dropout;
  j["positional_encoding"] = cfg.model.positional_encoding;
  j["variant"] = variant_name(cfg.model.variant);
  return j.dump(2);
}

void init_params(ParamSet& params, uint64_t seed) {
  Rng rng(seed);
  for (Tensor* t : params) {
    switch (t->init) {
      case InitKind::Zero:
        t->value.fill(0.0);
        break;
      case InitKind::One:
        t->value.fill(1.0);
        break;
      case InitKind::Embedding:
        for (size_t i = 0; i < t->value.size(); ++i)
          t->value.data()[i] = rng.uniform(-0.1, 0.1);
        break;
      case InitKind::FanIn: {
        const double bound = 1.0 / std::sqrt(double(t->value.cols()));
        for (size_t i = 0; i < t->value.size(); ++i)
          t->value.data()[i] = rng.uniform(-bound, bound);
        break;
      }
    }
    t->zero_grad();
  }
}

AdamOptimizer::AdamOptimizer(ParamSet& params, double lr, double beta1,
                             double beta2, double eps)
    : params_(&params), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (Tensor* t : params) {
    m_.emplace_back(t->value.rows(), t->value.cols());
    v_.emplace_back(t->value.rows(), t->value.cols());
  }
}

void AdamOptimizer::zero_grad() {
  for (Tensor* t : *params_) t->zero_grad();
}

void AdamOptimizer::step() {
  ++t_;
  const double bias1 = 1.0 - std::pow(beta1_, double(t_));
  const double bias2 = 1.0 - std::pow(beta2_, double(t_));
  for (size_t i = 0; i < params_->size(); ++i) {
    Tensor* t = (*params_)[i];
    kernels::active().adam(int(t->value.size()), t->value.data(),
                           t->grad.data(), m_[i].data(), v_[i].data(), lr_,
                           beta1_, beta2_, eps_, bias1, bias2);
  }
}

Mat batch_targets(const std::vector<const IndexedDocument*>& docs) {
  DETNET_CHECK(!docs.empty(), "empty batch");
  const int c = int(docs[0]->label_vector.size());
  Mat t(c, int(docs.size()));
  for (size_t d = 0; d < docs.size(); ++d)
    for (int i = 0; i < c; ++i) t(i, int(d)) = docs[d]->label_vector[i];
  return t;
}

std::vector<std::vector<int>> gold_label_sets(
    const std::vector<IndexedDocument>& docs) {
  std::vector<std::vector<int>> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    std::vector<int> set;
    for (size_t c = 0; c < doc.label_vector.size(); ++c)
      if (doc.label_vector[c] > 0.0) set.push_back(int(c));
    out.push_back(std::move(set));
  }
  return out;
}

std::vector<std::vector<int>> predict_label_sets(
    Model& model, const std::vector<IndexedDocument>& docs) {
  std::vector<std::vector<int>> out;
  out.reserve(docs.size());
  for (const auto& doc : docs)
    out.push_back(predict_domains(model.score_document(doc).y));
  return out;
}

namespace {

using Snapshot = std::map<std::string, Mat>;

Snapshot take_snapshot(Model& model) {
  Snapshot snap;
  for (Tensor* t : model.params()) snap[t->name] = t->value;
  for (auto& [name, buf] : model.buffers()) snap[name] = *buf;
  return snap;
}

void restore_snapshot(Model& model, const Snapshot& snap) {
  for (Tensor* t : model.params()) t->value = snap.at(t->name);
  for (auto& [name, buf] : model.buffers()) *buf = snap.at(name);
}

double grad_global_norm(ParamSet& params) {
  double sq = 0.0;
  for (Tensor* t : params)
    sq += kernels::active().dot(int(t->grad.size()), t->grad.data(),
                                t->grad.data());
  return std::sqrt(sq);
}

}  // namespace

TrainResult train_model(Model& model, const std::vector<IndexedDocument>& train,
                        const std::vector<IndexedDocument>& dev,
                        const TrainConfig& cfg, std::ostream* log_stream) {
  DETNET_CHECK(!train.empty(), "empty training set");
  cfg.validate();

  Rng shuffle_rng(cfg.seed);
  Rng dropout_rng(Rng(cfg.seed).child(0x5eed));
  AdamOptimizer opt(model.params(), cfg.learning_rate, cfg.adam_beta1,
                    cfg.adam_beta2, cfg.adam_eps);

  std::vector<size_t> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  Snapshot best = take_snapshot(model);
  double best_f1 = -1.0;
  int best_epoch = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const size_t end = std::min(order.size(), begin + cfg.batch_size);
      std::vector<const IndexedDocument*> batch;
      batch.reserve(end - begin);
      for (size_t i = begin; i < end; ++i) batch.push_back(&train[order[i]]);

      Tape tape;
      Var scores = model.batch_scores(tape, batch, Mode::Train, &dropout_rng);
      Var loss = multilabel_loss(tape, scores, batch_targets(batch));
      const double loss_value = tape.value(loss)(0, 0);
      if (!std::isfinite(loss_value))
        throw std::runtime_error(
            "training diverged: non-finite loss at epoch " +
            std::to_string(epoch));
      epoch_loss += loss_value * double(batch.size());

      opt.zero_grad();
      tape.backward(loss);
      if (cfg.grad_clip > 0.0) {
        const double norm = grad_global_norm(model.params());
        if (norm > cfg.grad_clip) {
          const double factor = cfg.grad_clip / norm;
          for (Tensor* t : model.params())
            kernels::active().scale(int(t->grad.size()), factor,
                                    t->grad.data(), t->grad.data());
        }
      }
      opt.step();
    }
    epoch_loss /= double(train.size());

    const auto& eval_docs = dev.empty() ? train : dev;
    const LabelF1Result f1 =
        label_f1(predict_label_sets(model, eval_docs), gold_label_sets(eval_docs),
                 model.labels().size());

    result.log.push_back({epoch, epoch_loss, f1.macro_f1});
    if (log_stream) {
      json j;
      j["epoch"] = epoch;
      j["loss"] = epoch_loss;
      j["dev_f1"] = f1.macro_f1;
      (*log_stream) << j.dump() << "\n";
    }
    // Ties keep the most recent epoch: later snapshots have seen more
    // updates at equal dev quality.
    if (f1.macro_f1 >= best_f1) {
      best_f1 = f1.macro_f1;
      best_epoch = epoch;
      best = take_snapshot(model);
    }
  }

  restore_snapshot(model, best);
  result.best_epoch = best_epoch;
  result.best_dev_f1 = best_f1;
  return result;
}

GradCheckResult gradient_check(Model& model,
                               const std::vector<const IndexedDocument*>& batch,
                               double eps, int coords_per_tensor, uint64_t seed,
                               double tolerance) {
  const Mat targets = batch_targets(batch);
  auto loss_value = [&]() {
    Tape t;
    Var scores = model.batch_scores(t, batch, Mode::Eval, nullptr);
    return t.value(multilabel_loss(t, scores, targets))(0, 0);
  };

  // Analytic pass.
  for (Tensor* t : model.params()) t->zero_grad();
  {
    Tape t;
    Var scores = model.batch_scores(t, batch, Mode::Eval, nullptr);
    t.backward(multilabel_loss(t, scores, targets));
  }

  GradCheckResult result;
  Rng rng(seed);
  for (Tensor* tensor : model.params()) {
    const size_t size = tensor->value.size();
    std::vector<size_t> coords;
    if (int(size) <= coords_per_tensor) {
      for (size_t i = 0; i < size; ++i) coords.push_back(i);
    } else {
      std::vector<size_t> all(size);
      for (size_t i = 0; i < size; ++i) all[i] = i;
      rng.shuffle(all);
      coords.assign(all.begin(), all.begin() + coords_per_tensor);
    }

    for (size_t idx : coords) {
      const double orig = tensor->value.data()[idx];
      tensor->value.data()[idx] = orig + eps;
      const double f_plus = loss_value();
      tensor->value.data()[idx] = orig - eps;
      const double f_minus = loss_value();
      tensor->value.data()[idx] = orig;

      const double numeric = (f_plus - f_minus) / (2.0 * eps);
      const double analytic = tensor->grad.data()[idx];
      // Floor keeps finite-difference noise on near-zero gradients from
      // registering as huge relative errors.
      const double denom =
          std::max({1e-5, std::abs(numeric), std::abs(analytic)});
      const double rel = std::abs(numeric - analytic) / denom;

      GradCheckEntry entry{tensor->name, idx, analytic, numeric, rel};
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst = entry;
      }
      if (rel > tolerance) result.failures.push_back(entry);
    }
  }
  return result;
}

}  // namespace detnet

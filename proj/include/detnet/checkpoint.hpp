#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "detnet/model.hpp"

namespace detnet {

// Serialized model state: every parameter and batch-norm buffer plus the
// vocabulary, label order, configuration, and (for the prior variant) the
// definition texts, so a checkpoint is self-contained for inference.
struct Checkpoint {
  int format = 1;
  std::string kind;  // detnet-s | detnet-f | detnet-f+ | hiernet | milnet | major
  ModelConfig config;
  std::vector<std::string> label_codes;
  std::vector<std::string> vocab_tokens;
  uint64_t vocab_hash = 0;
  int epoch = 0;
  double dev_f1 = 0.0;
  DefinitionSet definitions;
  std::map<std::string, Mat> tensors;
};

Checkpoint snapshot_model(Model& model, const Vocabulary& vocab, int epoch,
                          double dev_f1);

// Writes <path> (binary tensor blob) and <path>.json (metadata sidecar).
// Reloading reproduces the forward pass bit-compatibly.
void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Constructs the right model type for a kind. The vocabulary size fixes the
// embedding width.
std::unique_ptr<Model> make_model(const std::string& kind, ModelConfig cfg,
                                  DomainLabelSet labels, int vocab_size);

// Rebuilds the model a checkpoint describes and loads all tensors into it.
std::unique_ptr<Model> build_model(const Checkpoint& ck);

}  // namespace detnet

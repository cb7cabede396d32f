#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "detnet/errors.hpp"

namespace detnet {

// Fixed, ordered set of domain codes. The order defines score-vector indexing
// for the lifetime of a model.
class DomainLabelSet {
 public:
  DomainLabelSet() : DomainLabelSet(default_labels()) {}
  explicit DomainLabelSet(std::vector<std::string> labels);

  static std::vector<std::string> default_labels() {
    return {"BUS", "GOV", "HEA", "LAW", "LIF", "MIL", "GEN"};
  }

  int size() const { return int(labels_.size()); }
  const std::string& code(int index) const { return labels_[index]; }
  const std::vector<std::string>& codes() const { return labels_; }
  std::optional<int> index_of(const std::string& code) const;
  bool contains(const std::string& code) const { return index_of(code).has_value(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

struct RawDocument {
  std::string id;
  std::vector<std::vector<std::string>> sentences;  // pre-split, tokenized
  std::set<std::string> labels;
};

// Token ids are dense in [0, V); index 0 is padding, 1 is the unknown token.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocabulary();
  explicit Vocabulary(std::vector<std::string> tokens_in_index_order);

  int size() const { return int(tokens_.size()); }
  int index(const std::string& token) const;  // kUnk when absent
  bool contains(const std::string& token) const;
  const std::string& token(int index) const { return tokens_[index]; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  uint64_t hash() const;  // FNV-1a over tokens in index order

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct IndexedDocument {
  std::string id;
  std::vector<std::vector<int>> sentences;  // token ids, ragged
  std::vector<double> label_vector;         // C entries in {-1, +1}
};

// One definition per domain, keyed by domain code.
using DefinitionSet = std::map<std::string, std::string>;

// Deterministic tokenization: lowercased; runs of letters/digits are tokens,
// every other non-space character is a single-character token. Additional
// languages can be registered as segmenter hooks.
using Segmenter = std::function<std::vector<std::string>(const std::string&)>;
std::vector<std::string> tokenize(const std::string& text,
                                  const std::string& language = "en");
void register_segmenter(const std::string& language, Segmenter segmenter);

Vocabulary build_vocab(const std::vector<RawDocument>& corpus, int max_size,
                       int min_freq = 1);

IndexedDocument index_document(const RawDocument& doc, const Vocabulary& vocab,
                               const DomainLabelSet& labels,
                               int max_doc_len = 100, int max_sent_len = 60);

// Corpus JSONL, one document per line:
//   {"id": str, "sentences": [[token, ...], ...], "labels": ["GOV", ...]}
std::vector<RawDocument> load_corpus(const std::string& path,
                                     const DomainLabelSet& labels);
void save_corpus(const std::vector<RawDocument>& corpus, const std::string& path);

// Definitions file: {"GOV": "definition text", ...}; exactly one per domain.
DefinitionSet load_definitions(const std::string& path,
                               const DomainLabelSet& labels);

// Splits a definition into sentences on terminal punctuation tokens so it can
// be encoded as a miniature document.
std::vector<std::vector<std::string>> definition_sentences(const std::string& text);

}  // namespace detnet

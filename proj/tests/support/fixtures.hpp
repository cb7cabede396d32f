#pragma once

// Shared test fixtures: tiny configurations and the planted-keyword corpus
// used by the training and acceptance suites. Signature tokens are disjoint
// across domains, so gold word-level labels are known by construction.

#include <set>
#include <string>
#include <vector>

#include "detnet/config.hpp"
#include "detnet/corpus.hpp"
#include "detnet/rng.hpp"

namespace detnet::testing {

inline ModelConfig tiny_config(Variant variant, int d = 8, int heads = 2,
                               int layers = 1, int ffn = 16) {
  ModelConfig cfg;
  cfg.embed_dim = d;
  cfg.ffn_dim = ffn;
  cfg.heads = heads;
  cfg.layers = layers;
  cfg.variant = variant;
  return cfg;
}

inline DomainLabelSet small_label_set(int c) {
  std::vector<std::string> codes;
  for (int i = 0; i < c; ++i) codes.push_back("D" + std::to_string(i));
  return DomainLabelSet(codes);
}

struct PlantedCorpus {
  DomainLabelSet labels;
  Vocabulary vocab;
  std::vector<RawDocument> raw;
  std::vector<IndexedDocument> docs;
  DefinitionSet definitions;
  std::set<std::string> signature_tokens;  // all planted tokens
  // signature token for (domain, k)
  std::string signature(int domain, int k) const {
    return "sig" + labels.code(domain) + std::to_string(k);
  }
};

// Documents built from a shared filler pool plus per-domain signature tokens.
// Word-level gold labels follow from token identity: a word is evidence for
// domain c exactly when it is one of c's signature tokens.
inline PlantedCorpus make_planted_corpus(int n_docs, int num_domains,
                                         double multilabel_ratio, uint64_t seed,
                                         int sentences_per_doc = 4,
                                         int words_per_sentence = 8,
                                         int signatures_per_domain = 4,
                                         int filler_tokens = 20,
                                         int planted_per_sentence = 2,
                                         int generic_sentences = 0) {
  PlantedCorpus corpus{small_label_set(num_domains), Vocabulary(), {}, {}, {}, {}};
  Rng rng(seed);

  std::vector<std::string> filler;
  for (int i = 0; i < filler_tokens; ++i)
    filler.push_back("filler" + std::to_string(i));
  for (int c = 0; c < num_domains; ++c)
    for (int k = 0; k < signatures_per_domain; ++k)
      corpus.signature_tokens.insert(corpus.signature(c, k));

  for (int d = 0; d < n_docs; ++d) {
    RawDocument doc;
    doc.id = "doc-" + std::to_string(d);
    std::vector<int> domains{d % num_domains};
    if (rng.uniform() < multilabel_ratio)
      domains.push_back((domains[0] + 1 + rng.uniform_int(0, num_domains - 2)) %
                        num_domains);
    for (int c : domains) doc.labels.insert(corpus.labels.code(c));

    for (int s = 0; s < sentences_per_doc + generic_sentences; ++s) {
      std::vector<std::string> sent;
      for (int w = 0; w < words_per_sentence; ++w)
        sent.push_back(filler[rng.uniform_int(0, filler_tokens - 1)]);
      // The first sentences carry planted evidence; the rest stay generic,
      // so filler types also occur in domain-free contexts.
      if (s < sentences_per_doc) {
        const int domain = domains[s % domains.size()];
        const int planted = planted_per_sentence + rng.uniform_int(0, 1);
        for (int k = 0; k < planted; ++k) {
          const int pos = rng.uniform_int(0, words_per_sentence - 1);
          sent[pos] = corpus.signature(
              domain, rng.uniform_int(0, signatures_per_domain - 1));
        }
      }
      doc.sentences.push_back(std::move(sent));
    }
    corpus.raw.push_back(std::move(doc));
  }

  corpus.vocab = build_vocab(corpus.raw, 1000);
  for (const auto& doc : corpus.raw)
    corpus.docs.push_back(index_document(doc, corpus.vocab, corpus.labels));

  for (int c = 0; c < num_domains; ++c) {
    std::string text = "the " + corpus.labels.code(c) + " domain is about";
    for (int k = 0; k < signatures_per_domain; ++k)
      text += " " + corpus.signature(c, k);
    text += " .";
    corpus.definitions[corpus.labels.code(c)] = text;
  }
  return corpus;
}

// Gold signature-token positions of one domain inside a tokenized sentence.
inline std::vector<int> gold_word_positions(const PlantedCorpus& corpus,
                                            const std::vector<std::string>& sent,
                                            int domain) {
  std::vector<int> out;
  for (size_t j = 0; j < sent.size(); ++j) {
    const std::string& tok = sent[j];
    if (tok.rfind("sig" + corpus.labels.code(domain), 0) == 0)
      out.push_back(int(j));
  }
  return out;
}

}  // namespace detnet::testing

#pragma once

#include <string>
#include <vector>

#include "detnet/corpus.hpp"
#include "detnet/rng.hpp"

namespace detnet {

// A distinct label combination observed in training, with its lead-sentence
// subcorpus (the first sentence of every document carrying exactly that
// combination).
struct LabelCombination {
  std::vector<std::string> labels;  // sorted codes
  std::vector<std::vector<std::string>> lead_sentences;
  long long doc_count = 0;
};

// Combinations in first-seen corpus order, which fixes iteration order for
// seeded generation.
struct LabelCombinationIndex {
  std::vector<LabelCombination> combinations;
};

LabelCombinationIndex collect_combinations(const std::vector<RawDocument>& train);

struct SyntheticSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> provenance;  // label set of the source subcorpus
};

struct SyntheticDocument {
  std::string id;
  std::vector<SyntheticSentence> sentences;
  std::vector<std::string> doc_labels;       // sampled document combination
  std::vector<std::string> sentence_domains; // allowed sentence label pool
  std::vector<std::string> warnings;         // skipped degenerate candidates
};

// One synthetic document: samples a document combination, extends the
// sentence label pool with GEN and (if room remains) one noisy domain, then
// draws a budgeted batch of lead sentences from every candidate subcorpus and
// shuffles them.
SyntheticDocument generate_document(const LabelCombinationIndex& index,
                                    const DomainLabelSet& labels, int max_len,
                                    Rng& rng);

// n_docs seeded generations (one child RNG per document, so output is
// reproducible and parallelizable per document).
std::vector<SyntheticDocument> build_silver_testset(
    const LabelCombinationIndex& index, const DomainLabelSet& labels,
    int n_docs, int max_len, uint64_t seed);

// Structural checks for a generated document; returns human-readable
// violations, empty when valid.
std::vector<std::string> validate_document(const SyntheticDocument& doc,
                                           const LabelCombinationIndex& index,
                                           const DomainLabelSet& labels,
                                           int max_len);

// Corpus JSONL plus the sentence-label sidecar
// {"doc_id", "sentence_labels": [[...], ...]}.
void save_silver_testset(const std::vector<SyntheticDocument>& docs,
                         const std::string& corpus_path,
                         const std::string& sidecar_path);

// Sidecar loader keyed by doc id.
std::map<std::string, std::vector<std::vector<std::string>>> load_sentence_labels(
    const std::string& sidecar_path);

}  // namespace detnet

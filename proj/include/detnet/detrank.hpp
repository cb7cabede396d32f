#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "detnet/errors.hpp"
#include "detnet/mat.hpp"

namespace detnet {

struct SummaryConfig {
  double phi = 0.3;            // weight of the domain bias in the blend
  int budget_words = 100;
  double prune_threshold = 0.001;
  double tolerance = 1e-8;
  int max_iterations = 100;

  void validate() const {
    if (phi < 0.0 || phi >= 1.0) throw UsageError("phi must lie in [0, 1)");
    if (budget_words < 1) throw UsageError("budget must be >= 1");
    if (prune_threshold < 0.0) throw UsageError("prune threshold must be >= 0");
    if (max_iterations < 1) throw UsageError("max iterations must be >= 1");
  }
};

// Okapi BM25 statistics over one document's sentences, each sentence acting
// as a retrieval document.
struct Bm25Stats {
  double k1 = 1.2;
  double b = 0.75;
  int sentence_count = 0;
  double avg_length = 0.0;
  std::unordered_map<std::string, int> doc_freq;
};

Bm25Stats bm25_stats(const std::vector<std::vector<std::string>>& sentences);

// Sentence `query` scored against sentence `doc`; negative IDF floors at 0,
// so a term present in every sentence contributes nothing.
double bm25_similarity(const std::vector<std::string>& doc,
                       const std::vector<std::string>& query,
                       const Bm25Stats& stats);

struct SentenceGraph {
  std::vector<int> vertices;  // surviving sentence indices, document order
  Mat transitions;            // |V| x |V| row-stochastic
  Mat similarities;           // raw symmetrized BM25, all sentences
  bool uniform_fallback = false;  // no edge survived pruning
};

// Pairwise BM25 symmetrized by averaging both directions, diagonal excluded;
// weights below the prune threshold are zeroed and isolated vertices removed
// iteratively. A document whose every weight dies keeps all sentences with
// uniform transitions (self-loops included) instead of erroring out.
SentenceGraph build_graph(const std::vector<std::vector<std::string>>& sentences,
                          const SummaryConfig& cfg);

struct DomainBias {
  std::vector<double> raw;           // q*: score * beta on the surviving set
  std::vector<double> scaled;        // min-max scaled to [0, 1]
  std::vector<double> distribution;  // softmax of the scaled values
};

// Domain signal over surviving sentences from sentence scores Q (C x s) and
// salience beta.
DomainBias domain_bias(const Mat& q, const std::vector<double>& beta, int domain,
                       const std::vector<int>& vertices);

// blended[i][j] = phi * bias[j] + (1 - phi) * transitions[i][j].
Mat blend_transition(const Mat& transitions, const std::vector<double>& bias,
                     double phi);

struct StationaryResult {
  std::vector<double> distribution;
  int iterations = 0;
  bool converged = false;
};

// Power iteration from the uniform start until the L1 change drops below the
// tolerance; returns the last iterate (with converged=false) when the chain
// cycles, which can happen at phi = 0.
StationaryResult stationary_distribution(const Mat& transitions, double tol = 1e-8,
                                         int max_iter = 100);

struct Summary {
  std::vector<int> selected;       // chosen sentence indices, document order
  std::vector<int> ranked;         // all surviving indices by rank
  std::vector<int> vertices;       // surviving sentence indices
  std::vector<double> e_star;      // stationary distribution over vertices
  bool converged = true;
};

// Greedy budgeted selection: best-ranked sentences while the cumulative word
// count fits the budget; the top sentence is always emitted.
Summary extract_summary(const std::vector<std::vector<std::string>>& sentences,
                        const SentenceGraph& graph,
                        const StationaryResult& stationary, int budget_words);

// Full pipeline with a domain bias from detector outputs.
Summary detrank_summary(const std::vector<std::vector<std::string>>& sentences,
                        const Mat& sentence_scores,
                        const std::vector<double>& beta, int domain,
                        const SummaryConfig& cfg);

// Same pipeline with the uniform distribution in place of the domain bias.
Summary textrank_summary(const std::vector<std::vector<std::string>>& sentences,
                         const SummaryConfig& cfg);

}  // namespace detnet

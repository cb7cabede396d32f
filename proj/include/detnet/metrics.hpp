#pragma once

#include <vector>

#include "detnet/mat.hpp"

namespace detnet {

struct ConfusionCounts {
  long long tp = 0, fp = 0, tn = 0, fn = 0;
};

struct LabelF1Result {
  double macro_f1 = 0.0;
  std::vector<double> per_class;
  std::vector<ConfusionCounts> counts;
  long long n_samples = 0;
};

// Label-based macro F1 for multilabel predictions. Classes with
// tp = fp = fn = 0 score 0, the usual zero-division convention.
LabelF1Result label_f1(const std::vector<std::vector<int>>& pred_sets,
                       const std::vector<std::vector<int>>& gold_sets,
                       int num_classes);

// Micro word-retrieval F1: precision and recall pooled over all words of all
// units, harmonic mean; 0 when both are 0.
double word_retrieval_f1(const std::vector<std::vector<int>>& retrieved_sets,
                         const std::vector<std::vector<int>>& gold_sets);

// Word positions in a sentence whose score for `domain` exceeds `threshold`.
std::vector<int> retrieve_domain_words(const Mat& word_scores, int domain,
                                       double threshold = 0.0);

}  // namespace detnet

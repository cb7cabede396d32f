#include "detnet/metrics.hpp"

#include <algorithm>
#include <set>

#include "detnet/check.hpp"

namespace detnet {

LabelF1Result label_f1(const std::vector<std::vector<int>>& pred_sets,
                       const std::vector<std::vector<int>>& gold_sets,
                       int num_classes) {
  DETNET_CHECK(pred_sets.size() == gold_sets.size(),
               "prediction/gold length mismatch");
  LabelF1Result res;
  res.counts.assign(num_classes, {});
  res.n_samples = (long long)(pred_sets.size());

  for (size_t i = 0; i < pred_sets.size(); ++i) {
    std::vector<char> pred(num_classes, 0), gold(num_classes, 0);
    for (int c : pred_sets[i]) pred[c] = 1;
    for (int c : gold_sets[i]) gold[c] = 1;
    for (int c = 0; c < num_classes; ++c) {
      if (pred[c] && gold[c])
        ++res.counts[c].tp;
      else if (pred[c] && !gold[c])
        ++res.counts[c].fp;
      else if (!pred[c] && gold[c])
        ++res.counts[c].fn;
      else
        ++res.counts[c].tn;
    }
  }

  res.per_class.resize(num_classes);
  double total = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    const auto& k = res.counts[c];
    const long long denom = 2 * k.tp + k.fp + k.fn;
    res.per_class[c] = denom == 0 ? 0.0 : double(2 * k.tp) / double(denom);
    total += res.per_class[c];
  }
  res.macro_f1 = num_classes == 0 ? 0.0 : total / num_classes;
  return res;
}

double word_retrieval_f1(const std::vector<std::vector<int>>& retrieved_sets,
                         const std::vector<std::vector<int>>& gold_sets) {
  DETNET_CHECK(retrieved_sets.size() == gold_sets.size(),
               "retrieved/gold length mismatch");
  long long n_retrieved = 0, n_gold = 0, n_hit = 0;
  for (size_t i = 0; i < retrieved_sets.size(); ++i) {
    const std::set<int> gold(gold_sets[i].begin(), gold_sets[i].end());
    std::set<int> retrieved(retrieved_sets[i].begin(), retrieved_sets[i].end());
    n_retrieved += (long long)(retrieved.size());
    n_gold += (long long)(gold.size());
    for (int p : retrieved)
      if (gold.count(p)) ++n_hit;
  }
  const double p = n_retrieved == 0 ? 0.0 : double(n_hit) / double(n_retrieved);
  const double r = n_gold == 0 ? 0.0 : double(n_hit) / double(n_gold);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

std::vector<int> retrieve_domain_words(const Mat& word_scores, int domain,
                                       double threshold) {
  std::vector<int> out;
  for (int j = 0; j < word_scores.cols(); ++j)
    if (word_scores(domain, j) > threshold) out.push_back(j);
  return out;
}

}  // namespace detnet

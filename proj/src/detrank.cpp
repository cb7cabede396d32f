#include "detnet/detrank.hpp"

#include <algorithm>
#include <cmath>

#include "detnet/check.hpp"

namespace detnet {

Bm25Stats bm25_stats(const std::vector<std::vector<std::string>>& sentences) {
  Bm25Stats stats;
  stats.sentence_count = int(sentences.size());
  long long total_len = 0;
  for (const auto& sent : sentences) {
    total_len += (long long)(sent.size());
    std::unordered_map<std::string, int> seen;
    for (const auto& tok : sent) seen.emplace(tok, 1);
    for (const auto& [tok, one] : seen) stats.doc_freq[tok] += one;
  }
  stats.avg_length =
      sentences.empty() ? 0.0 : double(total_len) / double(sentences.size());
  return stats;
}

double bm25_similarity(const std::vector<std::string>& doc,
                       const std::vector<std::string>& query,
                       const Bm25Stats& stats) {
  std::unordered_map<std::string, int> tf;
  for (const auto& tok : doc) ++tf[tok];
  const double norm =
      stats.k1 * (1.0 - stats.b + stats.b * double(doc.size()) / stats.avg_length);
  double score = 0.0;
  for (const auto& tok : query) {
    auto f_it = tf.find(tok);
    if (f_it == tf.end()) continue;
    auto df_it = stats.doc_freq.find(tok);
    const int df = df_it == stats.doc_freq.end() ? 0 : df_it->second;
    const double idf = std::log((stats.sentence_count - df + 0.5) / (df + 0.5));
    if (idf <= 0.0) continue;  // floored at zero
    const double f = double(f_it->second);
    score += idf * f * (stats.k1 + 1.0) / (f + norm);
  }
  return score;
}

SentenceGraph build_graph(const std::vector<std::vector<std::string>>& sentences,
                          const SummaryConfig& cfg) {
  const int s = int(sentences.size());
  if (s == 0) throw DataError("no rankable sentences");

  SentenceGraph graph;
  const Bm25Stats stats = bm25_stats(sentences);
  Mat weights(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = i + 1; j < s; ++j) {
      const double w = 0.5 * (bm25_similarity(sentences[i], sentences[j], stats) +
                              bm25_similarity(sentences[j], sentences[i], stats));
      weights(i, j) = w;
      weights(j, i) = w;
    }
  }
  graph.similarities = weights;

  for (size_t i = 0; i < weights.size(); ++i)
    if (weights.data()[i] < cfg.prune_threshold) weights.data()[i] = 0.0;

  // Iteratively drop isolated vertices; symmetric weights make row sums the
  // relevant degree.
  std::vector<bool> alive(s, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < s; ++i) {
      if (!alive[i]) continue;
      double degree = 0.0;
      for (int j = 0; j < s; ++j)
        if (alive[j] && j != i) degree += weights(i, j);
      if (degree == 0.0) {
        alive[i] = false;
        changed = true;
      }
    }
  }

  std::vector<int> survivors;
  for (int i = 0; i < s; ++i)
    if (alive[i]) survivors.push_back(i);

  if (survivors.empty()) {
    // Every weight died (e.g. identical sentences, whose shared terms have
    // zero floored IDF). Keep the document rankable with uniform transitions.
    graph.uniform_fallback = true;
    graph.vertices.resize(s);
    for (int i = 0; i < s; ++i) graph.vertices[i] = i;
    graph.transitions = Mat::constant(s, s, 1.0 / s);
    return graph;
  }

  graph.vertices = survivors;
  const int v = int(survivors.size());
  graph.transitions = Mat(v, v);
  for (int i = 0; i < v; ++i) {
    double total = 0.0;
    for (int j = 0; j < v; ++j) total += weights(survivors[i], survivors[j]);
    for (int j = 0; j < v; ++j)
      graph.transitions(i, j) = weights(survivors[i], survivors[j]) / total;
  }
  return graph;
}

DomainBias domain_bias(const Mat& q, const std::vector<double>& beta, int domain,
                       const std::vector<int>& vertices) {
  DETNET_CHECK(domain >= 0 && domain < q.rows(), "domain index");
  DETNET_CHECK(q.cols() == int(beta.size()), "beta length");
  DomainBias bias;
  for (int idx : vertices) bias.raw.push_back(q(domain, idx) * beta[idx]);

  const auto [mn_it, mx_it] = std::minmax_element(bias.raw.begin(), bias.raw.end());
  const double mn = *mn_it, mx = *mx_it;
  bias.scaled.resize(bias.raw.size());
  if (mx > mn) {
    for (size_t i = 0; i < bias.raw.size(); ++i)
      bias.scaled[i] = (bias.raw[i] - mn) / (mx - mn);
  }
  // else: all signals equal; the all-zero scaling yields a uniform softmax.

  double z = 0.0;
  bias.distribution.resize(bias.scaled.size());
  for (size_t i = 0; i < bias.scaled.size(); ++i) {
    bias.distribution[i] = std::exp(bias.scaled[i]);
    z += bias.distribution[i];
  }
  for (double& p : bias.distribution) p /= z;
  return bias;
}

Mat blend_transition(const Mat& transitions, const std::vector<double>& bias,
                     double phi) {
  DETNET_CHECK(transitions.rows() == transitions.cols(), "square transitions");
  DETNET_CHECK(transitions.cols() == int(bias.size()), "bias length");
  Mat out(transitions.rows(), transitions.cols());
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j)
      out(i, j) = phi * bias[j] + (1.0 - phi) * transitions(i, j);
  return out;
}

StationaryResult stationary_distribution(const Mat& transitions, double tol,
                                         int max_iter) {
  const int n = transitions.rows();
  DETNET_CHECK(n == transitions.cols(), "square transitions");
  StationaryResult res;
  std::vector<double> pi(n, 1.0 / n), next(n, 0.0);
  for (int iter = 1; iter <= max_iter; ++iter) {
    // next = pi^T * E
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < n; ++i)
      kernels::active().axpy(n, pi[i], transitions.row_ptr(i), next.data());
    double change = 0.0;
    for (int j = 0; j < n; ++j) change += std::abs(next[j] - pi[j]);
    pi.swap(next);
    res.iterations = iter;
    if (change < tol) {
      res.converged = true;
      break;
    }
  }
  res.distribution = std::move(pi);
  return res;
}

Summary extract_summary(const std::vector<std::vector<std::string>>& sentences,
                        const SentenceGraph& graph,
                        const StationaryResult& stationary, int budget_words) {
  Summary summary;
  summary.vertices = graph.vertices;
  summary.e_star = stationary.distribution;
  summary.converged = stationary.converged;

  std::vector<int> order(graph.vertices.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (stationary.distribution[a] != stationary.distribution[b])
      return stationary.distribution[a] > stationary.distribution[b];
    return graph.vertices[a] < graph.vertices[b];
  });
  for (int pos : order) summary.ranked.push_back(graph.vertices[pos]);

  long long used = 0;
  for (size_t k = 0; k < summary.ranked.size(); ++k) {
    const int idx = summary.ranked[k];
    const long long words = (long long)(sentences[idx].size());
    if (k > 0 && used + words > budget_words) break;
    summary.selected.push_back(idx);
    used += words;
  }
  std::sort(summary.selected.begin(), summary.selected.end());
  return summary;
}

Summary detrank_summary(const std::vector<std::vector<std::string>>& sentences,
                        const Mat& sentence_scores,
                        const std::vector<double>& beta, int domain,
                        const SummaryConfig& cfg) {
  const SentenceGraph graph = build_graph(sentences, cfg);
  const DomainBias bias = domain_bias(sentence_scores, beta, domain, graph.vertices);
  const Mat blended = blend_transition(graph.transitions, bias.distribution, cfg.phi);
  const StationaryResult st =
      stationary_distribution(blended, cfg.tolerance, cfg.max_iterations);
  return extract_summary(sentences, graph, st, cfg.budget_words);
}

Summary textrank_summary(const std::vector<std::vector<std::string>>& sentences,
                         const SummaryConfig& cfg) {
  const SentenceGraph graph = build_graph(sentences, cfg);
  const std::vector<double> uniform(graph.vertices.size(),
                                    1.0 / double(graph.vertices.size()));
  const Mat blended = blend_transition(graph.transitions, uniform, cfg.phi);
  const StationaryResult st =
      stationary_distribution(blended, cfg.tolerance, cfg.max_iterations);
  return extract_summary(sentences, graph, st, cfg.budget_words);
}

}  // namespace detnet

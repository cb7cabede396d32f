#include "detnet/inference.hpp"

#include <cstdlib>
#include <json.hpp>
#include <ostream>
#include <thread>

namespace detnet {

using nlohmann::ordered_json;

int env_num_workers() {
  const char* env = std::getenv("DETNET_NUM_WORKERS");
  if (!env) return 1;
  const int n = std::atoi(env);
  if (n < 1) return 1;
  return n > 64 ? 64 : n;
}

std::vector<ScoreSet> score_corpus(Model& model,
                                   const std::vector<IndexedDocument>& docs,
                                   int workers) {
  std::vector<ScoreSet> out(docs.size());
  if (workers <= 1 || docs.size() < 2) {
    for (size_t i = 0; i < docs.size(); ++i) out[i] = model.score_document(docs[i]);
    return out;
  }
  const int n_threads = std::min<size_t>(workers, docs.size());
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w] {
      for (size_t i = w; i < docs.size(); i += n_threads)
        out[i] = model.score_document(docs[i]);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

void write_predictions_jsonl(Model& model,
                             const std::vector<IndexedDocument>& docs,
                             std::ostream& out, int workers) {
  const std::vector<ScoreSet> scores = score_corpus(model, docs, workers);
  const DomainLabelSet& labels = model.labels();

  auto codes_for = [&](const std::vector<double>& s) {
    std::vector<std::string> codes;
    for (int c : predict_domains(s)) codes.push_back(labels.code(c));
    return codes;
  };

  for (size_t i = 0; i < docs.size(); ++i) {
    const ScoreSet& set = scores[i];
    ordered_json record;
    record["id"] = docs[i].id;
    record["doc_scores"] = set.y;
    record["doc_labels"] = codes_for(set.y);
    ordered_json sentences = ordered_json::array();
    for (size_t s = 0; s < set.sentences.size(); ++s) {
      ordered_json sj;
      const std::vector<double> sent_scores = set.Q.column(int(s));
      sj["scores"] = sent_scores;
      sj["labels"] = codes_for(sent_scores);
      ordered_json words = ordered_json::array();
      const Mat& p = set.sentences[s].P;
      for (int j = 0; j < p.cols(); ++j) words.push_back(p.column(j));
      sj["word_scores"] = std::move(words);
      sentences.push_back(std::move(sj));
    }
    record["sentences"] = std::move(sentences);
    out << record.dump() << "\n";
  }
}

}  // namespace detnet

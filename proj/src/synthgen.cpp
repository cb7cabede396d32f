#include "detnet/synthgen.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <map>
#include <set>

#include "detnet/check.hpp"

namespace detnet {

using nlohmann::json;

LabelCombinationIndex collect_combinations(const std::vector<RawDocument>& train) {
  if (train.empty()) throw DataError("cannot collect combinations from an empty corpus");
  LabelCombinationIndex index;
  std::map<std::vector<std::string>, size_t> seen;
  for (const auto& doc : train) {
    std::vector<std::string> key(doc.labels.begin(), doc.labels.end());
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, index.combinations.size());
      index.combinations.push_back({key, {doc.sentences.front()}, 1});
    } else {
      LabelCombination& combo = index.combinations[it->second];
      combo.lead_sentences.push_back(doc.sentences.front());
      ++combo.doc_count;
    }
  }
  return index;
}

SyntheticDocument generate_document(const LabelCombinationIndex& index,
                                    const DomainLabelSet& labels, int max_len,
                                    Rng& rng) {
  DETNET_CHECK(!index.combinations.empty(), "no label combinations collected");
  if (!labels.contains("GEN"))
    throw DataError("synthetic generation needs a GEN domain in the label set");

  SyntheticDocument doc;
  const int combo_count = int(index.combinations.size());

  // Document combination, then the sentence label pool.
  const int pick = rng.uniform_int(0, combo_count - 1);
  doc.doc_labels = index.combinations[pick].labels;

  std::set<std::string> pool(doc.doc_labels.begin(), doc.doc_labels.end());
  pool.insert("GEN");
  if (int(pool.size()) < labels.size()) {
    std::vector<std::string> outside;
    for (const auto& code : labels.codes())
      if (!pool.count(code)) outside.push_back(code);
    pool.insert(outside[rng.uniform_int(0, int(outside.size()) - 1)]);
  }
  doc.sentence_domains.assign(pool.begin(), pool.end());

  // Candidates: combinations entirely inside the sentence label pool.
  std::vector<const LabelCombination*> candidates;
  for (const auto& combo : index.combinations) {
    bool inside = true;
    for (const auto& code : combo.labels)
      if (!pool.count(code)) {
        inside = false;
        break;
      }
    if (inside) candidates.push_back(&combo);
  }

  int n_label = int(candidates.size());
  int n_sent = max_len;
  for (const LabelCombination* cand : candidates) {
    const long long theta =
        std::min<long long>({(long long)(cand->lead_sentences.size()),
                             (long long)(n_sent) + 1 - n_label,
                             (long long)(2LL * n_sent / std::max(1, n_label))});
    if (theta < 1) {
      std::string joined;
      for (const auto& code : cand->labels)
        joined += (joined.empty() ? "" : "+") + code;
      doc.warnings.push_back("skipped degenerate candidate " + joined);
      --n_label;
      continue;
    }
    const int take = rng.uniform_int(1, int(theta));

    // Sample without replacement via a partial shuffle of occurrence indices.
    std::vector<int> pickable(cand->lead_sentences.size());
    for (size_t i = 0; i < pickable.size(); ++i) pickable[i] = int(i);
    for (int i = 0; i < take; ++i) {
      const int j = rng.uniform_int(i, int(pickable.size()) - 1);
      std::swap(pickable[i], pickable[j]);
      doc.sentences.push_back(
          {cand->lead_sentences[pickable[i]], cand->labels});
    }
    n_sent = max_len - int(doc.sentences.size());
    --n_label;
  }
  rng.shuffle(doc.sentences);
  return doc;
}

std::vector<SyntheticDocument> build_silver_testset(
    const LabelCombinationIndex& index, const DomainLabelSet& labels,
    int n_docs, int max_len, uint64_t seed) {
  std::vector<SyntheticDocument> out;
  out.reserve(n_docs);
  Rng master(seed);
  for (int i = 0; i < n_docs; ++i) {
    Rng child = master.child(uint64_t(i));
    SyntheticDocument doc = generate_document(index, labels, max_len, child);
    doc.id = "synth-" + std::to_string(i);
    out.push_back(std::move(doc));
  }
  return out;
}

std::vector<std::string> validate_document(const SyntheticDocument& doc,
                                           const LabelCombinationIndex& index,
                                           const DomainLabelSet& labels,
                                           int max_len) {
  std::vector<std::string> issues;
  if (int(doc.sentences.size()) > max_len)
    issues.push_back("document exceeds the maximum length");
  const std::set<std::string> pool(doc.sentence_domains.begin(),
                                   doc.sentence_domains.end());
  if (!pool.count("GEN")) issues.push_back("GEN missing from the sentence pool");
  for (const auto& code : pool)
    if (!labels.contains(code)) issues.push_back("unknown pool domain " + code);

  std::map<std::vector<std::string>, int> provenance_counts;
  for (const auto& sent : doc.sentences) {
    for (const auto& code : sent.provenance)
      if (!pool.count(code))
        issues.push_back("sentence provenance outside the pool: " + code);
    ++provenance_counts[sent.provenance];
  }
  // Every provenance set must be a known combination with enough sentences
  // for a without-replacement draw.
  for (const auto& [prov, count] : provenance_counts) {
    bool found = false;
    for (const auto& combo : index.combinations) {
      if (combo.labels == prov) {
        found = true;
        if (count > int(combo.lead_sentences.size()))
          issues.push_back("drew more sentences than the subcorpus holds");
        break;
      }
    }
    if (!found) issues.push_back("provenance set is not a training combination");
  }
  return issues;
}

void save_silver_testset(const std::vector<SyntheticDocument>& docs,
                         const std::string& corpus_path,
                         const std::string& sidecar_path) {
  std::ofstream corpus(corpus_path);
  if (!corpus) throw DataError("cannot write corpus file: " + corpus_path);
  std::ofstream sidecar(sidecar_path);
  if (!sidecar) throw DataError("cannot write sidecar file: " + sidecar_path);

  for (const auto& doc : docs) {
    json record;
    record["id"] = doc.id;
    json sentences = json::array();
    for (const auto& sent : doc.sentences) sentences.push_back(sent.tokens);
    record["sentences"] = std::move(sentences);
    record["labels"] = doc.doc_labels;
    corpus << record.dump() << "\n";

    json side;
    side["doc_id"] = doc.id;
    json labels = json::array();
    for (const auto& sent : doc.sentences) labels.push_back(sent.provenance);
    side["sentence_labels"] = std::move(labels);
    sidecar << side.dump() << "\n";
  }
}

std::map<std::string, std::vector<std::vector<std::string>>> load_sentence_labels(
    const std::string& sidecar_path) {
  std::ifstream in(sidecar_path);
  if (!in) throw DataError("cannot open sidecar file: " + sidecar_path);
  std::map<std::string, std::vector<std::vector<std::string>>> out;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(sidecar_path + ":" + std::to_string(line_no) +
                      ": malformed JSON record: " + e.what());
    }
    if (!j.contains("doc_id") || !j.contains("sentence_labels"))
      throw DataError(sidecar_path + ":" + std::to_string(line_no) +
                      ": record must have doc_id and sentence_labels");
    out[j["doc_id"].get<std::string>()] =
        j["sentence_labels"].get<std::vector<std::vector<std::string>>>();
  }
  return out;
}

}  // namespace detnet

#include "detnet/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>

namespace detnet {

using nlohmann::json;

DomainLabelSet::DomainLabelSet(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  if (labels_.size() < 2) throw DataError("label set needs at least 2 domains");
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], int(i)).second)
      throw DataError("duplicate domain code: " + labels_[i]);
  }
}

std::optional<int> DomainLabelSet::index_of(const std::string& code) const {
  auto it = index_.find(code);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary::Vocabulary() : Vocabulary({"<pad>", "<unk>"}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens)
    : tokens_(std::move(tokens)) {
  if (tokens_.size() < 2) throw DataError("vocabulary missing reserved tokens");
  for (size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], int(i));
}

int Vocabulary::index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return index_.find(token) != index_.end();
}

uint64_t Vocabulary::hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& t : tokens_) {
    for (char c : t) {
      h ^= uint64_t(uint8_t(c));
      h *= 0x100000001b3ull;
    }
    h ^= uint64_t('\n');
    h *= 0x100000001b3ull;
  }
  return h;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> english_segmenter(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      out.push_back(current);
      current.clear();
    }
  };
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      flush();
    } else if (std::isalnum(c) || c >= 0x80) {
      // Non-ASCII bytes are kept inside the current token so UTF-8 sequences
      // survive intact; only ASCII letters are lowercased.
      current.push_back(c < 0x80 ? char(std::tolower(c)) : char(c));
    } else {
      flush();
      out.push_back(std::string(1, char(c)));
    }
  }
  flush();
  return out;
}

std::map<std::string, Segmenter>& segmenter_registry() {
  static std::map<std::string, Segmenter> reg{{"en", english_segmenter}};
  return reg;
}

std::mutex& segmenter_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text,
                                  const std::string& language) {
  if (text.empty()) throw DataError("tokenize: empty input text");
  Segmenter seg;
  {
    std::lock_guard<std::mutex> lock(segmenter_mutex());
    auto& reg = segmenter_registry();
    auto it = reg.find(language);
    if (it == reg.end())
      throw DataError("tokenize: unsupported language tag \"" + language + "\"");
    seg = it->second;
  }
  return seg(text);
}

void register_segmenter(const std::string& language, Segmenter segmenter) {
  std::lock_guard<std::mutex> lock(segmenter_mutex());
  segmenter_registry()[language] = std::move(segmenter);
}

Vocabulary build_vocab(const std::vector<RawDocument>& corpus, int max_size,
                       int min_freq) {
  if (max_size < 2) throw DataError("build_vocab: max_size must be >= 2");
  if (corpus.empty()) throw DataError("build_vocab: empty corpus");
  std::map<std::string, long long> counts;
  for (const auto& doc : corpus)
    for (const auto& sent : doc.sentences)
      for (const auto& tok : sent) ++counts[tok];

  // Rank by frequency, ties broken lexicographically for determinism.
  std::vector<std::pair<std::string, long long>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::vector<std::string> tokens{"<pad>", "<unk>"};
  for (const auto& [tok, freq] : ranked) {
    if (int(tokens.size()) >= max_size) break;
    if (freq < min_freq) break;
    tokens.push_back(tok);
  }
  return Vocabulary(std::move(tokens));
}

IndexedDocument index_document(const RawDocument& doc, const Vocabulary& vocab,
                               const DomainLabelSet& labels, int max_doc_len,
                               int max_sent_len) {
  if (doc.sentences.empty()) throw DataError("document " + doc.id + " has no sentences");
  if (doc.labels.empty()) throw DataError("document " + doc.id + " has no labels");

  IndexedDocument out;
  out.id = doc.id;
  for (const auto& sent : doc.sentences) {
    if (int(out.sentences.size()) >= max_doc_len) break;
    std::vector<int> ids;
    for (const auto& tok : sent) {
      if (int(ids.size()) >= max_sent_len) break;
      ids.push_back(vocab.index(tok));
    }
    if (!ids.empty()) out.sentences.push_back(std::move(ids));
  }
  if (out.sentences.empty())
    throw DataError("document " + doc.id + " is empty after clipping");

  out.label_vector.assign(labels.size(), -1.0);
  for (const auto& code : doc.labels) {
    auto idx = labels.index_of(code);
    if (!idx) throw DataError("document " + doc.id + ": unknown label code " + code);
    out.label_vector[*idx] = 1.0;
  }
  return out;
}

std::vector<RawDocument> load_corpus(const std::string& path,
                                     const DomainLabelSet& labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);

  std::vector<RawDocument> docs;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": malformed JSON record: " + e.what());
    }
    auto fail = [&](const std::string& msg) -> DataError {
      return DataError(path + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (!j.is_object() || !j.contains("id") || !j.contains("sentences") ||
        !j.contains("labels"))
      throw fail("record must have id, sentences and labels");
    RawDocument doc;
    if (!j["id"].is_string()) throw fail("id must be a string");
    doc.id = j["id"].get<std::string>();
    if (!j["sentences"].is_array() || j["sentences"].empty())
      throw fail("sentences must be a nonempty array");
    for (const auto& sj : j["sentences"]) {
      if (!sj.is_array() || sj.empty())
        throw fail("each sentence must be a nonempty token array");
      std::vector<std::string> sent;
      for (const auto& tj : sj) {
        if (!tj.is_string()) throw fail("tokens must be strings");
        sent.push_back(tj.get<std::string>());
      }
      doc.sentences.push_back(std::move(sent));
    }
    if (!j["labels"].is_array() || j["labels"].empty())
      throw fail("labels must be a nonempty array");
    for (const auto& lj : j["labels"]) {
      if (!lj.is_string()) throw fail("labels must be strings");
      const std::string code = lj.get<std::string>();
      if (!labels.contains(code)) throw fail("unknown label code " + code);
      doc.labels.insert(code);
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

void save_corpus(const std::vector<RawDocument>& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file: " + path);
  for (const auto& doc : corpus) {
    json j;
    j["id"] = doc.id;
    j["sentences"] = doc.sentences;
    j["labels"] = std::vector<std::string>(doc.labels.begin(), doc.labels.end());
    out << j.dump() << "\n";
  }
}

DefinitionSet load_definitions(const std::string& path,
                               const DomainLabelSet& labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open definitions file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path + ": malformed JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw DataError(path + ": definitions must be an object");

  DefinitionSet defs;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!labels.contains(it.key()))
      throw DataError(path + ": unknown domain code " + it.key());
    if (!it.value().is_string() || it.value().get<std::string>().empty())
      throw DataError(path + ": definition for " + it.key() +
                      " must be a nonempty string");
    defs[it.key()] = it.value().get<std::string>();
  }
  for (const auto& code : labels.codes())
    if (!defs.count(code))
      throw DataError(path + ": missing definition for domain " + code);
  return defs;
}

std::vector<std::vector<std::string>> definition_sentences(const std::string& text) {
  const std::vector<std::string> toks = tokenize(text);
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> current;
  for (const auto& tok : toks) {
    current.push_back(tok);
    if (tok == "." || tok == "!" || tok == "?") {
      sentences.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) sentences.push_back(current);
  return sentences;
}

}  // namespace detnet

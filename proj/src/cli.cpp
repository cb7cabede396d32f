#include "detnet/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "detnet/baselines.hpp"
#include "detnet/checkpoint.hpp"
#include "detnet/detrank.hpp"
#include "detnet/inference.hpp"
#include "detnet/synthgen.hpp"
#include "detnet/training.hpp"

namespace detnet::cli {

using nlohmann::ordered_json;

namespace {

std::vector<IndexedDocument> index_corpus(const std::vector<RawDocument>& raw,
                                          const Vocabulary& vocab,
                                          const DomainLabelSet& labels,
                                          const ModelConfig& cfg) {
  std::vector<IndexedDocument> docs;
  docs.reserve(raw.size());
  for (const auto& doc : raw)
    docs.push_back(
        index_document(doc, vocab, labels, cfg.max_doc_len, cfg.max_sent_len));
  return docs;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw DataError("cannot write output file: " + path);
  return file;
}

ordered_json f1_report(const LabelF1Result& res, const DomainLabelSet& labels) {
  ordered_json j;
  j["macro_f1"] = res.macro_f1;
  ordered_json per;
  for (int c = 0; c < labels.size(); ++c) per[labels.code(c)] = res.per_class[c];
  j["per_class"] = std::move(per);
  j["n_samples"] = res.n_samples;
  return j;
}

struct LoadedCheckpoint {
  Checkpoint ck;
  std::unique_ptr<Model> model;
  DomainLabelSet labels;
  Vocabulary vocab;

  explicit LoadedCheckpoint(const std::string& path)
      : ck(load_checkpoint(path)),
        model(build_model(ck)),
        labels(ck.label_codes),
        vocab(ck.vocab_tokens) {}
};

int cmd_train(const std::string& corpus_path, const std::string& dev_path,
              const std::string& defs_path, const std::string& config_path,
              const std::string& model_kind, const std::string& out_path,
              const std::string& log_path, std::optional<uint64_t> seed) {
  TrainConfig cfg;
  if (!config_path.empty()) cfg = load_train_config(config_path);
  if (seed) cfg.seed = *seed;

  DomainLabelSet labels = cfg.labels.empty() ? DomainLabelSet()
                                             : DomainLabelSet(cfg.labels);
  const auto raw = load_corpus(corpus_path, labels);
  if (raw.empty()) throw DataError("training corpus is empty: " + corpus_path);
  const Vocabulary vocab =
      build_vocab(raw, cfg.vocab_max_size, cfg.vocab_min_freq);
  const auto train_docs = index_corpus(raw, vocab, labels, cfg.model);

  std::vector<IndexedDocument> dev_docs;
  if (!dev_path.empty())
    dev_docs = index_corpus(load_corpus(dev_path, labels), vocab, labels, cfg.model);

  std::unique_ptr<Model> model = make_model(model_kind, cfg.model, labels, vocab.size());

  if (auto* major = dynamic_cast<MajorModel*>(model.get())) {
    major->fit(train_docs);
    const auto& eval_docs = dev_docs.empty() ? train_docs : dev_docs;
    const LabelF1Result f1 = label_f1(predict_label_sets(*model, eval_docs),
                                      gold_label_sets(eval_docs), labels.size());
    save_checkpoint(snapshot_model(*model, vocab, 0, f1.macro_f1), out_path);
    std::cout << "major baseline fitted: label " << labels.code(major->majority_index())
              << ", dev_f1 " << f1.macro_f1 << "\n";
    return 0;
  }

  init_params(model->params(), cfg.seed);
  if (auto* detnet = dynamic_cast<DetNetModel*>(model.get());
      detnet && detnet->config().variant == Variant::FPlus) {
    if (defs_path.empty())
      throw UsageError("--definitions is required for detnet-f+");
    detnet->set_definitions(load_definitions(defs_path, labels), vocab);
  }

  std::ofstream log_file;
  std::ostream* log_stream = nullptr;
  if (!log_path.empty()) {
    log_file.open(log_path);
    if (!log_file) throw DataError("cannot write training log: " + log_path);
    log_stream = &log_file;
  }

  const TrainResult result = train_model(*model, train_docs, dev_docs, cfg, log_stream);
  save_checkpoint(snapshot_model(*model, vocab, result.best_epoch, result.best_dev_f1),
                  out_path);
  std::cout << "trained " << model->kind() << ": best epoch " << result.best_epoch
            << ", dev_f1 " << result.best_dev_f1 << "\n";
  return 0;
}

int cmd_predict(const std::string& ck_path, const std::string& corpus_path,
                const std::string& out_path) {
  LoadedCheckpoint loaded(ck_path);
  const auto docs = index_corpus(load_corpus(corpus_path, loaded.labels),
                                 loaded.vocab, loaded.labels, loaded.ck.config);
  std::ofstream file;
  std::ostream& out = open_output(file, out_path);
  write_predictions_jsonl(*loaded.model, docs, out, env_num_workers());
  return 0;
}

int cmd_eval(const std::string& ck_path, const std::string& corpus_path,
             const std::string& sidecar_path, const std::string& out_path) {
  LoadedCheckpoint loaded(ck_path);
  const auto raw = load_corpus(corpus_path, loaded.labels);
  const auto docs =
      index_corpus(raw, loaded.vocab, loaded.labels, loaded.ck.config);

  const LabelF1Result doc_f1 =
      label_f1(predict_label_sets(*loaded.model, docs), gold_label_sets(docs),
               loaded.labels.size());

  ordered_json report;
  if (sidecar_path.empty()) {
    report = f1_report(doc_f1, loaded.labels);
  } else {
    const auto sentence_gold = load_sentence_labels(sidecar_path);
    const auto scores = score_corpus(*loaded.model, docs, env_num_workers());
    std::vector<std::vector<int>> pred_sets, gold_sets;
    for (size_t d = 0; d < docs.size(); ++d) {
      auto it = sentence_gold.find(docs[d].id);
      if (it == sentence_gold.end())
        throw DataError("sidecar lacks sentence labels for document " + docs[d].id);
      const auto& gold_per_sentence = it->second;
      if (gold_per_sentence.size() < docs[d].sentences.size())
        throw DataError("sidecar has too few sentence label sets for " + docs[d].id);
      for (size_t s = 0; s < docs[d].sentences.size(); ++s) {
        pred_sets.push_back(predict_domains(scores[d].Q.column(int(s))));
        std::vector<int> gold;
        for (const auto& code : gold_per_sentence[s]) {
          auto idx = loaded.labels.index_of(code);
          if (!idx) throw DataError("sidecar has unknown label code " + code);
          gold.push_back(*idx);
        }
        gold_sets.push_back(std::move(gold));
      }
    }
    const LabelF1Result sent_f1 =
        label_f1(pred_sets, gold_sets, loaded.labels.size());
    report["documents"] = f1_report(doc_f1, loaded.labels);
    report["sentences"] = f1_report(sent_f1, loaded.labels);
  }

  std::ofstream file;
  std::ostream& out = open_output(file, out_path);
  out << report.dump(2) << "\n";
  return 0;
}

int cmd_synth(const std::string& corpus_path, const std::string& out_path,
              std::string sidecar_path, int n_docs, int max_len, uint64_t seed) {
  DomainLabelSet labels;
  const auto raw = load_corpus(corpus_path, labels);
  const auto index = collect_combinations(raw);
  const auto docs = build_silver_testset(index, labels, n_docs, max_len, seed);
  if (sidecar_path.empty()) sidecar_path = out_path + ".labels.jsonl";
  save_silver_testset(docs, out_path, sidecar_path);
  std::cout << "wrote " << docs.size() << " synthetic documents to " << out_path
            << " (sentence labels: " << sidecar_path << ")\n";
  return 0;
}

int cmd_summarize(const std::string& ck_path, const std::string& corpus_path,
                  const std::string& domain_code, double phi, int budget,
                  const std::string& doc_id, bool word_scores,
                  const std::string& out_path) {
  LoadedCheckpoint loaded(ck_path);
  SummaryConfig cfg;
  cfg.phi = phi;
  cfg.budget_words = budget;
  cfg.validate();

  std::optional<int> domain;
  if (!domain_code.empty()) {
    auto idx = loaded.labels.index_of(domain_code);
    if (!idx) throw UsageError("unknown domain code: " + domain_code);
    domain = *idx;
  }

  const auto raw = load_corpus(corpus_path, loaded.labels);
  std::ofstream file;
  std::ostream& out = open_output(file, out_path);

  bool found = false;
  for (const auto& doc_raw : raw) {
    if (!doc_id.empty() && doc_raw.id != doc_id) continue;
    found = true;
    const IndexedDocument doc = index_document(
        doc_raw, loaded.vocab, loaded.labels, loaded.ck.config.max_doc_len,
        loaded.ck.config.max_sent_len);
    // Clip the raw token view to what the model scored.
    std::vector<std::vector<std::string>> sentences;
    for (size_t s = 0; s < doc.sentences.size(); ++s) {
      const auto& toks = doc_raw.sentences[s];
      sentences.emplace_back(toks.begin(),
                             toks.begin() + doc.sentences[s].size());
    }

    const ScoreSet scores = loaded.model->score_document(doc);
    const Summary summary =
        domain ? detrank_summary(sentences, scores.Q, scores.beta, *domain, cfg)
               : textrank_summary(sentences, cfg);

    ordered_json j;
    j["id"] = doc_raw.id;
    j["domain"] = domain ? loaded.labels.code(*domain) : "";
    j["sentence_indices"] = summary.selected;
    j["e_star"] = summary.e_star;
    std::string text;
    for (int idx : summary.selected) {
      if (!text.empty()) text += " ";
      for (size_t w = 0; w < sentences[idx].size(); ++w) {
        if (w) text += " ";
        text += sentences[idx][w];
      }
    }
    j["text"] = text;
    if (word_scores && domain) {
      ordered_json ws = ordered_json::array();
      for (int idx : summary.selected) {
        const Mat& p = scores.sentences[idx].P;
        std::vector<double> row(p.cols());
        for (int w = 0; w < p.cols(); ++w) row[w] = p(*domain, w);
        ws.push_back(row);
      }
      j["word_scores"] = std::move(ws);
    }
    out << j.dump() << "\n";
  }
  if (!found) throw DataError("document not found in corpus: " + doc_id);
  return 0;
}

int cmd_topwords(const std::string& ck_path, const std::string& corpus_path,
                 int top_k, const std::string& out_path) {
  LoadedCheckpoint loaded(ck_path);
  const auto raw = load_corpus(corpus_path, loaded.labels);

  std::vector<ScoredSentenceTokens> scored;
  for (const auto& doc_raw : raw) {
    const IndexedDocument doc = index_document(
        doc_raw, loaded.vocab, loaded.labels, loaded.ck.config.max_doc_len,
        loaded.ck.config.max_sent_len);
    const ScoreSet scores = loaded.model->score_document(doc);
    for (size_t s = 0; s < doc.sentences.size(); ++s) {
      ScoredSentenceTokens entry;
      entry.tokens.assign(doc_raw.sentences[s].begin(),
                          doc_raw.sentences[s].begin() + doc.sentences[s].size());
      entry.P = scores.sentences[s].P;
      entry.alpha = scores.sentences[s].alpha;
      scored.push_back(std::move(entry));
    }
  }

  const auto ranked = rank_domain_words(scored, loaded.labels.size(), top_k);
  ordered_json j;
  for (int c = 0; c < loaded.labels.size(); ++c) {
    ordered_json words = ordered_json::array();
    for (const auto& w : ranked[c]) {
      ordered_json entry;
      entry["word"] = w.token;
      entry["score"] = w.score;
      words.push_back(std::move(entry));
    }
    j[loaded.labels.code(c)] = std::move(words);
  }
  std::ofstream file;
  std::ostream& out = open_output(file, out_path);
  out << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"weakly supervised multilabel domain detection toolkit"};
  app.require_subcommand(1);

  std::string corpus, dev, definitions, config, out, log, checkpoint;
  std::string model_kind = "detnet-f+";
  std::string domain_code, doc_id, sidecar;
  uint64_t seed = 42;
  bool seed_given = false;
  double phi = 0.3;
  int budget = 100, top_k = 15, n_docs = 200, max_len = 100;
  bool word_scores = false;

  auto* train = app.add_subcommand("train", "train a model and save a checkpoint");
  train->add_option("--corpus", corpus, "training corpus JSONL")->required();
  train->add_option("--dev", dev, "development corpus JSONL");
  train->add_option("--definitions", definitions, "domain definitions JSON");
  train->add_option("--config", config, "training config JSON");
  train->add_option("--model", model_kind,
                    "detnet-s|detnet-f|detnet-f+|hiernet|milnet|major");
  train->add_option("--out", out, "checkpoint output path")->required();
  train->add_option("--log", log, "training log JSONL path");
  train->add_option("--seed", seed, "random seed")->each([&](const std::string&) {
    seed_given = true;
  });

  auto* predict = app.add_subcommand("predict", "score a corpus into JSONL");
  predict->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  predict->add_option("--corpus", corpus, "corpus JSONL")->required();
  predict->add_option("--out", out, "output path (default stdout)");
  predict->add_option("--seed", seed, "random seed (inference is deterministic)");

  auto* eval = app.add_subcommand("eval", "evaluate label F1 on a corpus");
  eval->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  eval->add_option("--corpus", corpus, "corpus JSONL")->required();
  eval->add_option("--sentence-labels", sidecar, "sentence-label sidecar JSONL");
  eval->add_option("--out", out, "report path (default stdout)");
  eval->add_option("--seed", seed, "random seed (evaluation is deterministic)");

  auto* synth = app.add_subcommand("synth", "generate a silver-standard test set");
  synth->add_option("--corpus", corpus, "training corpus JSONL")->required();
  synth->add_option("--out", out, "synthetic corpus output path")->required();
  synth->add_option("--sidecar", sidecar, "sentence-label sidecar path");
  synth->add_option("--n-docs", n_docs, "number of documents (default 200)");
  synth->add_option("--max-len", max_len, "maximum document length (default 100)");
  synth->add_option("--seed", seed, "random seed");

  auto* summarize = app.add_subcommand("summarize", "domain-conditioned summaries");
  summarize->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  summarize->add_option("--corpus", corpus, "corpus JSONL")->required();
  summarize->add_option("--domain", domain_code,
                        "domain code; omit for plain TextRank");
  summarize->add_option("--phi", phi, "domain-bias weight (default 0.3)");
  summarize->add_option("--budget", budget, "word budget (default 100)");
  summarize->add_option("--doc-id", doc_id, "summarize only this document");
  summarize->add_flag("--word-scores", word_scores,
                      "include per-word domain scores");
  summarize->add_option("--out", out, "output path (default stdout)");
  summarize->add_option("--seed", seed, "random seed (summarization is deterministic)");

  auto* topwords = app.add_subcommand("topwords", "top ranked words per domain");
  topwords->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  topwords->add_option("--corpus", corpus, "corpus JSONL")->required();
  topwords->add_option("--k", top_k, "words per domain (default 15)");
  topwords->add_option("--out", out, "output path (default stdout)");
  topwords->add_option("--seed", seed, "random seed (ranking is deterministic)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // --help exits 0, everything else is usage
  }

  try {
    if (train->parsed())
      return cmd_train(corpus, dev, definitions, config, model_kind, out, log,
                       seed_given ? std::optional<uint64_t>(seed) : std::nullopt);
    if (predict->parsed()) return cmd_predict(checkpoint, corpus, out);
    if (eval->parsed()) return cmd_eval(checkpoint, corpus, sidecar, out);
    if (synth->parsed())
      return cmd_synth(corpus, out, sidecar, n_docs, max_len, seed);
    if (summarize->parsed())
      return cmd_summarize(checkpoint, corpus, domain_code, phi, budget, doc_id,
                           word_scores, out);
    if (topwords->parsed()) return cmd_topwords(checkpoint, corpus, top_k, out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace detnet::cli

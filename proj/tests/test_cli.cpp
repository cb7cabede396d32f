#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "detnet/checkpoint.hpp"
#include "detnet/cli.hpp"
#include "detnet/inference.hpp"
#include "detnet/training.hpp"
#include "support/fixtures.hpp"

using namespace detnet;
using namespace detnet::testing;
using nlohmann::json;

namespace {

int run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"detnet"};
  owned.insert(owned.end(), args);
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  return cli::run(int(argv.size()), argv.data());
}

struct CliWorkspace {
  std::filesystem::path dir;

  CliWorkspace() {
    dir = std::filesystem::path("/tmp") /
          ("detnet_cli_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter()++));
    std::filesystem::create_directories(dir);

    PlantedCorpus corpus = make_planted_corpus(10, 3, 0.1, 321);
    save_corpus(corpus.raw, (dir / "corpus.jsonl").string());

    json defs;
    for (const auto& [code, text] : corpus.definitions) defs[code] = text;
    write("definitions.json", defs.dump());

    json cfg;
    cfg["labels"] = corpus.labels.codes();
    cfg["embed_dim"] = 8;
    cfg["ffn_dim"] = 16;
    cfg["heads"] = 2;
    cfg["layers"] = 1;
    cfg["epochs"] = 8;
    cfg["batch_size"] = 4;
    cfg["learning_rate"] = 3e-3;
    cfg["variant"] = "detnet-f";
    write("config.json", cfg.dump());
  }

  ~CliWorkspace() { std::filesystem::remove_all(dir); }

  static int& counter() {
    static int n = 0;
    return n;
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  void write(const std::string& name, const std::string& content) const {
    std::ofstream out(path(name));
    out << content;
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
};

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("train, predict, and eval round trip through files") {
  CliWorkspace ws;
  CHECK(run_cli({"train", "--corpus", ws.path("corpus.jsonl"), "--config",
                 ws.path("config.json"), "--model", "detnet-f", "--out",
                 ws.path("model.ck"), "--log", ws.path("train.log.jsonl"),
                 "--seed", "5"}) == 0);
  CHECK(std::filesystem::exists(ws.path("model.ck")));
  CHECK(std::filesystem::exists(ws.path("model.ck.json")));

  // The training log is line-oriented JSON with the documented keys.
  std::istringstream log(ws.slurp("train.log.jsonl"));
  std::string line;
  int lines = 0;
  while (std::getline(log, line)) {
    const json j = json::parse(line);
    CHECK(j.contains("epoch"));
    CHECK(j.contains("loss"));
    CHECK(j.contains("dev_f1"));
    ++lines;
  }
  CHECK(lines == 8);

  CHECK(run_cli({"predict", "--checkpoint", ws.path("model.ck"), "--corpus",
                 ws.path("corpus.jsonl"), "--out", ws.path("preds.jsonl")}) == 0);
  std::istringstream preds(ws.slurp("preds.jsonl"));
  int docs = 0;
  while (std::getline(preds, line)) {
    const json j = json::parse(line);
    CHECK(j.contains("id"));
    CHECK(j["doc_scores"].size() == 3);
    CHECK(!j["doc_labels"].empty());
    CHECK(!j["sentences"].empty());
    CHECK(j["sentences"][0].contains("word_scores"));
    ++docs;
  }
  CHECK(docs == 10);

  CHECK(run_cli({"eval", "--checkpoint", ws.path("model.ck"), "--corpus",
                 ws.path("corpus.jsonl"), "--out", ws.path("report.json")}) == 0);
  const json report = json::parse(ws.slurp("report.json"));
  CHECK(report.contains("macro_f1"));
  CHECK(report["per_class"].size() == 3);
  CHECK(report["n_samples"] == 10);
  CHECK(report["macro_f1"].get<double>() > 0.5);
}

TEST_CASE("predicted labels in the emitted file match in-process evaluation") {
  CliWorkspace ws;
  REQUIRE(run_cli({"train", "--corpus", ws.path("corpus.jsonl"), "--config",
                   ws.path("config.json"), "--model", "detnet-f", "--out",
                   ws.path("model.ck")}) == 0);
  REQUIRE(run_cli({"predict", "--checkpoint", ws.path("model.ck"), "--corpus",
                   ws.path("corpus.jsonl"), "--out", ws.path("preds.jsonl")}) == 0);

  const Checkpoint ck = load_checkpoint(ws.path("model.ck"));
  std::unique_ptr<Model> model = build_model(ck);
  const DomainLabelSet labels(ck.label_codes);
  const Vocabulary vocab(ck.vocab_tokens);
  const auto raw = load_corpus(ws.path("corpus.jsonl"), labels);

  std::istringstream preds(ws.slurp("preds.jsonl"));
  std::string line;
  size_t i = 0;
  while (std::getline(preds, line)) {
    const json j = json::parse(line);
    const IndexedDocument doc = index_document(raw[i], vocab, labels);
    const ScoreSet set = model->score_document(doc);
    // Re-deriving labels from serialized scores gives the same sets.
    std::vector<double> from_file = j["doc_scores"].get<std::vector<double>>();
    CHECK(predict_domains(from_file) == predict_domains(set.y));
    std::vector<std::string> file_labels =
        j["doc_labels"].get<std::vector<std::string>>();
    std::vector<std::string> in_process;
    for (int c : predict_domains(set.y)) in_process.push_back(labels.code(c));
    CHECK(file_labels == in_process);
    ++i;
  }
  CHECK(i == raw.size());
}

TEST_CASE("synth produces a corpus, a sidecar, and seeded determinism") {
  CliWorkspace ws;
  // The synth command uses the default seven-domain label set.
  std::vector<RawDocument> corpus;
  for (int i = 0; i < 8; ++i) {
    RawDocument doc;
    doc.id = "d" + std::to_string(i);
    doc.sentences = {{"lead", "tok" + std::to_string(i)}, {"body", "text"}};
    doc.labels = i % 2 ? std::set<std::string>{"GOV"}
                       : std::set<std::string>{"GOV", "MIL"};
    corpus.push_back(doc);
  }
  save_corpus(corpus, ws.path("train.jsonl"));

  CHECK(run_cli({"synth", "--corpus", ws.path("train.jsonl"), "--out",
                 ws.path("synth.jsonl"), "--n-docs", "12", "--max-len", "10",
                 "--seed", "9"}) == 0);
  CHECK(std::filesystem::exists(ws.path("synth.jsonl")));
  CHECK(std::filesystem::exists(ws.path("synth.jsonl.labels.jsonl")));
  const std::string first = ws.slurp("synth.jsonl");

  CHECK(run_cli({"synth", "--corpus", ws.path("train.jsonl"), "--out",
                 ws.path("synth.jsonl"), "--n-docs", "12", "--max-len", "10",
                 "--seed", "9"}) == 0);
  CHECK(ws.slurp("synth.jsonl") == first);

  int lines = 0;
  std::istringstream in(first);
  std::string line;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 12);
}

TEST_CASE("eval consumes the synth sidecar for sentence-level scores") {
  CliWorkspace ws;
  REQUIRE(run_cli({"train", "--corpus", ws.path("corpus.jsonl"), "--config",
                   ws.path("config.json"), "--model", "detnet-f", "--out",
                   ws.path("model.ck")}) == 0);

  // Build a sidecar for the training corpus itself: every sentence carries
  // its document's labels.
  const DomainLabelSet labels({"D0", "D1", "D2"});
  const auto raw = load_corpus(ws.path("corpus.jsonl"), labels);
  std::ofstream side(ws.path("sentences.jsonl"));
  for (const auto& doc : raw) {
    json j;
    j["doc_id"] = doc.id;
    json per = json::array();
    for (size_t s = 0; s < doc.sentences.size(); ++s)
      per.push_back(std::vector<std::string>(doc.labels.begin(), doc.labels.end()));
    j["sentence_labels"] = per;
    side << j.dump() << "\n";
  }
  side.close();

  CHECK(run_cli({"eval", "--checkpoint", ws.path("model.ck"), "--corpus",
                 ws.path("corpus.jsonl"), "--sentence-labels",
                 ws.path("sentences.jsonl"), "--out", ws.path("report.json")}) == 0);
  const json report = json::parse(ws.slurp("report.json"));
  CHECK(report.contains("documents"));
  CHECK(report.contains("sentences"));
  CHECK(report["sentences"]["n_samples"].get<int>() > 10);
}

TEST_CASE("summarize emits ranked sentences under a budget") {
  CliWorkspace ws;
  REQUIRE(run_cli({"train", "--corpus", ws.path("corpus.jsonl"), "--config",
                   ws.path("config.json"), "--model", "detnet-f", "--out",
                   ws.path("model.ck")}) == 0);

  CHECK(run_cli({"summarize", "--checkpoint", ws.path("model.ck"), "--corpus",
                 ws.path("corpus.jsonl"), "--domain", "D1", "--phi", "0.3",
                 "--budget", "12", "--doc-id", "doc-1", "--word-scores",
                 "--out", ws.path("summary.jsonl")}) == 0);
  const json j = json::parse(ws.slurp("summary.jsonl"));
  CHECK(j["id"] == "doc-1");
  CHECK(j["domain"] == "D1");
  CHECK(!j["sentence_indices"].empty());
  CHECK(!j["e_star"].empty());
  CHECK(j["text"].is_string());
  CHECK(j.contains("word_scores"));

  // Without --domain the plain TextRank path runs.
  CHECK(run_cli({"summarize", "--checkpoint", ws.path("model.ck"), "--corpus",
                 ws.path("corpus.jsonl"), "--doc-id", "doc-1", "--out",
                 ws.path("textrank.jsonl")}) == 0);
  const json tj = json::parse(ws.slurp("textrank.jsonl"));
  CHECK(tj["domain"] == "");
}

TEST_CASE("topwords returns k ranked words per domain") {
  CliWorkspace ws;
  REQUIRE(run_cli({"train", "--corpus", ws.path("corpus.jsonl"), "--config",
                   ws.path("config.json"), "--model", "detnet-f", "--out",
                   ws.path("model.ck")}) == 0);
  CHECK(run_cli({"topwords", "--checkpoint", ws.path("model.ck"), "--corpus",
                 ws.path("corpus.jsonl"), "--k", "15", "--out",
                 ws.path("topwords.json")}) == 0);
  const json j = json::parse(ws.slurp("topwords.json"));
  REQUIRE(j.contains("D0"));
  CHECK(j["D0"].size() == 15);
  CHECK(j["D1"].size() == 15);
  CHECK(j["D0"][0].contains("word"));
  CHECK(j["D0"][0].contains("score"));
}

TEST_CASE("baseline kinds train through the same surface") {
  CliWorkspace ws;
  for (const std::string kind : {"major", "hiernet", "milnet"}) {
    CHECK(run_cli({"train", "--corpus", ws.path("corpus.jsonl"), "--config",
                   ws.path("config.json"), "--model", kind, "--out",
                   ws.path(kind + ".ck")}) == 0);
    CHECK(run_cli({"predict", "--checkpoint", ws.path(kind + ".ck"), "--corpus",
                   ws.path("corpus.jsonl"), "--out",
                   ws.path(kind + ".preds.jsonl")}) == 0);
  }
}

TEST_CASE("worker sharding returns the same scores in the same order") {
  PlantedCorpus corpus = make_planted_corpus(9, 3, 0.2, 501);
  DetNetModel model(tiny_config(Variant::F), corpus.labels, corpus.vocab.size());
  init_params(model.params(), 501);
  const auto serial = score_corpus(model, corpus.docs, 1);
  const auto sharded = score_corpus(model, corpus.docs, 4);
  REQUIRE(serial.size() == sharded.size());
  for (size_t i = 0; i < serial.size(); ++i)
    for (size_t k = 0; k < serial[i].y.size(); ++k)
      CHECK(serial[i].y[k] == sharded[i].y[k]);

  // DETNET_NUM_WORKERS parsing.
  ::setenv("DETNET_NUM_WORKERS", "3", 1);
  CHECK(env_num_workers() == 3);
  ::setenv("DETNET_NUM_WORKERS", "garbage", 1);
  CHECK(env_num_workers() == 1);
  ::unsetenv("DETNET_NUM_WORKERS");
  CHECK(env_num_workers() == 1);
}

TEST_CASE("exit codes distinguish usage, data, and runtime errors") {
  CliWorkspace ws;
  // Unknown flag: usage error.
  CHECK(run_cli({"train", "--nonsense"}) == 1);
  // Unknown subcommand: usage error.
  CHECK(run_cli({"frobnicate"}) == 1);
  // Missing required flag: usage error.
  CHECK(run_cli({"predict", "--corpus", ws.path("corpus.jsonl")}) == 1);
  // Missing file: data error.
  CHECK(run_cli({"predict", "--checkpoint", ws.path("missing.ck"), "--corpus",
                 ws.path("corpus.jsonl")}) == 2);
  // detnet-f+ without definitions: usage error.
  CHECK(run_cli({"train", "--corpus", ws.path("corpus.jsonl"), "--config",
                 ws.path("config.json"), "--model", "detnet-f+", "--out",
                 ws.path("x.ck")}) == 1);
  // Malformed corpus: data error.
  ws.write("broken.jsonl", "{not json\n");
  CHECK(run_cli({"predict", "--checkpoint", ws.path("missing.ck"), "--corpus",
                 ws.path("broken.jsonl")}) == 2);
}

TEST_SUITE_END();

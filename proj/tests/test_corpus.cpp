#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "detnet/corpus.hpp"

using namespace detnet;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("/tmp/detnet_test_" + name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

RawDocument make_doc(std::string id,
                     std::vector<std::vector<std::string>> sentences,
                     std::set<std::string> labels) {
  return RawDocument{std::move(id), std::move(sentences), std::move(labels)};
}

}  // namespace

TEST_SUITE_BEGIN("corpus");

TEST_CASE("tokenize splits words and punctuation, lowercased") {
  CHECK(tokenize("The mouse died quickly.") ==
        std::vector<std::string>{"the", "mouse", "died", "quickly", "."});
  CHECK(tokenize("A-B  c") == std::vector<std::string>{"a", "-", "b", "c"});
  CHECK(tokenize("x") == std::vector<std::string>{"x"});
  CHECK_THROWS_AS(tokenize(""), DataError);
}

TEST_CASE("tokenize rejects unsupported languages and accepts hooks") {
  CHECK_THROWS_WITH_AS(tokenize("text", "xx"),
                       doctest::Contains("\"xx\""), DataError);
  register_segmenter("toy", [](const std::string& s) {
    return std::vector<std::string>(1, s);
  });
  CHECK(tokenize("Whole Sentence", "toy") ==
        std::vector<std::string>{"Whole Sentence"});
}

TEST_CASE("build_vocab ranks by frequency then lexicographic order") {
  const std::vector<RawDocument> corpus{
      make_doc("d1", {{"a", "a", "b"}}, {"GOV"})};
  const Vocabulary v = build_vocab(corpus, 10);
  CHECK(v.size() == 4);
  CHECK(v.index("<pad>") == 0);
  CHECK(v.index("<unk>") == 1);
  CHECK(v.index("a") == 2);
  CHECK(v.index("b") == 3);

  const Vocabulary truncated = build_vocab(corpus, 3);
  CHECK(truncated.size() == 3);
  CHECK(truncated.contains("a"));
  CHECK(!truncated.contains("b"));

  // Tie on frequency 1: lexicographic.
  const std::vector<RawDocument> tie{make_doc("d1", {{"b", "a"}}, {"GOV"})};
  const Vocabulary tv = build_vocab(tie, 10);
  CHECK(tv.index("a") == 2);
  CHECK(tv.index("b") == 3);

  CHECK_THROWS_AS(build_vocab(corpus, 1), DataError);
}

TEST_CASE("build_vocab honors min_freq") {
  const std::vector<RawDocument> corpus{
      make_doc("d1", {{"a", "a", "b"}}, {"GOV"})};
  const Vocabulary v = build_vocab(corpus, 10, 2);
  CHECK(v.contains("a"));
  CHECK(!v.contains("b"));
}

TEST_CASE("vocabulary round-trips in-vocabulary tokens") {
  const std::vector<RawDocument> corpus{
      make_doc("d1", {{"alpha", "beta", "gamma"}}, {"GOV"})};
  const Vocabulary v = build_vocab(corpus, 10);
  for (const auto& tok : {"alpha", "beta", "gamma"})
    CHECK(v.token(v.index(tok)) == tok);
  CHECK(v.index("zyzzyva") == Vocabulary::kUnk);
}

TEST_CASE("index_document clips, maps OOV, and encodes signed labels") {
  const DomainLabelSet labels;
  const std::vector<RawDocument> base{make_doc("d", {{"w"}}, {"GOV"})};
  const Vocabulary v = build_vocab(base, 10);

  std::vector<std::vector<std::string>> many(120, {"w"});
  const IndexedDocument clipped =
      index_document(make_doc("long", many, {"GOV"}), v, labels);
  CHECK(clipped.sentences.size() == 100);

  const IndexedDocument doc =
      index_document(make_doc("d", {{"w", "zyzzyva"}}, {"GOV"}), v, labels);
  CHECK(doc.sentences[0][1] == Vocabulary::kUnk);
  CHECK(doc.label_vector ==
        std::vector<double>{-1, 1, -1, -1, -1, -1, -1});

  int positives = 0;
  for (double x : doc.label_vector) {
    CHECK((x == 1.0 || x == -1.0));
    if (x == 1.0) ++positives;
  }
  CHECK(positives >= 1);
}

TEST_CASE("index_document clipping preserves order and is idempotent") {
  const DomainLabelSet labels;
  std::vector<std::vector<std::string>> sentences;
  for (int i = 0; i < 7; ++i)
    sentences.push_back({"tok" + std::to_string(i), "x", "y", "z"});
  std::vector<RawDocument> corpus{make_doc("d", sentences, {"MIL"})};
  const Vocabulary v = build_vocab(corpus, 100);

  const IndexedDocument a =
      index_document(corpus[0], v, labels, /*max_doc_len=*/5, /*max_sent_len=*/2);
  CHECK(a.sentences.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(a.sentences[i].size() == 2);
    CHECK(v.token(a.sentences[i][0]) == "tok" + std::to_string(i));
  }

  // Re-index the already-clipped document: identical result.
  RawDocument clipped_raw = corpus[0];
  clipped_raw.sentences.resize(5);
  for (auto& s : clipped_raw.sentences) s.resize(2);
  const IndexedDocument b = index_document(clipped_raw, v, labels, 5, 2);
  CHECK(a.sentences == b.sentences);
}

TEST_CASE("index_document errors on empty results and unknown labels") {
  const DomainLabelSet labels;
  const std::vector<RawDocument> base{make_doc("d", {{"w"}}, {"GOV"})};
  const Vocabulary v = build_vocab(base, 10);
  RawDocument empty_sent = make_doc("e", {{}}, {"GOV"});
  CHECK_THROWS_AS(index_document(empty_sent, v, labels), DataError);
  RawDocument bad_label = make_doc("b", {{"w"}}, {"XXX"});
  CHECK_THROWS_AS(index_document(bad_label, v, labels), DataError);
}

TEST_CASE("load_corpus parses records and reports bad lines") {
  const DomainLabelSet labels;
  TempFile good("corpus_good.jsonl",
                R"({"id": "a", "sentences": [["hello", "world"]], "labels": ["GOV"]})"
                "\n"
                R"({"id": "b", "sentences": [["x"], ["y"]], "labels": ["MIL", "GEN"]})"
                "\n");
  const auto docs = load_corpus(good.path, labels);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].id == "a");
  CHECK(docs[1].sentences.size() == 2);
  CHECK(docs[1].labels == std::set<std::string>{"GEN", "MIL"});

  TempFile missing("corpus_missing.jsonl",
                   R"({"id": "a", "sentences": [["hello"]], "labels": ["GOV"]})"
                   "\n"
                   R"({"id": "b", "sentences": [["x"]]})"
                   "\n");
  CHECK_THROWS_WITH_AS(load_corpus(missing.path, labels),
                       doctest::Contains(":2:"), DataError);

  TempFile unknown("corpus_unknown.jsonl",
                   R"({"id": "a", "sentences": [["hello"]], "labels": ["ZZZ"]})"
                   "\n");
  CHECK_THROWS_WITH_AS(load_corpus(unknown.path, labels),
                       doctest::Contains("ZZZ"), DataError);
}

TEST_CASE("corpus save/load round trip") {
  const DomainLabelSet labels;
  std::vector<RawDocument> docs{
      make_doc("a", {{"x", "y"}, {"z"}}, {"GOV", "MIL"}),
      make_doc("b", {{"q"}}, {"GEN"})};
  TempFile f("corpus_roundtrip.jsonl", "");
  save_corpus(docs, f.path);
  const auto loaded = load_corpus(f.path, labels);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].sentences == docs[0].sentences);
  CHECK(loaded[0].labels == docs[0].labels);
  CHECK(loaded[1].id == "b");
}

TEST_CASE("load_definitions demands completeness") {
  const DomainLabelSet labels;
  TempFile missing("defs_missing.json",
                   R"({"BUS": "trade.", "GOV": "rule.", "HEA": "health.",
                       "LAW": "law.", "LIF": "life.", "GEN": "misc."})");
  CHECK_THROWS_WITH_AS(load_definitions(missing.path, labels),
                       doctest::Contains("MIL"), DataError);

  TempFile full("defs_full.json",
                R"({"BUS": "trade.", "GOV": "rule.", "HEA": "health.",
                    "LAW": "law.", "LIF": "life.", "MIL": "war.",
                    "GEN": "misc."})");
  const DefinitionSet defs = load_definitions(full.path, labels);
  CHECK(defs.size() == 7);
  CHECK(defs.at("MIL") == "war.");
}

TEST_CASE("definition_sentences splits on terminal punctuation") {
  const auto sents = definition_sentences("One sentence. And two! third");
  REQUIRE(sents.size() == 3);
  CHECK(sents[0] == std::vector<std::string>{"one", "sentence", "."});
  CHECK(sents[1] == std::vector<std::string>{"and", "two", "!"});
  CHECK(sents[2] == std::vector<std::string>{"third"});
}

TEST_CASE("domain label sets validate uniqueness and size") {
  CHECK_THROWS_AS(DomainLabelSet({"GOV"}), DataError);
  CHECK_THROWS_AS(DomainLabelSet({"GOV", "GOV"}), DataError);
  const DomainLabelSet custom({"AAA", "BBB", "CCC"});
  CHECK(custom.size() == 3);
  CHECK(custom.index_of("BBB") == 1);
  CHECK(!custom.index_of("GOV").has_value());
}

TEST_SUITE_END();

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "detnet/synthgen.hpp"

using namespace detnet;

namespace {

RawDocument doc_with(std::string id, std::set<std::string> labels, int sentences,
                     const std::string& stem) {
  RawDocument doc;
  doc.id = std::move(id);
  for (int s = 0; s < sentences; ++s)
    doc.sentences.push_back({stem + std::to_string(s), "body"});
  doc.labels = std::move(labels);
  return doc;
}

// A small training corpus over the default labels with three combinations.
std::vector<RawDocument> toy_corpus() {
  std::vector<RawDocument> corpus;
  for (int i = 0; i < 6; ++i)
    corpus.push_back(doc_with("gov" + std::to_string(i), {"GOV"}, 3,
                              "gov" + std::to_string(i) + "w"));
  for (int i = 0; i < 5; ++i)
    corpus.push_back(doc_with("mil" + std::to_string(i), {"GOV", "MIL"}, 3,
                              "gm" + std::to_string(i) + "w"));
  for (int i = 0; i < 4; ++i)
    corpus.push_back(doc_with("lif" + std::to_string(i), {"LIF"}, 3,
                              "lif" + std::to_string(i) + "w"));
  return corpus;
}

}  // namespace

TEST_SUITE_BEGIN("synthgen");

TEST_CASE("collect_combinations gathers distinct label sets with lead sentences") {
  std::vector<RawDocument> corpus{doc_with("a", {"GOV"}, 2, "a"),
                                  doc_with("b", {"GOV"}, 2, "b"),
                                  doc_with("c", {"GOV", "MIL"}, 2, "c")};
  const LabelCombinationIndex index = collect_combinations(corpus);
  REQUIRE(index.combinations.size() == 2);
  CHECK(index.combinations[0].labels == std::vector<std::string>{"GOV"});
  CHECK(index.combinations[0].doc_count == 2);
  CHECK(index.combinations[0].lead_sentences.size() == 2);
  // Lead sentence is the first sentence of each document.
  CHECK(index.combinations[0].lead_sentences[0][0] == "a0");
  CHECK(index.combinations[1].labels ==
        std::vector<std::string>{"GOV", "MIL"});

  CHECK_THROWS_AS(collect_combinations({}), DataError);

  const LabelCombinationIndex single =
      collect_combinations({doc_with("solo", {"HEA"}, 1, "s")});
  CHECK(single.combinations.size() == 1);
}

TEST_CASE("generated documents obey the construction rules") {
  const DomainLabelSet labels;
  const auto corpus = toy_corpus();
  const LabelCombinationIndex index = collect_combinations(corpus);

  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const SyntheticDocument doc = generate_document(index, labels, 20, rng);
    CHECK(validate_document(doc, index, labels, 20).empty());
    CHECK(int(doc.sentences.size()) <= 20);
    const std::set<std::string> pool(doc.sentence_domains.begin(),
                                     doc.sentence_domains.end());
    CHECK(pool.count("GEN") == 1);
    for (const auto& sent : doc.sentences)
      for (const auto& code : sent.provenance) CHECK(pool.count(code) == 1);
    // Each selected candidate contributes at least one sentence.
    std::set<std::vector<std::string>> provs;
    for (const auto& sent : doc.sentences) provs.insert(sent.provenance);
    CHECK(!provs.empty());
  }
}

TEST_CASE("the noisy domain is skipped when the pool is already full") {
  // Two labels only: S_doc + GEN fills the set, so no epsilon fits.
  const DomainLabelSet labels({"GOV", "GEN"});
  std::vector<RawDocument> corpus{doc_with("a", {"GOV"}, 2, "a")};
  const LabelCombinationIndex index = collect_combinations(corpus);
  Rng rng(1);
  const SyntheticDocument doc = generate_document(index, labels, 10, rng);
  CHECK(doc.sentence_domains == std::vector<std::string>{"GEN", "GOV"});
}

TEST_CASE("seeded generation replays exactly") {
  const DomainLabelSet labels;
  const auto corpus = toy_corpus();
  const LabelCombinationIndex index = collect_combinations(corpus);

  Rng rng1(42), rng2(42);
  for (int i = 0; i < 10; ++i) {
    const SyntheticDocument a = generate_document(index, labels, 15, rng1);
    const SyntheticDocument b = generate_document(index, labels, 15, rng2);
    REQUIRE(a.sentences.size() == b.sentences.size());
    for (size_t s = 0; s < a.sentences.size(); ++s) {
      CHECK(a.sentences[s].tokens == b.sentences[s].tokens);
      CHECK(a.sentences[s].provenance == b.sentences[s].provenance);
    }
    CHECK(a.doc_labels == b.doc_labels);
  }
}

TEST_CASE("without-replacement sampling never exceeds the subcorpus") {
  const DomainLabelSet labels;
  const auto corpus = toy_corpus();
  const LabelCombinationIndex index = collect_combinations(corpus);
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const SyntheticDocument doc = generate_document(index, labels, 50, rng);
    std::map<std::vector<std::string>, std::set<std::vector<std::string>>> seen;
    std::map<std::vector<std::string>, int> counts;
    for (const auto& sent : doc.sentences) {
      seen[sent.provenance].insert(sent.tokens);
      ++counts[sent.provenance];
    }
    for (const auto& [prov, tokens] : seen) {
      // Distinct tokens == draw count, i.e. no sentence repeats.
      CHECK(int(tokens.size()) == counts[prov]);
    }
  }
}

TEST_CASE("shuffling preserves the sentence multiset") {
  const DomainLabelSet labels;
  const auto corpus = toy_corpus();
  const LabelCombinationIndex index = collect_combinations(corpus);
  Rng rng(11);
  const SyntheticDocument doc = generate_document(index, labels, 30, rng);
  // All sentences must come from some subcorpus of a candidate combination.
  for (const auto& sent : doc.sentences) {
    bool found = false;
    for (const auto& combo : index.combinations) {
      if (combo.labels != sent.provenance) continue;
      for (const auto& lead : combo.lead_sentences)
        if (lead == sent.tokens) found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("build_silver_testset is byte-identical for a fixed seed") {
  const DomainLabelSet labels;
  const auto corpus = toy_corpus();
  const LabelCombinationIndex index = collect_combinations(corpus);

  const auto docs1 = build_silver_testset(index, labels, 25, 12, 77);
  const auto docs2 = build_silver_testset(index, labels, 25, 12, 77);
  REQUIRE(docs1.size() == 25);

  const std::string c1 = "/tmp/detnet_synth1.jsonl", s1 = "/tmp/detnet_synth1.lbl";
  const std::string c2 = "/tmp/detnet_synth2.jsonl", s2 = "/tmp/detnet_synth2.lbl";
  save_silver_testset(docs1, c1, s1);
  save_silver_testset(docs2, c2, s2);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  CHECK(slurp(c1) == slurp(c2));
  CHECK(slurp(s1) == slurp(s2));

  // Sidecar round trip.
  const auto side = load_sentence_labels(s1);
  CHECK(side.size() == 25);
  CHECK(side.count("synth-0") == 1);
  CHECK(side.at("synth-0").size() == docs1[0].sentences.size());

  for (const auto& p : {c1, s1, c2, s2}) std::remove(p.c_str());
}

TEST_CASE("generation requires a GEN domain") {
  const DomainLabelSet labels({"AAA", "BBB"});
  std::vector<RawDocument> corpus{doc_with("a", {"AAA"}, 1, "a")};
  const LabelCombinationIndex index = collect_combinations(corpus);
  Rng rng(3);
  CHECK_THROWS_AS(generate_document(index, labels, 10, rng), DataError);
}

TEST_SUITE_END();

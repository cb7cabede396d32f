#include <doctest.h>

#include <cmath>

#include "detnet/baselines.hpp"
#include "detnet/training.hpp"
#include "support/fixtures.hpp"

using namespace detnet;
using namespace detnet::testing;

TEST_SUITE_BEGIN("baselines");

TEST_CASE("major picks the most frequent label with a low-index tie break") {
  PlantedCorpus corpus = make_planted_corpus(9, 3, 0.0, 19);
  // Planted docs rotate domains; rig a skew toward D1 by duplication.
  std::vector<IndexedDocument> docs = corpus.docs;
  docs.push_back(corpus.docs[1]);
  docs.push_back(corpus.docs[4]);
  MajorModel major(tiny_config(Variant::S), corpus.labels);
  major.fit(docs);
  CHECK(major.majority_index() == 1);

  // Every prediction is the constant singleton.
  const ScoreSet set = major.score_document(corpus.docs[0]);
  CHECK(predict_domains(set.y) == std::vector<int>{1});
  for (int s = 0; s < set.Q.cols(); ++s)
    CHECK(predict_domains(set.Q.column(s)) == std::vector<int>{1});

  // Exact tie: lowest label index wins.
  MajorModel tied(tiny_config(Variant::S), corpus.labels);
  tied.fit({corpus.docs[0], corpus.docs[1]});  // one D0 doc, one D1 doc
  CHECK(tied.majority_index() == 0);
}

TEST_CASE("hiernet broadcasts document scores to sentences and words") {
  PlantedCorpus corpus = make_planted_corpus(4, 3, 0.2, 23);
  HierNetModel model(tiny_config(Variant::S), corpus.labels, corpus.vocab.size());
  init_params(model.params(), 23);
  const ScoreSet set = model.score_document(corpus.docs[0]);
  for (int s = 0; s < set.Q.cols(); ++s)
    for (int c = 0; c < set.Q.rows(); ++c)
      CHECK(set.Q(c, s) == set.y[c]);
  for (const auto& sent : set.sentences)
    for (int j = 0; j < sent.P.cols(); ++j)
      for (int c = 0; c < sent.P.rows(); ++c)
        CHECK(sent.P(c, j) == set.y[c]);
}

TEST_CASE("hiernet document head follows tanh(Wdoc H beta)") {
  PlantedCorpus corpus = make_planted_corpus(2, 3, 0.0, 29);
  HierNetModel model(tiny_config(Variant::S, 8, 2, 1, 16), corpus.labels,
                     corpus.vocab.size());
  init_params(model.params(), 29);

  Tape t;
  SequenceEncoding sents;
  std::vector<SequenceEncoding> words;
  Var y = model.doc_score(t, corpus.docs[0], &sents, &words);
  const Mat& h = t.value(sents.states);
  const Mat& beta = t.value(sents.salience_row);
  const Mat& yv = t.value(y);

  Tensor* wdoc = nullptr;
  for (Tensor* p : model.params())
    if (p->name == "doc.Wdoc") wdoc = p;
  REQUIRE(wdoc != nullptr);

  for (int c = 0; c < 3; ++c) {
    double acc = 0.0;
    for (int i = 0; i < h.rows(); ++i) {
      double di = 0.0;
      for (int s = 0; s < h.cols(); ++s) di += h(i, s) * beta(0, s);
      acc += wdoc->value(c, i) * di;
    }
    CHECK(yv(c, 0) == doctest::Approx(std::tanh(acc)).epsilon(1e-10));
  }
}

TEST_CASE("hiernet with a zero document head starts at C*log2 loss") {
  PlantedCorpus corpus = make_planted_corpus(3, 3, 0.0, 31);
  HierNetModel model(tiny_config(Variant::S), corpus.labels, corpus.vocab.size());
  init_params(model.params(), 31);
  for (Tensor* p : model.params())
    if (p->name == "doc.Wdoc") p->value.fill(0.0);
  std::vector<const IndexedDocument*> batch;
  for (const auto& d : corpus.docs) batch.push_back(&d);
  Tape t;
  Var scores = model.batch_scores(t, batch, Mode::Eval, nullptr);
  const Mat& sv = t.value(scores);
  for (size_t i = 0; i < sv.size(); ++i) CHECK(sv.data()[i] == 0.0);
  CHECK(t.value(multilabel_loss(t, scores, batch_targets(batch)))(0, 0) ==
        doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("hiernet single-sentence documents use that sentence as the embedding") {
  PlantedCorpus corpus = make_planted_corpus(2, 3, 0.0, 37, /*sentences=*/1);
  HierNetModel model(tiny_config(Variant::S, 8, 2, 1, 16), corpus.labels,
                     corpus.vocab.size());
  init_params(model.params(), 37);
  Tape t;
  SequenceEncoding sents;
  std::vector<SequenceEncoding> words;
  model.doc_score(t, corpus.docs[0], &sents, &words);
  CHECK(t.value(sents.salience_row)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("milnet uses mean embeddings for context-free sentence scores") {
  PlantedCorpus corpus = make_planted_corpus(3, 3, 0.0, 41);
  MilNetModel model(tiny_config(Variant::S, 8, 2, 1, 16), corpus.labels,
                    corpus.vocab.size());
  init_params(model.params(), 41);

  Tensor* wm = nullptr;
  Tensor* emb = nullptr;
  for (Tensor* p : model.params()) {
    if (p->name == "mil.Wm") wm = p;
    if (p->name == "embeddings") emb = p;
  }
  REQUIRE(wm != nullptr);
  REQUIRE(emb != nullptr);

  const IndexedDocument& doc = corpus.docs[0];
  const ScoreSet set = model.score_document(doc);
  for (size_t s = 0; s < doc.sentences.size(); ++s) {
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int i = 0; i < 8; ++i) {
        double g = 0.0;
        for (int tok : doc.sentences[s]) g += emb->value(i, tok);
        g /= double(doc.sentences[s].size());
        acc += wm->value(c, i) * g;
      }
      CHECK(set.Q(c, int(s)) == doctest::Approx(std::tanh(acc)).epsilon(1e-10));
    }
  }
}

TEST_CASE("milnet sentence scores ignore word order; detnet does not") {
  PlantedCorpus corpus = make_planted_corpus(2, 3, 0.0, 43, 3, 6);
  MilNetModel mil(tiny_config(Variant::S, 8, 2, 1, 16), corpus.labels,
                  corpus.vocab.size());
  init_params(mil.params(), 43);

  IndexedDocument shuffled = corpus.docs[0];
  for (auto& sent : shuffled.sentences)
    std::reverse(sent.begin(), sent.end());

  const ScoreSet a = mil.score_document(corpus.docs[0]);
  const ScoreSet b = mil.score_document(shuffled);
  for (size_t i = 0; i < a.Q.size(); ++i)
    CHECK(a.Q.data()[i] == doctest::Approx(b.Q.data()[i]).epsilon(1e-12));

  DetNetModel det(tiny_config(Variant::F, 8, 2, 1, 16), corpus.labels,
                  corpus.vocab.size());
  init_params(det.params(), 43);
  const ScoreSet da = det.score_document(corpus.docs[0]);
  const ScoreSet db = det.score_document(shuffled);
  double diff = 0.0;
  for (size_t i = 0; i < da.Q.size(); ++i)
    diff = std::max(diff, std::abs(da.Q.data()[i] - db.Q.data()[i]));
  CHECK(diff > 1e-8);  // positional encodings make order matter
}

TEST_CASE("milnet identical sentences give identical columns and their score") {
  PlantedCorpus base = make_planted_corpus(1, 3, 0.0, 47, 1, 5);
  MilNetModel model(tiny_config(Variant::S, 8, 2, 1, 16), base.labels,
                    base.vocab.size());
  init_params(model.params(), 47);

  IndexedDocument doc = base.docs[0];
  doc.sentences = {doc.sentences[0], doc.sentences[0], doc.sentences[0]};
  const ScoreSet set = model.score_document(doc);
  for (int c = 0; c < 3; ++c) {
    CHECK(set.Q(c, 0) == doctest::Approx(set.Q(c, 1)).epsilon(1e-12));
    CHECK(set.Q(c, 0) == doctest::Approx(set.Q(c, 2)).epsilon(1e-12));
    CHECK(set.y[c] == doctest::Approx(set.Q(c, 0)).epsilon(1e-9));
  }

  // One-word sentence: g equals that word's embedding.
  IndexedDocument single = base.docs[0];
  single.sentences = {{3}};
  Tape t;
  MilNetModel::DocVars dv = model.doc_forward(t, single);
  CHECK(t.value(dv.Q).cols() == 1);
}

TEST_CASE("trainable baselines learn the planted corpus with the shared trainer") {
  PlantedCorpus corpus = make_planted_corpus(12, 3, 0.1, 53);
  TrainConfig cfg;
  cfg.model = tiny_config(Variant::S, 16, 2, 1, 32);
  cfg.batch_size = 4;
  cfg.epochs = 25;
  cfg.learning_rate = 3e-3;
  cfg.seed = 3;

  HierNetModel hier(cfg.model, corpus.labels, corpus.vocab.size());
  init_params(hier.params(), cfg.seed);
  const TrainResult hres = train_model(hier, corpus.docs, {}, cfg, nullptr);
  CHECK(hres.best_dev_f1 >= 0.9);

  MilNetModel mil(cfg.model, corpus.labels, corpus.vocab.size());
  init_params(mil.params(), cfg.seed);
  const TrainResult mres = train_model(mil, corpus.docs, {}, cfg, nullptr);
  CHECK(mres.best_dev_f1 >= 0.9);
}

TEST_SUITE_END();

#include <doctest.h>

#include <algorithm>
#include <set>

#include "detnet/metrics.hpp"
#include "detnet/rng.hpp"

using namespace detnet;

namespace {

// Independent recount oracle: per-class F1 from scratch with set logic.
double brute_force_macro_f1(const std::vector<std::vector<int>>& preds,
                            const std::vector<std::vector<int>>& golds, int c) {
  double total = 0.0;
  for (int cls = 0; cls < c; ++cls) {
    long long tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < preds.size(); ++i) {
      const std::set<int> p(preds[i].begin(), preds[i].end());
      const std::set<int> g(golds[i].begin(), golds[i].end());
      const bool in_p = p.count(cls) > 0, in_g = g.count(cls) > 0;
      if (in_p && in_g) ++tp;
      if (in_p && !in_g) ++fp;
      if (!in_p && in_g) ++fn;
    }
    if (2 * tp + fp + fn > 0) total += double(2 * tp) / double(2 * tp + fp + fn);
  }
  return total / c;
}

std::vector<std::vector<int>> random_sets(Rng& rng, int n, int c) {
  std::vector<std::vector<int>> out(n);
  for (auto& set : out)
    for (int cls = 0; cls < c; ++cls)
      if (rng.uniform() < 0.35) set.push_back(cls);
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("label F1 basics") {
  // Perfect predictions with every class present.
  const std::vector<std::vector<int>> gold{{0}, {1}, {2}, {0, 1}};
  CHECK(label_f1(gold, gold, 3).macro_f1 == doctest::Approx(1.0));

  // tp = fp = fn = 1 per class: F1 = 0.5 each, macro 0.5 exactly.
  const std::vector<std::vector<int>> preds{{0, 1, 2}, {0, 1, 2}, {}};
  const std::vector<std::vector<int>> golds{{0, 1, 2}, {}, {0, 1, 2}};
  const LabelF1Result res = label_f1(preds, golds, 3);
  for (int c = 0; c < 3; ++c) {
    CHECK(res.counts[c].tp == 1);
    CHECK(res.counts[c].fp == 1);
    CHECK(res.counts[c].fn == 1);
    CHECK(res.per_class[c] == doctest::Approx(0.5));
  }
  CHECK(res.macro_f1 == 0.5);

  // Degenerate class scores zero.
  const LabelF1Result degen = label_f1({{0}}, {{0}}, 2);
  CHECK(degen.per_class[0] == 1.0);
  CHECK(degen.per_class[1] == 0.0);
  CHECK(degen.macro_f1 == 0.5);
}

TEST_CASE("label F1 equals a brute-force recount on 1000 random cases") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int c = rng.uniform_int(2, 6);
    const int n = rng.uniform_int(1, 12);
    const auto preds = random_sets(rng, n, c);
    const auto golds = random_sets(rng, n, c);
    const double fast = label_f1(preds, golds, c).macro_f1;
    const double slow = brute_force_macro_f1(preds, golds, c);
    CHECK(std::abs(fast - slow) < 1e-12);
  }
}

TEST_CASE("label F1 is invariant under consistent class permutation") {
  Rng rng(99);
  const int c = 5;
  const auto preds = random_sets(rng, 20, c);
  const auto golds = random_sets(rng, 20, c);
  std::vector<int> perm{3, 0, 4, 1, 2};
  auto apply = [&](const std::vector<std::vector<int>>& sets) {
    std::vector<std::vector<int>> out(sets.size());
    for (size_t i = 0; i < sets.size(); ++i)
      for (int cls : sets[i]) out[i].push_back(perm[cls]);
    return out;
  };
  CHECK(label_f1(preds, golds, c).macro_f1 ==
        doctest::Approx(label_f1(apply(preds), apply(golds), c).macro_f1)
            .epsilon(1e-12));
}

TEST_CASE("metrics stay within [0, 1]") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int c = rng.uniform_int(2, 5);
    const auto preds = random_sets(rng, 6, c);
    const auto golds = random_sets(rng, 6, c);
    const LabelF1Result res = label_f1(preds, golds, c);
    CHECK(res.macro_f1 >= 0.0);
    CHECK(res.macro_f1 <= 1.0);
    const double wf = word_retrieval_f1(preds, golds);
    CHECK(wf >= 0.0);
    CHECK(wf <= 1.0);
  }
}

TEST_CASE("word retrieval F1 pools counts over all words") {
  // Perfect retrieval.
  CHECK(word_retrieval_f1({{0, 1}, {2}}, {{0, 1}, {2}}) == doctest::Approx(1.0));
  // Nothing retrieved against nonempty gold.
  CHECK(word_retrieval_f1({{}, {}}, {{0}, {1}}) == 0.0);
  // Half of gold retrieved with no false positives: p=1, r=0.5, F=2/3.
  CHECK(word_retrieval_f1({{0}, {}}, {{0}, {1}}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("retrieve_domain_words keeps strictly positive scores") {
  Mat p(2, 3);
  p(0, 0) = 0.1;
  p(0, 1) = -0.1;
  p(0, 2) = 0.0;
  p(1, 0) = -0.4;
  p(1, 1) = -0.2;
  p(1, 2) = -0.9;
  CHECK(retrieve_domain_words(p, 0) == std::vector<int>{0});
  CHECK(retrieve_domain_words(p, 1).empty());
}

TEST_SUITE_END();

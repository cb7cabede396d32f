#include "detnet/detector.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "detnet/check.hpp"

namespace detnet {

BatchNormParams::BatchNormParams(const std::string& prefix, int dim)
    : gain(prefix + ".gain", dim, 1, InitKind::One),
      bias(prefix + ".bias", dim, 1, InitKind::Zero),
      running_mean(dim, 1),
      running_var(dim, 1) {
  gain.value.fill(1.0);
  running_var.fill(1.0);
}

void BatchNormParams::collect(ParamSet& out) {
  out.push_back(&gain);
  out.push_back(&bias);
}

void BatchNormParams::reset_running() {
  running_mean.fill(0.0);
  running_var.fill(1.0);
}

Var batch_norm(Tape& t, BatchNormParams& bn, Var x, Mode mode) {
  if (mode == Mode::Train) {
    const int n = t.value(x).cols();
    Var mu = t.row_mean(x);
    Var xc = t.sub_col(x, mu);
    Var var = t.row_mean(t.mul(xc, xc));
    // Update running statistics from the batch values (unbiased variance).
    const Mat& mu_v = t.value(mu);
    const Mat& var_v = t.value(var);
    const double unbias = n > 1 ? double(n) / (n - 1) : 1.0;
    for (int i = 0; i < mu_v.rows(); ++i) {
      bn.running_mean(i, 0) =
          (1.0 - bn.momentum) * bn.running_mean(i, 0) + bn.momentum * mu_v(i, 0);
      bn.running_var(i, 0) = (1.0 - bn.momentum) * bn.running_var(i, 0) +
                             bn.momentum * var_v(i, 0) * unbias;
    }
    Var sd = t.sqrt(t.add_scalar(var, bn.eps));
    Var xn = t.div_col(xc, sd);
    return t.add_col(t.mul_col(xn, t.param(bn.gain)), t.param(bn.bias));
  }
  // Eval: affine transform with frozen statistics.
  Mat sd(bn.running_var.rows(), 1);
  for (int i = 0; i < sd.rows(); ++i)
    sd(i, 0) = std::sqrt(bn.running_var(i, 0) + bn.eps);
  Var xc = t.sub_col(x, t.input(bn.running_mean));
  Var xn = t.div_col(xc, t.input(sd));
  return t.add_col(t.mul_col(xn, t.param(bn.gain)), t.param(bn.bias));
}

Var dropout(Tape& t, Var x, double rate, Mode mode, Rng* rng) {
  if (mode == Mode::Eval || rate <= 0.0) return x;
  DETNET_CHECK(rng != nullptr, "training dropout needs an RNG");
  const Mat& xv = t.value(x);
  Mat mask(xv.rows(), xv.cols());
  const double keep = 1.0 - rate;
  for (size_t i = 0; i < mask.size(); ++i)
    mask.data()[i] = rng->uniform() < keep ? 1.0 / keep : 0.0;
  return t.mul(x, t.input(std::move(mask)));
}

Var self_scores(Tape& t, Tensor& w, Var x) {
  return t.tanh(t.matmul(t.param(w), x));
}

Var word_prior_scores(Tape& t, Tensor& wu, Var u, Var z) {
  Var projected = t.relu(t.matmul_tn(u, t.param(wu)));  // C x d_z
  return t.tanh(t.matmul(projected, z));
}

Var gate(Tape& t, Tensor& w, Tensor& b, const std::vector<Var>& parts,
         double scale) {
  Var cat = t.vconcat(parts);
  return t.scale(t.sigmoid(t.add_col(t.matmul(t.param(w), cat), t.param(b))),
                 scale);
}

Var fuse_scores(Tape& t, Var g, Var a, Var b) {
  return t.add(t.mul(g, a), t.mul(t.one_minus(g), b));
}

Var sentence_instance_scores(Tape& t, Var p, Var alpha_col) {
  return t.matmul(p, alpha_col);
}

Var document_scores(Tape& t, Var q, Var beta_col) {
  return t.matmul(q, beta_col);
}

// --- plain-matrix forms -------------------------------------------------------

namespace {
Mat tanh_of(Mat m) {
  for (size_t i = 0; i < m.size(); ++i) m.data()[i] = std::tanh(m.data()[i]);
  return m;
}
}  // namespace

Mat word_self_scores(const Mat& wz, const Mat& z) { return tanh_of(matmul(wz, z)); }

Mat word_prior_scores(const Mat& wu, const Mat& u, const Mat& z) {
  Mat proj = matmul_tn(u, wu);
  for (size_t i = 0; i < proj.size(); ++i)
    proj.data()[i] = std::max(0.0, proj.data()[i]);
  return tanh_of(matmul(proj, z));
}

namespace {
Mat gate_plain(const Mat& w, const Mat& b, const std::vector<const Mat*>& parts,
               double scale) {
  int rows = 0;
  for (const Mat* p : parts) rows += p->rows();
  const int cols = parts[0]->cols();
  Mat cat(rows, cols);
  int r = 0;
  for (const Mat* p : parts) {
    for (int i = 0; i < p->rows(); ++i)
      for (int j = 0; j < cols; ++j) cat(r + i, j) = (*p)(i, j);
    r += p->rows();
  }
  Mat out = matmul(w, cat);
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) {
      const double x = out(i, j) + b(i, 0);
      const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                : std::exp(x) / (1.0 + std::exp(x));
      out(i, j) = scale * s;
    }
  return out;
}
}  // namespace

Mat prior_gate(const Mat& wgp, const Mat& bgp, const Mat& z, const Mat& p_self,
               const Mat& p_prior, double gamma) {
  return gate_plain(wgp, bgp, {&z, &p_self, &p_prior}, gamma);
}

Mat fuse_scores(const Mat& g, const Mat& a, const Mat& b) {
  DETNET_CHECK(g.same_shape(a) && g.same_shape(b), "fuse_scores shape");
  Mat out(g.rows(), g.cols());
  for (size_t i = 0; i < out.size(); ++i)
    out.data()[i] = g.data()[i] * a.data()[i] + (1.0 - g.data()[i]) * b.data()[i];
  return out;
}

std::vector<double> sentence_instance_scores(const Mat& p,
                                             const std::vector<double>& alpha) {
  DETNET_CHECK(p.cols() == int(alpha.size()), "alpha length");
  std::vector<double> out(p.rows(), 0.0);
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.cols(); ++j) out[i] += p(i, j) * alpha[j];
  return out;
}

Mat sentence_self_scores(const Mat& wh, const Mat& h) { return tanh_of(matmul(wh, h)); }

Mat upward_gate(const Mat& wl, const Mat& bl, const Mat& h, const Mat& q_instc,
                const Mat& q_self, double lambda) {
  return gate_plain(wl, bl, {&h, &q_instc, &q_self}, lambda);
}

std::vector<double> document_scores(const Mat& q, const std::vector<double>& beta) {
  DETNET_CHECK(q.cols() == int(beta.size()), "beta length");
  std::vector<double> out(q.rows(), 0.0);
  for (int i = 0; i < q.rows(); ++i)
    for (int j = 0; j < q.cols(); ++j) out[i] += q(i, j) * beta[j];
  return out;
}

std::vector<int> predict_domains(const std::vector<double>& scores,
                                 double threshold) {
  std::vector<int> out;
  for (size_t c = 0; c < scores.size(); ++c)
    if (scores[c] > threshold) out.push_back(int(c));
  if (out.empty() && !scores.empty()) {
    int best = 0;
    for (size_t c = 1; c < scores.size(); ++c)
      if (scores[c] > scores[best]) best = int(c);
    out.push_back(best);
  }
  return out;
}

std::vector<std::vector<RankedWord>> rank_domain_words(
    const std::vector<ScoredSentenceTokens>& sentences, int num_domains,
    int top_k) {
  // Per word type, keep the best attention-weighted score over occurrences.
  std::vector<std::map<std::string, double>> best(num_domains);
  for (const auto& sent : sentences) {
    DETNET_CHECK(sent.P.rows() == num_domains, "score matrix height");
    DETNET_CHECK(sent.P.cols() == int(sent.tokens.size()), "score matrix width");
    for (int j = 0; j < sent.P.cols(); ++j) {
      for (int c = 0; c < num_domains; ++c) {
        const double score = sent.P(c, j) * sent.alpha[j];
        auto [it, inserted] = best[c].emplace(sent.tokens[j], score);
        if (!inserted && score > it->second) it->second = score;
      }
    }
  }
  std::vector<std::vector<RankedWord>> out(num_domains);
  for (int c = 0; c < num_domains; ++c) {
    std::vector<RankedWord> ranked;
    ranked.reserve(best[c].size());
    for (const auto& [tok, score] : best[c]) ranked.push_back({tok, score});
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.token < b.token;
    });
    if (int(ranked.size()) > top_k) ranked.resize(top_k);
    out[c] = std::move(ranked);
  }
  return out;
}

}  // namespace detnet

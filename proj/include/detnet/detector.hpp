#pragma once

#include <string>
#include <vector>

#include "detnet/encoder.hpp"
#include "detnet/rng.hpp"

namespace detnet {

enum class Mode { Train, Eval };

// Batch normalization over positions (columns); one feature per row. Training
// uses batch statistics and updates the running ones; evaluation uses the
// running statistics, making inference deterministic.
struct BatchNormParams {
  Tensor gain, bias;
  Mat running_mean, running_var;
  double momentum = 0.1;
  double eps = 1e-5;

  BatchNormParams(const std::string& prefix, int dim);
  void collect(ParamSet& out);
  void reset_running();
};

Var batch_norm(Tape& t, BatchNormParams& bn, Var x, Mode mode);

// Inverted dropout on a tape value; identity in Eval mode or when rate is 0.
Var dropout(Tape& t, Var x, double rate, Mode mode, Rng* rng);

// --- tape-side detector pieces ----------------------------------------------

// tanh(W * X): self-scoring for words (X = normalized Z) or sentences (X = H).
Var self_scores(Tape& t, Tensor& w, Var x);

// tanh(max(0, U^T Wu) Z): definition-informed word scores.
Var word_prior_scores(Tape& t, Tensor& wu, Var u, Var z);

// scale * sigmoid(W [parts] + b): the prior gate (scale = gamma) and the
// upward gate (scale = lambda) share this form.
Var gate(Tape& t, Tensor& w, Tensor& b, const std::vector<Var>& parts,
         double scale);

// gate .* a + (1 - gate) .* b
Var fuse_scores(Tape& t, Var g, Var a, Var b);

// One column per sentence: q = P * alpha.
Var sentence_instance_scores(Tape& t, Var p, Var alpha_col);

// y = Q * beta.
Var document_scores(Tape& t, Var q, Var beta_col);

// --- plain-matrix forms of the same operations (inference/tests) -------------

Mat word_self_scores(const Mat& wz, const Mat& z);
Mat word_prior_scores(const Mat& wu, const Mat& u, const Mat& z);
Mat prior_gate(const Mat& wgp, const Mat& bgp, const Mat& z, const Mat& p_self,
               const Mat& p_prior, double gamma);
Mat fuse_scores(const Mat& g, const Mat& a, const Mat& b);
std::vector<double> sentence_instance_scores(const Mat& p,
                                             const std::vector<double>& alpha);
Mat sentence_self_scores(const Mat& wh, const Mat& h);
Mat upward_gate(const Mat& wl, const Mat& bl, const Mat& h, const Mat& q_instc,
                const Mat& q_self, double lambda);
std::vector<double> document_scores(const Mat& q, const std::vector<double>& beta);

// --- prediction and ranking ---------------------------------------------------

// {c : score_c > threshold}; when empty, falls back to the argmax singleton
// (ties resolved toward the lowest label index).
std::vector<int> predict_domains(const std::vector<double>& scores,
                                 double threshold = 0.0);

// Inference-side score bundle for one document. Matrices that a variant does
// not produce stay empty.
struct SentenceScores {
  Mat P;                      // C x n final word scores
  Mat P_self, P_prior, Gamma; // word-detector internals
  std::vector<double> alpha;
};

struct ScoreSet {
  std::vector<SentenceScores> sentences;
  Mat Q_instc, Q_self, Lambda;
  Mat Q;                      // C x s final sentence scores
  std::vector<double> beta;
  std::vector<double> y;      // C document scores
};

// Word-type ranking per domain: score = max over occurrences of
// P[c, j] * alpha[j]. Ties break lexicographically.
struct ScoredSentenceTokens {
  std::vector<std::string> tokens;
  Mat P;
  std::vector<double> alpha;
};

struct RankedWord {
  std::string token;
  double score;
};

std::vector<std::vector<RankedWord>> rank_domain_words(
    const std::vector<ScoredSentenceTokens>& sentences, int num_domains,
    int top_k);

}  // namespace detnet

#include "detnet/tape.hpp"

#include <cmath>

#include "detnet/check.hpp"

namespace detnet {

namespace {
const kernels::Ops& K() { return kernels::active(); }
}  // namespace

int Tape::push(Mat val, bool needs_grad, std::function<void(Tape&, int)> back) {
  Node n;
  n.val = std::move(val);
  n.back = std::move(back);
  n.needs_grad = needs_grad;
  nodes_.push_back(std::move(n));
  return int(nodes_.size()) - 1;
}

Mat& Tape::grad_buf(int id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Mat(n.val.rows(), n.val.cols());
  return n.grad;
}

Var Tape::input(Mat value) { return {push(std::move(value), false, nullptr)}; }

Var Tape::param(Tensor& t) {
  Tensor* tp = &t;
  return {push(t.value, true, [tp](Tape& tape, int self) {
    const Mat& g = tape.nodes_[self].grad;
    K().axpy(int(g.size()), 1.0, g.data(), tp->grad.data());
  })};
}

Var Tape::embed(Tensor& table, std::vector<int> column_ids) {
  const int d = table.value.rows();
  const int n = int(column_ids.size());
  Mat out(d, n);
  for (int j = 0; j < n; ++j) {
    const int c = column_ids[j];
    for (int i = 0; i < d; ++i) out(i, j) = table.value(i, c);
  }
  Tensor* tp = &table;
  auto ids = std::move(column_ids);
  return {push(std::move(out), true, [tp, ids](Tape& tape, int self) {
    const Mat& g = tape.nodes_[self].grad;
    for (int j = 0; j < g.cols(); ++j) {
      const int c = ids[j];
      for (int i = 0; i < g.rows(); ++i) tp->grad(i, c) += g(i, j);
    }
  })};
}

Var Tape::matmul(Var a, Var b) {
  const Mat& av = value(a);
  const Mat& bv = value(b);
  DETNET_CHECK(av.cols() == bv.rows(), "matmul shape");
  Mat out(av.rows(), bv.cols());
  K().gemm_nn(av.rows(), bv.cols(), av.cols(), av.data(), bv.data(), out.data(), false);
  const bool ng = wants(a) || wants(b);
  return {push(std::move(out), ng, [a, b](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    const Mat& av = t.value(a);
    const Mat& bv = t.value(b);
    if (t.wants(a))  // dA += G * B^T
      K().gemm_nt(av.rows(), av.cols(), g.cols(), g.data(), bv.data(),
                  t.grad_buf(a.id).data(), true);
    if (t.wants(b))  // dB += A^T * G
      K().gemm_tn(bv.rows(), bv.cols(), av.rows(), av.data(), g.data(),
                  t.grad_buf(b.id).data(), true);
  })};
}

Var Tape::matmul_tn(Var a, Var b) {  // C = A^T B; A: k x m, B: k x n
  const Mat& av = value(a);
  const Mat& bv = value(b);
  DETNET_CHECK(av.rows() == bv.rows(), "matmul_tn shape");
  Mat out(av.cols(), bv.cols());
  K().gemm_tn(av.cols(), bv.cols(), av.rows(), av.data(), bv.data(), out.data(), false);
  const bool ng = wants(a) || wants(b);
  return {push(std::move(out), ng, [a, b](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;  // m x n
    const Mat& av = t.value(a);
    const Mat& bv = t.value(b);
    if (t.wants(a))  // dA += B * G^T  (k x n * n x m)
      K().gemm_nt(bv.rows(), av.cols(), bv.cols(), bv.data(), g.data(),
                  t.grad_buf(a.id).data(), true);
    if (t.wants(b))  // dB += A * G    (k x m * m x n)
      K().gemm_nn(av.rows(), g.cols(), av.cols(), av.data(), g.data(),
                  t.grad_buf(b.id).data(), true);
  })};
}

Var Tape::matmul_nt(Var a, Var b) {  // C = A B^T; A: m x k, B: n x k
  const Mat& av = value(a);
  const Mat& bv = value(b);
  DETNET_CHECK(av.cols() == bv.cols(), "matmul_nt shape");
  Mat out(av.rows(), bv.rows());
  K().gemm_nt(av.rows(), bv.rows(), av.cols(), av.data(), bv.data(), out.data(), false);
  const bool ng = wants(a) || wants(b);
  return {push(std::move(out), ng, [a, b](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;  // m x n
    const Mat& av = t.value(a);
    const Mat& bv = t.value(b);
    if (t.wants(a))  // dA += G * B    (m x n * n x k)
      K().gemm_nn(g.rows(), bv.cols(), g.cols(), g.data(), bv.data(),
                  t.grad_buf(a.id).data(), true);
    if (t.wants(b))  // dB += G^T * A  (n x m * m x k)
      K().gemm_tn(g.cols(), av.cols(), g.rows(), g.data(), av.data(),
                  t.grad_buf(b.id).data(), true);
  })};
}

Var Tape::add(Var a, Var b) {
  const Mat& av = value(a);
  const Mat& bv = value(b);
  DETNET_CHECK(av.same_shape(bv), "elementwise shape");
  Mat out(av.rows(), av.cols());
  K().add(int(av.size()), av.data(), bv.data(), out.data());
  const bool ng = wants(a) || wants(b);
  return {push(std::move(out), ng, [a, b](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    if (t.wants(a)) K().axpy(int(g.size()), 1.0, g.data(), t.grad_buf(a.id).data());
    if (t.wants(b)) K().axpy(int(g.size()), 1.0, g.data(), t.grad_buf(b.id).data());
  })};
}

Var Tape::sub(Var a, Var b) {
  const Mat& av = value(a);
  const Mat& bv = value(b);
  DETNET_CHECK(av.same_shape(bv), "elementwise shape");
  Mat out(av.rows(), av.cols());
  K().sub(int(av.size()), av.data(), bv.data(), out.data());
  const bool ng = wants(a) || wants(b);
  return {push(std::move(out), ng, [a, b](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    if (t.wants(a)) K().axpy(int(g.size()), 1.0, g.data(), t.grad_buf(a.id).data());
    if (t.wants(b)) K().axpy(int(g.size()), -1.0, g.data(), t.grad_buf(b.id).data());
  })};
}

Var Tape::mul(Var a, Var b) {
  const Mat& av = value(a);
  const Mat& bv = value(b);
  DETNET_CHECK(av.same_shape(bv), "elementwise shape");
  Mat out(av.rows(), av.cols());
  K().mul(int(av.size()), av.data(), bv.data(), out.data());
  const bool ng = wants(a) || wants(b);
  return {push(std::move(out), ng, [a, b](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    const int n = int(g.size());
    if (t.wants(a)) {
      double* da = t.grad_buf(a.id).data();
      const double* bp = t.value(b).data();
      const double* gp = g.data();
      for (int i = 0; i < n; ++i) da[i] += gp[i] * bp[i];
    }
    if (t.wants(b)) {
      double* db = t.grad_buf(b.id).data();
      const double* ap = t.value(a).data();
      const double* gp = g.data();
      for (int i = 0; i < n; ++i) db[i] += gp[i] * ap[i];
    }
  })};
}

Var Tape::scale(Var a, double c) {
  const Mat& av = value(a);
  Mat out(av.rows(), av.cols());
  K().scale(int(av.size()), c, av.data(), out.data());
  return {push(std::move(out), wants(a), [a, c](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    if (t.wants(a)) K().axpy(int(g.size()), c, g.data(), t.grad_buf(a.id).data());
  })};
}

Var Tape::add_scalar(Var a, double c) {
  const Mat& av = value(a);
  Mat out = av;
  for (size_t i = 0; i < out.size(); ++i) out.data()[i] += c;
  return {push(std::move(out), wants(a), [a](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    if (t.wants(a)) K().axpy(int(g.size()), 1.0, g.data(), t.grad_buf(a.id).data());
  })};
}

Var Tape::one_minus(Var a) {
  const Mat& av = value(a);
  Mat out(av.rows(), av.cols());
  for (size_t i = 0; i < out.size(); ++i) out.data()[i] = 1.0 - av.data()[i];
  return {push(std::move(out), wants(a), [a](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    if (t.wants(a)) K().axpy(int(g.size()), -1.0, g.data(), t.grad_buf(a.id).data());
  })};
}

Var Tape::tanh(Var a) {
  const Mat& av = value(a);
  Mat out(av.rows(), av.cols());
  for (size_t i = 0; i < out.size(); ++i) out.data()[i] = std::tanh(av.data()[i]);
  return {push(std::move(out), wants(a), [a](Tape& t, int self) {
    if (!t.wants(a)) return;
    const Mat& g = t.nodes_[self].grad;
    const Mat& y = t.nodes_[self].val;
    double* da = t.grad_buf(a.id).data();
    for (size_t i = 0; i < g.size(); ++i)
      da[i] += g.data()[i] * (1.0 - y.data()[i] * y.data()[i]);
  })};
}

Var Tape::sigmoid(Var a) {
  const Mat& av = value(a);
  Mat out(av.rows(), av.cols());
  for (size_t i = 0; i < out.size(); ++i) {
    const double x = av.data()[i];
    out.data()[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                             : std::exp(x) / (1.0 + std::exp(x));
  }
  return {push(std::move(out), wants(a), [a](Tape& t, int self) {
    if (!t.wants(a)) return;
    const Mat& g = t.nodes_[self].grad;
    const Mat& y = t.nodes_[self].val;
    double* da = t.grad_buf(a.id).data();
    for (size_t i = 0; i < g.size(); ++i)
      da[i] += g.data()[i] * y.data()[i] * (1.0 - y.data()[i]);
  })};
}

Var Tape::relu(Var a) {
  const Mat& av = value(a);
  Mat out(av.rows(), av.cols());
  for (size_t i = 0; i < out.size(); ++i)
    out.data()[i] = av.data()[i] > 0.0 ? av.data()[i] : 0.0;
  return {push(std::move(out), wants(a), [a](Tape& t, int self) {
    if (!t.wants(a)) return;
    const Mat& g = t.nodes_[self].grad;
    const Mat& x = t.value(a);
    double* da = t.grad_buf(a.id).data();
    for (size_t i = 0; i < g.size(); ++i)
      if (x.data()[i] > 0.0) da[i] += g.data()[i];
  })};
}

Var Tape::sqrt(Var a) {
  const Mat& av = value(a);
  Mat out(av.rows(), av.cols());
  for (size_t i = 0; i < out.size(); ++i) out.data()[i] = std::sqrt(av.data()[i]);
  return {push(std::move(out), wants(a), [a](Tape& t, int self) {
    if (!t.wants(a)) return;
    const Mat& g = t.nodes_[self].grad;
    const Mat& y = t.nodes_[self].val;
    double* da = t.grad_buf(a.id).data();
    for (size_t i = 0; i < g.size(); ++i)
      da[i] += g.data()[i] * 0.5 / y.data()[i];
  })};
}

Var Tape::softplus(Var a) {
  const Mat& av = value(a);
  Mat out(av.rows(), av.cols());
  for (size_t i = 0; i < out.size(); ++i) {
    const double x = av.data()[i];
    out.data()[i] = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  }
  return {push(std::move(out), wants(a), [a](Tape& t, int self) {
    if (!t.wants(a)) return;
    const Mat& g = t.nodes_[self].grad;
    const Mat& x = t.value(a);
    double* da = t.grad_buf(a.id).data();
    for (size_t i = 0; i < g.size(); ++i) {
      const double xv = x.data()[i];
      const double s = xv >= 0.0 ? 1.0 / (1.0 + std::exp(-xv))
                                 : std::exp(xv) / (1.0 + std::exp(xv));
      da[i] += g.data()[i] * s;
    }
  })};
}

// --- column-vector broadcasts -----------------------------------------------

Var Tape::add_col(Var a, Var b) {
  const Mat& av = value(a);
  const Mat& bv = value(b);
  DETNET_CHECK(bv.cols() == 1 && bv.rows() == av.rows(), "column broadcast shape");
  Mat out(av.rows(), av.cols());
  for (int i = 0; i < av.rows(); ++i)
    for (int j = 0; j < av.cols(); ++j) out(i, j) = av(i, j) + bv(i, 0);
  const bool ng = wants(a) || wants(b);
  return {push(std::move(out), ng, [a, b](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    if (t.wants(a)) K().axpy(int(g.size()), 1.0, g.data(), t.grad_buf(a.id).data());
    if (t.wants(b)) {
      Mat& db = t.grad_buf(b.id);
      for (int i = 0; i < g.rows(); ++i)
        db(i, 0) += K().sum(g.cols(), g.row_ptr(i));
    }
  })};
}

Var Tape::sub_col(Var a, Var b) {
  const Mat& av = value(a);
  const Mat& bv = value(b);
  DETNET_CHECK(bv.cols() == 1 && bv.rows() == av.rows(), "column broadcast shape");
  Mat out(av.rows(), av.cols());
  for (int i = 0; i < av.rows(); ++i)
    for (int j = 0; j < av.cols(); ++j) out(i, j) = av(i, j) - bv(i, 0);
  const bool ng = wants(a) || wants(b);
  return {push(std::move(out), ng, [a, b](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    if (t.wants(a)) K().axpy(int(g.size()), 1.0, g.data(), t.grad_buf(a.id).data());
    if (t.wants(b)) {
      Mat& db = t.grad_buf(b.id);
      for (int i = 0; i < g.rows(); ++i)
        db(i, 0) -= K().sum(g.cols(), g.row_ptr(i));
    }
  })};
}

Var Tape::mul_col(Var a, Var b) {
  const Mat& av = value(a);
  const Mat& bv = value(b);
  DETNET_CHECK(bv.cols() == 1 && bv.rows() == av.rows(), "column broadcast shape");
  Mat out(av.rows(), av.cols());
  for (int i = 0; i < av.rows(); ++i)
    for (int j = 0; j < av.cols(); ++j) out(i, j) = av(i, j) * bv(i, 0);
  const bool ng = wants(a) || wants(b);
  return {push(std::move(out), ng, [a, b](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    const Mat& av = t.value(a);
    const Mat& bv = t.value(b);
    if (t.wants(a)) {
      Mat& da = t.grad_buf(a.id);
      for (int i = 0; i < g.rows(); ++i)
        K().axpy(g.cols(), bv(i, 0), g.row_ptr(i), da.row_ptr(i));
    }
    if (t.wants(b)) {
      Mat& db = t.grad_buf(b.id);
      for (int i = 0; i < g.rows(); ++i)
        db(i, 0) += K().dot(g.cols(), g.row_ptr(i), av.row_ptr(i));
    }
  })};
}

Var Tape::div_col(Var a, Var b) {
  const Mat& av = value(a);
  const Mat& bv = value(b);
  DETNET_CHECK(bv.cols() == 1 && bv.rows() == av.rows(), "column broadcast shape");
  Mat out(av.rows(), av.cols());
  for (int i = 0; i < av.rows(); ++i)
    for (int j = 0; j < av.cols(); ++j) out(i, j) = av(i, j) / bv(i, 0);
  const bool ng = wants(a) || wants(b);
  return {push(std::move(out), ng, [a, b](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    const Mat& av = t.value(a);
    const Mat& bv = t.value(b);
    if (t.wants(a)) {
      Mat& da = t.grad_buf(a.id);
      for (int i = 0; i < g.rows(); ++i)
        K().axpy(g.cols(), 1.0 / bv(i, 0), g.row_ptr(i), da.row_ptr(i));
    }
    if (t.wants(b)) {
      Mat& db = t.grad_buf(b.id);
      for (int i = 0; i < g.rows(); ++i) {
        const double inv2 = 1.0 / (bv(i, 0) * bv(i, 0));
        db(i, 0) -= inv2 * K().dot(g.cols(), g.row_ptr(i), av.row_ptr(i));
      }
    }
  })};
}

// --- row-vector broadcasts ---------------------------------------------------

Var Tape::sub_row(Var a, Var b) {
  const Mat& av = value(a);
  const Mat& bv = value(b);
  DETNET_CHECK(bv.rows() == 1 && bv.cols() == av.cols(), "row broadcast shape");
  Mat out(av.rows(), av.cols());
  for (int i = 0; i < av.rows(); ++i)
    K().sub(av.cols(), av.row_ptr(i), bv.data(), out.row_ptr(i));
  const bool ng = wants(a) || wants(b);
  return {push(std::move(out), ng, [a, b](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    if (t.wants(a)) K().axpy(int(g.size()), 1.0, g.data(), t.grad_buf(a.id).data());
    if (t.wants(b)) {
      Mat& db = t.grad_buf(b.id);
      for (int i = 0; i < g.rows(); ++i)
        K().axpy(g.cols(), -1.0, g.row_ptr(i), db.data());
    }
  })};
}

Var Tape::div_row(Var a, Var b) {
  const Mat& av = value(a);
  const Mat& bv = value(b);
  DETNET_CHECK(bv.rows() == 1 && bv.cols() == av.cols(), "row broadcast shape");
  Mat out(av.rows(), av.cols());
  for (int i = 0; i < av.rows(); ++i)
    for (int j = 0; j < av.cols(); ++j) out(i, j) = av(i, j) / bv(0, j);
  const bool ng = wants(a) || wants(b);
  return {push(std::move(out), ng, [a, b](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    const Mat& av = t.value(a);
    const Mat& bv = t.value(b);
    if (t.wants(a)) {
      Mat& da = t.grad_buf(a.id);
      for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) da(i, j) += g(i, j) / bv(0, j);
    }
    if (t.wants(b)) {
      Mat& db = t.grad_buf(b.id);
      for (int j = 0; j < g.cols(); ++j) {
        double acc = 0.0;
        for (int i = 0; i < g.rows(); ++i) acc += g(i, j) * av(i, j);
        db(0, j) -= acc / (bv(0, j) * bv(0, j));
      }
    }
  })};
}

// --- reductions ---------------------------------------------------------------

Var Tape::row_mean(Var a) {
  const Mat& av = value(a);
  Mat out(av.rows(), 1);
  for (int i = 0; i < av.rows(); ++i)
    out(i, 0) = K().sum(av.cols(), av.row_ptr(i)) / av.cols();
  return {push(std::move(out), wants(a), [a](Tape& t, int self) {
    if (!t.wants(a)) return;
    const Mat& g = t.nodes_[self].grad;
    Mat& da = t.grad_buf(a.id);
    const double inv = 1.0 / da.cols();
    for (int i = 0; i < da.rows(); ++i) {
      const double gi = g(i, 0) * inv;
      for (int j = 0; j < da.cols(); ++j) da(i, j) += gi;
    }
  })};
}

Var Tape::col_mean(Var a) {
  const Mat& av = value(a);
  Mat out(1, av.cols());
  for (int i = 0; i < av.rows(); ++i)
    K().axpy(av.cols(), 1.0 / av.rows(), av.row_ptr(i), out.data());
  return {push(std::move(out), wants(a), [a](Tape& t, int self) {
    if (!t.wants(a)) return;
    const Mat& g = t.nodes_[self].grad;
    Mat& da = t.grad_buf(a.id);
    for (int i = 0; i < da.rows(); ++i)
      K().axpy(da.cols(), 1.0 / da.rows(), g.data(), da.row_ptr(i));
  })};
}

Var Tape::col_sum(Var a) {
  const Mat& av = value(a);
  Mat out(1, av.cols());
  for (int i = 0; i < av.rows(); ++i)
    K().axpy(av.cols(), 1.0, av.row_ptr(i), out.data());
  return {push(std::move(out), wants(a), [a](Tape& t, int self) {
    if (!t.wants(a)) return;
    const Mat& g = t.nodes_[self].grad;
    Mat& da = t.grad_buf(a.id);
    for (int i = 0; i < da.rows(); ++i)
      K().axpy(da.cols(), 1.0, g.data(), da.row_ptr(i));
  })};
}

Var Tape::sum_all(Var a) {
  const Mat& av = value(a);
  Mat out(1, 1);
  out(0, 0) = K().sum(int(av.size()), av.data());
  return {push(std::move(out), wants(a), [a](Tape& t, int self) {
    if (!t.wants(a)) return;
    const double g = t.nodes_[self].grad(0, 0);
    Mat& da = t.grad_buf(a.id);
    for (size_t i = 0; i < da.size(); ++i) da.data()[i] += g;
  })};
}

// --- shape ---------------------------------------------------------------------

Var Tape::transpose(Var a) {
  Mat out = value(a).transposed();
  return {push(std::move(out), wants(a), [a](Tape& t, int self) {
    if (!t.wants(a)) return;
    const Mat gt = t.nodes_[self].grad.transposed();
    K().axpy(int(gt.size()), 1.0, gt.data(), t.grad_buf(a.id).data());
  })};
}

Var Tape::vconcat(const std::vector<Var>& parts) {
  DETNET_CHECK(!parts.empty(), "concat of nothing");
  const int cols = value(parts[0]).cols();
  int rows = 0;
  bool ng = false;
  for (Var p : parts) {
    DETNET_CHECK(value(p).cols() == cols, "vconcat width");
    rows += value(p).rows();
    ng = ng || wants(p);
  }
  Mat out(rows, cols);
  int r = 0;
  for (Var p : parts) {
    const Mat& pv = value(p);
    for (int i = 0; i < pv.rows(); ++i)
      for (int j = 0; j < cols; ++j) out(r + i, j) = pv(i, j);
    r += pv.rows();
  }
  auto ps = parts;
  return {push(std::move(out), ng, [ps](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    int r = 0;
    for (Var p : ps) {
      const int pr = t.value(p).rows();
      if (t.wants(p)) {
        Mat& dp = t.grad_buf(p.id);
        for (int i = 0; i < pr; ++i)
          K().axpy(g.cols(), 1.0, g.row_ptr(r + i), dp.row_ptr(i));
      }
      r += pr;
    }
  })};
}

Var Tape::hconcat(const std::vector<Var>& parts) {
  DETNET_CHECK(!parts.empty(), "concat of nothing");
  const int rows = value(parts[0]).rows();
  int cols = 0;
  bool ng = false;
  for (Var p : parts) {
    DETNET_CHECK(value(p).rows() == rows, "hconcat height");
    cols += value(p).cols();
    ng = ng || wants(p);
  }
  Mat out(rows, cols);
  int c = 0;
  for (Var p : parts) {
    const Mat& pv = value(p);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < pv.cols(); ++j) out(i, c + j) = pv(i, j);
    c += pv.cols();
  }
  auto ps = parts;
  return {push(std::move(out), ng, [ps](Tape& t, int self) {
    const Mat& g = t.nodes_[self].grad;
    int c = 0;
    for (Var p : ps) {
      const int pc = t.value(p).cols();
      if (t.wants(p)) {
        Mat& dp = t.grad_buf(p.id);
        for (int i = 0; i < g.rows(); ++i)
          for (int j = 0; j < pc; ++j) dp(i, j) += g(i, c + j);
      }
      c += pc;
    }
  })};
}

Var Tape::slice_rows(Var a, int row0, int count) {
  const Mat& av = value(a);
  DETNET_CHECK(row0 >= 0 && row0 + count <= av.rows(), "slice_rows range");
  Mat out(count, av.cols());
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < av.cols(); ++j) out(i, j) = av(row0 + i, j);
  return {push(std::move(out), wants(a), [a, row0, count](Tape& t, int self) {
    if (!t.wants(a)) return;
    const Mat& g = t.nodes_[self].grad;
    Mat& da = t.grad_buf(a.id);
    for (int i = 0; i < count; ++i)
      K().axpy(g.cols(), 1.0, g.row_ptr(i), da.row_ptr(row0 + i));
  })};
}

Var Tape::slice_cols(Var a, int col0, int count) {
  const Mat& av = value(a);
  DETNET_CHECK(col0 >= 0 && col0 + count <= av.cols(), "slice_cols range");
  Mat out(av.rows(), count);
  for (int i = 0; i < av.rows(); ++i)
    for (int j = 0; j < count; ++j) out(i, j) = av(i, col0 + j);
  return {push(std::move(out), wants(a), [a, col0, count](Tape& t, int self) {
    if (!t.wants(a)) return;
    const Mat& g = t.nodes_[self].grad;
    Mat& da = t.grad_buf(a.id);
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < count; ++j) da(i, col0 + j) += g(i, j);
  })};
}

Var Tape::softmax_rows(Var a) {
  const Mat& av = value(a);
  Mat out(av.rows(), av.cols());
  for (int i = 0; i < av.rows(); ++i) {
    const double* x = av.row_ptr(i);
    double* y = out.row_ptr(i);
    double mx = x[0];
    for (int j = 1; j < av.cols(); ++j) mx = std::max(mx, x[j]);
    double z = 0.0;
    for (int j = 0; j < av.cols(); ++j) {
      y[j] = std::exp(x[j] - mx);
      z += y[j];
    }
    const double inv = 1.0 / z;
    for (int j = 0; j < av.cols(); ++j) y[j] *= inv;
  }
  return {push(std::move(out), wants(a), [a](Tape& t, int self) {
    if (!t.wants(a)) return;
    const Mat& g = t.nodes_[self].grad;
    const Mat& y = t.nodes_[self].val;
    Mat& da = t.grad_buf(a.id);
    for (int i = 0; i < g.rows(); ++i) {
      const double inner = K().dot(g.cols(), g.row_ptr(i), y.row_ptr(i));
      for (int j = 0; j < g.cols(); ++j)
        da(i, j) += y(i, j) * (g(i, j) - inner);
    }
  })};
}

void Tape::backward(Var loss) {
  DETNET_CHECK(value(loss).rows() == 1 && value(loss).cols() == 1, "backward needs a scalar loss");
  grad_buf(loss.id)(0, 0) = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.back && n.needs_grad && !n.grad.empty()) n.back(*this, i);
  }
}

}  // namespace detnet

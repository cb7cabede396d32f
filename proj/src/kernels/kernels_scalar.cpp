#include "detnet/kernels.hpp"

#include <cmath>
#include <cstring>

namespace detnet::kernels {
namespace {

void gemm_nn(int m, int n, int k, const double* a, const double* b, double* c,
             bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(double) * size_t(m) * n);
  for (int i = 0; i < m; ++i) {
    const double* arow = a + size_t(i) * k;
    double* crow = c + size_t(i) * n;
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      const double* brow = b + size_t(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_tn(int m, int n, int k, const double* a, const double* b, double* c,
             bool accumulate) {
  // a is k x m, c[i,j] = sum_p a[p,i] * b[p,j]
  if (!accumulate) std::memset(c, 0, sizeof(double) * size_t(m) * n);
  for (int p = 0; p < k; ++p) {
    const double* arow = a + size_t(p) * m;
    const double* brow = b + size_t(p) * n;
    for (int i = 0; i < m; ++i) {
      const double av = arow[i];
      double* crow = c + size_t(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_nt(int m, int n, int k, const double* a, const double* b, double* c,
             bool accumulate) {
  // b is n x k, c[i,j] = dot(a row i, b row j)
  for (int i = 0; i < m; ++i) {
    const double* arow = a + size_t(i) * k;
    double* crow = c + size_t(i) * n;
    for (int j = 0; j < n; ++j) {
      const double* brow = b + size_t(j) * k;
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] = accumulate ? crow[j] + acc : acc;
    }
  }
}

double dot(int n, const double* x, const double* y) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(int n, double alpha, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(int n, double alpha, const double* x, double* out) {
  for (int i = 0; i < n; ++i) out[i] = alpha * x[i];
}

void add(int n, const double* x, const double* y, double* out) {
  for (int i = 0; i < n; ++i) out[i] = x[i] + y[i];
}

void sub(int n, const double* x, const double* y, double* out) {
  for (int i = 0; i < n; ++i) out[i] = x[i] - y[i];
}

void mul(int n, const double* x, const double* y, double* out) {
  for (int i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

double sum(int n, const double* x) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void adam(int n, double* w, const double* g, double* m, double* v, double lr,
          double beta1, double beta2, double eps, double bias1, double bias2) {
  for (int i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    const double mhat = m[i] / bias1;
    const double vhat = v[i] / bias2;
    w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {"scalar", gemm_nn, gemm_tn, gemm_nt, dot,  axpy,
                          scale,    add,     sub,     mul,     sum, adam};
  return ops;
}

}  // namespace detnet::kernels

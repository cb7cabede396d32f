// NEON kernel variant for aarch64 (two doubles per vector).

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstring>

#include "detnet/kernels.hpp"

namespace detnet::kernels {
namespace {

void gemm_nn(int m, int n, int k, const double* a, const double* b, double* c,
             bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(double) * size_t(m) * n);
  for (int i = 0; i < m; ++i) {
    const double* arow = a + size_t(i) * k;
    double* crow = c + size_t(i) * n;
    for (int p = 0; p < k; ++p) {
      const double as = arow[p];
      const float64x2_t av = vdupq_n_f64(as);
      const double* brow = b + size_t(p) * n;
      int j = 0;
      for (; j + 2 <= n; j += 2) {
        float64x2_t cv = vld1q_f64(crow + j);
        cv = vfmaq_f64(cv, av, vld1q_f64(brow + j));
        vst1q_f64(crow + j, cv);
      }
      for (; j < n; ++j) crow[j] += as * brow[j];
    }
  }
}

void gemm_tn(int m, int n, int k, const double* a, const double* b, double* c,
             bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(double) * size_t(m) * n);
  for (int p = 0; p < k; ++p) {
    const double* arow = a + size_t(p) * m;
    const double* brow = b + size_t(p) * n;
    for (int i = 0; i < m; ++i) {
      const double as = arow[i];
      const float64x2_t av = vdupq_n_f64(as);
      double* crow = c + size_t(i) * n;
      int j = 0;
      for (; j + 2 <= n; j += 2) {
        float64x2_t cv = vld1q_f64(crow + j);
        cv = vfmaq_f64(cv, av, vld1q_f64(brow + j));
        vst1q_f64(crow + j, cv);
      }
      for (; j < n; ++j) crow[j] += as * brow[j];
    }
  }
}

void gemm_nt(int m, int n, int k, const double* a, const double* b, double* c,
             bool accumulate) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + size_t(i) * k;
    double* crow = c + size_t(i) * n;
    for (int j = 0; j < n; ++j) {
      const double* brow = b + size_t(j) * k;
      float64x2_t acc = vdupq_n_f64(0.0);
      int p = 0;
      for (; p + 2 <= k; p += 2)
        acc = vfmaq_f64(acc, vld1q_f64(arow + p), vld1q_f64(brow + p));
      double s = vaddvq_f64(acc);
      for (; p < k; ++p) s += arow[p] * brow[p];
      crow[j] = accumulate ? crow[j] + s : s;
    }
  }
}

double dot(int n, const double* x, const double* y) {
  float64x2_t acc = vdupq_n_f64(0.0);
  int i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(int n, double alpha, const double* x, double* y) {
  const float64x2_t av = vdupq_n_f64(alpha);
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t yv = vld1q_f64(y + i);
    yv = vfmaq_f64(yv, av, vld1q_f64(x + i));
    vst1q_f64(y + i, yv);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(int n, double alpha, const double* x, double* out) {
  const float64x2_t av = vdupq_n_f64(alpha);
  int i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vmulq_f64(av, vld1q_f64(x + i)));
  for (; i < n; ++i) out[i] = alpha * x[i];
}

void add(int n, const double* x, const double* y, double* out) {
  int i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) out[i] = x[i] + y[i];
}

void sub(int n, const double* x, const double* y, double* out) {
  int i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) out[i] = x[i] - y[i];
}

void mul(int n, const double* x, const double* y, double* out) {
  int i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

double sum(int n, const double* x) {
  float64x2_t acc = vdupq_n_f64(0.0);
  int i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

void adam(int n, double* w, const double* g, double* m, double* v, double lr,
          double beta1, double beta2, double eps, double bias1, double bias2) {
  const float64x2_t b1 = vdupq_n_f64(beta1);
  const float64x2_t b1c = vdupq_n_f64(1.0 - beta1);
  const float64x2_t b2 = vdupq_n_f64(beta2);
  const float64x2_t b2c = vdupq_n_f64(1.0 - beta2);
  const float64x2_t lrv = vdupq_n_f64(lr);
  const float64x2_t epsv = vdupq_n_f64(eps);
  const float64x2_t bc1 = vdupq_n_f64(bias1);
  const float64x2_t bc2 = vdupq_n_f64(bias2);
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t gv = vld1q_f64(g + i);
    float64x2_t mv = vld1q_f64(m + i);
    float64x2_t vv = vld1q_f64(v + i);
    mv = vfmaq_f64(vmulq_f64(b1, mv), b1c, gv);
    vv = vfmaq_f64(vmulq_f64(b2, vv), b2c, vmulq_f64(gv, gv));
    vst1q_f64(m + i, mv);
    vst1q_f64(v + i, vv);
    const float64x2_t mhat = vdivq_f64(mv, bc1);
    const float64x2_t vhat = vdivq_f64(vv, bc2);
    const float64x2_t denom = vaddq_f64(vsqrtq_f64(vhat), epsv);
    float64x2_t wv = vld1q_f64(w + i);
    wv = vsubq_f64(wv, vdivq_f64(vmulq_f64(lrv, mhat), denom));
    vst1q_f64(w + i, wv);
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    w[i] -= lr * (m[i] / bias1) / (std::sqrt(v[i] / bias2) + eps);
  }
}

}  // namespace

const Ops* neon_ops() {
  static const Ops ops = {"neon", gemm_nn, gemm_tn, gemm_nt, dot,  axpy,
                          scale,  add,     sub,     mul,     sum, adam};
  return &ops;
}

}  // namespace detnet::kernels

#endif  // aarch64

#pragma once

#include <string>
#include <vector>

// Dense double-precision kernels behind all matrix math. A scalar reference
// implementation always exists; vectorized variants (AVX2 on x86-64, NEON on
// aarch64) are selected at runtime when the CPU supports them. Non-GEMM
// kernels are elementwise and bit-identical across variants; GEMM variants
// may differ from the reference only by summation order.
namespace detnet::kernels {

// C (m x n) = A (m x k) * B (k x n), row-major. accumulate=false zeroes C first.
using GemmFn = void (*)(int m, int n, int k, const double* a, const double* b,
                        double* c, bool accumulate);
using DotFn = double (*)(int n, const double* x, const double* y);
using AxpyFn = void (*)(int n, double alpha, const double* x, double* y);
using MapFn = void (*)(int n, const double* x, const double* y, double* out);
using ScaleFn = void (*)(int n, double alpha, const double* x, double* out);
using SumFn = double (*)(int n, const double* x);
using AdamFn = void (*)(int n, double* w, const double* g, double* m, double* v,
                        double lr, double beta1, double beta2, double eps,
                        double bias1, double bias2);

struct Ops {
  const char* name;
  GemmFn gemm_nn;  // C = A * B
  GemmFn gemm_tn;  // C = A^T * B   (A is k x m)
  GemmFn gemm_nt;  // C = A * B^T   (B is n x k)
  DotFn dot;
  AxpyFn axpy;     // y += alpha * x
  ScaleFn scale;   // out = alpha * x
  MapFn add;       // out = x + y
  MapFn sub;       // out = x - y
  MapFn mul;       // out = x .* y
  SumFn sum;
  AdamFn adam;     // fused Adam step; bias1/bias2 are 1-beta^t corrections
};

const Ops& scalar_ops();

// Kernel set in use. Chosen once: the best variant the CPU supports, unless
// the DETNET_SIMD environment variable ("scalar", "avx2", "neon", "auto")
// overrides it.
const Ops& active();

// All variants runnable on this machine, reference first.
std::vector<const Ops*> available();

// Force a specific variant (tests). Throws if the name is not available.
void force_backend(const std::string& name);

}  // namespace detnet::kernels

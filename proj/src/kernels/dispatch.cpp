#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "detnet/kernels.hpp"

namespace detnet::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Ops* avx2_ops();  // defined in kernels_avx2.cpp
#endif
#if defined(__aarch64__)
const Ops* neon_ops();  // defined in kernels_neon.cpp
#endif

namespace {

const Ops* best_simd() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return avx2_ops();
#endif
#if defined(__aarch64__)
  return neon_ops();  // NEON is mandatory on aarch64
#endif
  return nullptr;
}

const Ops* find_backend(const std::string& name) {
  if (name == "scalar") return &scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
  if (name == "avx2" && __builtin_cpu_supports("avx2") &&
      __builtin_cpu_supports("fma"))
    return avx2_ops();
#endif
#if defined(__aarch64__)
  if (name == "neon") return neon_ops();
#endif
  return nullptr;
}

const Ops* resolve_initial() {
  if (const char* env = std::getenv("DETNET_SIMD")) {
    const std::string want(env);
    if (!want.empty() && want != "auto") {
      if (const Ops* ops = find_backend(want)) return ops;
      // Unusable request: fall through to auto rather than crash at startup.
    }
  }
  if (const Ops* simd = best_simd()) return simd;
  return &scalar_ops();
}

const Ops*& active_slot() {
  static const Ops* slot = resolve_initial();
  return slot;
}

}  // namespace

const Ops& active() { return *active_slot(); }

std::vector<const Ops*> available() {
  std::vector<const Ops*> out{&scalar_ops()};
  if (const Ops* simd = best_simd()) out.push_back(simd);
  return out;
}

void force_backend(const std::string& name) {
  const Ops* ops = find_backend(name);
  if (!ops) throw std::runtime_error("kernel backend not available: " + name);
  active_slot() = ops;
}

}  // namespace detnet::kernels

#include "verve/kernels/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace verve::kernels {

namespace {

const KernelTable kScalar{
    "scalar",        scalar::dot,     scalar::axpy,    scalar::scale,
    scalar::max,     scalar::gemm_nn, scalar::gemm_nt, scalar::gemm_tn,
};

#if defined(VERVE_HAVE_AVX2)
const KernelTable kAvx2{
    "avx2",        avx2::dot,     avx2::axpy,    avx2::scale,
    avx2::max,     avx2::gemm_nn, avx2::gemm_nt, avx2::gemm_tn,
};
#endif

bool cpu_has_avx2() {
#if defined(VERVE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("VERVE_SIMD")) {
    try {
      const Backend b = parse_backend(env);
      if (backend_available(b)) return b;
    } catch (const std::invalid_argument&) {
      // unknown value: fall through to CPUID detection
    }
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{
      initial_backend() == Backend::Avx2 ? avx2_table() : &kScalar};
  return table;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(VERVE_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

bool backend_available(Backend b) { return b == Backend::Scalar || avx2_table() != nullptr; }

void set_backend(Backend b) {
  if (!backend_available(b)) throw std::invalid_argument("kernel backend unavailable on this CPU");
  current().store(b == Backend::Avx2 ? avx2_table() : &kScalar);
}

Backend active_backend() {
  return current().load() == &kScalar ? Backend::Scalar : Backend::Avx2;
}

const KernelTable& active() { return *current().load(); }

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  throw std::invalid_argument("unknown kernel backend: " + std::string(name));
}

void softmax(std::span<float> x) {
  if (x.empty()) return;
  const float m = max(x);
  if (!std::isfinite(m)) {
    // Every entry masked: define the result as uniform over the row.
    for (float& v : x) v = 1.0f / static_cast<float>(x.size());
    return;
  }
  float sum = 0.0f;
  for (float& v : x) {
    v = std::exp(v - m);
    sum += v;
  }
  active().scale(1.0f / sum, x.data(), x.size());
}

}  // namespace verve::kernels

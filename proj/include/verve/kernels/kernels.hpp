#pragma once

// Dense float kernels used by the neural models.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The active table is chosen once at startup from CPUID and
// can be forced with VERVE_SIMD=scalar|avx2 or set_backend(). Results differ
// between backends only by floating-point reassociation.

#include <cstddef>
#include <span>
#include <string_view>

namespace verve::kernels {

enum class Backend { Scalar, Avx2 };

// Row-major matrices throughout. `accumulate` adds into C instead of
// overwriting it.
struct KernelTable {
  const char* name;
  float (*dot)(const float* a, const float* b, std::size_t n);
  void (*axpy)(float alpha, const float* x, float* y, std::size_t n);
  void (*scale)(float alpha, float* x, std::size_t n);
  float (*max)(const float* x, std::size_t n);
  // C[M,N] = A[M,K] * B[K,N]
  void (*gemm_nn)(std::size_t M, std::size_t N, std::size_t K, const float* A,
                  const float* B, float* C, bool accumulate);
  // C[M,N] = A[M,K] * B[N,K]^T
  void (*gemm_nt)(std::size_t M, std::size_t N, std::size_t K, const float* A,
                  const float* B, float* C, bool accumulate);
  // C[M,N] = A[K,M]^T * B[K,N]
  void (*gemm_tn)(std::size_t M, std::size_t N, std::size_t K, const float* A,
                  const float* B, float* C, bool accumulate);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

bool backend_available(Backend b);
// Throws std::invalid_argument when the backend is unavailable.
void set_backend(Backend b);
Backend active_backend();
const KernelTable& active();

Backend parse_backend(std::string_view name);

// Span conveniences over the active table.
inline float dot(std::span<const float> a, std::span<const float> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(float alpha, std::span<const float> x, std::span<float> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline float max(std::span<const float> x) { return active().max(x.data(), x.size()); }

// Numerically stable in-place softmax; shared by both backends.
void softmax(std::span<float> x);

}  // namespace verve::kernels

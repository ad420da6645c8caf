// Compiled with -mavx2 -mfma; only reached through the dispatch table after
// a CPUID check.
#include "kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cstring>
#include <limits>

namespace verve::kernels::avx2 {

namespace {

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 shuf = _mm_movehdup_ps(lo);
  __m128 sums = _mm_add_ps(lo, shuf);
  shuf = _mm_movehl_ps(shuf, sums);
  sums = _mm_add_ss(sums, shuf);
  return _mm_cvtss_f32(sums);
}

inline float hmax(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_max_ps(lo, hi);
  lo = _mm_max_ps(lo, _mm_movehl_ps(lo, lo));
  lo = _mm_max_ss(lo, _mm_shuffle_ps(lo, lo, 1));
  return _mm_cvtss_f32(lo);
}

}  // namespace

float dot(const float* a, const float* b, std::size_t n) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
  }
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
  }
  float s = hsum(_mm256_add_ps(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(float alpha, float* x, std::size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(x + i, _mm256_mul_ps(va, _mm256_loadu_ps(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

float max(const float* x, std::size_t n) {
  float m = -std::numeric_limits<float>::infinity();
  std::size_t i = 0;
  if (n >= 8) {
    __m256 vm = _mm256_loadu_ps(x);
    for (i = 8; i + 8 <= n; i += 8) vm = _mm256_max_ps(vm, _mm256_loadu_ps(x + i));
    m = hmax(vm);
  }
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void gemm_nn(std::size_t M, std::size_t N, std::size_t K, const float* A, const float* B,
             float* C, bool accumulate) {
  if (!accumulate) std::memset(C, 0, M * N * sizeof(float));
  // Four rows of A at a time share each loaded row of B.
  std::size_t i = 0;
  for (; i + 4 <= M; i += 4) {
    float* c0 = C + (i + 0) * N;
    float* c1 = C + (i + 1) * N;
    float* c2 = C + (i + 2) * N;
    float* c3 = C + (i + 3) * N;
    for (std::size_t k = 0; k < K; ++k) {
      const __m256 a0 = _mm256_set1_ps(A[(i + 0) * K + k]);
      const __m256 a1 = _mm256_set1_ps(A[(i + 1) * K + k]);
      const __m256 a2 = _mm256_set1_ps(A[(i + 2) * K + k]);
      const __m256 a3 = _mm256_set1_ps(A[(i + 3) * K + k]);
      const float* b = B + k * N;
      std::size_t j = 0;
      for (; j + 8 <= N; j += 8) {
        const __m256 vb = _mm256_loadu_ps(b + j);
        _mm256_storeu_ps(c0 + j, _mm256_fmadd_ps(a0, vb, _mm256_loadu_ps(c0 + j)));
        _mm256_storeu_ps(c1 + j, _mm256_fmadd_ps(a1, vb, _mm256_loadu_ps(c1 + j)));
        _mm256_storeu_ps(c2 + j, _mm256_fmadd_ps(a2, vb, _mm256_loadu_ps(c2 + j)));
        _mm256_storeu_ps(c3 + j, _mm256_fmadd_ps(a3, vb, _mm256_loadu_ps(c3 + j)));
      }
      for (; j < N; ++j) {
        c0[j] += A[(i + 0) * K + k] * b[j];
        c1[j] += A[(i + 1) * K + k] * b[j];
        c2[j] += A[(i + 2) * K + k] * b[j];
        c3[j] += A[(i + 3) * K + k] * b[j];
      }
    }
  }
  for (; i < M; ++i) {
    float* c = C + i * N;
    for (std::size_t k = 0; k < K; ++k) axpy(A[i * K + k], B + k * N, c, N);
  }
}

void gemm_nt(std::size_t M, std::size_t N, std::size_t K, const float* A, const float* B,
             float* C, bool accumulate) {
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      const float v = dot(A + i * K, B + j * K, K);
      C[i * N + j] = accumulate ? C[i * N + j] + v : v;
    }
  }
}

void gemm_tn(std::size_t M, std::size_t N, std::size_t K, const float* A, const float* B,
             float* C, bool accumulate) {
  if (!accumulate) std::memset(C, 0, M * N * sizeof(float));
  for (std::size_t k = 0; k < K; ++k) {
    const float* a = A + k * M;
    const float* b = B + k * N;
    for (std::size_t i = 0; i < M; ++i) {
      if (a[i] == 0.0f) continue;
      axpy(a[i], b, C + i * N, N);
    }
  }
}

}  // namespace verve::kernels::avx2

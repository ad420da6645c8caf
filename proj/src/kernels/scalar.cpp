#include "kernels_impl.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

namespace verve::kernels::scalar {

float dot(const float* a, const float* b, std::size_t n) {
  float s = 0.0f;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(float alpha, float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

float max(const float* x, std::size_t n) {
  float m = -std::numeric_limits<float>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void gemm_nn(std::size_t M, std::size_t N, std::size_t K, const float* A, const float* B,
             float* C, bool accumulate) {
  if (!accumulate) std::memset(C, 0, M * N * sizeof(float));
  for (std::size_t i = 0; i < M; ++i) {
    float* c = C + i * N;
    for (std::size_t k = 0; k < K; ++k) {
      const float a = A[i * K + k];
      if (a == 0.0f) continue;
      const float* b = B + k * N;
      for (std::size_t j = 0; j < N; ++j) c[j] += a * b[j];
    }
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

}  // namespace verve::kernels::scalar

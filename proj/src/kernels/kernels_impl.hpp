#pragma once

#include <cstddef>

namespace verve::kernels {

namespace scalar {
float dot(const float* a, const float* b, std::size_t n);
void axpy(float alpha, const float* x, float* y, std::size_t n);
void scale(float alpha, float* x, std::size_t n);
float max(const float* x, std::size_t n);
void gemm_nn(std::size_t M, std::size_t N, std::size_t K, const float* A, const float* B,
             float* C, bool accumulate);
void gemm_nt(std::size_t M, std::size_t N, std::size_t K, const float* A, const float* B,
             float* C, bool accumulate);
void gemm_tn(std::size_t M, std::size_t N, std::size_t K, const float* A, const float* B,
             float* C, bool accumulate);
}  // namespace scalar

#if defined(VERVE_HAVE_AVX2)
namespace avx2 {
float dot(const float* a, const float* b, std::size_t n);
void axpy(float alpha, const float* x, float* y, std::size_t n);
void scale(float alpha, float* x, std::size_t n);
float max(const float* x, std::size_t n);
void gemm_nn(std::size_t M, std::size_t N, std::size_t K, const float* A, const float* B,
             float* C, bool accumulate);
void gemm_nt(std::size_t M, std::size_t N, std::size_t K, const float* A, const float* B,
             float* C, bool accumulate);
void gemm_tn(std::size_t M, std::size_t N, std::size_t K, const float* A, const float* B,
             float* C, bool accumulate);
}  // namespace avx2
#endif

}  // namespace verve::kernels

#pragma once
// Plain declarations only: this header is included by translation units built
// with different target flags, so it must not pull in inline library code.
#include <cstddef>

namespace czx::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void matvec_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void max_scalar(double* y, const double* x, std::size_t n);

double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void matvec_avx2(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void max_avx2(double* y, const double* x, std::size_t n);

double dot_neon(const double* a, const double* b, std::size_t n);
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
void matvec_neon(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void max_neon(double* y, const double* x, std::size_t n);

}  // namespace czx::simd::detail

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace czx::simd {

enum class Isa { scalar, avx2, neon };

// Function table for one instruction set. Every entry has a scalar reference
// with identical semantics; vector versions may differ only by reassociation.
struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = A x with A row-major rows x cols
  void (*matvec)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  // y = max(y, x) elementwise
  void (*max_inplace)(double* y, const double* x, std::size_t n);
};

const KernelTable& scalar_table();
// Tables compiled into this binary and supported by the running CPU.
std::vector<const KernelTable*> available_tables();
// Table picked at first use: best supported ISA unless CZX_SIMD=scalar.
const KernelTable& active();
// Overrides the runtime choice (tests and benchmarking).
void force(Isa isa);
std::string isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}
inline void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  active().matvec(a, rows, cols, x, y);
}
inline void max_inplace(std::span<double> y, std::span<const double> x) {
  active().max_inplace(y.data(), x.data(), x.size() < y.size() ? x.size() : y.size());
}

}  // namespace czx::simd

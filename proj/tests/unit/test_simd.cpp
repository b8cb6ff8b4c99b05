#include "common.hpp"
#include "czx/simd.hpp"

using namespace czx;

TEST_CASE("every available instruction set agrees with the scalar reference") {
  const auto tables = simd::available_tables();
  REQUIRE(!tables.empty());
  CHECK(tables.front()->isa == simd::Isa::scalar);
  const simd::KernelTable& ref = simd::scalar_table();
  Rng rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u, 1000u}) {
    std::vector<double> a(n), b(n), y0(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
      y0[i] = rng.normal();
    }
    for (const simd::KernelTable* t : tables) {
      INFO(simd::isa_name(t->isa), " n=", n);
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]);
      CHECK(std::abs(t->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= 1e-14 * std::max(1.0, scale));

      std::vector<double> y1 = y0, y2 = y0;
      t->axpy(0.75, a.data(), y1.data(), n);
      ref.axpy(0.75, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

      y1 = y0;
      y2 = y0;
      t->max_inplace(y1.data(), a.data(), n);
      ref.max_inplace(y2.data(), a.data(), n);
      CHECK(y1 == y2);
    }
  }
  for (std::size_t rows : {1u, 5u, 17u})
    for (std::size_t cols : {1u, 4u, 9u, 64u}) {
      std::vector<double> A(rows * cols), x(cols), y1(rows), y2(rows);
      for (double& v : A) v = rng.normal();
      for (double& v : x) v = rng.normal();
      ref.matvec(A.data(), rows, cols, x.data(), y2.data());
      for (const simd::KernelTable* t : tables) {
        t->matvec(A.data(), rows, cols, x.data(), y1.data());
        for (std::size_t r = 0; r < rows; ++r) CHECK(y1[r] == doctest::Approx(y2[r]).epsilon(1e-13));
      }
    }
}

TEST_CASE("forcing the scalar path") {
  simd::force(simd::Isa::scalar);
  CHECK(simd::active().isa == simd::Isa::scalar);
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(simd::dot(a, b) == 32.0);
}

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "czx/form.hpp"
#include "czx/haar.hpp"
#include "czx/signal.hpp"

namespace czx {

enum class ShiftFlavor {
  balanced,   // <f, H_{I,J}> h_J with H_{I,J} = h_I^0 - h_J^0
  symmetric,  // <f, h_I> h_J, both cancellative
};

// Coefficient a_{IJK} as a multiple of |I|/|K|. Arguments: scale of I and J,
// flat indices of I and J. Values must lie in [-1, 1].
using ShiftCoefficientFn = std::function<double(int scale, std::int64_t I, std::int64_t J)>;

struct ShiftCoefficients {
  enum class Kind { random_sign, constant, zero, custom } kind = Kind::random_sign;
  std::uint64_t seed = 0;
  double value = 1.0;  // for constant
  ShiftCoefficientFn custom;

  static ShiftCoefficients random_sign(std::uint64_t seed) { return {Kind::random_sign, seed, 1.0, {}}; }
  static ShiftCoefficients constant(double v) { return {Kind::constant, 0, v, {}}; }
  static ShiftCoefficients zero() { return {Kind::zero, 0, 0.0, {}}; }
  static ShiftCoefficients from(ShiftCoefficientFn fn) { return {Kind::custom, 0, 1.0, std::move(fn)}; }

  double operator()(int scale, std::int64_t I, std::int64_t J) const;
};

// Dyadic shift Q_{k,sigma}: sum over K in D_{2^{k1-k2}}(sigma) and squares I, J
// with I^(k) = J^(k) = K of a_{IJK} <f, H_{I,J}> h_J (or <f, h_I> h_J).
class ShiftOperator final : public LinearOperator {
 public:
  struct Block {
    std::vector<std::int64_t> members;  // flat indices of the squares with I^(k) = K
  };

  ShiftOperator(const HaarSystem& hs, std::array<int, 2> k, ShiftCoefficients coeffs,
                ShiftFlavor flavor = ShiftFlavor::balanced, std::array<int, 2> eta = {1, 1});

  const GridGeometry& geometry() const override { return hs_.geometry(); }
  Signal2D apply(const Signal2D& f) const override;
  Signal2D apply_adjoint(const Signal2D& g) const override;

  std::array<int, 2> k() const { return k_; }
  ShiftFlavor flavor() const { return flavor_; }
  // |a_{IJK}| with the |I|/|K| factor included.
  double coefficient(int scale, std::int64_t I, std::int64_t J) const;
  // Scales of I that carry terms: max(k1, k2) .. n-1.
  int first_scale() const { return std::max(k_[0], k_[1]); }

 private:
  std::vector<Block> blocks(int scale) const;
  int eta_index() const;
  // Fills row[ia] = a(I, J) for block b at the given scale, J at position jb.
  void block_row(int scale, std::size_t b, std::size_t jb, double* row) const;

  struct ScalePlan {
    std::vector<Block> blocks;
    // Random signs cached per block as [jb * size + ia]; empty when not cached.
    std::vector<std::vector<std::int8_t>> signs;
  };

  const HaarSystem& hs_;
  std::array<int, 2> k_;
  ShiftCoefficients coeffs_;
  ShiftFlavor flavor_;
  std::array<int, 2> eta_;
  std::vector<ScalePlan> plans_;  // indexed by scale
};

enum class ParaproductFlavor {
  standard,  // sum <b, h_I> <f>_I h_I
  adjoint,   // sum <b, h_I> <f, h_I> 1_I / |I|
};

// One-parameter paraproduct over all three cancellative signatures.
class Paraproduct final : public LinearOperator {
 public:
  Paraproduct(const HaarSystem& hs, Signal2D symbol, ParaproductFlavor flavor = ParaproductFlavor::standard);
  const GridGeometry& geometry() const override { return hs_.geometry(); }
  Signal2D apply(const Signal2D& f) const override;
  Signal2D apply_adjoint(const Signal2D& g) const override;
  const Signal2D& symbol() const { return symbol_; }

 private:
  Signal2D standard(const Signal2D& f) const;
  Signal2D adjoint(const Signal2D& g) const;

  const HaarSystem& hs_;
  Signal2D symbol_;
  HaarCoefficients bcoef_;
  ParaproductFlavor flavor_;
};

struct ParaproductTriple {
  Signal2D a1;  // sum_I Delta_I b Delta_I f
  Signal2D a2;  // sum_I Delta_I b <f>_I
  Signal2D a3;  // sum_I <b>_I Delta_I f
  double mean_product = 0.0;  // <b><f>; a1 + a2 + a3 + mean_product = b f
};
ParaproductTriple paraproduct_triple(const HaarSystem& hs, const Signal2D& b, const Signal2D& f);

// Band index of an offset: 0 for m = 0, else the k >= 2 with |m| in (2^{k-3}, 2^{k-2}].
int offset_band(std::int64_t m);

struct LedgerEntry {
  int k1 = 0, k2 = 0;
  std::int64_t m1 = 0, m2 = 0;
  double band_sum = 0.0;         // sum over I of B(h_I^0, h_{I+m}) <f, H_{I,I+m}> <g, h_{I+m}>
  double coefficient_max = 0.0;  // max |B(h_I^0, h_{I+m})| over the normalisation weight
  std::int64_t pairs = 0;
};

struct RepDecomposition {
  double form_value = 0.0;  // B(f, g) evaluated directly
  double sigma1 = 0.0, sigma2 = 0.0, sigma3 = 0.0;
  double sigma11 = 0.0, sigma12 = 0.0;  // sigma1 = shift part + paraproduct part
  double sigma21 = 0.0, sigma22 = 0.0;
  double sigma12_via_t1 = 0.0;  // sum_J <T1, h_J> <f>_J <g, h_J>
  double mean_f = 0.0, mean_g = 0.0;
  std::vector<LedgerEntry> ledger;
  double max_normalized_coefficient = 0.0;

  double total() const { return sigma1 + sigma2 + sigma3; }
  double identity_error() const;  // |total - form| relative to |form| (absolute when tiny)
};

// All Haar-pair coefficients B(h_I^beta, h_J^gamma) of one form on one lattice,
// for equal-side I, J at every scale; reusable across many (f, g).
class RepresentationEngine {
 public:
  RepresentationEngine(const FormMatrix& B, const HaarSystem& hs);

  // beta, gamma = 2 eta1 + eta2 (0 is the non-cancellative h^0).
  double coefficient(int scale, int beta, int gamma, std::int64_t I, std::int64_t J) const {
    const std::size_t Q = std::size_t{1} << (2 * scale);
    return m_[static_cast<std::size_t>(scale)][(static_cast<std::size_t>(I) * Q + static_cast<std::size_t>(J)) * 16 +
                                                static_cast<std::size_t>(beta * 4 + gamma)];
  }
  // Exact per-lattice representation of B(f, g) for mean-zero f and g. The
  // ledger normalises |B(h_I^0, h_J)| by 2^{-theta2 (kmax - kmin)} 2^{-theta1 kmin} |I|/|K|.
  RepDecomposition decompose(const Signal2D& f, const Signal2D& g, double theta1 = 1.0, double theta2 = 1.0) const;

 private:
  const FormMatrix& B_;
  const HaarSystem& hs_;
  Signal2D t1_;
  std::vector<std::vector<double>> m_;
};

RepDecomposition decompose(const FormMatrix& B, const HaarSystem& hs, const Signal2D& f, const Signal2D& g,
                           double theta1 = 1.0, double theta2 = 1.0);

// Average of the per-lattice sums over several lattices (ledger merged by key).
RepDecomposition decompose_averaged(const FormMatrix& B, const std::vector<Lattice2D>& lattices, const Signal2D& f,
                                    const Signal2D& g, double theta1 = 1.0, double theta2 = 1.0);

struct NormEstimate {
  double norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest singular value by power iteration on A* A from a seeded random start.
NormEstimate power_iteration_norm(const std::function<Signal2D(const Signal2D&)>& A,
                                  const std::function<Signal2D(const Signal2D&)>& At, GridGeometry g,
                                  int max_iterations, std::uint64_t seed, double rel_tol = 1e-6);
NormEstimate operator_norm(const LinearOperator& T, int max_iterations, std::uint64_t seed, double rel_tol = 1e-6);
// Norm on L^2(w): the same iteration for w^{1/2} T w^{-1/2}.
NormEstimate weighted_operator_norm(const LinearOperator& T, const Signal2D& w, int max_iterations,
                                    std::uint64_t seed, double rel_tol = 1e-6);

}  // namespace czx

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "czx/lattice.hpp"
#include "czx/operator.hpp"
#include "czx/signal.hpp"

namespace czx {

// sup over rectangles of D_lambda(sigma) containing the cell of <|f|>_R, with
// lambda = 2^{log2_lambda} = l(I^1) / l(I^2).
Signal2D lattice_maximal(const Signal2D& f, int log2_lambda, const Lattice2D& lattice);
inline Signal2D dyadic_maximal(const Signal2D& f, const Lattice2D& lattice) { return lattice_maximal(f, 0, lattice); }

// Exact strong maximal function over every rectangle with cell corners inside
// the unit square (no wrap-around, also on the torus). O(N^4).
Signal2D strong_maximal(const Signal2D& f);
// One-dimensional maximal function along the given axis (0: first coordinate).
Signal2D directional_maximal(const Signal2D& f, int axis);
// M^2 M^1 f, an upper bound for the strong maximal function.
Signal2D iterated_maximal(const Signal2D& f);

// M^#_{T,3} f(x) = sup over squares J containing x of the oscillation over the
// cells of J of T(1_{(3J)^c} f). J runs over squares of side 2^k cells at every
// cell position inside the grid. Box mode.
Signal2D sharp_maximal(const BumpConvolution& T, const Signal2D& f);
// Same quantity by direct local evaluation for every J; works for any operator.
Signal2D sharp_maximal_reference(const LinearOperator& T, const Signal2D& f);

struct MaximalRow {
  double t1 = 0.0, t2 = 0.0;
  double max_ratio = 0.0;  // max over f and cells of M^# f / M_* f
};

struct MaximalReport {
  std::string operator_tag;
  int n = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<MaximalRow> rows;
  double max_ratio = 0.0;
  double domination_constant = 0.0;  // the constant the ratios were tested against (0 if none)
  bool dominated = true;
};

// Sweeps bump widths t1, t2 over {2^{-k}: k in log2_widths} with the given theta2
// and records sup M^#_{T,3} f / M_* f over random f.
MaximalReport sharp_maximal_sweep(int n, double theta2, bool log_flag, const std::vector<int>& log2_widths,
                                  int samples, std::uint64_t seed, double constant = 0.0);

}  // namespace czx

#pragma once

#include <cstdint>
#include <vector>

#include "czx/operator.hpp"
#include "czx/signal.hpp"

namespace czx {

struct SparseCube {
  std::int64_t r0 = 0, c0 = 0, side = 0;  // the recursion square Q in cells
  CellBox S;                              // 3Q intersected with the domain
  int depth = 0;
  double average = 0.0;  // <f>_{S,p}
  double b_mean = 0.0;   // <b>_S (commutator families)
  std::int64_t selected_cells = 0;  // total size of the squares chosen inside Q
  std::vector<std::uint32_t> witness;  // flat cells of E(S) = Q minus the chosen squares
};

struct SparseFamily {
  GridGeometry geometry;
  double p = 1.0;
  bool commutator = false;
  std::vector<SparseCube> cubes;
  double c = 1.0;  // maximal-function threshold
  double A = 1.0;  // operator and sharp-maximal threshold
  double C = 0.0;  // (3 + c) A
  int restarts = 0;
  double max_selected_fraction = 0.0;  // max over nodes of sum |P_j| / |Q|
};

struct SparseOptions {
  // Each level set may cover at most this fraction of Q, split evenly among the sets.
  double level_set_budget = 7.0 / 128.0;
  // A square is selected when more than this fraction of it is exceptional.
  double selection_density = 1.0 / 8.0;
  int max_restarts = 400;
};

struct DominationCheck {
  double max_ratio = 0.0;  // max over cells of |target| / sparse sum
  bool dominated = false;  // max_ratio <= C (with rounding slack)
};

struct SparseResult {
  SparseFamily family;
  Signal2D target;      // |Tf|
  Signal2D sparse_sum;  // sum_S <f>_{S,p} 1_S
  DominationCheck check;
};

// Pointwise sparse domination of |Tf| on the unit square (box mode); the root is
// the whole domain and f must live on it.
SparseResult sparse_dominate(const LinearOperator& T, const Signal2D& f, double p, const SparseOptions& opts = {});

struct CommutatorSparseResult {
  SparseFamily family;
  Signal2D target;  // |[b,T] f|
  Signal2D sum1;    // sum_S <|(b - <b>_S) f|>_{S,p} 1_S
  Signal2D sum2;    // sum_S |b - <b>_S| <f>_{S,p} 1_S
  DominationCheck check;
};

CommutatorSparseResult commutator_sparse(const LinearOperator& T, const Signal2D& b, const Signal2D& f, double p,
                                         const SparseOptions& opts = {});

// sum_S <|f|^p>_S^{1/p} 1_S.
Signal2D sparse_form_eval(const SparseFamily& S, const Signal2D& f, double p);
struct CommutatorForms {
  Signal2D sum1;
  Signal2D sum2;
};
CommutatorForms commutator_forms(const SparseFamily& S, const Signal2D& b, const Signal2D& f, double p);

struct SparsenessCertificate {
  double epsilon = 1.0;       // min |E(S)| / |S|
  bool disjoint = true;       // witness sets pairwise disjoint (violations throw)
  double max_selected_fraction = 0.0;
  std::vector<double> depth_measure;  // total measure of the squares Q at each depth
};

// Throws InvariantViolation on overlapping witnesses or witnesses outside S.
SparsenessCertificate verify_sparseness(const SparseFamily& S);

}  // namespace czx

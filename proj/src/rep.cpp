#include "czx/rep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "czx/errors.hpp"
#include "czx/parallel.hpp"
#include "czx/rng.hpp"
#include "czx/simd.hpp"

namespace czx {

namespace {

std::size_t eta_slot(std::array<int, 2> eta) {
  for (std::size_t e = 0; e < 3; ++e)
    if (kCancellative[e] == eta) return e;
  throw ParameterError("signature must be cancellative");
}

// Per-scale h^0 coefficients to a signal: sum_j sum_L w_j[L] h_L^0.
Signal2D from_h0(const HaarSystem& hs, const std::vector<std::vector<double>>& w) {
  const GridGeometry& g = hs.geometry();
  return Signal2D::generate(g, [&](std::int64_t i1, std::int64_t i2) {
    double v = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j)
      if (!w[j].empty()) v += std::ldexp(w[j][static_cast<std::size_t>(hs.square_of_cell(static_cast<int>(j), i1, i2))],
                                         static_cast<int>(j));
    return v;
  });
}

HaarCoefficients empty_coefficients(int n) {
  HaarCoefficients c;
  c.detail.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) c.detail[static_cast<std::size_t>(j)].assign(3 * (std::size_t{1} << (2 * j)), 0.0);
  return c;
}

}  // namespace

double ShiftCoefficients::operator()(int scale, std::int64_t I, std::int64_t J) const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::constant: return value;
    case Kind::custom: return custom(scale, I, J);
    case Kind::random_sign: {
      std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(scale));
      h = hash_combine(h, static_cast<std::uint64_t>(I));
      h = hash_combine(h, static_cast<std::uint64_t>(J));
      return (mix64(h) >> 63) ? 1.0 : -1.0;
    }
  }
  return 0.0;
}

ShiftOperator::ShiftOperator(const HaarSystem& hs, std::array<int, 2> k, ShiftCoefficients coeffs,
                             ShiftFlavor flavor, std::array<int, 2> eta)
    : hs_(hs), k_(k), coeffs_(std::move(coeffs)), flavor_(flavor), eta_(eta) {
  require(k[0] >= 0 && k[1] >= 0, "shift complexity must be nonnegative");
  require<ResolutionError>(std::max(k[0], k[1]) <= hs.n() - 1, "shift complexity exceeds the grid depth");
  eta_slot(eta);
  if (coeffs_.kind == ShiftCoefficients::Kind::constant)
    require(std::abs(coeffs_.value) <= 1.0, "shift coefficients are bounded by |I|/|K|");
  plans_.resize(static_cast<std::size_t>(hs.n()));
  std::size_t cached = 0;
  for (int j = first_scale(); j < hs.n(); ++j) {
    ScalePlan& plan = plans_[static_cast<std::size_t>(j)];
    plan.blocks = blocks(j);
    for (const auto& b : plan.blocks) cached += b.members.size() * b.members.size();
  }
  // Hashing every pair dominates the cost of an application; keep the signs
  // when they fit in a modest table.
  if (coeffs_.kind != ShiftCoefficients::Kind::random_sign || cached > (std::size_t{1} << 27)) return;
  for (int j = first_scale(); j < hs.n(); ++j) {
    ScalePlan& plan = plans_[static_cast<std::size_t>(j)];
    plan.signs.resize(plan.blocks.size());
    parallel_for(plan.blocks.size(), [&](std::size_t b) {
      const auto& mem = plan.blocks[b].members;
      auto& sg = plan.signs[b];
      sg.resize(mem.size() * mem.size());
      for (std::size_t jb = 0; jb < mem.size(); ++jb)
        for (std::size_t ia = 0; ia < mem.size(); ++ia)
          sg[jb * mem.size() + ia] = coeffs_(j, mem[ia], mem[jb]) > 0 ? 1 : -1;
    });
  }
}


double ShiftOperator::coefficient(int scale, std::int64_t I, std::int64_t J) const {
  return std::ldexp(coeffs_(scale, I, J), -(k_[0] + k_[1]));
}

int ShiftOperator::eta_index() const { return static_cast<int>(eta_slot(eta_)); }

namespace {

std::vector<std::pair<std::size_t, std::size_t>> member_slots(const std::vector<ShiftOperator::Block>& bl) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < bl.size(); ++b)
    for (std::size_t a = 0; a < bl[b].members.size(); ++a) out.emplace_back(b, a);
  return out;
}

}  // namespace

std::vector<ShiftOperator::Block> ShiftOperator::blocks(int scale) const {
  const Lattice2D& L = hs_.lattice();
  const int s1 = scale - k_[0], s2 = scale - k_[1];
  const std::int64_t side = std::int64_t{1} << scale;
  std::vector<std::int64_t> anc1(static_cast<std::size_t>(side)), anc2(static_cast<std::size_t>(side));
  for (std::int64_t m = 0; m < side; ++m) {
    anc1[static_cast<std::size_t>(m)] = L.first().ancestor({scale, m}, k_[0]).index;
    anc2[static_cast<std::size_t>(m)] = L.second().ancestor({scale, m}, k_[1]).index;
  }
  std::vector<Block> out(std::size_t{1} << (s1 + s2));
  for (std::int64_t m1 = 0; m1 < side; ++m1)
    for (std::int64_t m2 = 0; m2 < side; ++m2) {
      const std::int64_t K = (anc1[static_cast<std::size_t>(m1)] << s2) + anc2[static_cast<std::size_t>(m2)];
      out[static_cast<std::size_t>(K)].members.push_back((m1 << scale) + m2);
    }
  return out;
}

void ShiftOperator::block_row(int scale, std::size_t b, std::size_t jb, double* row) const {
  const ScalePlan& plan = plans_[static_cast<std::size_t>(scale)];
  const auto& mem = plan.blocks[b].members;
  const double unit = std::ldexp(1.0, -(k_[0] + k_[1]));
  if (!plan.signs.empty()) {
    const std::int8_t* sg = plan.signs[b].data() + jb * mem.size();
    for (std::size_t ia = 0; ia < mem.size(); ++ia) row[ia] = unit * sg[ia];
    return;
  }
  for (std::size_t ia = 0; ia < mem.size(); ++ia) row[ia] = coefficient(scale, mem[ia], mem[jb]);
}

Signal2D ShiftOperator::apply(const Signal2D& f) const {
  require(f.geometry() == geometry(), "signal grid differs from the shift grid");
  const ScaleAverages avg = hs_.averages(f);
  HaarCoefficients out = empty_coefficients(hs_.n());
  const auto e = static_cast<std::size_t>(eta_index());
  const std::array<int, 2> src_eta = flavor_ == ShiftFlavor::balanced ? std::array<int, 2>{0, 0} : eta_;
  for (int j = first_scale(); j < hs_.n(); ++j) {
    const auto& bl = plans_[static_cast<std::size_t>(j)].blocks;
    auto& dst = out.detail[static_cast<std::size_t>(j)];
    // Block-local copies of the source coefficients.
    std::vector<std::vector<double>> ub(bl.size());
    for (std::size_t b = 0; b < bl.size(); ++b)
      for (const std::int64_t I : bl[b].members) ub[b].push_back(hs_.coefficient(avg, j, I, src_eta));
    // One task per output square, so a single large block still spreads over the workers.
    const auto slots = member_slots(bl);
    parallel_for(slots.size(), [&](std::size_t t) {
      const auto [b, jb] = slots[t];
      const auto& u = ub[b];
      std::vector<double> row(u.size());
      block_row(j, b, jb, row.data());
      double s = simd::dot(row, u);
      if (flavor_ == ShiftFlavor::balanced) {
        double rs = 0.0;
        for (double a : row) rs += a;
        s -= rs * u[jb];
      }
      dst[static_cast<std::size_t>(bl[b].members[jb]) * 3 + e] = s;
    });
  }
  return hs_.synthesize(out);
}

Signal2D ShiftOperator::apply_adjoint(const Signal2D& g) const {
  require(g.geometry() == geometry(), "signal grid differs from the shift grid");
  const ScaleAverages avg = hs_.averages(g);
  const auto e = static_cast<std::size_t>(eta_index());
  const int n = hs_.n();
  HaarCoefficients cancel = empty_coefficients(n);
  std::vector<std::vector<double>> h0(static_cast<std::size_t>(n));
  for (int j = first_scale(); j < n; ++j) {
    const auto& bl = plans_[static_cast<std::size_t>(j)].blocks;
    auto& w0 = h0[static_cast<std::size_t>(j)];
    w0.assign(std::size_t{1} << (2 * j), 0.0);
    auto& dst = cancel.detail[static_cast<std::size_t>(j)];
    parallel_for(bl.size(), [&](std::size_t b) {
      const auto& mem = bl[b].members;
      std::vector<double> v(mem.size()), acc(mem.size(), 0.0), row(mem.size());
      for (std::size_t a = 0; a < mem.size(); ++a) v[a] = hs_.coefficient(avg, j, mem[a], eta_);
      // Row jb holds a(., J): scatter v_J along it.
      for (std::size_t jb = 0; jb < mem.size(); ++jb) {
        block_row(j, b, jb, row.data());
        simd::axpy(v[jb], row, acc);
        if (flavor_ == ShiftFlavor::balanced) {
          double rs = 0.0;
          for (double a : row) rs += a;
          acc[jb] -= rs * v[jb];
        }
      }
      for (std::size_t a = 0; a < mem.size(); ++a) {
        if (flavor_ == ShiftFlavor::balanced)
          w0[static_cast<std::size_t>(mem[a])] = acc[a];
        else
          dst[static_cast<std::size_t>(mem[a]) * 3 + e] = acc[a];
      }
    });
  }
  if (flavor_ == ShiftFlavor::balanced) return from_h0(hs_, h0);
  return hs_.synthesize(cancel);
}

Paraproduct::Paraproduct(const HaarSystem& hs, Signal2D symbol, ParaproductFlavor flavor)
    : hs_(hs), symbol_(std::move(symbol)), bcoef_(hs.analyze(symbol_)), flavor_(flavor) {
  require(symbol_.geometry() == hs.geometry(), "symbol grid differs from the Haar system grid");
}

Signal2D Paraproduct::standard(const Signal2D& f) const {
  const ScaleAverages avg = hs_.averages(f);
  HaarCoefficients out = empty_coefficients(hs_.n());
  for (int j = 0; j < hs_.n(); ++j) {
    const auto& bj = bcoef_.detail[static_cast<std::size_t>(j)];
    auto& dst = out.detail[static_cast<std::size_t>(j)];
    for (std::size_t q = 0; q < bj.size() / 3; ++q)
      for (std::size_t e = 0; e < 3; ++e) dst[q * 3 + e] = bj[q * 3 + e] * avg[static_cast<std::size_t>(j)][q];
  }
  return hs_.synthesize(out);
}

Signal2D Paraproduct::adjoint(const Signal2D& g) const {
  const HaarCoefficients gc = hs_.analyze(g);
  // sum <b,h_I><g,h_I> 1_I/|I| = sum w_I h_I^0 with w_I = |I|^{-1/2} sum_eta <b,h_I><g,h_I>.
  std::vector<std::vector<double>> h0(static_cast<std::size_t>(hs_.n()));
  for (int j = 0; j < hs_.n(); ++j) {
    const auto& bj = bcoef_.detail[static_cast<std::size_t>(j)];
    const auto& gj = gc.detail[static_cast<std::size_t>(j)];
    auto& w = h0[static_cast<std::size_t>(j)];
    w.assign(bj.size() / 3, 0.0);
    for (std::size_t q = 0; q < w.size(); ++q) {
      double s = 0.0;
      for (std::size_t e = 0; e < 3; ++e) s += bj[q * 3 + e] * gj[q * 3 + e];
      w[q] = std::ldexp(s, j);
    }
  }
  return from_h0(hs_, h0);
}

Signal2D Paraproduct::apply(const Signal2D& f) const {
  require(f.geometry() == geometry(), "signal grid differs from the paraproduct grid");
  return flavor_ == ParaproductFlavor::standard ? standard(f) : adjoint(f);
}

Signal2D Paraproduct::apply_adjoint(const Signal2D& g) const {
  require(g.geometry() == geometry(), "signal grid differs from the paraproduct grid");
  return flavor_ == ParaproductFlavor::standard ? adjoint(g) : standard(g);
}

ParaproductTriple paraproduct_triple(const HaarSystem& hs, const Signal2D& b, const Signal2D& f) {
  const GridGeometry& g = hs.geometry();
  require(b.geometry() == g && f.geometry() == g, "signal grid differs from the Haar system grid");
  const ScaleAverages ab = hs.averages(b), af = hs.averages(f);
  ParaproductTriple t{Signal2D(g), Signal2D(g), Signal2D(g), ab[0][0] * af[0][0]};
  for (int j = 0; j < hs.n(); ++j) {
    const Signal2D Db = hs.difference_at_scale(ab, j), Df = hs.difference_at_scale(af, j);
    const Signal2D Eb = hs.expectation_at_scale(ab, j), Ef = hs.expectation_at_scale(af, j);
    t.a1 += Db * Df;
    t.a2 += Db * Ef;
    t.a3 += Eb * Df;
  }
  return t;
}

int offset_band(std::int64_t m) {
  const std::int64_t a = std::abs(m);
  if (a == 0) return 0;
  int k = 2;
  while ((std::int64_t{1} << (k - 2)) < a) ++k;
  return k;
}

double RepDecomposition::identity_error() const {
  const double diff = std::abs(total() - form_value);
  return std::abs(form_value) > 1e-12 ? diff / std::abs(form_value) : diff;
}

RepresentationEngine::RepresentationEngine(const FormMatrix& B, const HaarSystem& hs)
    : B_(B), hs_(hs), t1_(B.apply(Signal2D::constant(B.geometry(), 1.0))) {
  require(B.geometry() == hs.geometry(), "Haar system grid differs from the form grid");
  const int n = hs.n();
  m_.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const std::vector<double> C = B.block_sums(hs, j + 1);
    const std::size_t Qc = std::size_t{1} << (2 * (j + 1));
    const std::size_t Q = std::size_t{1} << (2 * j);
    const double norm = std::ldexp(1.0, 2 * j);
    auto& M = m_[static_cast<std::size_t>(j)];
    M.assign(Q * Q * 16, 0.0);
    // Child signs: sign[beta][c] for child c = 2 c1 + c2.
    double sign[4][4];
    for (int beta = 0; beta < 4; ++beta)
      for (int c = 0; c < 4; ++c) sign[beta][c] = haar_sign(beta >> 1, c >> 1) * haar_sign(beta & 1, c & 1);
    parallel_for(Q, [&](std::size_t I) {
      std::size_t ci[4];
      for (int c = 0; c < 4; ++c) ci[c] = static_cast<std::size_t>(hs.child(j, static_cast<std::int64_t>(I), c >> 1, c & 1));
      for (std::size_t J = 0; J < Q; ++J) {
        std::size_t cj[4];
        for (int c = 0; c < 4; ++c)
          cj[c] = static_cast<std::size_t>(hs.child(j, static_cast<std::int64_t>(J), c >> 1, c & 1));
        double T[4][4];  // T[gamma][child of I]
        for (int gamma = 0; gamma < 4; ++gamma)
          for (int a = 0; a < 4; ++a) {
            double s = 0.0;
            for (int b = 0; b < 4; ++b) s += sign[gamma][b] * C[cj[b] * Qc + ci[a]];
            T[gamma][a] = s;
          }
        double* dst = M.data() + (I * Q + J) * 16;
        for (int beta = 0; beta < 4; ++beta)
          for (int gamma = 0; gamma < 4; ++gamma) {
            double s = 0.0;
            for (int a = 0; a < 4; ++a) s += sign[beta][a] * T[gamma][a];
            dst[beta * 4 + gamma] = norm * s;
          }
      }
    });
  }
}

RepDecomposition RepresentationEngine::decompose(const Signal2D& f, const Signal2D& g, double theta1,
                                                 double theta2) const {
  const GridGeometry& geo = hs_.geometry();
  require(f.geometry() == geo && g.geometry() == geo, "signal grid differs from the Haar system grid");
  RepDecomposition rep;
  rep.mean_f = f.mean();
  rep.mean_g = g.mean();
  const double tol = 1e-12;
  require(std::abs(rep.mean_f) <= tol * std::max(1.0, f.norm(2)) && std::abs(rep.mean_g) <= tol * std::max(1.0, g.norm(2)),
          "decompose needs mean-zero f and g");
  rep.form_value = B_.form(f, g);
  const ScaleAverages af = hs_.averages(f), ag = hs_.averages(g), at = hs_.averages(t1_);
  const int n = hs_.n();
  using Key = std::tuple<int, int, std::int64_t, std::int64_t>;
  std::map<Key, LedgerEntry> ledger;

  for (int j = 0; j < n; ++j) {
    const std::size_t Q = std::size_t{1} << (2 * j);
    std::vector<std::array<double, 4>> cf(Q), cg(Q), ct(Q);
    for (std::size_t q = 0; q < Q; ++q)
      for (int beta = 0; beta < 4; ++beta) {
        const std::array<int, 2> eta{beta >> 1, beta & 1};
        cf[q][static_cast<std::size_t>(beta)] = hs_.coefficient(af, j, static_cast<std::int64_t>(q), eta);
        cg[q][static_cast<std::size_t>(beta)] = hs_.coefficient(ag, j, static_cast<std::int64_t>(q), eta);
        ct[q][static_cast<std::size_t>(beta)] = hs_.coefficient(at, j, static_cast<std::int64_t>(q), eta);
      }
    // Per-I partial sums keep the reduction order independent of the thread count.
    struct Partial {
      double s11 = 0, s12 = 0, s21 = 0, s22 = 0, s3 = 0;
    };
    std::vector<Partial> part(Q);
    parallel_for(Q, [&](std::size_t I) {
      Partial p;
      for (std::size_t J = 0; J < Q; ++J) {
        const double* M = m_[static_cast<std::size_t>(j)].data() + (I * Q + J) * 16;
        for (int gamma = 1; gamma < 4; ++gamma) {
          const double a = M[gamma];  // B(h_I^0, h_J^gamma)
          p.s11 += a * (cf[I][0] - cf[J][0]) * cg[J][static_cast<std::size_t>(gamma)];
          p.s12 += a * cf[J][0] * cg[J][static_cast<std::size_t>(gamma)];
        }
        for (int beta = 1; beta < 4; ++beta) {
          const double a = M[beta * 4];  // B(h_I^beta, h_J^0)
          p.s21 += a * cf[I][static_cast<std::size_t>(beta)] * (cg[J][0] - cg[I][0]);
          p.s22 += a * cf[I][static_cast<std::size_t>(beta)] * cg[I][0];
          for (int gamma = 1; gamma < 4; ++gamma)
            p.s3 += M[beta * 4 + gamma] * cf[I][static_cast<std::size_t>(beta)] * cg[J][static_cast<std::size_t>(gamma)];
        }
      }
      part[I] = p;
    });
    for (const Partial& p : part) {
      rep.sigma11 += p.s11;
      rep.sigma12 += p.s12;
      rep.sigma21 += p.s21;
      rep.sigma22 += p.s22;
      rep.sigma3 += p.s3;
    }
    for (std::size_t J = 0; J < Q; ++J)
      for (int gamma = 1; gamma < 4; ++gamma)
        rep.sigma12_via_t1 += ct[J][static_cast<std::size_t>(gamma)] * cf[J][0] * cg[J][static_cast<std::size_t>(gamma)] *
                              std::ldexp(1.0, j);  // <f>_J = 2^j <f, h_J^0>

    // Ledger of the shift part of sigma1 by offset.
    for (std::size_t I = 0; I < Q; ++I) {
      const DyadicRect RI = hs_.square(j, static_cast<std::int64_t>(I));
      for (std::size_t J = 0; J < Q; ++J) {
        if (I == J) continue;
        const auto m = square_offset(geo, RI, hs_.square(j, static_cast<std::int64_t>(J)));
        const int k1 = offset_band(m[0]), k2 = offset_band(m[1]);
        const int kmax = std::max(k1, k2), kmin = std::min(k1, k2);
        const double weight = std::exp2(-theta2 * (kmax - kmin) - theta1 * kmin - (k1 + k2));
        const double* M = m_[static_cast<std::size_t>(j)].data() + (I * Q + J) * 16;
        LedgerEntry& e = ledger[Key{k1, k2, m[0], m[1]}];
        e.k1 = k1;
        e.k2 = k2;
        e.m1 = m[0];
        e.m2 = m[1];
        ++e.pairs;
        for (int gamma = 1; gamma < 4; ++gamma) {
          e.band_sum += M[gamma] * (cf[I][0] - cf[J][0]) * cg[J][static_cast<std::size_t>(gamma)];
          e.coefficient_max = std::max(e.coefficient_max, std::abs(M[gamma]) / weight);
        }
      }
    }
  }
  rep.sigma1 = rep.sigma11 + rep.sigma12;
  rep.sigma2 = rep.sigma21 + rep.sigma22;
  for (auto& [key, e] : ledger) {
    rep.max_normalized_coefficient = std::max(rep.max_normalized_coefficient, e.coefficient_max);
    rep.ledger.push_back(e);
  }
  return rep;
}

RepDecomposition decompose(const FormMatrix& B, const HaarSystem& hs, const Signal2D& f, const Signal2D& g,
                           double theta1, double theta2) {
  return RepresentationEngine(B, hs).decompose(f, g, theta1, theta2);
}

RepDecomposition decompose_averaged(const FormMatrix& B, const std::vector<Lattice2D>& lattices, const Signal2D& f,
                                    const Signal2D& g, double theta1, double theta2) {
  require(!lattices.empty(), "need at least one lattice");
  RepDecomposition acc;
  using Key = std::tuple<int, int, std::int64_t, std::int64_t>;
  std::map<Key, LedgerEntry> ledger;
  const double w = 1.0 / static_cast<double>(lattices.size());
  for (const Lattice2D& L : lattices) {
    const HaarSystem hs(B.geometry(), L);
    const RepDecomposition r = decompose(B, hs, f, g, theta1, theta2);
    acc.form_value = r.form_value;
    acc.mean_f = r.mean_f;
    acc.mean_g = r.mean_g;
    acc.sigma1 += w * r.sigma1;
    acc.sigma2 += w * r.sigma2;
    acc.sigma3 += w * r.sigma3;
    acc.sigma11 += w * r.sigma11;
    acc.sigma12 += w * r.sigma12;
    acc.sigma21 += w * r.sigma21;
    acc.sigma22 += w * r.sigma22;
    acc.sigma12_via_t1 += w * r.sigma12_via_t1;
    acc.max_normalized_coefficient = std::max(acc.max_normalized_coefficient, r.max_normalized_coefficient);
    for (const LedgerEntry& e : r.ledger) {
      LedgerEntry& d = ledger[Key{e.k1, e.k2, e.m1, e.m2}];
      d.k1 = e.k1;
      d.k2 = e.k2;
      d.m1 = e.m1;
      d.m2 = e.m2;
      d.band_sum += w * e.band_sum;
      d.coefficient_max = std::max(d.coefficient_max, e.coefficient_max);
      d.pairs += e.pairs;
    }
  }
  for (auto& [key, e] : ledger) acc.ledger.push_back(e);
  return acc;
}

NormEstimate power_iteration_norm(const std::function<Signal2D(const Signal2D&)>& A,
                                  const std::function<Signal2D(const Signal2D&)>& At, GridGeometry g,
                                  int max_iterations, std::uint64_t seed, double rel_tol) {
  require(max_iterations >= 1, "power iteration needs at least one step");
  Rng rng(seed);
  Signal2D x = Signal2D::generate(g, [&](std::int64_t, std::int64_t) { return rng.normal(); });
  x *= 1.0 / x.norm(2);
  NormEstimate est;
  double prev = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const Signal2D y = A(x);
    const double s = y.norm(2);
    est.norm = s;
    est.iterations = it;
    if (s == 0.0) {
      est.converged = true;
      break;
    }
    if (it > 1 && std::abs(s - prev) <= rel_tol * s) {
      est.converged = true;
      break;
    }
    prev = s;
    Signal2D z = At(y);
    const double zn = z.norm(2);
    if (zn == 0.0) {
      est.converged = true;
      break;
    }
    x = std::move(z);
    x *= 1.0 / zn;
  }
  return est;
}

NormEstimate operator_norm(const LinearOperator& T, int max_iterations, std::uint64_t seed, double rel_tol) {
  return power_iteration_norm([&](const Signal2D& f) { return T.apply(f); },
                              [&](const Signal2D& g) { return T.apply_adjoint(g); }, T.geometry(), max_iterations,
                              seed, rel_tol);
}

NormEstimate weighted_operator_norm(const LinearOperator& T, const Signal2D& w, int max_iterations,
                                    std::uint64_t seed, double rel_tol) {
  require(w.geometry() == T.geometry(), "weight grid differs from the operator grid");
  const Signal2D root = w.map([](double v) { return std::sqrt(v); });
  const Signal2D inv_root = w.map([](double v) { return 1.0 / std::sqrt(v); });
  return power_iteration_norm([&](const Signal2D& f) { return root * T.apply(inv_root * f); },
                              [&](const Signal2D& g) { return inv_root * T.apply_adjoint(root * g); }, T.geometry(),
                              max_iterations, seed, rel_tol);
}

}  // namespace czx

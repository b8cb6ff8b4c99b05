#include "czx/haar.hpp"

#include <cmath>

#include "czx/errors.hpp"

namespace czx {

HaarSystem::HaarSystem(GridGeometry g, Lattice2D lattice) : geometry_(g), lattice_(std::move(lattice)) {
  require(lattice_.n() == g.n, "lattice and grid resolutions differ");
  const int nn = g.n;
  for (int axis = 0; axis < 2; ++axis) {
    const Lattice1D& lat = lattice_.axis(axis);
    auto& ci = cell_index_[static_cast<std::size_t>(axis)];
    auto& ch = children_[static_cast<std::size_t>(axis)];
    auto& pa = parents_[static_cast<std::size_t>(axis)];
    ci.resize(static_cast<std::size_t>(nn) + 1);
    ch.resize(static_cast<std::size_t>(nn));
    pa.resize(static_cast<std::size_t>(nn) + 1);
    for (int j = 0; j <= nn; ++j) {
      ci[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(g.side()));
      for (std::int64_t c = 0; c < g.side(); ++c)
        ci[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] = lat.index_of_cell(j, c);
      pa[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(lat.count(j)));
      for (std::int64_t m = 0; m < lat.count(j); ++m)
        pa[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)] = j == 0 ? 0 : lat.parent({j, m}).index;
      if (j < nn) {
        ch[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(lat.count(j)));
        for (std::int64_t m = 0; m < lat.count(j); ++m) {
          auto kids = lat.children({j, m});
          ch[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)] = {kids[0].index, kids[1].index};
        }
      }
    }
  }
}

std::int64_t HaarSystem::child(int scale, std::int64_t flat, int c1, int c2) const {
  const std::int64_t m1 = flat >> scale;
  const std::int64_t m2 = flat & ((std::int64_t{1} << scale) - 1);
  const std::int64_t k1 = children_[0][static_cast<std::size_t>(scale)][static_cast<std::size_t>(m1)][static_cast<std::size_t>(c1)];
  const std::int64_t k2 = children_[1][static_cast<std::size_t>(scale)][static_cast<std::size_t>(m2)][static_cast<std::size_t>(c2)];
  return (k1 << (scale + 1)) + k2;
}

std::int64_t HaarSystem::parent(int scale, std::int64_t flat) const {
  const std::int64_t m1 = flat >> scale;
  const std::int64_t m2 = flat & ((std::int64_t{1} << scale) - 1);
  const std::int64_t p1 = parents_[0][static_cast<std::size_t>(scale)][static_cast<std::size_t>(m1)];
  const std::int64_t p2 = parents_[1][static_cast<std::size_t>(scale)][static_cast<std::size_t>(m2)];
  return (p1 << (scale - 1)) + p2;
}

void HaarSystem::validate_square(const DyadicRect& sq) const {
  require(sq.is_square(), "Haar functions live on squares");
  lattice_.first().validate(sq.first);
  lattice_.second().validate(sq.second);
}

Signal2D HaarSystem::haar_function(const HaarIndex& idx) const {
  validate_square(idx.rect);
  const int j = idx.rect.first.scale;
  require<ResolutionError>(!idx.cancellative() || j < n(), "cancellative Haar function finer than the grid");
  const double amp = std::pow(2.0, j);  // |I|^{-1/2}
  const std::int64_t fl = flat(idx.rect);
  return Signal2D::generate(geometry_, [&](std::int64_t i1, std::int64_t i2) {
    if (square_of_cell(j, i1, i2) != fl) return 0.0;
    if (!idx.cancellative()) return amp;
    const int c1 = interval_of_cell(0, j + 1, i1) ==
                           children_[0][static_cast<std::size_t>(j)][static_cast<std::size_t>(idx.rect.first.index)][0]
                       ? 0
                       : 1;
    const int c2 = interval_of_cell(1, j + 1, i2) ==
                           children_[1][static_cast<std::size_t>(j)][static_cast<std::size_t>(idx.rect.second.index)][0]
                       ? 0
                       : 1;
    return amp * haar_sign(idx.eta[0], c1) * haar_sign(idx.eta[1], c2);
  });
}

Signal2D HaarSystem::balanced_haar(const DyadicRect& I, const DyadicRect& J) const {
  validate_square(I);
  validate_square(J);
  require(I.first.scale == J.first.scale, "H_{I,J} needs equal side lengths");
  return haar_function({I, {0, 0}}) - haar_function({J, {0, 0}});
}

ScaleAverages HaarSystem::averages(const Signal2D& f) const {
  require(f.geometry() == geometry_, "signal grid differs from the Haar system grid");
  const int nn = n();
  ScaleAverages avg(static_cast<std::size_t>(nn) + 1);
  auto& fine = avg[static_cast<std::size_t>(nn)];
  fine.assign(geometry_.cells(), 0.0);
  for (std::int64_t i1 = 0; i1 < geometry_.side(); ++i1)
    for (std::int64_t i2 = 0; i2 < geometry_.side(); ++i2)
      fine[static_cast<std::size_t>(square_of_cell(nn, i1, i2))] = f(i1, i2);
  for (int j = nn - 1; j >= 0; --j) {
    auto& cur = avg[static_cast<std::size_t>(j)];
    const auto& next = avg[static_cast<std::size_t>(j) + 1];
    cur.assign(std::size_t{1} << (2 * j), 0.0);
    for (std::size_t q = 0; q < next.size(); ++q)
      cur[static_cast<std::size_t>(parent(j + 1, static_cast<std::int64_t>(q)))] += 0.25 * next[q];
  }
  return avg;
}

double HaarSystem::coefficient(const ScaleAverages& avg, int scale, std::int64_t fl,
                               std::array<int, 2> eta) const {
  const double root = std::pow(2.0, -scale);  // |I|^{1/2}
  if (eta[0] == 0 && eta[1] == 0) return root * avg[static_cast<std::size_t>(scale)][static_cast<std::size_t>(fl)];
  require<ResolutionError>(scale < n(), "cancellative coefficient finer than the grid");
  const auto& next = avg[static_cast<std::size_t>(scale) + 1];
  double s = 0.0;
  for (int c1 = 0; c1 < 2; ++c1)
    for (int c2 = 0; c2 < 2; ++c2)
      s += haar_sign(eta[0], c1) * haar_sign(eta[1], c2) *
           next[static_cast<std::size_t>(child(scale, fl, c1, c2))];
  return 0.25 * root * s;
}

double HaarSystem::coefficient(const Signal2D& f, const HaarIndex& idx) const {
  return inner(f, haar_function(idx));
}

HaarCoefficients HaarSystem::analyze(const Signal2D& f) const {
  const ScaleAverages avg = averages(f);
  HaarCoefficients out;
  out.mean = avg[0][0];
  out.detail.resize(static_cast<std::size_t>(n()));
  for (int j = 0; j < n(); ++j) {
    auto& d = out.detail[static_cast<std::size_t>(j)];
    d.resize(3 * (std::size_t{1} << (2 * j)));
    for (std::int64_t q = 0; q < (std::int64_t{1} << (2 * j)); ++q)
      for (std::size_t e = 0; e < 3; ++e)
        d[static_cast<std::size_t>(q) * 3 + e] = coefficient(avg, j, q, kCancellative[e]);
  }
  return out;
}

Signal2D HaarSystem::synthesize(const HaarCoefficients& c) const {
  require(c.detail.size() == static_cast<std::size_t>(n()), "coefficient scale count mismatch");
  std::vector<double> cur{c.mean};
  for (int j = 0; j < n(); ++j) {
    const double amp = std::pow(2.0, j);
    std::vector<double> next(std::size_t{1} << (2 * (j + 1)), 0.0);
    const auto& d = c.detail[static_cast<std::size_t>(j)];
    for (std::int64_t q = 0; q < (std::int64_t{1} << (2 * j)); ++q) {
      for (int c1 = 0; c1 < 2; ++c1)
        for (int c2 = 0; c2 < 2; ++c2) {
          double v = cur[static_cast<std::size_t>(q)];
          for (std::size_t e = 0; e < 3; ++e)
            v += amp * haar_sign(kCancellative[e][0], c1) * haar_sign(kCancellative[e][1], c2) *
                 d[static_cast<std::size_t>(q) * 3 + e];
          next[static_cast<std::size_t>(child(j, q, c1, c2))] = v;
        }
    }
    cur = std::move(next);
  }
  const int nn = n();
  return Signal2D::generate(geometry_, [&](std::int64_t i1, std::int64_t i2) {
    return cur[static_cast<std::size_t>(square_of_cell(nn, i1, i2))];
  });
}

Signal2D HaarSystem::restrict_to(const Signal2D& f, const DyadicRect& R) const {
  return Signal2D::generate(geometry_, [&](std::int64_t i1, std::int64_t i2) {
    return lattice_.contains_cell(R, i1, i2) ? f(i1, i2) : 0.0;
  });
}

Signal2D HaarSystem::expectation(const Signal2D& f, const DyadicRect& I) const {
  validate_square(I);
  const ScaleAverages avg = averages(f);
  const int j = I.first.scale;
  const double a = avg[static_cast<std::size_t>(j)][static_cast<std::size_t>(flat(I))];
  return Signal2D::generate(geometry_, [&](std::int64_t i1, std::int64_t i2) {
    return lattice_.contains_cell(I, i1, i2) ? a : 0.0;
  });
}

Signal2D HaarSystem::difference(const Signal2D& f, const DyadicRect& I) const {
  validate_square(I);
  const int j = I.first.scale;
  require<ResolutionError>(j < n(), "martingale difference finer than the grid");
  const ScaleAverages avg = averages(f);
  return restrict_to(difference_at_scale(avg, j), I);
}

Signal2D HaarSystem::expectation_at_scale(const ScaleAverages& avg, int scale) const {
  require<RangeError>(scale >= 0 && scale <= n(), "scale outside 0..n");
  const auto& a = avg[static_cast<std::size_t>(scale)];
  return Signal2D::generate(geometry_, [&](std::int64_t i1, std::int64_t i2) {
    return a[static_cast<std::size_t>(square_of_cell(scale, i1, i2))];
  });
}

Signal2D HaarSystem::expectation_at_scale(const Signal2D& f, int scale) const {
  return expectation_at_scale(averages(f), scale);
}

Signal2D HaarSystem::difference_at_scale(const ScaleAverages& avg, int scale) const {
  require<ResolutionError>(scale >= 0 && scale < n(), "difference scale outside 0..n-1");
  const auto& a = avg[static_cast<std::size_t>(scale)];
  const auto& b = avg[static_cast<std::size_t>(scale) + 1];
  return Signal2D::generate(geometry_, [&](std::int64_t i1, std::int64_t i2) {
    return b[static_cast<std::size_t>(square_of_cell(scale + 1, i1, i2))] -
           a[static_cast<std::size_t>(square_of_cell(scale, i1, i2))];
  });
}

Signal2D HaarSystem::block_projection(const Signal2D& f, const DyadicRect& K, int k1) const {
  lattice_.first().validate(K.first);
  lattice_.second().validate(K.second);
  require(k1 >= 0, "block order must be nonnegative");
  const int top = K.first.scale;
  require<ResolutionError>(top + k1 <= n() - 1, "block projection scales exceed the grid");
  const ScaleAverages avg = averages(f);
  Signal2D sum(geometry_);
  for (int s = top; s <= top + k1; ++s) sum += difference_at_scale(avg, s);
  return restrict_to(sum, K);
}

Signal2D HaarSystem::block_difference(const Signal2D& g, const DyadicRect& K, int k1, int k2) const {
  lattice_.first().validate(K.first);
  lattice_.second().validate(K.second);
  require(k1 >= 0 && k2 >= 0, "block order must be nonnegative");
  const int j = K.first.scale + k1;
  require(j == K.second.scale + k2, "K is not the (k1,k2)-ancestor of a square");
  require<ResolutionError>(j <= n() - 1, "block difference scale exceeds the grid");
  return restrict_to(difference_at_scale(averages(g), j), K);
}

}  // namespace czx

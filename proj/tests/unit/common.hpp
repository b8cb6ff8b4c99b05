#pragma once

#include <cmath>

#include <doctest.h>

#include "czx/rng.hpp"
#include "czx/signal.hpp"

namespace czx::test {

// |a - b| <= tol * max(1, |a|, |b|)
inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline double rel_error(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace czx::test

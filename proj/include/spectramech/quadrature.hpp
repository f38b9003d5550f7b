#pragma once

#include <cstddef>
#include <vector>

namespace spectramech {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order mapped onto [lo, hi].
QuadratureRule gauss_legendre(std::size_t order, double lo = -1.0, double hi = 1.0);

}  // namespace spectramech

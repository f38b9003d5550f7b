#include "spectramech/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "spectramech/errors.hpp"

namespace spectramech {

QuadratureRule gauss_legendre(std::size_t order, double lo, double hi) {
  if (order < 1) throw ConfigError("quadrature order must be at least 1");
  if (!(hi > lo)) throw DomainError("quadrature interval must have hi > lo");

  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  const auto n = static_cast<double>(order);

  // Roots are symmetric; Newton on P_n from the Chebyshev-like initial guess.
  for (std::size_t k = 0; k < (order + 1) / 2; ++k) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (std::size_t j = 2; j <= order; ++j) {
        const auto jd = static_cast<double>(j);
        const double p2 = ((2.0 * jd - 1.0) * z * p1 - (jd - 1.0) * p0) / jd;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[k] = mid - half * z;
    rule.nodes[order - 1 - k] = mid + half * z;
    rule.weights[k] = half * w;
    rule.weights[order - 1 - k] = half * w;
  }
  return rule;
}

}  // namespace spectramech

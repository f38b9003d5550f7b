#include "spectramech/tax.hpp"

#include <cmath>

#include "spectramech/errors.hpp"

namespace spectramech {

UserTax riemann_tax(double type, double type_min, std::size_t grid_m, const std::function<double(double)>& rate_at) {
  if (grid_m < 1) throw ConfigError("tax grid needs at least one subinterval");
  if (type < type_min) throw DomainError("reported type lies below theta_min");

  UserTax out;
  if (type == type_min) {
    out.rate = rate_at(type);
    out.payment = type * out.rate;
    return out;
  }

  const double width = type - type_min;
  const double step = width / static_cast<double>(grid_m);
  const auto m = static_cast<double>(grid_m);
  double prev = rate_at(type_min);
  const double first = prev;
  double right_sum = 0.0;
  double variation = 0.0;
  for (std::size_t k = 1; k <= grid_m; ++k) {
    const double s = (k == grid_m) ? type : type_min + width * (static_cast<double>(k) / m);
    const double g = rate_at(s);
    if (!std::isfinite(g)) throw NumericalError("tax integrand is not finite");
    if (g < prev - kMonotoneTolerance * std::max(1.0, std::abs(prev))) ++out.nonmonotone_samples;
    variation += std::abs(g - prev);
    right_sum += g;
    prev = g;
  }
  out.rate = prev;
  const double integral = step * right_sum;
  out.payment = type * out.rate - integral;
  out.error_bound = out.nonmonotone_samples == 0 ? step * (out.rate - first) : step * variation;
  if (out.error_bound < 0.0) out.error_bound = 0.0;
  return out;
}

}  // namespace spectramech

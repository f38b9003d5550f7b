#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace spectramech {

inline constexpr std::size_t kDefaultTaxGrid = 64;
/// Relative drop between consecutive integrand samples that counts as a
/// monotonicity violation.
inline constexpr double kMonotoneTolerance = 1e-9;

/// Payment of one user under the rule
///   t = theta * g(theta) - integral_{theta_min}^{theta} g(s) ds,
/// where g(s) is the user's allocated rate when it reports s and the others
/// are held fixed.
struct UserTax {
  double payment = 0.0;
  /// Rate at the actual report, g(theta).
  double rate = 0.0;
  /// Right Riemann sum minus left Riemann sum. For a non-decreasing integrand
  /// this bounds the amount by which `payment` under-states the exact tax.
  /// When samples decrease it is the grid total variation times the step.
  double error_bound = 0.0;
  /// Number of consecutive grid pairs where g decreased beyond tolerance.
  std::size_t nonmonotone_samples = 0;
};

struct TaxResult {
  std::vector<double> payment;
  std::vector<double> rate;
  std::vector<double> error_bound;
  std::vector<std::size_t> nonmonotone_samples;

  void push_back(const UserTax& t) {
    payment.push_back(t.payment);
    rate.push_back(t.rate);
    error_bound.push_back(t.error_bound);
    nonmonotone_samples.push_back(t.nonmonotone_samples);
  }
};

/// Right-endpoint Riemann sum over `grid_m` equal subintervals of
/// [type_min, type]. `rate_at` is called on the grid in increasing order,
/// starting at type_min and ending exactly at `type`.
UserTax riemann_tax(double type, double type_min, std::size_t grid_m, const std::function<double(double)>& rate_at);

}  // namespace spectramech

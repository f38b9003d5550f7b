#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spectramech/rate_model.hpp"

namespace spectramech {

struct WaterFillingOptions {
  /// Stop once |sum x - budget| <= budget_tolerance * budget.
  double budget_tolerance = 1e-9;
  /// Per-user solve stops at this relative change in x.
  double bandwidth_tolerance = 1e-12;
  std::size_t max_iterations = 200;
};

struct WaterFillingResult {
  std::vector<double> bandwidth;
  /// Common level lambda of the weighted marginal rates of active users.
  double multiplier = 0.0;
  /// max over active users of |w_i psi_i'(x_i) - lambda| / lambda.
  double kkt_residual = 0.0;
  std::vector<std::size_t> active_set;
  std::size_t iterations = 0;
};

/// Maximizes sum_i w_i psi_i(x_i) subject to x >= 0, sum x <= budget.
///
/// Users with w_i <= 0 get nothing. The rest share the whole budget with
/// w_i psi_i'(x_i) equal to a common multiplier. The multiplier is found by
/// a bracketed search in log(lambda) and each x_i(lambda) by a bracketed
/// search in log(x); both take Newton steps while they stay inside the
/// bracket and bisect otherwise. `multiplier_hint`, when positive, seeds the
/// outer search.
WaterFillingResult water_fill(std::span<const FdUserPhysical> users, std::span<const double> weights, double budget,
                              const WaterFillingOptions& options = {}, double multiplier_hint = 0.0);

}  // namespace spectramech

#pragma once

// Reference computations for tests. Everything here is written from the
// model definitions directly and shares no numerical code with the library.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

/// Gain law as atoms, or as a density on [lo, hi].
struct Gain {
  std::vector<std::pair<double, double>> atoms;  // (gain, probability)
  std::function<double(double)> density;
  double lo = 0.0;
  double hi = 0.0;
};

/// E[x log(1 + h P / (N0 x))]; composite Simpson with `panels` panels for densities.
double expected_rate(const Gain& g, double power, double noise, double x, std::size_t panels = 4000);

/// W log(1 + h_ii p_i / (N0 W + sum_{j != i} h_ji p_j)); h is row-major, h[j * n + i] from j to i.
double interference_rate(std::size_t n, const std::vector<double>& h, double bandwidth, double noise,
                         const std::vector<double>& power, std::size_t user);

/// Central difference with one Richardson extrapolation step.
double richardson(const std::function<double(double)>& f, double x, double h);

struct GridResult {
  double objective = 0.0;
  std::vector<double> point;
  /// Upper bound on (true optimum - objective) from the grid spacing.
  double slack = 0.0;
};

/// max sum_i w_i psi_i(x_i) over x on the grid {k W / (points - 1)} with sum x = W,
/// users with w_i <= 0 held at zero. At most three active users.
GridResult fd_grid_search(const std::vector<std::function<double(double)>>& psi, const std::vector<double>& weights,
                          double bandwidth, std::size_t points = 200);

/// Two-user interference model on a points x points grid of {x >= 0, x1 + x2 <= P}.
GridResult ss_grid_search(const std::vector<double>& h, double bandwidth, double noise, double total_power,
                          const std::vector<double>& weights, std::size_t points = 300);

/// Virtual type theta - (1 - F) / f from caller-supplied F and f.
double virtual_type(const std::function<double(double)>& cdf, const std::function<double(double)>& pdf,
                    double theta);

}  // namespace oracle

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spectramech/mechanism.hpp"
#include "spectramech/rate_model.hpp"
#include "spectramech/tax.hpp"
#include "spectramech/type_model.hpp"

namespace spectramech {

/// Multistart projected gradient ascent settings.
struct SsSolverOptions {
  /// Random interior starts, in addition to the N + 1 deterministic ones.
  std::size_t restarts = 16;
  std::size_t max_iterations = 5000;
  /// Stop once the projected-gradient residual falls below this.
  double residual_tolerance = 1e-8;
  double armijo = 1e-4;
};

/// Spread-spectrum auction instance: P_total watts split among users that
/// share one band and interfere.
class SsScenario {
 public:
  SsScenario(double total_power, SsPhysical physical, std::vector<TypeDistribution> types,
             std::size_t regularity_grid = kDefaultRegularityGrid, bool allow_irregular = false);

  double total_power() const noexcept { return total_power_; }
  const SsPhysical& physical() const noexcept { return physical_; }
  std::size_t size() const noexcept { return physical_.size(); }
  const TypeDistribution& type(std::size_t i) const { return virtual_.distribution(i); }
  const VirtualTypeProfile& virtual_types() const noexcept { return virtual_; }
  bool allow_irregular() const noexcept { return allow_irregular_; }
  void require_regular() const;

  SsScenario with_total_power(double total_power) const;
  SsScenario leading(std::size_t users) const;

 private:
  double total_power_;
  SsPhysical physical_;
  VirtualTypeProfile virtual_;
  std::size_t regularity_grid_;
  bool allow_irregular_;
};

struct SsAllocation {
  std::vector<double> power;
  std::vector<double> virtual_types;
  std::vector<double> rates;
  double objective = 0.0;
  std::size_t restarts_used = 0;
  /// Index of the winning start: 0 is the even split, 1..N put the whole
  /// budget on one user, the rest are random interior points.
  std::size_t best_restart = 0;
  std::uint64_t best_restart_seed = 0;
  double projected_residual = 0.0;
  std::size_t converged_restarts = 0;
  /// Always true for this solver: the optimum is certified only locally.
  bool local_optimum_only = true;
};

struct SsOutcome {
  SsAllocation allocation;
  TaxResult tax;
};

/// sum_i w_i psi~_i(x).
double ss_objective(const SsPhysical& phys, std::span<const double> weights, std::span<const double> power);
std::vector<double> ss_objective_gradient(const SsPhysical& phys, std::span<const double> weights,
                                          std::span<const double> power);

/// Multistart projected gradient ascent of sum_i w_i psi~_i over
/// {x >= 0, sum x <= total_power}. Start k draws from derive_seed(seed, k).
SsAllocation ss_allocate_weights(const SsPhysical& phys, double total_power, std::span<const double> weights,
                                 const SsSolverOptions& options, std::uint64_t seed);

SsAllocation ss_allocate(const SsScenario& s, std::span<const double> types, const SsSolverOptions& options,
                         std::uint64_t seed);

/// Every allocation on the tax grid reuses `seed`, so the integrand is a
/// deterministic function of the report.
UserTax ss_user_payment(const SsScenario& s, std::span<const double> types, std::size_t user, std::size_t grid_m,
                        const SsSolverOptions& options, std::uint64_t seed);

TaxResult ss_payment(const SsScenario& s, std::span<const double> types, std::size_t grid_m,
                     const SsSolverOptions& options, std::uint64_t seed);

SsOutcome ss_run(const SsScenario& s, std::span<const double> types, std::size_t grid_m,
                 const SsSolverOptions& options, std::uint64_t seed);

class SsMechanism final : public Mechanism {
 public:
  SsMechanism(SsScenario scenario, std::size_t grid_m = kDefaultTaxGrid, SsSolverOptions options = {},
              std::uint64_t solver_seed = 0);

  std::string name() const override { return "ss"; }
  std::span<const TypeDistribution> type_distributions() const override {
    return scenario_.virtual_types().distributions();
  }
  UserOutcome evaluate_user(std::size_t user, std::span<const double> reports, bool with_payment) const override;
  std::vector<UserOutcome> evaluate_all(std::span<const double> reports) const override;
  bool local_optimality_only() const override { return true; }

  const SsScenario& scenario() const noexcept { return scenario_; }

 private:
  SsScenario scenario_;
  std::size_t grid_m_;
  SsSolverOptions options_;
  std::uint64_t solver_seed_;
};

InterimEstimate ss_interim(const SsScenario& s, std::size_t user, double report, std::size_t samples,
                           std::uint64_t seed, std::size_t grid_m = kDefaultTaxGrid,
                           const SsSolverOptions& options = {}, std::uint64_t solver_seed = 0);

RevenueEstimate ss_expected_revenue(const SsScenario& s, std::size_t samples, std::uint64_t seed,
                                    std::size_t grid_m = kDefaultTaxGrid, const SsSolverOptions& options = {},
                                    std::uint64_t solver_seed = 0);

}  // namespace spectramech

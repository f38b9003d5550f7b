#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spectramech/mechanism.hpp"
#include "spectramech/rate_model.hpp"
#include "spectramech/tax.hpp"
#include "spectramech/type_model.hpp"
#include "spectramech/water_filling.hpp"

namespace spectramech {

struct FdUser {
  FdUserPhysical physical;
  TypeDistribution type;
};

/// Frequency-division auction instance: W Hz shared by users on disjoint bands.
class FdScenario {
 public:
  FdScenario(double bandwidth, std::vector<FdUser> users, std::size_t regularity_grid = kDefaultRegularityGrid,
             bool allow_irregular = false);

  double bandwidth() const noexcept { return bandwidth_; }
  std::size_t size() const noexcept { return physical_.size(); }
  std::span<const FdUserPhysical> physicals() const noexcept { return physical_; }
  const FdUserPhysical& physical(std::size_t i) const { return physical_.at(i); }
  const TypeDistribution& type(std::size_t i) const { return virtual_.distribution(i); }
  const VirtualTypeProfile& virtual_types() const noexcept { return virtual_; }
  bool allow_irregular() const noexcept { return allow_irregular_; }
  std::size_t regularity_grid() const noexcept { return regularity_grid_; }

  /// Throws RegularityError unless certified or overridden.
  void require_regular() const;

  FdScenario with_bandwidth(double bandwidth) const;
  /// The first `users` users only.
  FdScenario leading(std::size_t users) const;

 private:
  double bandwidth_;
  std::vector<FdUserPhysical> physical_;
  VirtualTypeProfile virtual_;
  std::size_t regularity_grid_;
  bool allow_irregular_;
};

struct FdAllocation {
  std::vector<double> bandwidth;
  std::vector<double> virtual_types;
  /// psi_i(q_i) for every user.
  std::vector<double> rates;
  double multiplier = 0.0;
  double kkt_residual = 0.0;
  std::vector<std::size_t> active_set;
  std::size_t iterations = 0;
};

struct FdOutcome {
  FdAllocation allocation;
  TaxResult tax;
};

/// Revenue-optimal bandwidth split for reported types.
FdAllocation fd_allocate(const FdScenario& s, std::span<const double> types, double multiplier_hint = 0.0);

/// sum_i w_i psi_i(x_i).
double fd_objective(const FdScenario& s, std::span<const double> weights, std::span<const double> bandwidth);

/// Payment of one user, theta_i psi_i(q_i) minus a right Riemann sum of
/// s -> psi_i(q_i(s, theta_-i)) over `grid_m` subintervals.
UserTax fd_user_payment(const FdScenario& s, std::span<const double> types, std::size_t user,
                        std::size_t grid_m = kDefaultTaxGrid);

TaxResult fd_payment(const FdScenario& s, std::span<const double> types, std::size_t grid_m = kDefaultTaxGrid);

FdOutcome fd_run(const FdScenario& s, std::span<const double> types, std::size_t grid_m = kDefaultTaxGrid);

/// psi_i(q_i(s, theta_-i)) as a function of user i's report s.
double fd_rate_at_report(const FdScenario& s, std::span<const double> types, std::size_t user, double report);

/// Smallest report s in [theta_min, theta_max] whose allocated rate reaches
/// `rate_level`, by bisection to `tolerance` (relative to the support width).
/// Returns theta_max when even theta_max falls short.
double fd_threshold_report(const FdScenario& s, std::span<const double> types, std::size_t user,
                           double rate_level, double tolerance = 1e-12);

struct ThresholdPayment {
  std::vector<double> payment;
  /// theta_min psi_i(q_i(theta_min, theta_-i)).
  std::vector<double> base_amount;
  /// Bound on |payment - exact tax|: midpoint rule on a monotone integrand
  /// plus the bisection tolerance.
  std::vector<double> error_bound;
};

/// Same tax written as a base amount plus the integral over rate levels y of
/// the threshold report Z_i(y, theta_-i); midpoint rule on `grid` levels.
ThresholdPayment fd_payment_via_threshold(const FdScenario& s, std::span<const double> types,
                                          std::size_t grid = kDefaultTaxGrid);

class FdMechanism final : public Mechanism {
 public:
  explicit FdMechanism(FdScenario scenario, std::size_t grid_m = kDefaultTaxGrid);

  std::string name() const override { return "fd"; }
  std::span<const TypeDistribution> type_distributions() const override {
    return scenario_.virtual_types().distributions();
  }
  UserOutcome evaluate_user(std::size_t user, std::span<const double> reports, bool with_payment) const override;
  std::vector<UserOutcome> evaluate_all(std::span<const double> reports) const override;

  const FdScenario& scenario() const noexcept { return scenario_; }
  std::size_t grid_m() const noexcept { return grid_m_; }

 private:
  FdScenario scenario_;
  std::size_t grid_m_;
};

InterimEstimate fd_interim(const FdScenario& s, std::size_t user, double report, std::size_t samples,
                           std::uint64_t seed, std::size_t grid_m = kDefaultTaxGrid);

RevenueEstimate fd_expected_revenue(const FdScenario& s, std::size_t samples, std::uint64_t seed,
                                    std::size_t grid_m = kDefaultTaxGrid);

}  // namespace spectramech

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spectramech/tax.hpp"
#include "spectramech/type_model.hpp"

namespace spectramech {

/// What one user gets and pays for a given report vector.
struct UserOutcome {
  double rate = 0.0;
  double payment = 0.0;
  double tax_error_bound = 0.0;
  std::size_t nonmonotone_samples = 0;
};

/// A direct mechanism: reports in, rates and payments out. The interim and
/// revenue estimators, and the verification harness, only see this surface.
class Mechanism {
 public:
  virtual ~Mechanism() = default;

  virtual std::string name() const = 0;
  virtual std::span<const TypeDistribution> type_distributions() const = 0;
  std::size_t size() const { return type_distributions().size(); }

  /// Outcome of `user` alone. With `with_payment` false only `rate` is filled.
  virtual UserOutcome evaluate_user(std::size_t user, std::span<const double> reports, bool with_payment) const = 0;

  /// Outcome of every user. The default evaluates users one by one.
  virtual std::vector<UserOutcome> evaluate_all(std::span<const double> reports) const;

  /// Whether the mechanism's guarantees hold only up to local optimality.
  virtual bool local_optimality_only() const { return false; }
};

/// Monte Carlo estimate of Q_i(r), T_i(r) with other users truthful.
struct InterimEstimate {
  std::size_t user = 0;
  double report = 0.0;
  std::size_t samples = 0;
  double rate = 0.0;
  double rate_std_error = 0.0;
  double payment = 0.0;
  double payment_std_error = 0.0;
  /// Sample mean of the per-draw tax error bounds.
  double tax_error_bound = 0.0;
  std::size_t nonmonotone_samples = 0;
};

/// Per-draw rates and payments of one user across a sorted report grid, all
/// rows sharing the same draws of the other users' types.
struct InterimTable {
  std::size_t user = 0;
  std::vector<double> reports;
  std::size_t samples = 0;
  bool with_payment = true;
  /// rate[r * samples + k], payment[...], tax_error_bound[...]
  std::vector<double> rate;
  std::vector<double> payment;
  std::vector<double> tax_error_bound;
  std::size_t nonmonotone_samples = 0;

  std::span<const double> rates_at(std::size_t r) const { return {rate.data() + r * samples, samples}; }
  std::span<const double> payments_at(std::size_t r) const { return {payment.data() + r * samples, samples}; }
  std::span<const double> errors_at(std::size_t r) const { return {tax_error_bound.data() + r * samples, samples}; }
  InterimEstimate estimate(std::size_t r) const;
};

/// Seed of draw k for user-conditional estimates: derive_seed(derive_seed(seed, user), k).
std::uint64_t interim_draw_seed(std::uint64_t seed, std::size_t user, std::size_t draw);

/// Fills an InterimTable. Draw k is generated from its own stream, so every
/// report in the grid sees identical draws of the others (common random
/// numbers). With a single user there is nothing to average and one
/// evaluation per report is replicated.
InterimTable estimate_interim_table(const Mechanism& mech, std::size_t user, std::vector<double> reports,
                                    std::size_t samples, std::uint64_t seed, bool with_payment = true);

InterimEstimate estimate_interim(const Mechanism& mech, std::size_t user, double report, std::size_t samples,
                                 std::uint64_t seed);

/// Expected revenue computed two ways on the same draws of theta.
struct RevenueEstimate {
  std::size_t samples = 0;
  double payment_revenue = 0.0;
  double payment_std_error = 0.0;
  double virtual_surplus = 0.0;
  double virtual_std_error = 0.0;
  /// Standard error of the per-draw difference payment - virtual surplus.
  double difference_std_error = 0.0;
  /// E[sum_i theta_i * rate_i], what a seller observing types could charge.
  double omniscient_bound = 0.0;
  double omniscient_std_error = 0.0;
  /// Mean over draws of the summed per-user tax error bounds.
  double tax_error_bound = 0.0;
  std::vector<double> user_tax_error_bound;
  std::size_t nonmonotone_samples = 0;

  /// |payment - virtual| <= tax bound + sigmas * difference std error.
  bool identity_holds(double sigmas = 3.0) const;
};

/// Draw k uses derive_seed(seed, k).
RevenueEstimate estimate_revenue(const Mechanism& mech, std::size_t samples, std::uint64_t seed);

}  // namespace spectramech

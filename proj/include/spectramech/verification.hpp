#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spectramech/mechanism.hpp"

namespace spectramech {

inline constexpr std::size_t kDefaultVerificationSamples = 4096;
inline constexpr std::size_t kDefaultVerificationGrid = 17;

struct VerificationSettings {
  std::size_t samples = kDefaultVerificationSamples;
  std::uint64_t seed = 0;
  /// Statistical slack in standard errors.
  double sigmas = 3.0;
  /// Extra tolerance added to every verdict; zero by default.
  double extra_tolerance = 0.0;
  /// Sub-intervals per report-grid interval used to integrate Q in the
  /// payment identity.
  std::size_t identity_refinement = 4;
};

/// Misreport gains of one user at one true type.
struct IcReport {
  std::size_t user = 0;
  double type = 0.0;
  std::vector<double> reports;
  /// U(type, r) and its standard error for each report r.
  std::vector<double> utility;
  std::vector<double> utility_std_error;
  /// U(type, r) - U(type, type) per report, with standard errors computed
  /// from per-draw differences.
  std::vector<double> gain;
  std::vector<double> gain_std_error;
  double best_gain = 0.0;
  double best_report = 0.0;
  double best_gain_std_error = 0.0;
  /// Largest mean tax error bound over the evaluated reports.
  double tax_error_bound = 0.0;
  /// Every gain must satisfy gain <= tax_error_bound + sigmas * its std error.
  double sigmas = 3.0;
  double extra_tolerance = 0.0;
  bool passed = false;
};

/// Truthful interim utility V(theta) on a type grid for one user.
struct IrReport {
  std::size_t user = 0;
  std::vector<double> types;
  std::vector<double> utility;
  std::vector<double> utility_std_error;
  double tax_error_bound = 0.0;
  double sigmas = 3.0;
  double extra_tolerance = 0.0;
  bool passed = false;
};

/// T(r) against r Q(r) - integral_{theta_min}^{r} Q(s) ds with K = 0.
struct IdentityReport {
  std::size_t user = 0;
  std::vector<double> reports;
  std::vector<double> payment;
  std::vector<double> rate;
  /// Mean of per-draw residuals and their standard errors.
  std::vector<double> residual;
  std::vector<double> residual_std_error;
  /// Mean tax error bound at each report.
  std::vector<double> tax_error_bound;
  /// Bound on the trapezoid error of the integral of Q at each report.
  std::vector<double> quadrature_bound;
  std::vector<double> tolerance;
  double sigmas = 3.0;
  double extra_tolerance = 0.0;
  bool passed = false;
};

/// Q(r) across a sorted report grid.
struct MonotoneReport {
  std::size_t user = 0;
  std::vector<double> reports;
  std::vector<double> rate;
  std::vector<double> rate_std_error;
  /// Q(r_{k+1}) - Q(r_k) and the std error of the per-draw difference.
  std::vector<double> step;
  std::vector<double> step_std_error;
  double sigmas = 3.0;
  double extra_tolerance = 0.0;
  bool passed = false;
};

/// Equispaced grid over the support of `user`.
std::vector<double> support_grid(const Mechanism& mech, std::size_t user, std::size_t points);

std::vector<IcReport> verify_ic(const Mechanism& mech, std::size_t user, std::span<const double> type_grid,
                                std::span<const double> report_grid, const VerificationSettings& settings);
/// Every user, `points` equispaced types and reports over each support.
std::vector<IcReport> verify_ic(const Mechanism& mech, std::size_t points, const VerificationSettings& settings);

IrReport verify_ir(const Mechanism& mech, std::size_t user, std::span<const double> type_grid,
                   const VerificationSettings& settings);
std::vector<IrReport> verify_ir(const Mechanism& mech, std::size_t points, const VerificationSettings& settings);

/// theta_min is added to the grid when missing.
IdentityReport verify_payment_identity(const Mechanism& mech, std::size_t user, std::span<const double> report_grid,
                                       const VerificationSettings& settings);
std::vector<IdentityReport> verify_payment_identity(const Mechanism& mech, std::size_t points,
                                                    const VerificationSettings& settings);

MonotoneReport verify_monotone_interim(const Mechanism& mech, std::size_t user, std::span<const double> report_grid,
                                       const VerificationSettings& settings);
std::vector<MonotoneReport> verify_monotone_interim(const Mechanism& mech, std::size_t points,
                                                    const VerificationSettings& settings);

/// All four checks for one user on one grid, sharing the interim tables:
/// types and reports are both `grid`, with theta_min added when missing.
struct UserVerification {
  std::vector<IcReport> ic;
  IrReport ir;
  IdentityReport identity;
  MonotoneReport monotone;

  bool passed() const;
};

UserVerification verify_user(const Mechanism& mech, std::size_t user, std::span<const double> grid,
                             const VerificationSettings& settings);

/// Re-evaluates a verdict from its stored numbers, optionally at another
/// extra tolerance. Used to check that loosening never turns pass into fail.
bool ic_verdict(const IcReport& r, double extra_tolerance);
bool ir_verdict(const IrReport& r, double extra_tolerance);
bool identity_verdict(const IdentityReport& r, double extra_tolerance);
bool monotone_verdict(const MonotoneReport& r, double extra_tolerance);

}  // namespace spectramech

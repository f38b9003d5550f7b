#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "spectramech/fd_mechanism.hpp"
#include "spectramech/mechanism.hpp"
#include "spectramech/ss_mechanism.hpp"
#include "spectramech/tax.hpp"
#include "spectramech/type_model.hpp"
#include "spectramech/verification.hpp"

namespace spectramech {

inline constexpr std::string_view kResultSchema = "spectramech/result-1";

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(UserTax, payment, rate, error_bound, nonmonotone_samples)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TaxResult, payment, rate, error_bound, nonmonotone_samples)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FdAllocation, bandwidth, virtual_types, rates, multiplier, kkt_residual,
                                   active_set, iterations)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FdOutcome, allocation, tax)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SsAllocation, power, virtual_types, rates, objective, restarts_used,
                                   best_restart, best_restart_seed, projected_residual, converged_restarts,
                                   local_optimum_only)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SsOutcome, allocation, tax)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ThresholdPayment, payment, base_amount, error_bound)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(InterimEstimate, user, report, samples, rate, rate_std_error, payment,
                                   payment_std_error, tax_error_bound, nonmonotone_samples)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RevenueEstimate, samples, payment_revenue, payment_std_error, virtual_surplus,
                                   virtual_std_error, difference_std_error, omniscient_bound,
                                   omniscient_std_error, tax_error_bound, user_tax_error_bound,
                                   nonmonotone_samples)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(IcReport, user, type, reports, utility, utility_std_error, gain,
                                   gain_std_error, best_gain, best_report, best_gain_std_error, tax_error_bound,
                                   sigmas, extra_tolerance, passed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(IrReport, user, types, utility, utility_std_error, tax_error_bound, sigmas,
                                   extra_tolerance, passed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(IdentityReport, user, reports, payment, rate, residual, residual_std_error,
                                   tax_error_bound, quadrature_bound, tolerance, sigmas, extra_tolerance, passed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MonotoneReport, user, reports, rate, rate_std_error, step, step_std_error,
                                   sigmas, extra_tolerance, passed)

void to_json(nlohmann::json& j, const RegularityResult& r);
void from_json(const nlohmann::json& j, RegularityResult& r);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// Comma-separated table with a header row; numbers use format_double.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(const std::vector<double>& row);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace spectramech

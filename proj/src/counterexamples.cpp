#include "spectramech/counterexamples.hpp"

#include <cmath>

#include "spectramech/errors.hpp"

namespace spectramech {

FlatFeeMechanism::FlatFeeMechanism(FdScenario scenario, double fee) : scenario_(std::move(scenario)), fee_(fee) {
  if (!std::isfinite(fee_)) throw ConfigError("fee must be finite");
}

UserOutcome FlatFeeMechanism::evaluate_user(std::size_t user, std::span<const double> reports,
                                            bool with_payment) const {
  const auto a = fd_allocate(scenario_, reports);
  UserOutcome o;
  o.rate = a.rates.at(user);
  if (with_payment) o.payment = fee_;
  return o;
}

std::vector<UserOutcome> FlatFeeMechanism::evaluate_all(std::span<const double> reports) const {
  const auto a = fd_allocate(scenario_, reports);
  std::vector<UserOutcome> out(a.rates.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].rate = a.rates[i];
    out[i].payment = fee_;
  }
  return out;
}

ReportProportionalMechanism::ReportProportionalMechanism(FdScenario scenario) : scenario_(std::move(scenario)) {
  const double share = scenario_.bandwidth() / static_cast<double>(scenario_.size());
  for (const auto& p : scenario_.physicals()) rates_.push_back(expected_rate(p, share));
}

UserOutcome ReportProportionalMechanism::evaluate_user(std::size_t user, std::span<const double> reports,
                                                       bool with_payment) const {
  if (reports.size() != rates_.size()) throw DomainError("type vector has the wrong dimension");
  UserOutcome o;
  o.rate = rates_.at(user);
  if (with_payment) o.payment = reports[user] * o.rate;
  return o;
}

}  // namespace spectramech

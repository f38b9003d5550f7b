#pragma once

#include <string>

#include "spectramech/fd_mechanism.hpp"

namespace spectramech {

/// Revenue-optimal FD allocation with a constant fee instead of the tax.
/// Over-reporting buys rate for free, so the verification harness should
/// reject it.
class FlatFeeMechanism final : public Mechanism {
 public:
  FlatFeeMechanism(FdScenario scenario, double fee);

  std::string name() const override { return "flat-fee"; }
  std::span<const TypeDistribution> type_distributions() const override {
    return scenario_.virtual_types().distributions();
  }
  UserOutcome evaluate_user(std::size_t user, std::span<const double> reports, bool with_payment) const override;
  std::vector<UserOutcome> evaluate_all(std::span<const double> reports) const override;

 private:
  FdScenario scenario_;
  double fee_;
};

/// Equal split W/N regardless of reports, charging each user its report
/// times its rate. Under-reporting lowers the bill at no cost in rate.
class ReportProportionalMechanism final : public Mechanism {
 public:
  explicit ReportProportionalMechanism(FdScenario scenario);

  std::string name() const override { return "report-proportional"; }
  std::span<const TypeDistribution> type_distributions() const override {
    return scenario_.virtual_types().distributions();
  }
  UserOutcome evaluate_user(std::size_t user, std::span<const double> reports, bool with_payment) const override;

 private:
  FdScenario scenario_;
  std::vector<double> rates_;
};

}  // namespace spectramech

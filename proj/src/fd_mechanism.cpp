#include "spectramech/fd_mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spectramech/errors.hpp"

namespace spectramech {

namespace {

std::vector<TypeDistribution> types_of(const std::vector<FdUser>& users) {
  std::vector<TypeDistribution> t;
  t.reserve(users.size());
  for (const auto& u : users) t.push_back(u.type);
  return t;
}

std::vector<FdUserPhysical> physicals_of(const std::vector<FdUser>& users) {
  std::vector<FdUserPhysical> p;
  p.reserve(users.size());
  for (const auto& u : users) {
    u.physical.validate();
    p.push_back(u.physical);
  }
  return p;
}

void check_types(const FdScenario& s, std::span<const double> types) {
  if (types.size() != s.size()) throw DomainError("type vector has the wrong dimension");
}

}  // namespace

FdScenario::FdScenario(double bandwidth, std::vector<FdUser> users, std::size_t regularity_grid,
                       bool allow_irregular)
    : bandwidth_(bandwidth),
      physical_(physicals_of(users)),
      virtual_(types_of(users), regularity_grid),
      regularity_grid_(regularity_grid),
      allow_irregular_(allow_irregular) {
  if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) throw ConfigError("bandwidth W must be positive");
  if (physical_.empty()) throw ConfigError("scenario needs at least one user");
}

void FdScenario::require_regular() const {
  if (allow_irregular_ || virtual_.certified()) return;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto& c = virtual_.regularity(i);
    if (!c.certified) {
      std::ostringstream os;
      os << "user " << i << ": virtual type is not increasing between " << c.violation->first << " and "
         << c.violation->second << " (regularity check failed; pass the override flag to run anyway)";
      throw RegularityError(os.str());
    }
  }
}

FdScenario FdScenario::with_bandwidth(double bandwidth) const {
  FdScenario copy = *this;
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw ConfigError("bandwidth W must be positive");
  copy.bandwidth_ = bandwidth;
  return copy;
}

FdScenario FdScenario::leading(std::size_t users) const {
  if (users == 0 || users > size()) throw DomainError("leading sub-scenario size out of range");
  std::vector<FdUser> u;
  for (std::size_t i = 0; i < users; ++i) u.push_back({physical_[i], type(i)});
  return FdScenario(bandwidth_, std::move(u), regularity_grid_, allow_irregular_);
}

FdAllocation fd_allocate(const FdScenario& s, std::span<const double> types, double multiplier_hint) {
  check_types(s, types);
  s.require_regular();
  FdAllocation a;
  a.virtual_types = s.virtual_types().evaluate(types);
  auto wf = water_fill(s.physicals(), a.virtual_types, s.bandwidth(), {}, multiplier_hint);
  a.bandwidth = std::move(wf.bandwidth);
  a.multiplier = wf.multiplier;
  a.kkt_residual = wf.kkt_residual;
  a.active_set = std::move(wf.active_set);
  a.iterations = wf.iterations;
  a.rates.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) a.rates[i] = expected_rate(s.physical(i), a.bandwidth[i]);
  return a;
}

double fd_objective(const FdScenario& s, std::span<const double> weights, std::span<const double> bandwidth) {
  double v = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) v += weights[i] * expected_rate(s.physical(i), bandwidth[i]);
  return v;
}

double fd_rate_at_report(const FdScenario& s, std::span<const double> types, std::size_t user, double report) {
  check_types(s, types);
  std::vector<double> t(types.begin(), types.end());
  t.at(user) = report;
  return fd_allocate(s, t).rates[user];
}

UserTax fd_user_payment(const FdScenario& s, std::span<const double> types, std::size_t user, std::size_t grid_m) {
  check_types(s, types);
  if (user >= s.size()) throw DomainError("user index out of range");
  std::vector<double> t(types.begin(), types.end());
  double hint = 0.0;
  // Grid points are visited in increasing order; each solve seeds the next.
  auto rate_at = [&](double report) {
    t[user] = report;
    const auto a = fd_allocate(s, t, hint);
    hint = a.multiplier;
    return a.rates[user];
  };
  return riemann_tax(types[user], s.type(user).min(), grid_m, rate_at);
}

TaxResult fd_payment(const FdScenario& s, std::span<const double> types, std::size_t grid_m) {
  check_types(s, types);
  if (grid_m < 1) throw ConfigError("tax grid needs at least one subinterval");
  TaxResult r;
  for (std::size_t i = 0; i < s.size(); ++i) r.push_back(fd_user_payment(s, types, i, grid_m));
  return r;
}

FdOutcome fd_run(const FdScenario& s, std::span<const double> types, std::size_t grid_m) {
  FdOutcome o;
  o.allocation = fd_allocate(s, types);
  o.tax = fd_payment(s, types, grid_m);
  return o;
}

double fd_threshold_report(const FdScenario& s, std::span<const double> types, std::size_t user, double rate_level,
                           double tolerance) {
  check_types(s, types);
  const auto& d = s.type(user);
  double lo = d.min();
  double hi = d.max();
  if (fd_rate_at_report(s, types, user, lo) >= rate_level) return lo;
  if (fd_rate_at_report(s, types, user, hi) < rate_level) return hi;
  const double width = tolerance * (d.max() - d.min());
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (fd_rate_at_report(s, types, user, mid) >= rate_level)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

ThresholdPayment fd_payment_via_threshold(const FdScenario& s, std::span<const double> types, std::size_t grid) {
  check_types(s, types);
  if (grid < 1) throw ConfigError("threshold integration grid needs at least one level");
  constexpr double kBisectionTolerance = 1e-12;
  ThresholdPayment out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double tmin = s.type(i).min();
    const double low_rate = fd_rate_at_report(s, types, i, tmin);
    const double high_rate = fd_rate_at_report(s, types, i, types[i]);
    const double base = tmin * low_rate;
    double integral = 0.0;
    double bound = 0.0;
    if (high_rate > low_rate) {
      const double dy = (high_rate - low_rate) / static_cast<double>(grid);
      for (std::size_t k = 0; k < grid; ++k) {
        const double y = low_rate + (static_cast<double>(k) + 0.5) * dy;
        integral += fd_threshold_report(s, types, i, y, kBisectionTolerance);
      }
      integral *= dy;
      const double width = s.type(i).max() - tmin;
      bound = dy * (types[i] - tmin) + (high_rate - low_rate) * kBisectionTolerance * width;
    }
    out.base_amount.push_back(base);
    out.payment.push_back(base + integral);
    out.error_bound.push_back(bound);
  }
  return out;
}

FdMechanism::FdMechanism(FdScenario scenario, std::size_t grid_m) : scenario_(std::move(scenario)), grid_m_(grid_m) {
  if (grid_m_ < 1) throw ConfigError("tax grid needs at least one subinterval");
}

UserOutcome FdMechanism::evaluate_user(std::size_t user, std::span<const double> reports, bool with_payment) const {
  UserOutcome o;
  if (!with_payment) {
    o.rate = fd_allocate(scenario_, reports).rates.at(user);
    return o;
  }
  const auto tax = fd_user_payment(scenario_, reports, user, grid_m_);
  o.rate = tax.rate;
  o.payment = tax.payment;
  o.tax_error_bound = tax.error_bound;
  o.nonmonotone_samples = tax.nonmonotone_samples;
  return o;
}

std::vector<UserOutcome> FdMechanism::evaluate_all(std::span<const double> reports) const {
  const auto tax = fd_payment(scenario_, reports, grid_m_);
  std::vector<UserOutcome> out(scenario_.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = {tax.rate[i], tax.payment[i], tax.error_bound[i], tax.nonmonotone_samples[i]};
  return out;
}

InterimEstimate fd_interim(const FdScenario& s, std::size_t user, double report, std::size_t samples,
                           std::uint64_t seed, std::size_t grid_m) {
  return estimate_interim(FdMechanism(s, grid_m), user, report, samples, seed);
}

RevenueEstimate fd_expected_revenue(const FdScenario& s, std::size_t samples, std::uint64_t seed,
                                    std::size_t grid_m) {
  return estimate_revenue(FdMechanism(s, grid_m), samples, seed);
}

}  // namespace spectramech

#include "spectramech/mechanism.hpp"

#include <algorithm>
#include <cmath>

#include "spectramech/errors.hpp"
#include "spectramech/parallel.hpp"
#include "spectramech/random.hpp"
#include "spectramech/stats.hpp"

namespace spectramech {

std::vector<UserOutcome> Mechanism::evaluate_all(std::span<const double> reports) const {
  std::vector<UserOutcome> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(evaluate_user(i, reports, true));
  return out;
}

InterimEstimate InterimTable::estimate(std::size_t r) const {
  InterimEstimate e;
  e.user = user;
  e.report = reports.at(r);
  e.samples = samples;
  const auto q = summarize(rates_at(r));
  e.rate = q.mean;
  e.rate_std_error = q.std_error;
  if (with_payment) {
    const auto t = summarize(payments_at(r));
    e.payment = t.mean;
    e.payment_std_error = t.std_error;
    e.tax_error_bound = summarize(errors_at(r)).mean;
  }
  e.nonmonotone_samples = nonmonotone_samples;
  return e;
}

std::uint64_t interim_draw_seed(std::uint64_t seed, std::size_t user, std::size_t draw) {
  return derive_seed(derive_seed(seed, user), draw);
}

InterimTable estimate_interim_table(const Mechanism& mech, std::size_t user, std::vector<double> reports,
                                    std::size_t samples, std::uint64_t seed, bool with_payment) {
  const auto types = mech.type_distributions();
  if (user >= types.size()) throw DomainError("user index out of range");
  if (samples < 2) throw DomainError("interim estimation needs at least two Monte Carlo samples");
  if (reports.empty()) throw DomainError("report grid is empty");
  for (double r : reports) {
    if (!(r >= types[user].min() && r <= types[user].max())) throw DomainError("report lies outside the type support");
  }

  InterimTable table;
  table.user = user;
  table.reports = std::move(reports);
  table.samples = samples;
  table.with_payment = with_payment;
  const std::size_t cells = table.reports.size() * samples;
  table.rate.assign(cells, 0.0);
  table.payment.assign(cells, 0.0);
  table.tax_error_bound.assign(cells, 0.0);
  std::vector<std::size_t> flags(samples, 0);

  const std::size_t distinct = types.size() == 1 ? 1 : samples;
  const std::size_t n = types.size();
  parallel_for(distinct, [&](std::size_t k) {
    std::vector<double> theta(n);
    draw_types(types, interim_draw_seed(seed, user, k), theta);
    for (std::size_t r = 0; r < table.reports.size(); ++r) {
      theta[user] = table.reports[r];
      const auto o = mech.evaluate_user(user, theta, with_payment);
      const std::size_t slot = r * samples + k;
      table.rate[slot] = o.rate;
      table.payment[slot] = o.payment;
      table.tax_error_bound[slot] = o.tax_error_bound;
      flags[k] += o.nonmonotone_samples;
    }
  });
  if (distinct == 1) {
    for (std::size_t r = 0; r < table.reports.size(); ++r) {
      const std::size_t base = r * samples;
      std::fill_n(table.rate.begin() + static_cast<std::ptrdiff_t>(base), samples, table.rate[base]);
      std::fill_n(table.payment.begin() + static_cast<std::ptrdiff_t>(base), samples, table.payment[base]);
      std::fill_n(table.tax_error_bound.begin() + static_cast<std::ptrdiff_t>(base), samples,
                  table.tax_error_bound[base]);
    }
  }
  for (auto f : flags) table.nonmonotone_samples += f;
  return table;
}

InterimEstimate estimate_interim(const Mechanism& mech, std::size_t user, double report, std::size_t samples,
                                 std::uint64_t seed) {
  return estimate_interim_table(mech, user, {report}, samples, seed, true).estimate(0);
}

bool RevenueEstimate::identity_holds(double sigmas) const {
  return std::abs(payment_revenue - virtual_surplus) <= tax_error_bound + sigmas * difference_std_error;
}

RevenueEstimate estimate_revenue(const Mechanism& mech, std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw DomainError("revenue estimation needs at least two Monte Carlo samples");
  const auto types = mech.type_distributions();
  const std::size_t n = types.size();

  std::vector<double> pay(samples), virt(samples), diff(samples), omni(samples), err(samples);
  std::vector<double> user_err(samples * n);
  std::vector<std::size_t> flags(samples, 0);
  parallel_for(samples, [&](std::size_t k) {
    std::vector<double> theta(n);
    draw_types(types, derive_seed(seed, k), theta);
    const auto outcome = mech.evaluate_all(theta);
    double p = 0.0, v = 0.0, o = 0.0, e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& u = outcome[i];
      p += u.payment;
      v += u.rate * virtual_type(types[i], theta[i]);
      o += u.rate * theta[i];
      e += u.tax_error_bound;
      user_err[k * n + i] = u.tax_error_bound;
      flags[k] += u.nonmonotone_samples;
    }
    pay[k] = p;
    virt[k] = v;
    diff[k] = p - v;
    omni[k] = o;
    err[k] = e;
  });

  RevenueEstimate r;
  r.samples = samples;
  const auto sp = summarize(pay);
  const auto sv = summarize(virt);
  const auto so = summarize(omni);
  r.payment_revenue = sp.mean;
  r.payment_std_error = sp.std_error;
  r.virtual_surplus = sv.mean;
  r.virtual_std_error = sv.std_error;
  r.difference_std_error = summarize(diff).std_error;
  r.omniscient_bound = so.mean;
  r.omniscient_std_error = so.std_error;
  r.tax_error_bound = summarize(err).mean;
  r.user_tax_error_bound.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < samples; ++k) s += user_err[k * n + i];
    r.user_tax_error_bound[i] = s / static_cast<double>(samples);
  }
  for (auto f : flags) r.nonmonotone_samples += f;
  return r;
}

}  // namespace spectramech

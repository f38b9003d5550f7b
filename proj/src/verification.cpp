#include "spectramech/verification.hpp"

#include <algorithm>
#include <cmath>

#include "spectramech/errors.hpp"
#include "spectramech/stats.hpp"
#include "spectramech/tax.hpp"

namespace spectramech {

namespace {

// Slack for comparisons of quantities computed by iterative solvers.
double float_slack(double magnitude) { return kMonotoneTolerance * std::max(1.0, std::abs(magnitude)); }

std::vector<double> sorted_union(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t index_of(const std::vector<double>& grid, double v) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), v);
  return static_cast<std::size_t>(it - grid.begin());
}

void check_grid(std::span<const double> g, const char* what) {
  if (g.empty()) throw DomainError(std::string(what) + " grid is empty");
}

double max_mean_error(const InterimTable& table) {
  double e = 0.0;
  if (!table.with_payment) return e;
  for (std::size_t r = 0; r < table.reports.size(); ++r) e = std::max(e, summarize(table.errors_at(r)).mean);
  return e;
}

}  // namespace

std::vector<double> support_grid(const Mechanism& mech, std::size_t user, std::size_t points) {
  const auto& d = mech.type_distributions()[user];
  return linspace(d.min(), d.max(), std::max<std::size_t>(points, 1));
}

bool ic_verdict(const IcReport& r, double extra_tolerance) {
  for (std::size_t k = 0; k < r.gain.size(); ++k) {
    const double tol = r.tax_error_bound + r.sigmas * r.gain_std_error[k] + extra_tolerance +
                       float_slack(r.utility[k]);
    if (!(r.gain[k] <= tol)) return false;
  }
  return true;
}

bool ir_verdict(const IrReport& r, double extra_tolerance) {
  for (std::size_t k = 0; k < r.utility.size(); ++k) {
    const double tol = r.tax_error_bound + r.sigmas * r.utility_std_error[k] + extra_tolerance;
    if (!(r.utility[k] >= -tol)) return false;
  }
  return true;
}

bool identity_verdict(const IdentityReport& r, double extra_tolerance) {
  for (std::size_t k = 0; k < r.residual.size(); ++k) {
    if (!(std::abs(r.residual[k]) <= r.tolerance[k] + extra_tolerance)) return false;
  }
  return true;
}

bool monotone_verdict(const MonotoneReport& r, double extra_tolerance) {
  for (std::size_t k = 0; k < r.step.size(); ++k) {
    const double tol = r.sigmas * r.step_std_error[k] + extra_tolerance + float_slack(r.rate[k]);
    if (!(r.step[k] >= -tol)) return false;
  }
  return true;
}

namespace {

std::vector<IcReport> ic_from_table(const InterimTable& table, std::span<const double> type_grid,
                                    std::span<const double> report_grid, const VerificationSettings& settings) {
  const double eps = max_mean_error(table);
  const std::size_t n = table.samples;
  std::vector<IcReport> out;
  std::vector<double> u(n), truthful(n), diff(n);
  for (double theta : type_grid) {
    IcReport rep;
    rep.user = table.user;
    rep.type = theta;
    rep.reports.assign(report_grid.begin(), report_grid.end());
    rep.tax_error_bound = eps;
    rep.sigmas = settings.sigmas;
    rep.extra_tolerance = settings.extra_tolerance;
    const auto ti = index_of(table.reports, theta);
    const auto q_true = table.rates_at(ti);
    const auto t_true = table.payments_at(ti);
    for (std::size_t k = 0; k < n; ++k) truthful[k] = theta * q_true[k] - t_true[k];

    rep.best_gain = -INFINITY;
    for (double r : report_grid) {
      const auto ri = index_of(table.reports, r);
      const auto q = table.rates_at(ri);
      const auto t = table.payments_at(ri);
      for (std::size_t k = 0; k < n; ++k) {
        u[k] = theta * q[k] - t[k];
        diff[k] = ri == ti ? 0.0 : u[k] - truthful[k];
      }
      const auto su = summarize(u);
      const auto sd = summarize(diff);
      rep.utility.push_back(su.mean);
      rep.utility_std_error.push_back(su.std_error);
      rep.gain.push_back(sd.mean);
      rep.gain_std_error.push_back(sd.std_error);
      if (sd.mean > rep.best_gain) {
        rep.best_gain = sd.mean;
        rep.best_report = r;
        rep.best_gain_std_error = sd.std_error;
      }
    }
    rep.passed = ic_verdict(rep, settings.extra_tolerance);
    out.push_back(std::move(rep));
  }
  return out;
}

IrReport ir_from_table(const InterimTable& table, std::span<const double> type_grid,
                       const VerificationSettings& settings) {
  IrReport rep;
  rep.user = table.user;
  rep.tax_error_bound = max_mean_error(table);
  rep.sigmas = settings.sigmas;
  rep.extra_tolerance = settings.extra_tolerance;
  std::vector<double> v(table.samples);
  for (double theta : type_grid) {
    const auto ti = index_of(table.reports, theta);
    const auto q = table.rates_at(ti);
    const auto t = table.payments_at(ti);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = theta * q[k] - t[k];
    const auto s = summarize(v);
    rep.types.push_back(theta);
    rep.utility.push_back(s.mean);
    rep.utility_std_error.push_back(s.std_error);
  }
  rep.passed = ir_verdict(rep, settings.extra_tolerance);
  return rep;
}

// Grid with theta_min prepended, and its refinement for integrating Q.
std::vector<double> identity_grid(const Mechanism& mech, std::size_t user, std::span<const double> report_grid) {
  if (user >= mech.size()) throw DomainError("user index out of range");
  const double first[] = {mech.type_distributions()[user].min()};
  return sorted_union(report_grid, first);
}

std::vector<double> refine_grid(const std::vector<double>& grid, std::size_t refinement) {
  const std::size_t refine = std::max<std::size_t>(refinement, 1);
  std::vector<double> fine;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    for (std::size_t j = 0; j < refine; ++j)
      fine.push_back(grid[k] + (grid[k + 1] - grid[k]) * (static_cast<double>(j) / static_cast<double>(refine)));
  }
  fine.push_back(grid.back());
  return sorted_union(fine, {});
}

// `pay` starts at theta_min; `rates` covers the same range on a finer grid.
IdentityReport identity_from_tables(const InterimTable& pay, const InterimTable& rates,
                                    const VerificationSettings& settings) {
  const std::size_t n = pay.samples;
  const auto& grid = pay.reports;
  const auto& fine = rates.reports;
  IdentityReport rep;
  rep.user = pay.user;
  rep.reports = grid;
  rep.sigmas = settings.sigmas;
  rep.extra_tolerance = settings.extra_tolerance;

  std::vector<double> integral(n, 0.0), variation(n, 0.0), residual(n);
  std::size_t fine_pos = 0;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    // Advance the per-draw trapezoid integral up to grid[r].
    while (fine_pos + 1 < fine.size() && fine[fine_pos + 1] <= grid[r]) {
      const double h = fine[fine_pos + 1] - fine[fine_pos];
      const auto a = rates.rates_at(fine_pos);
      const auto b = rates.rates_at(fine_pos + 1);
      for (std::size_t k = 0; k < n; ++k) {
        integral[k] += 0.5 * h * (a[k] + b[k]);
        variation[k] += 0.5 * h * std::abs(b[k] - a[k]);
      }
      ++fine_pos;
    }
    const auto q = pay.rates_at(r);
    const auto t = pay.payments_at(r);
    double magnitude = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      residual[k] = t[k] - (grid[r] * q[k] - integral[k]);
      magnitude = std::max(magnitude, std::abs(t[k]) + std::abs(grid[r] * q[k]));
    }
    const auto s = summarize(residual);
    const double eps = summarize(pay.errors_at(r)).mean;
    const double quad = summarize(variation).mean;
    rep.payment.push_back(summarize(t).mean);
    rep.rate.push_back(summarize(q).mean);
    rep.residual.push_back(s.mean);
    rep.residual_std_error.push_back(s.std_error);
    rep.tax_error_bound.push_back(eps);
    rep.quadrature_bound.push_back(quad);
    rep.tolerance.push_back(eps + quad + settings.sigmas * s.std_error + float_slack(magnitude));
  }
  rep.passed = identity_verdict(rep, settings.extra_tolerance);
  return rep;
}

MonotoneReport monotone_from_table(const InterimTable& table, const VerificationSettings& settings) {
  MonotoneReport rep;
  rep.user = table.user;
  rep.reports = table.reports;
  rep.sigmas = settings.sigmas;
  rep.extra_tolerance = settings.extra_tolerance;
  std::vector<double> diff(table.samples);
  for (std::size_t r = 0; r < table.reports.size(); ++r) {
    const auto s = summarize(table.rates_at(r));
    rep.rate.push_back(s.mean);
    rep.rate_std_error.push_back(s.std_error);
    if (r == 0) continue;
    const auto a = table.rates_at(r - 1);
    const auto b = table.rates_at(r);
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = b[k] - a[k];
    const auto d = summarize(diff);
    rep.step.push_back(d.mean);
    rep.step_std_error.push_back(d.std_error);
  }
  rep.passed = monotone_verdict(rep, settings.extra_tolerance);
  return rep;
}

}  // namespace

std::vector<IcReport> verify_ic(const Mechanism& mech, std::size_t user, std::span<const double> type_grid,
                                std::span<const double> report_grid, const VerificationSettings& settings) {
  check_grid(type_grid, "type");
  check_grid(report_grid, "report");
  const auto table = estimate_interim_table(mech, user, sorted_union(type_grid, report_grid), settings.samples,
                                            settings.seed, true);
  return ic_from_table(table, type_grid, report_grid, settings);
}

std::vector<IcReport> verify_ic(const Mechanism& mech, std::size_t points, const VerificationSettings& settings) {
  std::vector<IcReport> all;
  for (std::size_t i = 0; i < mech.size(); ++i) {
    const auto grid = support_grid(mech, i, points);
    auto part = verify_ic(mech, i, grid, grid, settings);
    all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return all;
}

IrReport verify_ir(const Mechanism& mech, std::size_t user, std::span<const double> type_grid,
                   const VerificationSettings& settings) {
  check_grid(type_grid, "type");
  const auto table =
      estimate_interim_table(mech, user, sorted_union(type_grid, {}), settings.samples, settings.seed, true);
  return ir_from_table(table, type_grid, settings);
}

std::vector<IrReport> verify_ir(const Mechanism& mech, std::size_t points, const VerificationSettings& settings) {
  std::vector<IrReport> out;
  for (std::size_t i = 0; i < mech.size(); ++i) out.push_back(verify_ir(mech, i, support_grid(mech, i, points), settings));
  return out;
}

IdentityReport verify_payment_identity(const Mechanism& mech, std::size_t user, std::span<const double> report_grid,
                                       const VerificationSettings& settings) {
  check_grid(report_grid, "report");
  const auto grid = identity_grid(mech, user, report_grid);
  const auto pay = estimate_interim_table(mech, user, grid, settings.samples, settings.seed, true);
  const auto rates = estimate_interim_table(mech, user, refine_grid(grid, settings.identity_refinement),
                                            settings.samples, settings.seed, false);
  return identity_from_tables(pay, rates, settings);
}

std::vector<IdentityReport> verify_payment_identity(const Mechanism& mech, std::size_t points,
                                                    const VerificationSettings& settings) {
  std::vector<IdentityReport> out;
  for (std::size_t i = 0; i < mech.size(); ++i)
    out.push_back(verify_payment_identity(mech, i, support_grid(mech, i, points), settings));
  return out;
}

MonotoneReport verify_monotone_interim(const Mechanism& mech, std::size_t user, std::span<const double> report_grid,
                                       const VerificationSettings& settings) {
  check_grid(report_grid, "report");
  const auto table =
      estimate_interim_table(mech, user, sorted_union(report_grid, {}), settings.samples, settings.seed, false);
  return monotone_from_table(table, settings);
}

std::vector<MonotoneReport> verify_monotone_interim(const Mechanism& mech, std::size_t points,
                                                    const VerificationSettings& settings) {
  std::vector<MonotoneReport> out;
  for (std::size_t i = 0; i < mech.size(); ++i)
    out.push_back(verify_monotone_interim(mech, i, support_grid(mech, i, points), settings));
  return out;
}

bool UserVerification::passed() const {
  for (const auto& r : ic)
    if (!r.passed) return false;
  return ir.passed && identity.passed && monotone.passed;
}

UserVerification verify_user(const Mechanism& mech, std::size_t user, std::span<const double> grid,
                             const VerificationSettings& settings) {
  check_grid(grid, "report");
  const auto full = identity_grid(mech, user, grid);
  const auto pay = estimate_interim_table(mech, user, full, settings.samples, settings.seed, true);
  const auto rates = estimate_interim_table(mech, user, refine_grid(full, settings.identity_refinement),
                                            settings.samples, settings.seed, false);
  UserVerification out;
  out.ic = ic_from_table(pay, grid, grid, settings);
  out.ir = ir_from_table(pay, grid, settings);
  out.identity = identity_from_tables(pay, rates, settings);
  out.monotone = monotone_from_table(pay, settings);
  return out;
}

}  // namespace spectramech

#include "spectramech/water_filling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spectramech/errors.hpp"

namespace spectramech {

namespace {

struct Share {
  double bandwidth = 0.0;
  double curvature = 0.0;  // psi'' at the last evaluated point
};

// Solves w psi'(x) = level on (0, budget]; returns budget when even the full
// budget leaves the weighted slope above the level.
Share solve_share(const FdUserPhysical& user, double weight, double level, double budget, double start,
                  const WaterFillingOptions& opt) {
  const auto full = expected_rate_slope_curvature(user, budget);
  if (weight * full.slope >= level) return {budget, full.curvature};
  // Shares below this are negligible against the budget tolerance.
  const double tiny = budget * 1e-18;
  if (weight * expected_rate_slope_curvature(user, tiny).slope <= level) return {0.0, 0.0};

  double lo = tiny;
  double hi = budget;
  double x = (start > 0.0 && start < budget) ? start : 0.5 * budget;
  for (std::size_t iter = 0; iter < opt.max_iterations; ++iter) {
    const auto sc = expected_rate_slope_curvature(user, x);
    const double phi = weight * sc.slope - level;
    if (phi == 0.0) return {x, sc.curvature};
    if (phi > 0.0)
      lo = x;
    else
      hi = x;
    // psi' behaves like -log x near zero, so Newton runs in log x.
    const double log_step = -phi / (x * weight * sc.curvature);
    double next = std::abs(log_step) < 30.0 ? x * std::exp(log_step) : -1.0;
    if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
    if (std::abs(next - x) <= opt.bandwidth_tolerance * x || hi - lo <= opt.bandwidth_tolerance * hi)
      return {next, sc.curvature};
    x = next;
  }
  std::ostringstream os;
  os << "bandwidth search did not converge for level " << level << " (bracket [" << lo << ", " << hi << "])";
  throw SolverError(os.str());
}

}  // namespace

WaterFillingResult water_fill(std::span<const FdUserPhysical> users, std::span<const double> weights, double budget,
                              const WaterFillingOptions& opt, double multiplier_hint) {
  if (users.size() != weights.size()) throw DomainError("weights and users differ in length");
  if (!(budget > 0.0)) throw DomainError("budget must be positive");

  WaterFillingResult out;
  out.bandwidth.assign(users.size(), 0.0);
  for (std::size_t i = 0; i < users.size(); ++i)
    if (weights[i] > 0.0) out.active_set.push_back(i);
  const auto& active = out.active_set;
  if (active.empty()) return out;

  if (active.size() == 1) {
    const auto i = active.front();
    out.bandwidth[i] = budget;
    out.multiplier = weights[i] * expected_rate_derivative(users[i], budget).value();
    return out;
  }

  // Bracket: at lam_hi every share is at most the floor, at lam_lo every share
  // is at least budget / |active|.
  const double floor = budget * 1e-9;
  const double even = budget / static_cast<double>(active.size());
  double lam_lo = INFINITY;
  double lam_hi = 0.0;
  for (auto i : active) {
    lam_hi = std::max(lam_hi, weights[i] * expected_rate_derivative(users[i], floor).value());
    lam_lo = std::min(lam_lo, weights[i] * expected_rate_derivative(users[i], even).value());
  }
  double lam = (multiplier_hint > lam_lo && multiplier_hint < lam_hi) ? multiplier_hint : std::sqrt(lam_lo * lam_hi);

  std::vector<double> x(users.size(), 0.0);
  for (auto i : active) x[i] = even;
  bool converged = false;
  for (std::size_t iter = 0; iter < opt.max_iterations; ++iter) {
    out.iterations = iter + 1;
    double excess = -budget;
    double d_excess = 0.0;  // d(sum x)/d(lambda)
    for (auto i : active) {
      const auto share = solve_share(users[i], weights[i], lam, budget, x[i], opt);
      x[i] = share.bandwidth;
      excess += share.bandwidth;
      if (share.bandwidth > 0.0 && share.bandwidth < budget) d_excess += 1.0 / (weights[i] * share.curvature);
    }
    if (std::abs(excess) <= opt.budget_tolerance * budget) {
      converged = true;
      break;
    }
    if (excess > 0.0)
      lam_lo = lam;
    else
      lam_hi = lam;
    if (lam_hi <= lam_lo * (1.0 + 1e-15)) {
      converged = true;
      break;
    }
    double next = -1.0;
    if (d_excess < 0.0) {
      const double log_step = -excess / (lam * d_excess);
      if (std::abs(log_step) < 30.0) next = lam * std::exp(log_step);
    }
    if (!(next > lam_lo && next < lam_hi)) next = std::sqrt(lam_lo * lam_hi);
    lam = next;
  }
  if (!converged) {
    std::ostringstream os;
    os << "water-filling multiplier search did not converge within " << opt.max_iterations
       << " iterations (bracket [" << lam_lo << ", " << lam_hi << "])";
    throw SolverError(os.str());
  }

  double total = 0.0;
  for (auto i : active) total += x[i];
  const double scale = budget / total;
  for (auto i : active) out.bandwidth[i] = x[i] * scale;
  out.multiplier = lam;
  for (auto i : active) {
    if (out.bandwidth[i] == 0.0) continue;  // share below 1e-18 of the budget
    const double slope = weights[i] * expected_rate_derivative(users[i], out.bandwidth[i]).value();
    out.kkt_residual = std::max(out.kkt_residual, std::abs(slope - lam) / lam);
  }
  return out;
}

}  // namespace spectramech

#include "spectramech/ss_mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spectramech/errors.hpp"
#include "spectramech/parallel.hpp"
#include "spectramech/random.hpp"
#include "spectramech/simplex_projection.hpp"

namespace spectramech {

SsScenario::SsScenario(double total_power, SsPhysical physical, std::vector<TypeDistribution> types,
                       std::size_t regularity_grid, bool allow_irregular)
    : total_power_(total_power),
      physical_(std::move(physical)),
      virtual_(std::move(types), regularity_grid),
      regularity_grid_(regularity_grid),
      allow_irregular_(allow_irregular) {
  if (!(total_power_ > 0.0) || !std::isfinite(total_power_)) throw ConfigError("total power must be positive");
  if (virtual_.size() != physical_.size())
    throw ConfigError("number of type distributions differs from the gain matrix dimension");
}

void SsScenario::require_regular() const {
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

SsScenario SsScenario::with_total_power(double total_power) const {
  SsScenario copy = *this;
  if (!(total_power > 0.0) || !std::isfinite(total_power)) throw ConfigError("total power must be positive");
  copy.total_power_ = total_power;
  return copy;
}

SsScenario SsScenario::leading(std::size_t users) const {
  std::vector<TypeDistribution> t;
  for (std::size_t i = 0; i < users && i < size(); ++i) t.push_back(type(i));
  return SsScenario(total_power_, physical_.leading(users), std::move(t), regularity_grid_, allow_irregular_);
}

double ss_objective(const SsPhysical& phys, std::span<const double> weights, std::span<const double> power) {
  double v = 0.0;
  for (std::size_t i = 0; i < phys.size(); ++i) {
    if (weights[i] == 0.0) continue;
    v += weights[i] * interference_rate(phys, power, i);
  }
  return v;
}

std::vector<double> ss_objective_gradient(const SsPhysical& phys, std::span<const double> weights,
                                          std::span<const double> power) {
  std::vector<double> g(phys.size(), 0.0);
  for (std::size_t i = 0; i < phys.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const auto gi = interference_rate_gradient(phys, power, i);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += weights[i] * gi[j];
  }
  return g;
}

namespace {

struct LocalRun {
  std::vector<double> power;
  double objective = 0.0;
  double residual = 0.0;
  bool finished = false;  // converged, or no further ascent possible in floating point
};

class AscentProblem {
 public:
  AscentProblem(const SsPhysical& phys, double budget, std::span<const double> weights,
                const SsSolverOptions& opt)
      : phys_(phys), budget_(budget), weights_(weights), opt_(opt) {
    for (double w : weights) scale_ += std::abs(w);
    scale_ *= phys.bandwidth();
  }

  // Objective and gradient in units of the natural objective scale, with the
  // gradient taken with respect to x / budget.
  double value(std::span<const double> x) const { return ss_objective(phys_, weights_, x) / scale_; }
  std::vector<double> gradient(std::span<const double> x) const {
    auto g = ss_objective_gradient(phys_, weights_, x);
    for (std::size_t j = 0; j < g.size(); ++j) {
      g[j] *= budget_ / scale_;
      if (!std::isfinite(g[j])) {
        std::ostringstream os;
        os << "objective gradient is not finite at power (";
        for (std::size_t k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
        os << ")";
        throw NumericalError(os.str());
      }
    }
    return g;
  }

  double residual(std::span<const double> x, std::span<const double> g) const {
    std::vector<double> y(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) y[j] = x[j] / budget_ + g[j];
    project_capped_simplex(y, 1.0);
    double r = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) r = std::max(r, std::abs(y[j] - x[j] / budget_));
    return r;
  }

  LocalRun ascend(std::vector<double> x) const {
    LocalRun run;
    double f = value(x);
    double step = 1.0;
    std::vector<double> trial(x.size()), prev_x, prev_g;
    for (std::size_t it = 0; it < opt_.max_iterations; ++it) {
      const auto g = gradient(x);
      run.residual = residual(x, g);
      if (run.residual <= opt_.residual_tolerance) {
        run.finished = true;
        break;
      }
      // Spectral (Barzilai-Borwein) trial step when the last move saw negative
      // curvature along itself; otherwise grow the previous step.
      double ss = 0.0, sy = 0.0;
      if (!prev_x.empty()) {
        for (std::size_t j = 0; j < x.size(); ++j) {
          const double dx = (x[j] - prev_x[j]) / budget_;
          ss += dx * dx;
          sy -= dx * (g[j] - prev_g[j]);
        }
      }
      step = sy > 0.0 ? std::clamp(ss / sy, 1e-10, 1e8) : std::min(step * 2.0, 1e8);
      prev_x = x;
      prev_g = g;
      bool accepted = false;
      double f_trial = f;
      while (step > 1e-20) {
        for (std::size_t j = 0; j < x.size(); ++j) trial[j] = x[j] + step * budget_ * g[j];
        project_capped_simplex(trial, budget_);
        double predicted = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) predicted += g[j] * (trial[j] - x[j]) / budget_;
        if (!(predicted > 0.0)) break;
        f_trial = value(trial);
        if (f_trial - f >= opt_.armijo * predicted) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        // Ascent direction exhausted at machine precision.
        run.finished = true;
        break;
      }
      x.swap(trial);
      f = f_trial;
    }
    if (!run.finished) run.residual = residual(x, gradient(x));
    run.power = std::move(x);
    run.objective = f * scale_;
    return run;
  }

 private:
  const SsPhysical& phys_;
  double budget_;
  std::span<const double> weights_;
  const SsSolverOptions& opt_;
  double scale_ = 0.0;
};

}  // namespace

SsAllocation ss_allocate_weights(const SsPhysical& phys, double total_power, std::span<const double> weights,
                                 const SsSolverOptions& options, std::uint64_t seed) {
  const std::size_t n = phys.size();
  if (weights.size() != n) throw DomainError("weight vector has the wrong dimension");
  if (!(total_power > 0.0)) throw DomainError("total power must be positive");

  SsAllocation a;
  a.virtual_types.assign(weights.begin(), weights.end());
  a.power.assign(n, 0.0);
  if (std::none_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; })) {
    // Every term is non-positive and zero power attains 0.
    a.rates.assign(n, 0.0);
    a.converged_restarts = 1;
    a.restarts_used = 1;
    return a;
  }

  const std::size_t starts = n + 1 + options.restarts;
  std::vector<LocalRun> runs(starts);
  AscentProblem problem(phys, total_power, weights, options);
  parallel_for(starts, [&](std::size_t k) {
    std::vector<double> x(n, 0.0);
    if (k == 0) {
      std::fill(x.begin(), x.end(), total_power / static_cast<double>(n));
    } else if (k <= n) {
      x[k - 1] = total_power;
    } else {
      // Uniform on the simplex-with-slack: normalized exponentials with one
      // extra slack coordinate.
      RandomStream rng(derive_seed(seed, k));
      double total = 0.0;
      std::vector<double> e(n + 1);
      for (auto& v : e) {
        v = -std::log(rng.open_uniform());
        total += v;
      }
      for (std::size_t j = 0; j < n; ++j) x[j] = total_power * e[j] / total;
    }
    runs[k] = problem.ascend(std::move(x));
  });

  std::size_t best = starts;
  for (std::size_t k = 0; k < starts; ++k) {
    if (!runs[k].finished) continue;
    ++a.converged_restarts;
    if (best == starts || runs[k].objective > runs[best].objective) best = k;
  }
  if (best == starts) {
    std::ostringstream os;
    double least = runs[0].residual;
    for (const auto& r : runs) least = std::min(least, r.residual);
    os.precision(17);
    os << "projected gradient ascent hit the iteration cap (" << options.max_iterations << ") on all " << starts
       << " starts (weights";
    for (double w : weights) os << ' ' << w;
    os << "; smallest residual " << least << ")";
    throw SolverError(os.str());
  }
  a.restarts_used = starts;
  a.best_restart = best;
  a.best_restart_seed = derive_seed(seed, best);
  a.power = runs[best].power;
  a.objective = runs[best].objective;
  a.projected_residual = runs[best].residual;
  a.rates.resize(n);
  for (std::size_t i = 0; i < n; ++i) a.rates[i] = interference_rate(phys, a.power, i);
  return a;
}

SsAllocation ss_allocate(const SsScenario& s, std::span<const double> types, const SsSolverOptions& options,
                         std::uint64_t seed) {
  if (types.size() != s.size()) throw DomainError("type vector has the wrong dimension");
  s.require_regular();
  const auto w = s.virtual_types().evaluate(types);
  auto a = ss_allocate_weights(s.physical(), s.total_power(), w, options, seed);
  return a;
}

UserTax ss_user_payment(const SsScenario& s, std::span<const double> types, std::size_t user, std::size_t grid_m,
                        const SsSolverOptions& options, std::uint64_t seed) {
  if (types.size() != s.size()) throw DomainError("type vector has the wrong dimension");
  if (user >= s.size()) throw DomainError("user index out of range");
  std::vector<double> t(types.begin(), types.end());
  auto rate_at = [&](double report) {
    t[user] = report;
    return ss_allocate(s, t, options, seed).rates[user];
  };
  return riemann_tax(types[user], s.type(user).min(), grid_m, rate_at);
}

TaxResult ss_payment(const SsScenario& s, std::span<const double> types, std::size_t grid_m,
                     const SsSolverOptions& options, std::uint64_t seed) {
  if (grid_m < 1) throw ConfigError("tax grid needs at least one subinterval");
  TaxResult r;
  for (std::size_t i = 0; i < s.size(); ++i) r.push_back(ss_user_payment(s, types, i, grid_m, options, seed));
  return r;
}

SsOutcome ss_run(const SsScenario& s, std::span<const double> types, std::size_t grid_m,
                 const SsSolverOptions& options, std::uint64_t seed) {
  SsOutcome o;
  o.allocation = ss_allocate(s, types, options, seed);
  o.tax = ss_payment(s, types, grid_m, options, seed);
  return o;
}

SsMechanism::SsMechanism(SsScenario scenario, std::size_t grid_m, SsSolverOptions options,
                         std::uint64_t solver_seed)
    : scenario_(std::move(scenario)), grid_m_(grid_m), options_(options), solver_seed_(solver_seed) {
  if (grid_m_ < 1) throw ConfigError("tax grid needs at least one subinterval");
}

UserOutcome SsMechanism::evaluate_user(std::size_t user, std::span<const double> reports, bool with_payment) const {
  UserOutcome o;
  if (!with_payment) {
    o.rate = ss_allocate(scenario_, reports, options_, solver_seed_).rates.at(user);
    return o;
  }
  const auto tax = ss_user_payment(scenario_, reports, user, grid_m_, options_, solver_seed_);
  o.rate = tax.rate;
  o.payment = tax.payment;
  o.tax_error_bound = tax.error_bound;
  o.nonmonotone_samples = tax.nonmonotone_samples;
  return o;
}

std::vector<UserOutcome> SsMechanism::evaluate_all(std::span<const double> reports) const {
  const auto tax = ss_payment(scenario_, reports, grid_m_, options_, solver_seed_);
  std::vector<UserOutcome> out(scenario_.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = {tax.rate[i], tax.payment[i], tax.error_bound[i], tax.nonmonotone_samples[i]};
  return out;
}

InterimEstimate ss_interim(const SsScenario& s, std::size_t user, double report, std::size_t samples,
                           std::uint64_t seed, std::size_t grid_m, const SsSolverOptions& options,
                           std::uint64_t solver_seed) {
  return estimate_interim(SsMechanism(s, grid_m, options, solver_seed), user, report, samples, seed);
}

RevenueEstimate ss_expected_revenue(const SsScenario& s, std::size_t samples, std::uint64_t seed,
                                    std::size_t grid_m, const SsSolverOptions& options, std::uint64_t solver_seed) {
  return estimate_revenue(SsMechanism(s, grid_m, options, solver_seed), samples, seed);
}

}  // namespace spectramech

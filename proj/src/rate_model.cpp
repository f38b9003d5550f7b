#include "spectramech/rate_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spectramech/errors.hpp"
#include "spectramech/quadrature.hpp"

namespace spectramech {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be positive and finite, got " << v;
    throw ConfigError(os.str());
  }
}

// log(1 + z) - z / (1 + z), accurate for small z where the two terms cancel.
double slope_term(double z) {
  if (z < 1e-3) {
    double sum = 0.0;
    double zn = z * z;
    for (int n = 2; n <= 9; ++n) {
      const double term = static_cast<double>(n - 1) * zn / static_cast<double>(n);
      sum += (n % 2 == 0) ? term : -term;
      zn *= z;
    }
    return sum;
  }
  return std::log1p(z) - z / (1.0 + z);
}

constexpr int kGradingLevels = 12;

double snr_scale(const FdUserPhysical& user) { return user.transmit_power / user.noise_density; }

void require_finite(double v, const char* op, double x) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << op << " produced a non-finite value at bandwidth " << x;
    throw NumericalError(os.str());
  }
}

}  // namespace

GainDistribution::GainDistribution(Kind kind, std::vector<GainPoint> nodes, double lo, double hi,
                                   std::string label)
    : kind_(kind), nodes_(std::move(nodes)), lo_(lo), hi_(hi), label_(std::move(label)) {}

GainDistribution GainDistribution::deterministic(double gain) {
  require_positive(gain, "gain");
  return GainDistribution(Kind::deterministic, {{gain, 1.0}}, gain, gain, "deterministic");
}

GainDistribution GainDistribution::discrete(std::vector<GainPoint> atoms) {
  if (atoms.empty()) throw ConfigError("discrete gain distribution needs at least one atom");
  double mass = 0.0;
  for (const auto& a : atoms) {
    require_positive(a.gain, "gain");
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) throw ConfigError("gain probabilities must be non-negative");
    mass += a.weight;
  }
  if (std::abs(mass - 1.0) > kDiscreteMassTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "gain probabilities sum to " << mass << ", expected 1";
    throw ConfigError(os.str());
  }
  const auto [lo, hi] = std::minmax_element(atoms.begin(), atoms.end(),
                                            [](const GainPoint& a, const GainPoint& b) { return a.gain < b.gain; });
  const double lo_gain = lo->gain;
  const double hi_gain = hi->gain;
  return GainDistribution(Kind::discrete, std::move(atoms), lo_gain, hi_gain, "discrete");
}

GainDistribution GainDistribution::continuous(const std::function<double(double)>& density,
                                              std::vector<double> breakpoints, std::size_t order,
                                              std::string label) {
  if (breakpoints.size() < 2) throw ConfigError("continuous gain support needs at least two breakpoints");
  if (!(breakpoints.front() >= 0.0) || !std::isfinite(breakpoints.back()))
    throw ConfigError("gain support must be a finite subset of [0, inf)");
  for (std::size_t k = 1; k < breakpoints.size(); ++k) {
    if (!(breakpoints[k] > breakpoints[k - 1])) throw ConfigError("gain support breakpoints must be increasing");
  }
  // x log(1 + c h / x) is nearly singular at h = -N0 x / P, just left of the
  // support when it starts near zero. Panels of the first piece shrink
  // geometrically toward the lower end until they are no wider than their
  // distance from the origin.
  std::vector<double> edges{breakpoints.front()};
  {
    const double lo = breakpoints[0];
    std::vector<double> graded;
    double span = breakpoints[1] - lo;
    for (int level = 0; level < kGradingLevels && span > lo; ++level) {
      span /= 4.0;
      graded.push_back(lo + span);
    }
    edges.insert(edges.end(), graded.rbegin(), graded.rend());
    edges.insert(edges.end(), breakpoints.begin() + 1, breakpoints.end());
  }
  std::vector<GainPoint> nodes;
  nodes.reserve(order * (edges.size() - 1));
  double mass = 0.0;
  for (std::size_t k = 1; k < edges.size(); ++k) {
    const auto rule = gauss_legendre(order, edges[k - 1], edges[k]);
    for (std::size_t j = 0; j < order; ++j) {
      const double g = density(rule.nodes[j]);
      if (!(g >= 0.0) || !std::isfinite(g)) {
        std::ostringstream os;
        os << "gain density is negative or non-finite at h = " << rule.nodes[j];
        throw ConfigError(os.str());
      }
      const double w = rule.weights[j] * g;
      mass += w;
      nodes.push_back({rule.nodes[j], w});
    }
  }
  if (std::abs(mass - 1.0) > kDensityMassTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "gain density integrates to " << mass << " on its support, expected 1";
    throw ConfigError(os.str());
  }
  return GainDistribution(Kind::continuous, std::move(nodes), breakpoints.front(), breakpoints.back(),
                          std::move(label));
}

double GainDistribution::mean() const {
  double m = 0.0;
  for (const auto& n : nodes_) m += n.gain * n.weight;
  return m;
}

void FdUserPhysical::validate() const {
  require_positive(transmit_power, "transmit power");
  require_positive(noise_density, "noise density");
}

SsPhysical::SsPhysical(std::size_t users, std::vector<double> gains_row_major, double bandwidth,
                       double noise_density)
    : n_(users), gains_(std::move(gains_row_major)), bandwidth_(bandwidth), noise_density_(noise_density) {
  if (n_ == 0) throw ConfigError("spread-spectrum model needs at least one user");
  if (gains_.size() != n_ * n_) throw ConfigError("gain matrix must be N x N");
  for (double h : gains_) require_positive(h, "channel gain");
  require_positive(bandwidth_, "bandwidth");
  require_positive(noise_density_, "noise density");
}

SsPhysical SsPhysical::leading(std::size_t users) const {
  if (users == 0 || users > n_) throw DomainError("leading sub-problem size out of range");
  std::vector<double> g(users * users);
  for (std::size_t i = 0; i < users; ++i)
    for (std::size_t j = 0; j < users; ++j) g[i * users + j] = gain(i, j);
  return SsPhysical(users, std::move(g), bandwidth_, noise_density_);
}

double RateSlope::value() const {
  if (unbounded_) throw DomainError("rate slope is unbounded at zero bandwidth");
  return value_;
}

double expected_rate(const FdUserPhysical& user, double bandwidth) {
  if (bandwidth < 0.0) throw DomainError("bandwidth must be non-negative");
  if (bandwidth == 0.0) return 0.0;
  const double s = snr_scale(user);
  double r = 0.0;
  for (const auto& n : user.gain.nodes()) r += n.weight * std::log1p(n.gain * s / bandwidth);
  r *= bandwidth;
  require_finite(r, "expected_rate", bandwidth);
  return r;
}

RateSlope expected_rate_derivative(const FdUserPhysical& user, double bandwidth) {
  if (bandwidth < 0.0) throw DomainError("bandwidth must be non-negative");
  if (bandwidth == 0.0) return RateSlope::unbounded();
  const double s = snr_scale(user);
  double d = 0.0;
  for (const auto& n : user.gain.nodes()) d += n.weight * slope_term(n.gain * s / bandwidth);
  require_finite(d, "expected_rate_derivative", bandwidth);
  return RateSlope::finite(d);
}

double expected_rate_curvature(const FdUserPhysical& user, double bandwidth) {
  if (!(bandwidth > 0.0)) throw DomainError("curvature requires positive bandwidth");
  const double s = snr_scale(user);
  double d = 0.0;
  for (const auto& n : user.gain.nodes()) {
    const double c = n.gain * s;
    const double denom = c + bandwidth;
    d -= n.weight * (c / denom) * (c / denom) / bandwidth;
  }
  require_finite(d, "expected_rate_curvature", bandwidth);
  return d;
}

SlopeCurvature expected_rate_slope_curvature(const FdUserPhysical& user, double bandwidth) {
  if (!(bandwidth > 0.0)) throw DomainError("slope and curvature require positive bandwidth");
  const double s = snr_scale(user);
  SlopeCurvature out;
  for (const auto& n : user.gain.nodes()) {
    const double c = n.gain * s;
    const double z = c / bandwidth;
    const double ratio = c / (c + bandwidth);
    out.slope += n.weight * slope_term(z);
    out.curvature -= n.weight * ratio * ratio / bandwidth;
  }
  require_finite(out.slope, "expected_rate_slope_curvature", bandwidth);
  require_finite(out.curvature, "expected_rate_slope_curvature", bandwidth);
  return out;
}

namespace {

void check_powers(const SsPhysical& phys, std::span<const double> powers, std::size_t user) {
  if (powers.size() != phys.size()) throw DomainError("power vector has the wrong dimension");
  if (user >= phys.size()) throw DomainError("user index out of range");
  for (double p : powers) {
    if (!(p >= 0.0)) throw DomainError("powers must be non-negative");
  }
}

double interference_floor(const SsPhysical& phys, std::span<const double> powers, std::size_t user) {
  double d = phys.noise_density() * phys.bandwidth();
  for (std::size_t j = 0; j < phys.size(); ++j)
    if (j != user) d += phys.gain(j, user) * powers[j];
  return d;
}

}  // namespace

double interference_rate(const SsPhysical& phys, std::span<const double> powers, std::size_t user) {
  check_powers(phys, powers, user);
  const double d = interference_floor(phys, powers, user);
  return phys.bandwidth() * std::log1p(phys.gain(user, user) * powers[user] / d);
}

std::vector<double> interference_rate_gradient(const SsPhysical& phys, std::span<const double> powers,
                                               std::size_t user) {
  check_powers(phys, powers, user);
  const double w = phys.bandwidth();
  const double d = interference_floor(phys, powers, user);
  const double signal = phys.gain(user, user) * powers[user];
  std::vector<double> g(phys.size());
  for (std::size_t j = 0; j < phys.size(); ++j) {
    if (j == user)
      g[j] = w * phys.gain(user, user) / (d + signal);
    else
      g[j] = -w * phys.gain(j, user) * signal / (d * (d + signal));
  }
  return g;
}

}  // namespace spectramech

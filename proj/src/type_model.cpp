#include "spectramech/type_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spectramech/errors.hpp"
#include "spectramech/random.hpp"

namespace spectramech {

namespace {

void check_interval(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("type support bounds must be finite");
  if (lo < 0.0) throw ConfigError("type support requires theta_min >= 0");
  if (!(hi > lo)) {
    std::ostringstream os;
    os << "type support requires theta_max > theta_min, got [" << lo << ", " << hi << "]";
    throw ConfigError(os.str());
  }
}

}  // namespace

TypeDistribution::TypeDistribution(Kind kind, double lo, double hi, double param)
    : kind_(kind), lo_(lo), hi_(hi), param_(param) {}

TypeDistribution TypeDistribution::uniform(double lo, double hi) {
  check_interval(lo, hi);
  return TypeDistribution(Kind::uniform, lo, hi, 0.0);
}

TypeDistribution TypeDistribution::power_law(double lo, double hi, double exponent) {
  check_interval(lo, hi);
  if (!std::isfinite(exponent)) throw ConfigError("power-law exponent must be finite");
  if (exponent != 0.0 && !(lo > 0.0))
    throw ConfigError("power-law density needs theta_min > 0 to stay positive and finite");
  return TypeDistribution(Kind::power_law, lo, hi, exponent);
}

TypeDistribution TypeDistribution::truncated_exponential(double lo, double hi, double rate) {
  check_interval(lo, hi);
  if (!std::isfinite(rate) || rate == 0.0) throw ConfigError("truncated exponential needs a finite non-zero rate");
  if (std::abs(rate) * (hi - lo) > 700.0) throw ConfigError("truncated exponential rate too large for its support");
  return TypeDistribution(Kind::truncated_exponential, lo, hi, rate);
}

TypeDistribution TypeDistribution::tabulated(std::vector<double> knots, std::vector<double> cdf) {
  if (knots.size() < 2 || knots.size() != cdf.size())
    throw ConfigError("tabulated type CDF needs at least two (theta, F) points");
  check_interval(knots.front(), knots.back());
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (!(knots[k] > knots[k - 1])) throw ConfigError("tabulated type knots must be strictly increasing");
  }
  if (std::abs(cdf.front()) > 1e-9 || std::abs(cdf.back() - 1.0) > 1e-9)
    throw ConfigError("tabulated type CDF must start at 0 and end at 1");
  cdf.front() = 0.0;
  cdf.back() = 1.0;
  for (std::size_t k = 1; k < cdf.size(); ++k) {
    if (!(cdf[k] > cdf[k - 1])) {
      std::ostringstream os;
      os << "tabulated type CDF is not invertible: flat or decreasing on [" << knots[k - 1] << ", " << knots[k]
         << "] (density must be positive on the support)";
      throw ConfigError(os.str());
    }
  }
  TypeDistribution d(Kind::tabulated, knots.front(), knots.back(), 0.0);
  d.knots_ = std::move(knots);
  d.cdf_ = std::move(cdf);
  return d;
}

std::string_view TypeDistribution::kind_name() const noexcept {
  switch (kind_) {
    case Kind::uniform: return "uniform";
    case Kind::power_law: return "power_law";
    case Kind::truncated_exponential: return "truncated_exponential";
    case Kind::tabulated: return "tabulated";
  }
  return "unknown";
}

void TypeDistribution::check_support(double theta) const {
  if (!(theta >= lo_ && theta <= hi_)) {
    std::ostringstream os;
    os.precision(17);
    os << "type " << theta << " lies outside the support [" << lo_ << ", " << hi_ << "]";
    throw DomainError(os.str());
  }
}

std::size_t TypeDistribution::segment(double theta) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), theta);
  const auto k = static_cast<std::size_t>(it - knots_.begin());
  return std::clamp<std::size_t>(k, 1, knots_.size() - 1) - 1;
}

double TypeDistribution::pdf(double theta) const {
  check_support(theta);
  switch (kind_) {
    case Kind::uniform: return 1.0 / (hi_ - lo_);
    case Kind::power_law: {
      const double k = param_;
      if (k == -1.0) return 1.0 / (theta * std::log(hi_ / lo_));
      const double m = k + 1.0;
      return m * std::pow(theta, k) / (std::pow(hi_, m) - std::pow(lo_, m));
    }
    case Kind::truncated_exponential: {
      const double r = param_;
      return r * std::exp(-r * (theta - lo_)) / -std::expm1(-r * (hi_ - lo_));
    }
    case Kind::tabulated: {
      const auto k = segment(theta);
      return (cdf_[k + 1] - cdf_[k]) / (knots_[k + 1] - knots_[k]);
    }
  }
  return 0.0;
}

double TypeDistribution::cdf(double theta) const {
  check_support(theta);
  switch (kind_) {
    case Kind::uniform: return (theta - lo_) / (hi_ - lo_);
    case Kind::power_law: {
      const double k = param_;
      if (k == -1.0) return std::log(theta / lo_) / std::log(hi_ / lo_);
      const double m = k + 1.0;
      const double a = std::pow(lo_, m);
      return (std::pow(theta, m) - a) / (std::pow(hi_, m) - a);
    }
    case Kind::truncated_exponential: {
      const double r = param_;
      return std::expm1(-r * (theta - lo_)) / std::expm1(-r * (hi_ - lo_));
    }
    case Kind::tabulated: {
      const auto k = segment(theta);
      const double frac = (theta - knots_[k]) / (knots_[k + 1] - knots_[k]);
      return cdf_[k] + frac * (cdf_[k + 1] - cdf_[k]);
    }
  }
  return 0.0;
}

double TypeDistribution::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  double theta = lo_;
  switch (kind_) {
    case Kind::uniform: theta = lo_ + u * (hi_ - lo_); break;
    case Kind::power_law: {
      const double k = param_;
      if (k == -1.0) {
        theta = lo_ * std::pow(hi_ / lo_, u);
      } else {
        const double m = k + 1.0;
        const double a = std::pow(lo_, m);
        theta = std::pow(a + u * (std::pow(hi_, m) - a), 1.0 / m);
      }
      break;
    }
    case Kind::truncated_exponential: {
      const double r = param_;
      theta = lo_ - std::log1p(u * std::expm1(-r * (hi_ - lo_))) / r;
      break;
    }
    case Kind::tabulated: {
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), 1, cdf_.size() - 1) - 1;
      const double frac = (u - cdf_[k]) / (cdf_[k + 1] - cdf_[k]);
      theta = knots_[k] + frac * (knots_[k + 1] - knots_[k]);
      break;
    }
  }
  return std::clamp(theta, lo_, hi_);
}

double TypeDistribution::inverse_hazard(double theta) const {
  check_support(theta);
  switch (kind_) {
    case Kind::uniform: return hi_ - theta;
    case Kind::power_law: {
      const double k = param_;
      if (k == -1.0) return theta * std::log(hi_ / theta);
      const double m = k + 1.0;
      return (std::pow(hi_, m) - std::pow(theta, m)) / (m * std::pow(theta, k));
    }
    case Kind::truncated_exponential: {
      const double r = param_;
      return -std::expm1(-r * (hi_ - theta)) / r;
    }
    case Kind::tabulated: return (1.0 - cdf(theta)) / pdf(theta);
  }
  return 0.0;
}

double virtual_type(const TypeDistribution& dist, double theta) {
  if (theta == dist.max()) return theta;
  return theta - dist.inverse_hazard(theta);
}

RegularityResult certify_regularity(const TypeDistribution& dist, std::size_t grid_points) {
  if (grid_points < 2) throw DomainError("regularity grid needs at least two points");
  RegularityResult result;
  result.grid_points = grid_points;
  const auto grid = linspace(dist.min(), dist.max(), grid_points);
  double prev = virtual_type(dist, grid[0]);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double w = virtual_type(dist, grid[k]);
    if (!(w > prev)) {
      result.violation = std::make_pair(grid[k - 1], grid[k]);
      return result;
    }
    prev = w;
  }
  result.certified = true;
  return result;
}

VirtualTypeProfile::VirtualTypeProfile(std::vector<TypeDistribution> types, std::size_t grid_points)
    : types_(std::move(types)) {
  certificates_.reserve(types_.size());
  for (const auto& t : types_) certificates_.push_back(certify_regularity(t, grid_points));
}

std::vector<double> VirtualTypeProfile::evaluate(std::span<const double> theta) const {
  if (theta.size() != types_.size()) throw DomainError("type vector has the wrong dimension");
  std::vector<double> w(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) w[i] = virtual_type(types_[i], theta[i]);
  return w;
}

bool VirtualTypeProfile::certified() const noexcept {
  return std::all_of(certificates_.begin(), certificates_.end(), [](const auto& c) { return c.certified; });
}

void draw_types(std::span<const TypeDistribution> profile, std::uint64_t stream_seed, std::span<double> out) {
  RandomStream rng(stream_seed);
  for (std::size_t i = 0; i < profile.size(); ++i) out[i] = profile[i].quantile(rng.uniform());
}

TypeSample sample_types(std::span<const TypeDistribution> profile, std::uint64_t seed, std::size_t count) {
  if (count < 1) throw DomainError("sample count must be at least 1");
  TypeSample s{count, profile.size(), std::vector<double>(count * profile.size())};
  for (std::size_t k = 0; k < count; ++k)
    draw_types(profile, derive_seed(seed, k), std::span<double>(s.values.data() + k * s.cols, s.cols));
  return s;
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
  if (points == 0) return {};
  if (points == 1) return {lo};
  std::vector<double> g(points);
  const auto last = static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) g[k] = lo + (hi - lo) * (static_cast<double>(k) / last);
  g.back() = hi;
  return g;
}

}  // namespace spectramech

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace spectramech {

/// Tolerances used when validating gain distributions.
inline constexpr double kDiscreteMassTolerance = 1e-12;
inline constexpr double kDensityMassTolerance = 1e-6;
/// Gauss-Legendre nodes per quadrature panel.
inline constexpr std::size_t kDefaultQuadratureOrder = 16;

/// One atom (discrete law) or one quadrature node (continuous law).
struct GainPoint {
  double gain = 0.0;
  double weight = 0.0;
};

/// Distribution of a user's own-channel power gain h_ii.
///
/// Continuous densities are discretized once at construction with a
/// fixed-order Gauss-Legendre rule on the declared finite support, so every
/// expectation over the gain becomes a finite weighted sum over nodes().
/// Densities with unbounded support must be truncated by the caller.
class GainDistribution {
 public:
  enum class Kind { deterministic, discrete, continuous };

  static GainDistribution deterministic(double gain);
  static GainDistribution discrete(std::vector<GainPoint> atoms);

  /// `breakpoints` is the sorted support [b0, ..., bm]; a rule of `order`
  /// nodes is applied on each piece, which keeps kinks of piecewise densities
  /// off the interior of a panel. The first piece is further split into
  /// panels that shrink geometrically toward b0 when b0 is small.
  static GainDistribution continuous(const std::function<double(double)>& density,
                                     std::vector<double> breakpoints,
                                     std::size_t order = kDefaultQuadratureOrder,
                                     std::string label = "continuous");

  Kind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }
  std::span<const GainPoint> nodes() const noexcept { return nodes_; }
  double support_min() const noexcept { return lo_; }
  double support_max() const noexcept { return hi_; }
  double mean() const;

 private:
  GainDistribution(Kind kind, std::vector<GainPoint> nodes, double lo, double hi, std::string label);

  Kind kind_;
  std::vector<GainPoint> nodes_;
  double lo_;
  double hi_;
  std::string label_;
};

/// Frequency-division user: gain law, transmit power P (W), noise density N0 (W/Hz).
struct FdUserPhysical {
  GainDistribution gain = GainDistribution::deterministic(1.0);
  double transmit_power = 1.0;
  double noise_density = 1.0;

  void validate() const;
};

/// Spread-spectrum physical layer: h(i, j) is the gain from transmitter i to
/// receiver j; all users share bandwidth W.
class SsPhysical {
 public:
  SsPhysical(std::size_t users, std::vector<double> gains_row_major, double bandwidth,
             double noise_density);

  std::size_t size() const noexcept { return n_; }
  double gain(std::size_t from, std::size_t to) const { return gains_[from * n_ + to]; }
  double bandwidth() const noexcept { return bandwidth_; }
  double noise_density() const noexcept { return noise_density_; }
  std::span<const double> gains() const noexcept { return gains_; }

  /// Principal sub-problem on the first `users` users.
  SsPhysical leading(std::size_t users) const;

 private:
  std::size_t n_;
  std::vector<double> gains_;
  double bandwidth_;
  double noise_density_;
};

/// Derivative value that may be +infinity symbolically (the slope of the
/// expected rate at zero bandwidth).
class RateSlope {
 public:
  static RateSlope unbounded() { return RateSlope(true, 0.0); }
  static RateSlope finite(double v) { return RateSlope(false, v); }

  bool is_unbounded() const noexcept { return unbounded_; }
  /// Throws DomainError when unbounded.
  double value() const;

 private:
  RateSlope(bool unbounded, double v) : unbounded_(unbounded), value_(v) {}
  bool unbounded_;
  double value_;
};

/// psi(x) = E_h[x log(1 + h P / (N0 x))] in nats/s; psi(0) = 0.
double expected_rate(const FdUserPhysical& user, double bandwidth);

/// psi'(x) = E_h[log(1 + hP/(N0 x)) - hP/(N0 x + hP)]; unbounded at x = 0.
RateSlope expected_rate_derivative(const FdUserPhysical& user, double bandwidth);

/// psi''(x) = -E_h[(hP)^2 / ((hP + N0 x)^2 x)] for x > 0.
double expected_rate_curvature(const FdUserPhysical& user, double bandwidth);

struct SlopeCurvature {
  double slope = 0.0;
  double curvature = 0.0;
};

/// psi' and psi'' in one pass over the gain nodes, for x > 0.
SlopeCurvature expected_rate_slope_curvature(const FdUserPhysical& user, double bandwidth);

/// W log(1 + h_ii P_i / (N0 W + sum_{j != i} h_ji P_j)).
double interference_rate(const SsPhysical& phys, std::span<const double> powers, std::size_t user);

/// d/dP_j of interference_rate for every j.
std::vector<double> interference_rate_gradient(const SsPhysical& phys, std::span<const double> powers,
                                               std::size_t user);

}  // namespace spectramech

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace spectramech {

inline constexpr std::size_t kDefaultRegularityGrid = 1024;

/// Prior law of a user's type (willingness to pay per unit expected rate)
/// on [min, max], with a strictly positive density on the whole support.
class TypeDistribution {
 public:
  enum class Kind { uniform, power_law, truncated_exponential, tabulated };

  static TypeDistribution uniform(double lo, double hi);
  /// Density proportional to theta^exponent.
  static TypeDistribution power_law(double lo, double hi, double exponent);
  /// Density proportional to exp(-rate * theta); a negative rate gives an
  /// increasing density.
  static TypeDistribution truncated_exponential(double lo, double hi, double rate);
  /// Piecewise-linear CDF through (knots[k], cdf[k]); the density is its
  /// piecewise-constant derivative (right derivative at knots, left at max).
  static TypeDistribution tabulated(std::vector<double> knots, std::vector<double> cdf);

  Kind kind() const noexcept { return kind_; }
  std::string_view kind_name() const noexcept;
  double min() const noexcept { return lo_; }
  double max() const noexcept { return hi_; }
  double parameter() const noexcept { return param_; }
  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const double> knot_cdf() const noexcept { return cdf_; }

  double pdf(double theta) const;
  double cdf(double theta) const;
  /// Inverse CDF on [0, 1].
  double quantile(double u) const;
  /// (1 - F(theta)) / f(theta), evaluated in closed form where one exists.
  double inverse_hazard(double theta) const;

 private:
  TypeDistribution(Kind kind, double lo, double hi, double param);
  void check_support(double theta) const;
  std::size_t segment(double theta) const;

  Kind kind_;
  double lo_;
  double hi_;
  double param_;
  std::vector<double> knots_;
  std::vector<double> cdf_;
};

/// theta - (1 - F(theta)) / f(theta). DomainError outside the support.
double virtual_type(const TypeDistribution& dist, double theta);

struct RegularityResult {
  bool certified = false;
  std::size_t grid_points = 0;
  /// Consecutive grid pair (a, b), a < b, with w(b) <= w(a).
  std::optional<std::pair<double, double>> violation;
};

/// Checks that the virtual type is strictly increasing on an equispaced grid.
RegularityResult certify_regularity(const TypeDistribution& dist, std::size_t grid_points = kDefaultRegularityGrid);

/// Virtual types of every user plus the regularity certificate of each.
class VirtualTypeProfile {
 public:
  VirtualTypeProfile() = default;
  explicit VirtualTypeProfile(std::vector<TypeDistribution> types,
                              std::size_t grid_points = kDefaultRegularityGrid);

  std::size_t size() const noexcept { return types_.size(); }
  const TypeDistribution& distribution(std::size_t user) const { return types_.at(user); }
  std::span<const TypeDistribution> distributions() const noexcept { return types_; }
  double operator()(std::size_t user, double theta) const { return virtual_type(types_.at(user), theta); }
  std::vector<double> evaluate(std::span<const double> theta) const;
  const RegularityResult& regularity(std::size_t user) const { return certificates_.at(user); }
  bool certified() const noexcept;

 private:
  std::vector<TypeDistribution> types_;
  std::vector<RegularityResult> certificates_;
};

/// Row-major matrix of sampled type vectors, one row per draw.
struct TypeSample {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t k) const { return {values.data() + k * cols, cols}; }
};

/// Draws one type vector from stream `stream_seed` by inverse-CDF sampling,
/// users in order.
void draw_types(std::span<const TypeDistribution> profile, std::uint64_t stream_seed, std::span<double> out);

/// `count` independent type vectors; row k uses stream derive_seed(seed, k).
TypeSample sample_types(std::span<const TypeDistribution> profile, std::uint64_t seed, std::size_t count);

/// Equispaced grid of `points` values over [lo, hi] with exact endpoints.
std::vector<double> linspace(double lo, double hi, std::size_t points);

}  // namespace spectramech

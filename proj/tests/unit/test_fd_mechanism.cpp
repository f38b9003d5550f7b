#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "spectramech/errors.hpp"
#include "spectramech/fd_mechanism.hpp"
#include "spectramech/random.hpp"

using namespace spectramech;

namespace {

FdUser user(GainDistribution g, double power, TypeDistribution t) {
  FdUserPhysical p;
  p.gain = std::move(g);
  p.transmit_power = power;
  return {p, std::move(t)};
}

FdScenario single_unit() {
  return FdScenario(1.0, {user(GainDistribution::deterministic(1.0), 1.0, TypeDistribution::uniform(0.0, 1.0))});
}

FdScenario three_users() {
  return FdScenario(2.0, {user(GainDistribution::discrete({{0.5, 0.5}, {1.5, 0.5}}), 1.0, TypeDistribution::uniform(1.0, 2.0)),
                          user(GainDistribution::deterministic(2.0), 0.5, TypeDistribution::uniform(1.0, 3.0)),
                          user(GainDistribution::deterministic(0.7), 2.0, TypeDistribution::power_law(1.0, 2.0, -2.0))});
}

}  // namespace

TEST_CASE("single user above the virtual-type root takes the whole band") {
  const auto a = fd_allocate(single_unit(), std::vector<double>{0.8});
  CHECK(a.bandwidth[0] == 1.0);
  CHECK(a.rates[0] == doctest::Approx(std::log(2.0)));
}

TEST_CASE("non-positive virtual types get nothing") {
  const auto s = three_users();
  const std::vector<double> t{1.0, 1.0, 1.0};  // w = 0, -1, 1/2
  const auto a = fd_allocate(s, t);
  CHECK(a.bandwidth[0] == 0.0);
  CHECK(a.bandwidth[1] == 0.0);
  CHECK(a.bandwidth[2] == 2.0);
  const auto z = fd_run(single_unit(), std::vector<double>{0.3}, 64);
  CHECK(z.allocation.bandwidth[0] == 0.0);
  CHECK(z.tax.payment[0] == 0.0);
  CHECK(z.tax.rate[0] == 0.0);
}

TEST_CASE("water-filling satisfies the budget and KKT conditions") {
  const auto s = three_users();
  RandomStream rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> t(3);
    for (std::size_t i = 0; i < 3; ++i) t[i] = s.type(i).quantile(rng.uniform());
    const auto a = fd_allocate(s, t);
    const double total = std::accumulate(a.bandwidth.begin(), a.bandwidth.end(), 0.0);
    if (a.active_set.empty()) {
      CHECK(total == 0.0);
      continue;
    }
    CHECK(total == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(a.kkt_residual <= 1e-6);
    for (double b : a.bandwidth) CHECK(b >= 0.0);
  }
}

TEST_CASE("water-filling is at least as good as a grid search") {
  const auto s = three_users();
  std::vector<oracle::Gain> gains(3);
  gains[0].atoms = {{0.5, 0.5}, {1.5, 0.5}};
  gains[1].atoms = {{2.0, 1.0}};
  gains[2].atoms = {{0.7, 1.0}};
  const double power[] = {1.0, 0.5, 2.0};
  std::vector<std::function<double(double)>> psi;
  for (std::size_t i = 0; i < 3; ++i)
    psi.push_back([&, i](double x) { return oracle::expected_rate(gains[i], power[i], 1.0, x); });
  const std::vector<double> t{1.7, 2.4, 1.6};
  const auto a = fd_allocate(s, t);
  const auto grid = oracle::fd_grid_search(psi, a.virtual_types, 2.0, 200);
  CHECK(fd_objective(s, a.virtual_types, a.bandwidth) >= grid.objective - 1e-12);
  CHECK(fd_objective(s, a.virtual_types, a.bandwidth) <= grid.objective + grid.slack);
}

TEST_CASE("allocated rate is non-decreasing in the own report") {
  const auto s = three_users();
  const std::vector<double> t{1.5, 2.0, 1.5};
  for (std::size_t i = 0; i < 3; ++i) {
    double prev = -1.0;
    const auto& d = s.type(i);
    for (int k = 0; k <= 40; ++k) {
      const double r = d.min() + (d.max() - d.min()) * k / 40.0;
      const double q = fd_rate_at_report(s, t, i, r);
      CHECK(q >= prev - 1e-9 * std::max(1.0, prev));
      prev = q;
    }
  }
}

TEST_CASE("single user pays the threshold price") {
  // Q(s) = log 2 for s > 1/2, so the exact payment is log(2) / 2.
  const auto s = single_unit();
  const auto tax = fd_user_payment(s, std::vector<double>{0.9}, 0, 64);
  CHECK(std::abs(tax.payment - 0.5 * std::log(2.0)) <= tax.error_bound);
  CHECK(tax.nonmonotone_samples == 0);
  const auto z = fd_payment_via_threshold(s, std::vector<double>{0.9}, 64);
  CHECK(z.payment[0] == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-9));
  CHECK(z.base_amount[0] == 0.0);
}

TEST_CASE("Riemann and threshold payments agree within their bounds") {
  const auto s = three_users();
  const std::vector<double> t{1.8, 2.6, 1.9};
  const auto r = fd_payment(s, t, 64);
  const auto z = fd_payment_via_threshold(s, t, 64);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(r.payment[i] - z.payment[i]) <= r.error_bound[i] + z.error_bound[i]);
    CHECK(r.payment[i] <= t[i] * r.rate[i] + 1e-12);
    CHECK(r.payment[i] >= 0.0);
  }
}

TEST_CASE("irregular types are refused unless overridden") {
  const auto bad = TypeDistribution::tabulated({0.0, 1.0, 2.0}, {0.0, 0.9, 1.0});
  const FdScenario s(1.0, {user(GainDistribution::deterministic(1.0), 1.0, bad)});
  CHECK_THROWS_AS(fd_allocate(s, std::vector<double>{1.5}), RegularityError);
  const FdScenario ok(1.0, {user(GainDistribution::deterministic(1.0), 1.0, bad)}, kDefaultRegularityGrid, true);
  CHECK_NOTHROW(fd_allocate(ok, std::vector<double>{1.5}));
}

TEST_CASE("wrong type dimension and bad bandwidth are rejected") {
  CHECK_THROWS_AS(fd_allocate(three_users(), std::vector<double>{1.0}), DomainError);
  CHECK_THROWS_AS(three_users().with_bandwidth(0.0), ConfigError);
}

TEST_CASE("revenue: payment and virtual-surplus estimates agree") {
  const auto r = fd_expected_revenue(three_users(), 256, 3, 64);
  CHECK(r.identity_holds(3.0));
  CHECK(r.payment_revenue <= r.omniscient_bound);
  CHECK(r.virtual_surplus <= r.omniscient_bound);
}

TEST_CASE("single-user expected revenue") {
  // Seller revenue is log(2)/2 whenever theta > 1/2, i.e. with probability 1/2.
  const auto r = fd_expected_revenue(single_unit(), 4096, 9, 64);
  const double exact = 0.25 * std::log(2.0);
  CHECK(std::abs(r.payment_revenue - exact) <= r.tax_error_bound + 3.0 * r.payment_std_error);
}

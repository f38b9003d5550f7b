#include <cmath>

#include "doctest.h"
#include "spectramech/tax.hpp"

using namespace spectramech;

TEST_CASE("linear integrand: closed form of the right Riemann payment") {
  // g(s) = s on [0, theta]: exact tax theta^2 / 2, right sum gives theta^2 (M - 1) / (2M).
  const double theta = 0.8;
  for (std::size_t m : {1u, 4u, 64u}) {
    const auto t = riemann_tax(theta, 0.0, m, [](double s) { return s; });
    const double md = static_cast<double>(m);
    CHECK(t.payment == doctest::Approx(theta * theta * (md - 1.0) / (2.0 * md)).epsilon(1e-13));
    CHECK(t.error_bound == doctest::Approx(theta * theta / md).epsilon(1e-13));
    CHECK(theta * theta / 2.0 - t.payment <= t.error_bound);
    CHECK(t.payment <= theta * theta / 2.0);
    CHECK(t.nonmonotone_samples == 0);
  }
}

TEST_CASE("report at the bottom of the support pays type times rate") {
  const auto t = riemann_tax(1.0, 1.0, 64, [](double) { return 0.7; });
  CHECK(t.payment == 0.7);
  CHECK(t.error_bound == 0.0);
}

TEST_CASE("doubling the grid halves the bound on a monotone integrand") {
  auto g = [](double s) { return std::log1p(s * s); };
  const auto a = riemann_tax(2.0, 0.5, 32, g);
  const auto b = riemann_tax(2.0, 0.5, 64, g);
  CHECK(b.error_bound == doctest::Approx(a.error_bound / 2.0).epsilon(1e-14));
  CHECK(b.payment >= a.payment);
}

TEST_CASE("decreasing samples are counted and widen the bound") {
  auto g = [](double s) { return s < 0.5 ? s : 1.0 - s; };
  const auto t = riemann_tax(1.0, 0.0, 10, g);
  CHECK(t.nonmonotone_samples > 0);
  // total variation 1, step 0.1
  CHECK(t.error_bound == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("grid points are visited in order and end exactly at the type") {
  std::vector<double> seen;
  riemann_tax(0.3, 0.1, 7, [&](double s) {
    seen.push_back(s);
    return s;
  });
  REQUIRE(seen.size() == 8);
  CHECK(seen.front() == 0.1);
  CHECK(seen.back() == 0.3);
  for (std::size_t k = 1; k < seen.size(); ++k) CHECK(seen[k] > seen[k - 1]);
}

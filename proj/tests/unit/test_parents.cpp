#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/zeta.hpp>

#include <gaitd/gaitd.hpp>

#include "oracle.hpp"

using namespace gaitd;
using doctest::Approx;

TEST_CASE("poisson pmf matches the recurrence") {
  const auto p = ParentSpec::poisson(5.0);
  CHECK(parent_pmf(p, 5) == Approx(0.175467369767850).epsilon(1e-12));
  double f = std::exp(-5.0);
  for (Count y = 1; y <= 40; ++y) {
    f *= 5.0 / static_cast<double>(y);
    CHECK(parent_pmf(p, y) == Approx(f).epsilon(1e-12));
  }
  CHECK(parent_cdf(p, 4) == Approx(0.440493285065212).epsilon(1e-12));
}

TEST_CASE("support minimum") {
  CHECK(parent_pmf(ParentSpec::logarithmic(0.4), 0) == 0.0);
  CHECK(parent_pmf(ParentSpec::zeta(2.0), 0) == 0.0);
  for (auto spec : {ParentSpec::poisson(2.0), ParentSpec::negbin(3.0, 2.0), ParentSpec::logarithmic(0.4),
                    ParentSpec::zeta(2.0)}) {
    CHECK(parent_cdf(spec, -1) == 0.0);
    CHECK(parent_cdf(spec, support_min(spec.family()) - 1) == 0.0);
  }
}

TEST_CASE("negative binomial against the gamma-function formula") {
  const auto nb = ParentSpec::negbin(10.0, 10.0);
  for (Count y = 0; y <= 60; ++y) {
    const double yd = static_cast<double>(y);
    const double ref = std::exp(std::lgamma(yd + 10.0) - std::lgamma(10.0) - std::lgamma(yd + 1.0) + 10.0 * std::log(0.5) +
                                yd * std::log(0.5));
    CHECK(parent_pmf(nb, y) == Approx(ref).epsilon(1e-12));
  }
  const auto m = parent_moments(nb);
  CHECK(m.mean == Approx(10.0));
  CHECK(m.variance == Approx(20.0));
}

TEST_CASE("every family agrees with the boost-based reference pmf and cdf") {
  const std::vector<std::pair<Family, std::vector<double>>> cases = {
      {Family::Poisson, {0.7}}, {Family::Poisson, {23.0}},   {Family::NegBinomial, {4.0, 0.8}},
      {Family::NegBinomial, {30.0, 12.0}}, {Family::Logarithmic, {0.95}}, {Family::Zeta, {1.3}},
      {Family::Zeta, {4.0}}};
  for (const auto& [family, theta] : cases) {
    const ParentSpec spec(family, theta);
    double cdf = 0.0;
    for (Count y = 0; y <= 80; ++y) {
      const double ref = testing::ref_parent_pmf(family, theta, y);
      CHECK(parent_pmf(spec, y) == Approx(ref).epsilon(1e-11));
      cdf += ref;
      CHECK(parent_cdf(spec, y) == Approx(cdf).epsilon(1e-10));
    }
  }
}

TEST_CASE("zeta tail approaches one") {
  const auto z = ParentSpec::zeta(1.2);
  const double s = 2.2;
  // partial sum plus integral bracket of the tail
  double partial = 0.0;
  const Count n = 100000;
  for (Count y = 1; y <= n; ++y) partial += std::pow(static_cast<double>(y), -s);
  const double lo = partial + std::pow(static_cast<double>(n + 1), 1.0 - s) / (s - 1.0);
  const double hi = partial + std::pow(static_cast<double>(n), 1.0 - s) / (s - 1.0);
  const double zeta = boost::math::zeta(s);
  CHECK(zeta >= lo - 1e-12);
  CHECK(zeta <= hi + 1e-12);
  CHECK(parent_cdf(z, n) == Approx(partial / zeta).epsilon(1e-10));
  CHECK(parent_cdf(z, 1'000'000'000) > 1.0 - 1e-9);
  CHECK(riemann_zeta(s) == Approx(zeta).epsilon(1e-13));
  CHECK(hurwitz_zeta(s, 1.0) == Approx(zeta).epsilon(1e-13));
  CHECK(hurwitz_zeta(3.0, 5.0) == Approx(boost::math::zeta(3.0) - 1.0 - 1.0 / 8 - 1.0 / 27 - 1.0 / 64).epsilon(1e-12));
}

TEST_CASE("moments and divergence") {
  const auto p = parent_moments(ParentSpec::poisson(5.0));
  CHECK(p.mean == Approx(5.0));
  CHECK(p.variance == Approx(5.0));
  const auto z = parent_moments(ParentSpec::zeta(0.5));
  CHECK_FALSE(z.mean_exists);
  CHECK_FALSE(z.variance_exists);
  CHECK_FALSE(parent_raw_moment(ParentSpec::zeta(1.5), 2).has_value());
  CHECK(parent_raw_moment(ParentSpec::zeta(2.5), 2).has_value());
  for (auto spec : {ParentSpec::logarithmic(0.6), ParentSpec::zeta(5.0), ParentSpec::negbin(3.0, 1.5)}) {
    const auto th = std::vector<double>(spec.theta().begin(), spec.theta().end());
    for (int k = 1; k <= 3; ++k) {
      double ref = 0.0;
      for (Count y = 0; y <= 200000; ++y) ref += std::pow(static_cast<double>(y), k) * testing::ref_parent_pmf(spec.family(), th, y);
      CHECK(*parent_raw_moment(spec, k) == Approx(ref).epsilon(1e-8));
    }
  }
}

TEST_CASE("support upper bound scans the cdf") {
  const auto p = ParentSpec::poisson(5.0);
  const Count u = support_upper_bound(p, 0.5);
  CHECK((u == 4 || u == 5));
  CHECK(parent_sf(p, u) <= 0.5);
  CHECK(support_upper_bound(p, 1.0 - 1e-15) == 0);
  const auto nb = ParentSpec::negbin(10.0, 10.0);
  Count scan = 0;
  while (parent_sf(nb, scan) > 1e-12) ++scan;
  CHECK(support_upper_bound(nb, 1e-12) == scan);
}

TEST_CASE("theta validation") {
  CHECK_THROWS_AS(ParentSpec::poisson(-1.0), DomainError);
  CHECK_THROWS_AS(ParentSpec::negbin(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(ParentSpec::logarithmic(1.0), DomainError);
  CHECK_THROWS_AS(ParentSpec::zeta(0.0), DomainError);
  CHECK(parse_family("negbin") == Family::NegBinomial);
  CHECK_FALSE(parse_family("binomial").has_value());
}

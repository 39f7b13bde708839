#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include <gaitd/gaitd.hpp>

#include "oracle.hpp"

using namespace gaitd;
using doctest::Approx;

namespace {

GaitdDist zip(double lambda, double phi) {
  SpecialSets s;
  s.inf_np = {0};
  GaitdParams p;
  p.theta_pi = {lambda};
  p.phi_np = {phi};
  return GaitdDist(Family::Poisson, s, p);
}

GaitdDist single_np(double lambda, std::vector<Count> SpecialSets::*member, std::vector<double> GaitdParams::*prob,
                    double value) {
  SpecialSets s;
  s.*member = {0};
  GaitdParams p;
  p.theta_pi = {lambda};
  p.*prob = {value};
  return GaitdDist(Family::Poisson, s, p);
}

}  // namespace

TEST_CASE("delta closed forms") {
  GaitdParams p;
  p.theta_pi = {1.0};
  CHECK(GaitdDist(Family::Poisson, {}, p).delta() == 1.0);
  CHECK(single_np(1.0, &SpecialSets::alt_np, &GaitdParams::omega_np, 0.3).delta() ==
        Approx(0.7 / (1.0 - std::exp(-1.0))).epsilon(1e-12));
  CHECK(single_np(1.0, &SpecialSets::def_np, &GaitdParams::psi_np, 0.2).delta() == Approx(1.2).epsilon(1e-14));
}

TEST_CASE("zero-inflated poisson") {
  const auto d = zip(1.0, 0.2);
  const double p0 = 0.2 + 0.8 * std::exp(-1.0);
  CHECK(d.pmf(0) == Approx(p0).epsilon(1e-14));
  CHECK(d.cdf(0) == Approx(p0).epsilon(1e-14));
  CHECK(d.quantile(0.4) == 0);
  CHECK(*d.moment(1) == Approx(0.8).epsilon(1e-13));
  for (Count y = 1; y < 20; ++y) CHECK(d.pmf(y) == Approx(0.8 * parent_pmf(ParentSpec::poisson(1.0), y)).epsilon(1e-13));
}

TEST_CASE("truncated poisson renormalises the upper tail") {
  SpecialSets s;
  s.trunc = {0, 1, 2, 3, 4};
  GaitdParams p;
  p.theta_pi = {5.0};
  const GaitdDist d(Family::Poisson, s, p);
  CHECK(d.pmf(5) == Approx(0.313611).epsilon(1e-5));
  CHECK(d.pmf(5) == Approx(parent_pmf(ParentSpec::poisson(5.0), 5) / parent_sf(ParentSpec::poisson(5.0), 4)).epsilon(1e-13));
  for (Count y = 0; y < 5; ++y) CHECK(d.pmf(y) == 0.0);
  CHECK(d.cdf(4) == 0.0);
  CHECK(d.cdf(200) == 1.0);
}

TEST_CASE("parameter validation") {
  GaitdParams p;
  p.theta_pi = {2.0};
  CHECK(validate_params(GaitdDist(Family::Poisson, {}, p)).empty());
  CHECK(validate_params(single_np(1.0, &SpecialSets::def_np, &GaitdParams::psi_np, 0.5)).empty());
  CHECK_FALSE(validate_params(single_np(1.0, &SpecialSets::def_np, &GaitdParams::psi_np, 0.6)).empty());

  SpecialSets s;
  s.alt_np = {0, 1};
  p.omega_np = {0.6, 0.4};
  const GaitdDist full(Family::Poisson, s, p);
  const auto v = validate_params(full);
  REQUIRE_FALSE(v.empty());
  CHECK(v.front().constraint == "budget < 1");
}

TEST_CASE("pmf decomposition adds up") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 40; ++i) {
    const auto c = testing::random_config(rng, static_cast<Family>(i % 4));
    const auto d = c.dist();
    for (Count y = 0; y < 60; ++y) {
      CHECK(d.components(y).total() == Approx(d.pmf(y)).epsilon(1e-12));
      if (d.pmf(y) > 0.0) CHECK(std::exp(d.log_pmf(y)) == Approx(d.pmf(y)).epsilon(1e-10));
    }
  }
}

TEST_CASE("pmf, cdf and moments against brute force") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 40; ++i) {
    const auto family = static_cast<Family>(i % 4);
    const auto c = testing::random_config(rng, family, 3);
    const auto d = c.dist();
    const auto bf = testing::brute_force(c);
    CHECK(d.delta() == Approx(bf.delta).epsilon(1e-10));
    for (Count y = 0; y < 50; ++y) {
      CHECK(d.pmf(y) == Approx(bf.at(y)).epsilon(1e-10));
      CHECK(d.cdf(y) == Approx(bf.cdf(y)).epsilon(1e-10));
    }
    for (int k = 1; k <= 3; ++k) CHECK(*d.moment(k) == Approx(bf.moment(k)).epsilon(1e-8));
  }
}

TEST_CASE("quantile inverts the cdf") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-9, 1.0 - 1e-9);
  for (int i = 0; i < 8; ++i) {
    const auto d = testing::random_config(rng, static_cast<Family>(i % 4)).dist();
    for (int j = 0; j < 1000; ++j) {
      const double p = u(rng);
      const Count q = d.quantile(p);
      CHECK(d.cdf(q) >= p);
      CHECK(d.cdf(q - 1) < p);
    }
    CHECK(d.pmf(d.quantile(1e-300)) > 0.0);
  }
}

TEST_CASE("sampling") {
  SpecialSets s;
  s.trunc = {0};
  GaitdParams p;
  p.theta_pi = {0.7};
  const GaitdDist d(Family::Poisson, s, p);
  const auto a = d.sample(20000, 99);
  CHECK(std::find(a.begin(), a.end(), 0) == a.end());
  CHECK(a == d.sample(20000, 99));
  CHECK(a != d.sample(20000, 100));
  CHECK(d.sample(0, 1).empty());
}

TEST_CASE("empirical pmf of a million draws") {
  std::mt19937_64 rng(5);
  const auto c = testing::random_config(rng, Family::NegBinomial);
  const auto d = c.dist();
  const std::size_t n = 1'000'000;
  const auto draws = d.sample(n, 17);
  std::map<Count, double> freq;
  for (Count y : draws) freq[y] += 1.0;
  for (Count y = 0; y < 80; ++y) {
    const double f = d.pmf(y);
    const double emp = freq[y] / static_cast<double>(n);
    CHECK(std::abs(emp - f) <= 4.0 * std::sqrt(f * (1.0 - f) / static_cast<double>(n)) + 1e-12);
  }
}

TEST_CASE("heavy zeta tail keeps a finite window") {
  SpecialSets s;
  s.inf_np = {1};
  GaitdParams p;
  p.theta_pi = {0.8};
  p.phi_np = {0.1};
  const GaitdDist d(Family::Zeta, s, p);
  CHECK_FALSE(d.moment(1).has_value());
  const auto w = d.support_window();
  CHECK(w.hi <= d.options().max_window + w.lo);
  CHECK(d.quantile(0.5) >= 1);
}

TEST_CASE("lattice-truncated distribution") {
  SpecialSets s;
  s.lattice = Lattice{5, 0};
  s.inf_np = {40};
  GaitdParams p;
  p.theta_pi = {36.0};
  p.phi_np = {0.15};
  const GaitdDist d(Family::Poisson, s, p);
  double total = 0.0;
  for (Count y = 0; y < 200; ++y) {
    if (y % 5 != 0) CHECK(d.pmf(y) == 0.0);
    total += d.pmf(y);
  }
  CHECK(total == Approx(1.0).epsilon(1e-12));
}

#include <doctest.h>

#include <cmath>
#include <random>

#include <gaitd/gaitd.hpp>

#include "oracle.hpp"

using namespace gaitd;
using doctest::Approx;

namespace {

GaitdDist zap(double lambda, double omega) {
  SpecialSets s;
  s.alt_np = {0};
  GaitdParams p;
  p.theta_pi = {lambda};
  p.omega_np = {omega};
  return GaitdDist(Family::Poisson, s, p);
}

GaitdDist zip(double lambda, double phi) {
  SpecialSets s;
  s.inf_np = {0};
  GaitdParams p;
  p.theta_pi = {lambda};
  p.phi_np = {phi};
  return GaitdDist(Family::Poisson, s, p);
}

}  // namespace

TEST_CASE("empty sets give zero discrepancy") {
  GaitdParams p;
  p.theta_pi = {3.0};
  const GaitdDist d(Family::Poisson, {}, p);
  CHECK(kld_to_parent(d) == Approx(0.0));
  CHECK(xi_heapseep(d) == 0.0);
  const auto r = dispersion_report(d);
  REQUIRE(r);
  CHECK(r->vmd_star == Approx(0.0).scale(1.0));
  CHECK(r->vmd_pi == Approx(0.0).scale(1.0));
  CHECK(r->vvd == Approx(0.0).scale(1.0));
  CHECK(r->dvmd == Approx(0.0).scale(1.0));
  CHECK(r->dir == Approx(1.0));
  for (auto def : {Dispersion::VMD_star, Dispersion::VMD_pi, Dispersion::VVD}) {
    const auto t = theorem_lhs(d, def);
    CHECK(t.lhs == Approx(t.rhs));
  }
}

TEST_CASE("xi for a single inflated zero") { CHECK(xi_heapseep(zip(1.0, 0.2)) == Approx(0.2).epsilon(1e-14)); }

TEST_CASE("kld and xi against brute force") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 40; ++i) {
    const auto c = testing::random_config(rng, static_cast<Family>(i % 4), 3);
    const auto d = c.dist();
    const auto bf = testing::brute_force(c);
    CHECK(kld_to_parent(d) == Approx(bf.kld()).epsilon(1e-9).scale(1e-9));
    CHECK(xi_heapseep(d) == Approx(bf.xi(c.sets)).epsilon(1e-9).scale(1e-9));
  }
}

TEST_CASE("zero-altered poisson dispersion") {
  const auto r = dispersion_report(zap(1.0, 0.5));
  REQUIRE(r);
  CHECK(r->vmd_star > 0.0);
  const auto eq = dispersion_report(zap(1.0, std::exp(-1.0)));
  CHECK(std::abs(eq->vvd) < 1e-10);
  CHECK_FALSE(eq->overdispersed(Dispersion::VVD));
}

TEST_CASE("dispersion report against brute-force moments") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 30; ++i) {
    const auto c = testing::random_config(rng, static_cast<Family>(i % 2), 3);
    const auto bf = testing::brute_force(c);
    const auto r = dispersion_report(c.dist());
    REQUIRE(r);
    CHECK(r->mean == Approx(bf.mean()).epsilon(1e-9));
    CHECK(r->variance == Approx(bf.variance()).epsilon(1e-8));
    CHECK(r->vmd_star == Approx(bf.variance() - bf.mean()).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("theorem sides under zero inflation") {
  const auto d = zip(2.0, 0.3);
  const auto t = theorem_lhs(d, Dispersion::VMD_star);
  CHECK(t.lhs > t.rhs);
  CHECK(table1_condition(Table1Model::ZIP, Dispersion::VMD_star, {2.0, 1, 0.5, 0.3}));
}

TEST_CASE("corollary sign") {
  for (double lambda : {0.3, 1.0, 2.5}) {
    CHECK(corollary_za(ParentSpec::poisson(lambda), std::exp(-lambda)) == Approx(0.0).scale(1.0));
  }
  CHECK(corollary_za(ParentSpec::poisson(1.0), 0.5) > 0.0);
  for (double lambda = 0.2; lambda < 5.0; lambda += 0.37) {
    for (double w = 0.03; w < 0.98; w += 0.07) {
      if (std::abs(w - std::exp(-lambda)) < 1e-6) continue;
      const auto r = dispersion_report(zap(lambda, w));
      CHECK((corollary_za(ParentSpec::poisson(lambda), w) > 0.0) == (r->vmd_star > 0.0));
    }
  }
}

TEST_CASE("overdispersion conditions at corner cases") {
  for (auto def : {Dispersion::VMD_star, Dispersion::VMD_pi, Dispersion::VVD, Dispersion::DVMD}) {
    for (double lambda : {0.1, 1.0, 7.0}) CHECK_FALSE(table1_condition(Table1Model::ZTP, def, {lambda, 1, 0.5, 0.0}));
  }
  CHECK_FALSE(table1_condition(Table1Model::ZAP, Dispersion::VVD, {1.0, 1, 0.5, std::exp(-1.0)}));
  const int n = 10;
  const double p = 1.0 / (n + 1);
  const auto r = table1_numeric(Table1Model::ZAB, {1.0, n, p, std::pow(1.0 - p, n)});
  CHECK(std::abs(r.vvd) < 1e-10);
}

TEST_CASE("zero-modified binomial moments by enumeration") {
  const int n = 7;
  const double p = 0.35, w = 0.2;
  std::vector<double> f(n + 1);
  for (int y = 0; y <= n; ++y) f[static_cast<std::size_t>(y)] = std::exp(std::lgamma(n + 1.0) - std::lgamma(y + 1.0) - std::lgamma(n - y + 1.0)) * std::pow(p, y) * std::pow(1 - p, n - y);
  std::vector<double> g(f.size());
  for (int y = 0; y <= n; ++y) g[static_cast<std::size_t>(y)] = (y == 0 ? w : 0.0) + (1 - w) * f[static_cast<std::size_t>(y)];
  double m1 = 0, m2 = 0;
  for (int y = 0; y <= n; ++y) {
    m1 += y * g[static_cast<std::size_t>(y)];
    m2 += y * y * g[static_cast<std::size_t>(y)];
  }
  const auto [mean, var] = zero_modified_binomial_moments(Table1Model::ZIB, n, p, w);
  CHECK(mean == Approx(m1).epsilon(1e-13));
  CHECK(var == Approx(m2 - m1 * m1).epsilon(1e-12));
}

TEST_CASE("region scan follows the closed form") {
  RegionGrid g;
  g.nx = 30;
  g.nw = 30;
  const auto scan = region_scan(Table1Model::ZAP, Dispersion::VMD_star, g);
  CHECK(scan.points.size() == 900);
  for (const auto& pt : scan.points) {
    CHECK(pt.over == table1_condition(Table1Model::ZAP, Dispersion::VMD_star, {pt.x, 1, 0.5, pt.w}));
  }
  for (const auto& b : scan.boundary) CHECK(b.w == Approx(std::exp(-b.x)).epsilon(1e-6));
  CHECK_FALSE(scan.boundary.empty());
  // along fixed w the verdict flips at most once in lambda
  for (int j = 0; j < g.nw; ++j) {
    int flips = 0;
    for (int i = 1; i < g.nx; ++i) {
      flips += scan.points[static_cast<std::size_t>(i * g.nw + j)].over != scan.points[static_cast<std::size_t>((i - 1) * g.nw + j)].over;
    }
    CHECK(flips <= 1);
  }
}

TEST_CASE("dispersion names round trip") {
  for (auto d : {Dispersion::VMD_star, Dispersion::VMD_pi, Dispersion::VVD, Dispersion::DVMD, Dispersion::DIR}) {
    CHECK(parse_dispersion(dispersion_name(d)) == d);
  }
  CHECK(parse_table1_model("ZIB") == Table1Model::ZIB);
}

TEST_CASE("heap and seep balance is reported per inflated value") {
  SpecialSets s;
  s.inf_np = {0, 10};
  s.def_np = {9, 11};
  GaitdParams p;
  p.theta_pi = {9.0};
  p.phi_np = {0.05, 0.08};
  p.psi_np = {0.03, 0.04};
  const GaitdDist d(Family::Poisson, s, p);
  const auto b = heap_seep_balance(d);
  REQUIRE(b.size() == 2);
  CHECK(b[0].value == 0);
  CHECK(b[0].inflation == Approx(0.05));
  CHECK(b[0].neighbour_deflation == 0.0);
  CHECK(b[1].inflation == Approx(0.08));
  CHECK(b[1].neighbour_deflation == Approx(0.07));
  CHECK(b[1].imbalance() == Approx(0.01));
}

TEST_CASE("poisson parent: which dispersion measures coincide") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 200; ++i) {
    const auto r = dispersion_report(testing::random_poisson_config(rng).dist());
    REQUIRE(r);
    CHECK(r->dvmd == Approx(r->vmd_star).scale(1.0));
    if (std::abs(r->vmd_star) > 1e-9) CHECK((r->dir > 1.0) == (r->vmd_star > 0.0));
  }
  // DIR does not track VMD_pi: zero-altered Poisson(1) with omega = 0.5
  const auto z = dispersion_report(zap(1.0, 0.5));
  CHECK(z->dir > 1.0);
  CHECK(z->vmd_pi < 0.0);
}

#include <doctest.h>

#include <cmath>

#include <gaitd/gaitd.hpp>

using namespace gaitd;
using doctest::Approx;

namespace {

Data sleep_data() {
  std::vector<Count> hours;
  std::vector<double> freq = {16, 125, 443, 1760, 3076, 3766, 891, 170, 10, 7};
  for (Count h = 3; h <= 12; ++h) hours.push_back(h);
  return Data::intercept_only(hours, freq);
}

ModelSpec sleep_spec() {
  ModelSpec spec;
  spec.sets.inf_np = {8};
  return spec;
}

}  // namespace

TEST_CASE("moment estimate of the multiplier") {
  CHECK(moment_estimate_m(10.0, 2.5).m_hat == Approx(4.0));
  CHECK(moment_estimate_m(3.0, 3.0).m_hat == Approx(1.0));
  CHECK(moment_estimate_m(7.3, 1.3).m_hat == Approx(5.615).epsilon(1e-3));
}

TEST_CASE("model expansion") {
  const auto same = build_gte_model(sleep_spec(), {1, 0});
  CHECK(same.sets.inf_np == std::vector<Count>{8});
  CHECK_FALSE(same.sets.lattice.has_value());

  const auto spec = build_gte_model(sleep_spec(), {5, 0});
  CHECK(spec.sets.inf_np == std::vector<Count>{40});
  REQUIRE(spec.sets.lattice.has_value());
  CHECK(spec.sets.lattice->step == 5);
  const SpecialUnion u(spec.sets);
  for (Count y = 1; y < 200; ++y) CHECK((u.classify(y).kind == SetKind::Truncated) == (y % 5 != 0));
  CHECK(spec.offset[0] == Approx(std::log(5.0)));
  CHECK(gte_back_transform(36.5, {5, 0}) == Approx(7.3));
  CHECK(gte_back_transform(37.5, {5, 2}) == Approx(7.1));

  const auto data = expand_data(sleep_data(), {5, 1});
  CHECK(data.y.front() == 16);
  CHECK(data.y.back() == 61);

  ModelSpec zeta;
  zeta.family = Family::Zeta;
  CHECK_THROWS_AS(build_gte_model(zeta, {3, 0}), DomainError);
}

TEST_CASE("sleep search selects five") {
  const auto search = search_m(sleep_spec(), sleep_data(), {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  REQUIRE(search.best);
  CHECK(search.table[*search.best].gte.m == 5);
  // up then down around the argmax
  for (std::size_t i = 1; i < search.table.size(); ++i) {
    if (i <= *search.best) CHECK(search.table[i].loglik > search.table[i - 1].loglik);
    else CHECK(search.table[i].loglik < search.table[i - 1].loglik);
  }
  const auto& fit = *search.best_fit;
  const auto d = fit.dist();
  CHECK(d.params().phi_np[0] == Approx(0.157).epsilon(0.07));
  CHECK(gte_back_transform(*d.moment(1), {5, 0}) == Approx(7.297).epsilon(1e-3));
  const auto ci = parameter_ci(fit, 0, fit.x_first);
  CHECK(ci.lower / 5 == Approx(7.139).epsilon(2e-3));
  CHECK(ci.upper / 5 == Approx(7.194).epsilon(2e-3));
  CHECK(loglik(fit.spec, expand_data(sleep_data(), {5, 0}), fit.beta) == Approx(fit.loglik).epsilon(1e-12));
}

TEST_CASE("singleton search returns that fit") {
  const auto search = search_m(sleep_spec(), sleep_data(), {3});
  REQUIRE(search.table.size() == 1);
  CHECK(search.table[0].gte.m == 3);
  REQUIRE(search.best_fit);
}

TEST_CASE("equidispersed poisson data prefer no expansion") {
  GaitdParams p;
  p.theta_pi = {6.0};
  const auto y = GaitdDist(Family::Poisson, {}, p).sample(4000, 12);
  const auto search = search_m(ModelSpec{}, Data::intercept_only(y), {1, 2, 3, 4});
  REQUIRE(search.best);
  CHECK(search.table[*search.best].gte.m == 1);
}

TEST_CASE("truncated segments") {
  const auto pois = ParentSpec::poisson(5.0);
  const auto up = gt_segment(pois, SegmentMode::UpperTail, 5);
  CHECK(up.pmf(0) == Approx(0.313611).epsilon(1e-5));
  CHECK(up.pmf(0) == Approx(parent_pmf(pois, 5) / parent_sf(pois, 4)).epsilon(1e-12));
  const auto low = gt_segment(pois, SegmentMode::LowerTailReflected, 5);
  CHECK(low.pmf(5) == Approx(parent_pmf(pois, 0) / parent_cdf(pois, 5)).epsilon(1e-12));
  CHECK(low.cdf(5) == Approx(1.0));
  CHECK(low.max_value() == 5);
  const auto none = gt_segment(pois, SegmentMode::UpperTail, 0);
  for (Count y = 0; y < 20; ++y) CHECK(none.pmf(y) == Approx(parent_pmf(pois, y)).epsilon(1e-13));
}

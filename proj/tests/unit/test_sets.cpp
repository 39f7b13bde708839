#include <doctest.h>

#include <algorithm>

#include <gaitd/gaitd.hpp>

using namespace gaitd;

namespace {

SpecialSets smoking_sets() {
  SpecialSets s;
  s.trunc = {0};
  s.alt_p = {2, 15, 25, 35, 45};
  s.inf_p = {5, 10, 20, 30, 40, 50, 60};
  s.inf_np = {1, 8, 12, 18};
  s.def_p = {9, 11, 13, 19, 21, 29, 31};
  return s;
}

}  // namespace

TEST_CASE("smoking set configuration is valid") {
  CHECK(validate_sets(smoking_sets(), ParentSpec::negbin(10.0, 2.0), true).empty());
  CHECK(validate_sets(SpecialSets{}, Family::Poisson, true).empty());
}

TEST_CASE("singleton parametric set is rejected under strict identifiability") {
  SpecialSets s;
  s.alt_p = {0};
  const auto v = validate_sets(s, Family::Poisson, true);
  REQUIRE(v.size() == 1);
  CHECK(v[0].constraint == "|A_p| != 1");
  CHECK(validate_sets(s, Family::Poisson, false).empty());
}

TEST_CASE("overlapping sets are reported with the shared elements") {
  SpecialSets s;
  s.inf_np = {3, 4};
  s.def_np = {4};
  const auto v = validate_sets(s, Family::Poisson, true);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].constraint == "disjoint sets");
  CHECK(v[0].elements == std::vector<Count>{4});
}

TEST_CASE("values outside the parent support") {
  SpecialSets s;
  s.inf_np = {0};
  CHECK_FALSE(validate_sets(s, Family::Zeta, true).empty());
  CHECK(validate_sets(s, Family::Poisson, true).empty());
}

TEST_CASE("tail truncation interacts with finite sets") {
  SpecialSets s;
  s.trunc = {0, 1, 2};
  s.trunc_tail_start = 13;
  const SpecialUnion u(s);
  CHECK(u.contains(200));
  CHECK(u.contains(1));
  CHECK_FALSE(u.contains(5));
  CHECK(s.is_truncated(13));
  s.inf_np = {20};
  CHECK_FALSE(validate_sets(s, Family::Poisson, true).empty());
}

TEST_CASE("union and classification") {
  CHECK(SpecialUnion(SpecialSets{}).finite_members().empty());
  const auto s = smoking_sets();
  const SpecialUnion u(s);
  std::vector<Count> expect;
  for (const auto* v : {&s.trunc, &s.alt_p, &s.inf_p, &s.inf_np, &s.def_p}) expect.insert(expect.end(), v->begin(), v->end());
  std::sort(expect.begin(), expect.end());
  CHECK(u.finite_members() == expect);
  CHECK(u.max_finite() == 60);
  const auto slot = u.classify(12);
  CHECK(slot.kind == SetKind::InfNp);
  CHECK(slot.index == 2);
  CHECK(u.classify(0).kind == SetKind::Truncated);
  CHECK(u.classify(7).kind == SetKind::Nonspecial);
}

TEST_CASE("np indices follow the order the set was given in") {
  SpecialSets s;
  s.inf_np = {9, 3};
  const SpecialUnion u(s);
  CHECK(u.classify(9).index == 0);
  CHECK(u.classify(3).index == 1);
}

TEST_CASE("lattice truncation") {
  SpecialSets s;
  s.lattice = Lattice{5, 0};
  const SpecialUnion u(s);
  CHECK(u.classify(3).kind == SetKind::Truncated);
  CHECK(u.classify(10).kind == SetKind::Nonspecial);
  s.inf_np = {7};
  CHECK_FALSE(validate_sets(s, Family::Poisson, true).empty());
}

TEST_CASE("no nonspecial value left") {
  SpecialSets s;
  s.trunc = {1, 2};
  s.inf_np = {3};
  s.trunc_tail_start = 4;
  CHECK(validate_sets(s, Family::Zeta, true).front().constraint == "|R \\ S| > 0");
}

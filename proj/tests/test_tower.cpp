#include <map>
#include <set>

#include "doctest.h"
#include "proxshift/report.hpp"
#include "support.hpp"

using namespace proxshift;
using testing::split;

TEST_CASE("coding of B = {0, 3, 4, 6, 9}") {
  const TowerLevel lv(0, split(10, {1, 2, 5, 7, 8}), 1, 1);
  CHECK(lv.b() == 5);
  const std::map<Index, Index> tau{{0, 0}, {3, 1}, {4, 2}, {6, 3}, {9, 4}};
  const std::map<Index, Index> f{{0, 0}, {3, -2}, {4, -1}, {6, 0}, {9, -2}};
  const std::map<Index, Index> f_inv{{-2, 3}, {-1, 4}, {0, 6}};
  for (auto [i, t] : tau) CHECK(lv.tau(i) == t);
  for (auto [i, v] : f) CHECK(lv.f(i) == v);
  for (auto [v, i] : f_inv) CHECK(lv.f_inv(v) == i);
  CHECK(lv.f(0) == lv.f(lv.tau_inv(lv.b() - 2)));
  CHECK(lv.f(9) == lv.f(lv.tau_inv(1)));
  CHECK(lv.c() == std::vector<Index>{3, 4, 6});
  CHECK(lv.b_prime() == 3);
  CHECK(lv.g_exponent(0) == 0);
  CHECK_THROWS(lv.f(1));
  CHECK_THROWS(lv.f_inv(1));
  CHECK_THROWS(lv.f_inv(-3));

  const CodingTable t = level_coding(lv);
  CHECK(t.tau.size() == 5);
  CHECK(t.f_inv.size() == 3);
}

TEST_CASE("g exponent scales by the previous b'") {
  const TowerLevel lv(1, split(10, {1, 2, 5, 7, 8}), 10, 3);
  CHECK(lv.g_exponent(9) == -6);
  CHECK(lv.g_exponent(0) == 0);
  CHECK(lv.p() == 100);
  CHECK(lv.b_prime() == 9);
}

TEST_CASE("levels need a well-formed partition with #B >= 4") {
  CHECK_THROWS_AS(TowerLevel(0, split(5, {1, 2}), 1, 1), std::invalid_argument);
  Partition bad = split(10, {1, 2});
  bad.a.push_back(0);
  CHECK_THROWS_AS(TowerLevel(0, bad, 1, 1), std::invalid_argument);
}

TEST_CASE("f restricted to C is a bijection onto (-(b-2), 0] on every toy level") {
  const auto tower = testing::toy_tower();
  for (const TowerLevel& lv : tower->levels()) {
    std::set<Index> image;
    for (Index c : lv.c()) image.insert(lv.f(c));
    CHECK(static_cast<Index>(image.size()) == lv.b() - 2);
    CHECK(*image.begin() == -(lv.b() - 3));
    CHECK(*image.rbegin() == 0);
    CHECK(lv.f(0) == 0);
    CHECK(lv.f(lv.n() - 1) == -(lv.b() - 3));
    for (Index v = -(lv.b() - 3); v <= 0; ++v) CHECK(lv.f(lv.f_inv(v)) == v);
  }
}

TEST_CASE("index sets of the hand tower") {
  const auto tower = testing::hand_tower();
  const IndexSets s0 = index_sets(*tower, 0);
  CHECK(s0.j == std::vector<Index>{3, 4, 6});
  CHECK(s0.i_lo == -2);
  CHECK(s0.count == 3);
  const IndexSets s1 = index_sets(*tower, 1);
  CHECK(tower->level(1).c() == std::vector<Index>{2, 3, 5});
  CHECK(s1.j == std::vector<Index>{23, 24, 26, 33, 34, 36, 53, 54, 56});
  CHECK(s1.count == 9);
  CHECK(phi(*tower, 0, -2) == 3);
  CHECK(phi(*tower, 0, -1) == 4);
  CHECK(phi(*tower, 0, 0) == 6);
  CHECK_THROWS(phi(*tower, 0, 1));
  CHECK_THROWS(phi(*tower, 0, -3));
  CHECK_THROWS(phi_inv(*tower, 0, 5));
  CHECK_THROWS(index_sets(*tower, 2));
}

TEST_CASE("phi is the increasing bijection I_k -> J_k on toy towers") {
  const auto tower = testing::toy_tower();
  for (int k = 0; k <= tower->depth(); ++k) {
    const IndexSets s = index_sets(*tower, k);
    REQUIRE_FALSE(s.elided);
    // J_k from scratch: coordinates of [0, p_k) whose digits all lie in C.
    std::vector<Index> j;
    for (Index m = 0; m < tower->p(k); ++m) {
      bool in = true;
      Index rest = m;
      for (int l = 0; l <= k && in; ++l) {
        const TowerLevel& lv = tower->level(l);
        const Index d = rest % lv.n();
        rest /= lv.n();
        in = std::binary_search(lv.c().begin(), lv.c().end(), d);
      }
      if (in) j.push_back(m);
    }
    CHECK(s.j == j);
    CHECK(s.count == tower->b_prime(k));
    Index prev = -1;
    for (Index n = s.i_lo; n <= 0; ++n) {
      const Index m = phi(*tower, k, n);
      CHECK(m > prev);
      CHECK(m == j[static_cast<std::size_t>(n - s.i_lo)]);
      CHECK(phi_inv(*tower, k, m) == n);
      prev = m;
    }
    CHECK(phi(*tower, k, 0) == j.back());
  }
}

TEST_CASE("phi block identity phi_{k+1}(j b'_k + I_k) = f^{-1}(j) p_k + J_k") {
  const auto tower = testing::toy_tower();
  for (int k = 0; k + 1 <= tower->depth(); ++k) {
    const TowerLevel& up = tower->level(k + 1);
    const IndexSets s = index_sets(*tower, k);
    for (Index jv = -(up.b() - 3); jv <= 0; ++jv) {
      for (Index t = 0; t < s.count; ++t) {
        const Index n = jv * tower->b_prime(k) + s.i_lo + t;
        CHECK(phi(*tower, k + 1, n) == up.f_inv(jv) * tower->p(k) + s.j[static_cast<std::size_t>(t)]);
      }
    }
  }
}

TEST_CASE("index sets are elided above the cap") {
  const auto tower = testing::toy_tower();
  const IndexSets s = index_sets(*tower, 3, 100);
  CHECK(s.elided);
  CHECK(s.j.empty());
  CHECK(s.count == tower->b_prime(3));
}

TEST_CASE("strict tower for eps_k = 1/2^(k+3)") {
  const Tower t = build_tower(EpsSchedule::geometric(1, 2, 3), 1, testing::full2());
  CHECK(t.level(0).n() == 173);
  CHECK(t.level(1).n() == 605);
  CHECK(t.p(0) == 173);
  CHECK(t.p(1) == 173 * 605);
  CHECK(t.p(-1) == 1);
  CHECK(t.b_prime(-1) == 1);
  CHECK(t.level(0).b() == 153);
  CHECK(t.b_prime(0) == 151);
  CHECK(t.all_strict(1));
  CHECK(t.negative_seed_exponent(0) == 150);
  CHECK(t.negative_seed_exponent(1) == 150 + 151 * (t.level(1).b() - 3));
  // #J_K >= p_K prod (1 - 2 eps_k), exactly.
  for (int k = 0; k <= 1; ++k) {
    CHECK(BigRational(t.b_prime(k), t.p(k)) >= t.schedule().product_lower_bound(k));
  }
  CHECK(t.schedule().product_lower_bound(0) == BigRational(3, 4));
}

TEST_CASE("strict n_k must exceed the previous level") {
  // A constant schedule makes both minima equal; the second level moves up.
  const Tower t = build_tower(EpsSchedule::explicit_list({Rational(1, 5), Rational(1, 5)}), 1, testing::full2());
  CHECK(t.level(0).n() == 78);
  CHECK(t.level(1).n() == 79);
}

TEST_CASE("eps schedules") {
  const EpsSchedule g = EpsSchedule::geometric(1, 2, 3);
  CHECK(g.eps(0) == Rational(1, 8));
  CHECK(g.eps(2) == Rational(1, 32));
  CHECK(g.well_formed(5));
  CHECK(g.product_positive());
  CHECK_FALSE(g.length().has_value());
  const EpsSchedule l = EpsSchedule::explicit_list({Rational(1, 3), Rational(2, 5)});
  CHECK(l.length() == 2);
  CHECK_FALSE(l.well_formed(1));  // not decreasing
  CHECK_THROWS_AS(l.eps(2), std::out_of_range);
  CHECK(EpsSchedule::explicit_list({Rational(1, 4)}).product_lower_bound(0) == BigRational(1, 2));
  CHECK_THROWS(EpsSchedule::geometric(1, 1, 3));
  CHECK(g.describe() == "1/2^(k+3)");
}

TEST_CASE("toy mode gates user levels") {
  const EpsSchedule sched = EpsSchedule::explicit_list({Rational(3, 5), Rational(3, 5)});
  BuildOptions opt;
  opt.mode = TowerMode::toy;
  opt.toy = parse_toy_levels(R"({"levels": [{"n": 10, "A": [1, 2, 5, 7, 8]}]})");
  CHECK_THROWS_AS(build_tower(sched, 0, testing::full2(), opt), std::runtime_error);

  opt.toy = parse_toy_levels(R"({"eps": ["1/3", "1/3"], "levels": [{"n": 13, "A": [1, 2, 4, 10]},
                                                              {"n": 16, "A": [1, 2, 3, 6, 9]}]})");
  const Tower t = build_tower(sched, 1, testing::full2(), opt);
  CHECK(t.p(1) == 208);
  CHECK(t.level(0).structural());
  CHECK_THROWS(parse_toy_levels(R"({"eps": ["1/3"], "levels": [{"n": 13, "A": [1, 2, 4, 10]},
                                                             {"n": 16, "A": [1, 2, 3, 6, 9]}]})"));
}

TEST_CASE("toy search reproduces the eps = 1/3 levels") {
  const auto t = testing::toy_tower();
  const std::vector<Index> n{13, 16, 17, 18};
  for (int k = 0; k <= 3; ++k) {
    CHECK(t->level(k).n() == n[static_cast<std::size_t>(k)]);
    CHECK(t->level(k).structural());
  }
  CHECK(t->level(0).part().a == std::vector<Index>{1, 2, 4, 10});
  CHECK(t->p(1) <= 10000);
}

TEST_CASE("tower JSON lists every level") {
  const auto t = testing::toy_tower(1);
  const Json j = to_json(*t, 50);
  CHECK(j["levels"].size() == 2);
  CHECK(j["levels"][0]["J"].size() == static_cast<std::size_t>(t->b_prime(0)));
  CHECK(j["levels"][1]["J"] == "elided");
  CHECK(j["levels"][1]["J_count"] == t->b_prime(1));
}

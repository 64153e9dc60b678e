#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "proxshift/partition.hpp"
#include "support.hpp"

using namespace proxshift;
using testing::split;

namespace {

// Direct transcription of the size conditions, in long double.
bool size_conditions(Index n, long double eps) {
  return std::sqrt(n / 2.0L) >= 4.0L && std::sqrt(2.0L / n) + 3.0L / n < eps;
}

Index scan_min_n(long double eps) {
  Index n = 1;
  while (!size_conditions(n, eps)) ++n;
  return n;
}

struct Oracle {
  bool i = false, ii = false, iii = false;
  Index worst = 0;
};

// Brute-force reading of the three properties with std::set.
Oracle oracle(const Partition& p, long double eps) {
  const std::set<Index> a(p.a.begin(), p.a.end());
  const std::set<Index> b(p.b.begin(), p.b.end());
  Oracle o;
  o.i = a.size() >= 2 && static_cast<long double>(a.size()) < p.n * eps;
  o.ii = true;
  for (Index i = 0; i < p.n; ++i) {
    bool hit = false;
    for (Index x : a) hit = hit || a.count(x + i) || a.count(x + i - p.n);
    o.ii = o.ii && hit;
  }
  o.iii = true;
  o.worst = p.n;
  for (Index i = 1; i <= p.n / 2 + 1; ++i) {
    Index count = 0;
    for (Index x : a) count += b.count(x + i);
    o.worst = std::min(o.worst, count);
    if (static_cast<long double>(count) < std::sqrt(p.n / 2.0L) - 1.0L) o.iii = false;
  }
  return o;
}

}  // namespace

TEST_CASE("min_valid_n agrees with a direct scan") {
  CHECK(min_valid_n(Rational(1, 5)) == 78);
  CHECK_FALSE(size_conditions(77, 0.2L));
  CHECK(size_conditions(78, 0.2L));
  CHECK(min_valid_n(Rational::parse("0.9999")) == 32);
  CHECK(min_valid_n(Rational(1, 2)) == scan_min_n(0.5L));
  CHECK(min_valid_n(Rational(1, 8)) == 173);
  CHECK(min_valid_n(Rational(1, 16)) == 605);
  for (Index den = 3; den <= 40; ++den) {
    CHECK(min_valid_n(Rational(1, den)) == scan_min_n(1.0L / den));
  }
}

TEST_CASE("make_partition for n = 100, eps = 1/5") {
  const Partition p = make_partition(100, Rational(1, 5));
  const CombShape s = comb_shape(100);
  CHECK(s.p == 8);
  CHECK(s.q == 7);
  CHECK(s.r0 == 4);
  CHECK(s.k0 == 12);
  CHECK(p.a == std::vector<Index>{1, 2, 3, 4, 5, 6, 7, 8, 12, 20, 28, 36, 44, 52, 60, 68});
  CHECK(p.a.size() <= static_cast<std::size_t>(s.p + s.q + 1));
  CHECK(p.a.size() + p.b.size() == 100);
  const PartitionReport r = verify_partition(p, Rational(1, 5));
  CHECK(r.strict);
  CHECK(r.size_a == 16);
  CHECK(r.n_eps == Rational(20, 1));
  const Oracle o = oracle(p, 0.2L);
  CHECK(o.i);
  CHECK(o.ii);
  CHECK(o.iii);
}

TEST_CASE("make_partition n = 200, eps = 1/8 is strict") {
  const Partition p = make_partition(200, Rational(1, 8));
  CHECK(verify_partition(p, Rational(1, 8)).strict);
  const Oracle o = oracle(p, 0.125L);
  CHECK((o.i && o.ii && o.iii));
}

TEST_CASE("make_partition rejects n below the minimum") {
  CHECK_THROWS_AS(make_partition(31, Rational(1, 5)), std::invalid_argument);
  CHECK_THROWS_AS(make_partition(77, Rational(1, 5)), std::invalid_argument);
}

TEST_CASE("the n = 10 example fails (iii) at shift 3") {
  const Partition p = split(10, {1, 2, 5, 7, 8});
  CHECK(p.b == std::vector<Index>{0, 3, 4, 6, 9});
  const PartitionReport r = verify_partition(p, Rational(3, 5));
  CHECK(r.well_formed);
  CHECK(r.prop_ii);
  CHECK_FALSE(r.prop_iii);
  CHECK(r.prop_iii_counts.at(2) == 1);  // shift 3: (A+3) n B = {4}
  CHECK(r.prop_iii_counts.at(5) == 0);  // shift 6: A+6 misses B
  CHECK_FALSE(r.structural);
  CHECK_FALSE(r.strict);
}

TEST_CASE("shift 0 of (ii) always holds") {
  const Partition p = split(12, {3, 7});
  const PartitionReport r = verify_partition(p, Rational(1, 2));
  CHECK(std::find(r.prop_ii_failures.begin(), r.prop_ii_failures.end(), 0) == r.prop_ii_failures.end());
}

TEST_CASE("malformed partitions fail quietly") {
  Partition p = split(10, {1, 2, 5});
  p.a.insert(p.a.begin(), 0);
  CHECK_FALSE(verify_partition(p, Rational(1, 2)).well_formed);
  Partition q = split(10, {1, 2, 5});
  q.b.pop_back();  // 9 is in neither set
  const PartitionReport r = verify_partition(q, Rational(1, 2));
  CHECK_FALSE(r.well_formed);
  CHECK_FALSE(r.structural);
  Partition big = split(10, {1, 2});
  big.a.push_back(12);
  CHECK_FALSE(verify_partition(big, Rational(1, 2)).well_formed);
}

TEST_CASE("verify_partition agrees with the set oracle on random partitions") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 400; ++t) {
    const Index n = std::uniform_int_distribution<Index>(4, 40)(rng);
    std::vector<Index> a;
    for (Index i = 1; i + 1 < n; ++i) {
      if (rng() % 3 == 0) a.push_back(i);
    }
    const Partition p = split(n, a);
    const Rational eps(1, 3);
    const PartitionReport r = verify_partition(p, eps);
    const Oracle o = oracle(p, 1.0L / 3);
    CHECK(r.prop_i == o.i);
    CHECK(r.prop_ii == o.ii);
    CHECK(r.prop_iii == o.iii);
    CHECK(r.strict == (o.i && o.ii && o.iii));
    CHECK(r.structural == (a.size() >= 2 && o.ii && o.worst >= 1));
  }
}

TEST_CASE("search_min_partition") {
  SUBCASE("eps 0.99 finds a small structural partition") {
    const auto p = search_min_partition(Rational::parse("0.99"), 12);
    REQUIRE(p.has_value());
    CHECK(p->n <= 12);
    CHECK(passes(verify_partition(*p, Rational::parse("0.99")), Gate::structural));
    // Nothing smaller exists: check every subset for every n below.
    for (Index n = 1; n < p->n; ++n) {
      for (std::uint32_t mask = 0; mask < (1u << std::max<Index>(n - 2, 0)); ++mask) {
        std::vector<Index> a;
        for (Index i = 1; i + 1 < n; ++i) {
          if (mask & (1u << (i - 1))) a.push_back(i);
        }
        const PartitionReport r = verify_partition(split(n, a), Rational::parse("0.99"));
        CHECK_FALSE((r.prop_i && r.structural));
      }
    }
  }
  SUBCASE("eps 0.01 has nothing up to 20") {
    CHECK_FALSE(search_min_partition(Rational(1, 100), 20).has_value());
  }
  SUBCASE("strict gate and lower bounds") {
    SearchOptions opt;
    opt.gate = Gate::strict;
    opt.n_min = 14;
    opt.min_b = 4;
    const auto p = search_min_partition(Rational(1, 3), 30, opt);
    REQUIRE(p.has_value());
    CHECK(p->n >= 14);
    CHECK(p->b.size() >= 4);
    CHECK(verify_partition(*p, Rational(1, 3)).strict);
  }
}

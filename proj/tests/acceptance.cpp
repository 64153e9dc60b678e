// Acceptance criteria 1-11. Prints one line per criterion and exits
// nonzero when any fails or exceeds its time budget.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "proxshift/suite.hpp"
#include "support.hpp"

using namespace proxshift;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Body = std::function<Outcome()>;

std::shared_ptr<const Tower> strict_tower(int depth) {
  return std::make_shared<const Tower>(build_tower(EpsSchedule::geometric(1, 2, 3), depth, testing::full2()));
}

PointSpec sample(const std::shared_ptr<const Tower>& t, std::mt19937_64& rng, RootId id) {
  return PointSpec::sample(t, random_point(t->base().base, 16, rng), id);
}

Index uniform(std::mt19937_64& rng, Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); }

// 1. Partition property on the 30 smallest admissible n for three eps values.
Outcome partition_property() {
  Outcome out;
  Index checked = 0;
  for (const Rational eps : {Rational(1, 8), Rational(1, 5), Rational(3, 10)}) {
    const Index n0 = min_valid_n(eps);
    for (Index n = n0; n < n0 + 30; ++n) {
      const Partition p = make_partition(n, eps);
      const std::set<Index> a(p.a.begin(), p.a.end());
      const std::set<Index> b(p.b.begin(), p.b.end());
      bool ok = a.size() >= 2 && static_cast<Index>(a.size()) * eps.den() < n * eps.num();
      for (Index i = 0; i < n && ok; ++i) {
        bool hit = false;
        for (Index x : a) hit = hit || a.count(x + i) || a.count(x + i - n);
        ok = hit;
      }
      for (Index i = 1; 2 * i <= n + 2 && ok; ++i) {
        Index count = 0;
        for (Index x : a) count += b.count(x + i);
        // count >= sqrt(n/2) - 1  <=>  2 (count + 1)^2 >= n
        ok = 2 * (count + 1) * (count + 1) >= n;
      }
      ok = ok && verify_partition(p, eps).strict;
      if (!ok) {
        out.pass = false;
        out.detail = "fails at eps " + eps.str() + ", n " + std::to_string(n);
        return out;
      }
      ++checked;
    }
  }
  out.detail = std::to_string(checked) + " partitions";
  return out;
}

// 2. #J_0 / p_0 >= 1 - 2 eps_0 = 3/4 on the strict level 0.
Outcome strict_level_zero() {
  const auto t = strict_tower(0);
  const IndexSets s = index_sets(*t, 0);
  const auto j0 = static_cast<Index>(s.j.size());
  Outcome out;
  out.pass = 4 * j0 >= 3 * t->p(0) && t->level(0).strict();
  out.detail = "#J_0 = " + std::to_string(j0) + ", p_0 = " + std::to_string(t->p(0));
  return out;
}

// 3. J_1 by its recursion, and phi_1 as an increasing bijection onto it.
Outcome toy_index_sets() {
  const auto t = testing::toy_tower(1);
  Outcome out;
  if (t->p(1) > 10000 || !t->level(0).structural() || !t->level(1).structural()) {
    return {false, "toy tower out of range"};
  }
  std::vector<Index> j1;
  for (Index c1 : t->level(1).c()) {
    for (Index j0 : t->level(0).c()) j1.push_back(t->p(0) * c1 + j0);
  }
  const auto expect = static_cast<Index>(t->level(0).c().size() * t->level(1).c().size());
  out.pass = static_cast<Index>(j1.size()) == expect && std::is_sorted(j1.begin(), j1.end()) &&
             index_sets(*t, 1).j == j1;
  const Index lo = -(t->b_prime(1) - 1);
  std::set<Index> image;
  Index prev = -1;
  for (Index n = lo; n <= 0 && out.pass; ++n) {
    const Index m = phi(*t, 1, n);
    out.pass = m > prev && std::binary_search(j1.begin(), j1.end(), m);
    image.insert(m);
    prev = m;
  }
  out.pass = out.pass && static_cast<Index>(image.size()) == expect;
  const TowerLevel& up = t->level(1);
  const IndexSets s0 = index_sets(*t, 0);
  for (Index jv = -(up.b() - 3); jv <= 0 && out.pass; ++jv) {
    for (Index i = 0; i < s0.count; ++i) {
      if (phi(*t, 1, jv * t->b_prime(0) + s0.i_lo + i) != up.f_inv(jv) * t->p(0) + s0.j[static_cast<std::size_t>(i)]) {
        out.pass = false;
      }
    }
  }
  out.detail = "#J_1 = " + std::to_string(j1.size()) + " = #C_0 #C_1, p_1 = " + std::to_string(t->p(1));
  return out;
}

// 4. x_{phi_K(n)} = T^n z for n in I_K and 20 random roots.
Outcome orbit_embedding() {
  const auto t = testing::toy_tower(2);
  std::mt19937_64 rng(404);
  Index probes = 0;
  for (int r = 0; r < 20; ++r) {
    const PointSpec x = sample(t, rng, static_cast<RootId>(r));
    for (int K = 0; K <= 2; ++K) {
      for (Index n = -(t->b_prime(K) - 1); n <= 0; ++n) {
        if (!(symbol_at(x, phi(*t, K, n)) == Coordinate::orbit(static_cast<RootId>(r), n))) {
          return {false, "mismatch at K " + std::to_string(K) + ", n " + std::to_string(n)};
        }
        ++probes;
      }
    }
  }
  return {true, std::to_string(probes) + " probes over K = 0..2"};
}

// 5. decode_r on 4 p_1 windows of 100 random shifts.
Outcome decoder_round_trip() {
  const auto t = testing::toy_tower(2);
  std::mt19937_64 rng(505);
  const PointSpec x = sample(t, rng, 0);
  int unique = 0;
  for (int n = 0; n < 100; ++n) {
    const Index s = uniform(rng, 0, t->p(1) - 1);
    const Window w = window(shift_point(x, s), -s - 2 * t->p(1), -s + 2 * t->p(1));
    const DecodeResult d = decode_r(w, *t, 1);
    const bool ok = d.status == DecodeStatus::unique && d.r.r == std::vector<Index>{(t->p(0) - s % t->p(0)) % t->p(0),
                                                                                     (t->p(1) - s) % t->p(1)};
    unique += ok;
  }
  return {unique == 100, std::to_string(unique) + "/100 unique and correct"};
}

// 6. Common star blocks for N up to floor(p_k/2) - 1, rechecked here.
Outcome proximality() {
  const auto t = testing::toy_tower(3);
  std::mt19937_64 rng(606);
  std::vector<PointSpec> roots;
  for (RootId id = 0; id < 8; ++id) roots.push_back(sample(t, rng, id));
  Index blocks = 0;
  for (int n = 0; n < 50; ++n) {
    const PointSpec& rx = roots[static_cast<std::size_t>(n) % roots.size()];
    const PointSpec& ry = n % 2 == 0 ? rx : roots[static_cast<std::size_t>(n + 1) % roots.size()];
    const Index sx = uniform(rng, 0, t->p(1) - 1);
    Index sy = uniform(rng, 0, t->p(1) - 1);
    if (n % 2 == 0 && sy == sx) sy = (sx + 1) % t->p(1);
    const PointSpec x = shift_point(rx, sx);
    const PointSpec y = shift_point(ry, sy);
    for (int k = 0; k <= 1; ++k) {
      for (Index N : {Index(1), t->p(k) / 4, t->p(k) / 2 - 1}) {
        const CommonStarBlock c = find_common_star_block(x, y, N, k);
        bool ok = c.verified && c.n_plus > N && c.n_minus < -N;
        for (Index i = 0; i < N && ok; ++i) {
          ok = symbol_at(x, c.n_plus + i).star && symbol_at(y, c.n_plus + i).star &&
               symbol_at(x, c.n_minus - N + i).star && symbol_at(y, c.n_minus - N + i).star;
        }
        if (!ok) return {false, "pair " + std::to_string(n) + " level " + std::to_string(k)};
        ++blocks;
      }
    }
  }
  return {true, std::to_string(blocks) + " block pairs re-verified"};
}

// Coordinates of [lo, lo + len) at distance exactly star_distance.
Index at_star_distance(const PointSpec& x, const PointSpec& y, const RootTable& roots, const StarSpace& space,
                       Index lo, Index len) {
  Index count = 0;
  for (Index i = lo; i < lo + len; ++i) {
    count += roots.distance(symbol_at(x, i), symbol_at(y, i), space) == space.star_distance;
  }
  return count;
}

// 7. Per-block separation bound on the strict level 0.
Outcome separation_bound() {
  const auto t = strict_tower(1);
  const Index bound = ceil_sqrt_half_minus_one(t->level(0).n());
  std::mt19937_64 rng(707);
  std::vector<PointSpec> roots;
  for (RootId id = 0; id < 4; ++id) roots.push_back(sample(t, rng, id));
  Index blocks = 0;
  Index worst = t->p(0);
  for (int n = 0; n < 30; ++n) {
    const PointSpec& rx = roots[static_cast<std::size_t>(n) % roots.size()];
    const PointSpec& ry = n % 2 == 0 ? rx : roots[static_cast<std::size_t>(n + 1) % roots.size()];
    const Index sx = uniform(rng, 0, t->p(1) - 1);
    Index sy = uniform(rng, 0, t->p(1) - 1);
    if ((sy - sx) % t->p(0) == 0) sy = (sy + 1) % t->p(1);
    const PointSpec x = shift_point(rx, sx);
    const PointSpec y = shift_point(ry, sy);
    const Index lo = std::max({x.lo(), y.lo(), -30 * t->p(0)});
    const Index hi = std::min({x.hi(), y.hi(), 30 * t->p(0)});
    const SeparationBlocks sb = separation_blocks(x, y, 0, lo, hi);
    if (!sb.asserted || sb.bound != bound || sb.rows.empty()) return {false, "no asserted blocks"};
    RootTable table;
    table.add(rx.root_id(), rx.root());
    table.add(ry.root_id(), ry.root());
    for (const BlockRow& row : sb.rows) {
      const Index count = at_star_distance(x, y, table, t->base(), row.block_start, t->p(0));
      worst = std::min(worst, count);
      if (count < bound) return {false, "block at " + std::to_string(row.block_start) + " has " + std::to_string(count)};
      ++blocks;
    }
  }
  return {true, std::to_string(blocks) + " blocks, min " + std::to_string(worst) + " >= " + std::to_string(bound)};
}

// 8. Sample against the all-star point: >= #B_0 per non-star p_0 block.
Outcome star_point_separations() {
  const auto t = strict_tower(1);
  std::mt19937_64 rng(808);
  const PointSpec x = sample(t, rng, 0);
  const PointSpec star = PointSpec::all_star(t);
  RootTable table;
  table.add(0, x.root());
  const Index b0 = t->level(0).b();
  Index blocks = 0;
  for (Index start = -t->p(1); start < t->p(1); start += t->p(0)) {
    if (symbol_at(x, start).star) continue;  // block sits in a level-1 * slot
    if (at_star_distance(x, star, table, t->base(), start, t->p(0)) < b0) {
      return {false, "block at " + std::to_string(start)};
    }
    ++blocks;
  }
  const SeparationBlocks sb = separation_blocks(x, star, 0, -t->p(1), t->p(1));
  const bool agree = sb.pass && static_cast<Index>(sb.rows.size()) == blocks;
  return {agree && blocks > 0, std::to_string(blocks) + " blocks >= #B_0 = " + std::to_string(b0)};
}

// 9. m' keeps the coordinate and the orbit windows reach b'_{k-1}.
Outcome mprime_machinery() {
  const auto t = testing::toy_tower(3);
  std::mt19937_64 rng(909);
  const PointSpec x = sample(t, rng, 0);
  const int K = 1;
  Index reach_checks = 0;
  for (int n = 0; n < 50; ++n) {
    const int forced = static_cast<int>(uniform(rng, 0, K));
    Index m = 0;
    for (int k = 0; k <= t->depth(); ++k) {
      const TowerLevel& lv = t->level(k);
      Index d = 0;
      if (k > K) {
        d = lv.tau_inv(uniform(rng, 2, lv.b() - 3));
      } else if (k == forced) {
        const Index ranks[] = {0, 1, lv.b() - 2, lv.b() - 1};
        d = lv.tau_inv(ranks[uniform(rng, 0, 3)]);
      } else {
        d = lv.tau_inv(uniform(rng, 0, lv.b() - 1));
      }
      m += d * t->p(k - 1);
    }
    const MPrime mp = compute_mprime(x, m, K);
    if (mp.boundary_levels.empty()) return {false, "S is empty for a forced boundary digit"};
    const Coordinate cm = symbol_at(x, m);
    if (cm.star || !(symbol_at(x, mp.m_prime) == cm)) return {false, "x_m' differs from x_m"};
    for (int k = 0; k <= K; ++k) {
      const OrbitWindowReport ow = check_orbit_window(x, mp.m_prime, k);
      for (Index v = ow.n_lo; v <= ow.n_hi; ++v) {
        const Coordinate got = symbol_at(x, ow.block_start + phi(*t, k, v + ow.alpha));
        if (!(got == Coordinate::orbit(cm.root, cm.exponent + v))) return {false, "orbit window mismatch"};
      }
      const TowerLevel& lv = t->level(k);
      const Index f = lv.f(mp.digits_prime[static_cast<std::size_t>(k)]);
      if (f <= -1 && f >= -(lv.b() - 4)) {
        ++reach_checks;
        if (ow.achieved_N < t->b_prime(k - 1)) return {false, "achieved N below b'_{k-1}"};
      }
    }
  }
  return {reach_checks > 0, "50 coordinates, " + std::to_string(reach_checks) + " interior reach checks"};
}

// 10. Golden-mean entropy and the strict entropy chain.
Outcome entropy_chain() {
  const EntropyEstimate golden = entropy_estimate(BaseSystem::golden_mean(), 20, 20, 0.5);
  const double target = std::log((1 + std::sqrt(5.0)) / 2);
  Outcome out;
  out.pass = std::abs(golden.value - target) < 0.05;
  const auto t = strict_tower(2);
  BigRational ratio = 1;
  for (int K = 0; K <= 2; ++K) {
    const TowerLevel& lv = t->level(K);
    ratio *= BigRational(static_cast<Index>(lv.c().size()), lv.n());
    const EntropyBound e = entropy_lower_bound(*t, K, std::log(2.0));
    BigRational schedule = 1;
    for (int k = 0; k <= K; ++k) schedule *= 1 - 2 * BigRational(1, Index{1} << (k + 3));
    out.pass = out.pass && e.strict && e.pass && e.ratio == ratio && e.schedule_product == schedule &&
               ratio >= schedule && e.bound >= e.schedule_bound;
  }
  std::ostringstream os;
  os << std::setprecision(5) << "golden " << golden.value << " vs " << target << ", K = 0..2 exact";
  out.detail = os.str();
  return out;
}

// 11. The default suite twice with one seed.
Outcome determinism() {
  ExperimentConfig c;
  c.seed = 11;
  SuiteResult a = run_suite(c);
  SuiteResult b = run_suite(c);
  const bool ok_a = a.exit_code == kExitOk;
  a.report.erase("timestamp");
  b.report.erase("timestamp");
  const bool same = a.report.dump() == b.report.dump() && a.csv == b.csv;
  return {ok_a && same, std::string(same ? "identical" : "differ") + ", exit " + std::to_string(a.exit_code)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double budget;
    Body body;
  };
  const std::vector<Criterion> criteria{
      {1, "partition property, exhaustive", 10, partition_property},
      {2, "strict level 0 entropy ratio", 1, strict_level_zero},
      {3, "toy J_1 and phi_1", 5, toy_index_sets},
      {4, "orbit embedding", 10, orbit_embedding},
      {5, "decoder round trip", 30, decoder_round_trip},
      {6, "proximality witnesses", 30, proximality},
      {7, "separation bound", 10, separation_bound},
      {8, "star-point separations", 5, star_point_separations},
      {9, "m' machinery", 30, mprime_machinery},
      {10, "entropy chain", 10, entropy_chain},
      {11, "determinism", 120, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << "criterion " << std::setw(2) << c.id << ' ' << (pass ? "PASS" : "FAIL") << "  " << c.name << ": "
              << o.detail << " (" << std::fixed << std::setprecision(2) << secs << " s of " << c.budget << " s)"
              << (in_time ? "" : " over budget") << '\n';
  }
  return failed == 0 ? 0 : 1;
}

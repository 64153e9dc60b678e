#include "proxshift/analysis.hpp"

#include <algorithm>
#include <stdexcept>

namespace proxshift {

namespace {

Index floor_mod(Index a, Index m) {
  Index r = a % m;
  return r < 0 ? r + m : r;
}

// Digit of index i at level k for phase r_k.
Index digit_at(const Tower& tower, Index r_k, int k, Index i) {
  return floor_mod(i - r_k, tower.p(k)) / tower.p(k - 1);
}

bool both_star(const PointSpec& x, const PointSpec& y, Index i) {
  return symbol_at(x, i).star && symbol_at(y, i).star;
}

}  // namespace

std::vector<Index> star_support(const Tower& tower, const RSequence& r, int K, Index lo, Index hi) {
  if (K > tower.depth() || r.depth() < K) throw std::out_of_range("star_support: level beyond depth");
  std::vector<Index> out;
  for (Index i = lo; i < hi; ++i) {
    for (int k = 0; k <= K; ++k) {
      if (tower.level(k).in_a(digit_at(tower, r.at(k), k, i))) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

std::vector<Index> orbit_support(const Tower& tower, const RSequence& r, int K, Index lo, Index hi) {
  if (K > tower.depth() || r.depth() < K) throw std::out_of_range("orbit_support: level beyond depth");
  std::vector<Index> out;
  for (Index i = lo; i < hi; ++i) {
    bool all_b = true;
    for (int k = 0; k <= K && all_b; ++k) all_b = tower.level(k).in_b(digit_at(tower, r.at(k), k, i));
    if (all_b) out.push_back(i);
  }
  return out;
}

RootTable roots_of(const PointSpec& x, const PointSpec& y) {
  RootTable t;
  if (!x.is_all_star()) t.add(x.root_id(), x.root());
  if (!y.is_all_star()) {
    if (t.contains(y.root_id()) && !(t.get(y.root_id()) == y.root())) {
      throw std::invalid_argument("root id " + std::to_string(y.root_id()) + " names two different base points");
    }
    t.add(y.root_id(), y.root());
  }
  return t;
}

// --- common star blocks -----------------------------------------------------

CommonStarBlock find_common_star_block(const PointSpec& x, const PointSpec& y, Index N,
                                       std::optional<int> level) {
  if (N < 1) throw std::invalid_argument("find_common_star_block: N must be positive");
  CommonStarBlock out;
  out.N = N;
  if (x.is_all_star() && y.is_all_star()) {
    out.n_plus = N + 1;
    out.n_minus = -N - 1;
    out.verified = true;
    return out;
  }
  const Tower& tower = x.is_all_star() ? y.tower() : x.tower();
  int k = 0;
  if (level) {
    k = *level;
    if (2 * N >= tower.p(k)) throw std::out_of_range("find_common_star_block: N >= p_k / 2");
  } else {
    while (k <= tower.depth() && 2 * N >= tower.p(k)) ++k;
  }
  if (k + 1 > tower.depth()) {
    throw std::out_of_range("find_common_star_block: N = " + std::to_string(N) +
                            " needs level " + std::to_string(k + 1) + ", tower depth is " +
                            std::to_string(tower.depth()));
  }
  const TowerLevel& up = tower.level(k + 1);
  if (!up.report().prop_ii) {
    throw std::runtime_error("level " + std::to_string(k + 1) + " lacks the difference-cover property");
  }
  out.level = k;

  // The all-star point is * wherever the other point is, so it may borrow
  // the other point's phases.
  Index rx = x.is_all_star() ? y.phases(k + 1).at(k + 1) : x.phases(k + 1).at(k + 1);
  Index ry = y.is_all_star() ? rx : y.phases(k + 1).at(k + 1);
  if (ry < rx) std::swap(rx, ry);
  const Index pk = tower.p(k);
  const Index period = tower.p(k + 1);
  const Index n = up.n();
  const Index diff = ry - rx;
  out.a = diff / pk;
  out.b = diff % pk;

  auto find_selector = [&](Index shift) -> Index {
    for (Index a : up.part().a) {
      if (up.in_a((a + shift) % n)) return a;
    }
    throw std::runtime_error("no difference-cover witness at level " + std::to_string(k + 1));
  };

  Index start = 0;
  if (2 * out.b < pk) {
    out.case_id = 1;
    out.selector = find_selector(out.a);
    start = rx + (out.selector + out.a) * pk + out.b;
  } else {
    out.case_id = 2;
    out.selector = find_selector(n - 1 - out.a);
    start = ry + (out.selector + n - 1 - out.a) * pk + (pk - out.b);
  }
  // Translate by multiples of p_{k+1} onto each side of 0.
  out.n_plus = (N + 1) + floor_mod(start - (N + 1), period);
  const Index left_start = (-2 * N - 1) - floor_mod((-2 * N - 1) - start, period);
  out.n_minus = left_start + N;

  auto covered = [&](const PointSpec& p, Index lo, Index hi) { return p.defined_at(lo) && p.defined_at(hi - 1); };
  for (const PointSpec* p : {&x, &y}) {
    if (!covered(*p, out.n_plus, out.n_plus + N) || !covered(*p, out.n_minus - N, out.n_minus)) {
      throw std::out_of_range("find_common_star_block: blocks at " + std::to_string(out.n_minus - N) +
                              " and " + std::to_string(out.n_plus) + " fall outside the tower's reach");
    }
  }
  out.verified = true;
  for (Index i = 0; i < N && out.verified; ++i) {
    out.verified = both_star(x, y, out.n_plus + i) && both_star(x, y, out.n_minus - N + i);
  }
  if (!out.verified) {
    throw std::runtime_error("common * block failed coordinate recheck (case " +
                             std::to_string(out.case_id) + ", level " + std::to_string(k) + ")");
  }
  return out;
}

// --- separations ------------------------------------------------------------

SeparationCount separation_count(const PointSpec& x, const PointSpec& y, Index lo, Index hi, double delta) {
  const RootTable roots = roots_of(x, y);
  const StarSpace& space = x.is_all_star() ? y.tower().base() : x.tower().base();
  SeparationCount out;
  for (Index i = lo; i < hi; ++i) {
    if (roots.distance(symbol_at(x, i), symbol_at(y, i), space) > delta) {
      ++out.count;
      out.indices.push_back(i);
    }
  }
  return out;
}

SeparationBlocks separation_blocks(const PointSpec& x, const PointSpec& y, int k, Index lo, Index hi) {
  if (x.is_all_star() && y.is_all_star()) throw std::invalid_argument("separation_blocks: both points are all-star");
  const Tower& tower = x.is_all_star() ? y.tower() : x.tower();
  if (k < 0 || k > tower.depth()) throw std::out_of_range("separation_blocks: level beyond depth");
  const TowerLevel& lv = tower.level(k);
  SeparationBlocks out;
  out.level = k;

  const PointSpec* ref = nullptr;
  if (x.is_all_star() || y.is_all_star()) {
    ref = x.is_all_star() ? &y : &x;
    out.reference = x.is_all_star() ? 1 : 0;
    out.bound = lv.b();
    out.asserted = true;
  } else {
    const Index rx = x.phases(k).at(k);
    const Index ry = y.phases(k).at(k);
    if (rx == ry) throw std::invalid_argument("separation_blocks: phases agree at level " + std::to_string(k));
    const bool x_first = rx < ry;
    const Index d = x_first ? ry - rx : rx - ry;
    const Index step = tower.p(k - 1);
    const Index a = (d - 1) / step;
    out.case_id = 2 * a <= lv.n() ? 1 : 2;
    const bool ref_is_lower = out.case_id == 1;
    const bool ref_is_x = ref_is_lower == x_first;
    ref = ref_is_x ? &x : &y;
    out.reference = ref_is_x ? 0 : 1;
    out.bound = ceil_sqrt_half_minus_one(lv.n());
    out.asserted = lv.strict();
  }

  const Index pk = lv.p();
  const Index r = ref->phases(k).at(k);
  out.pass = true;
  for (Index t = lo + floor_mod(r - lo, pk); t + pk <= hi; t += pk) {
    const bool covered = x.defined_at(t) && x.defined_at(t + pk - 1) && y.defined_at(t) && y.defined_at(t + pk - 1);
    if (!covered) continue;
    if (symbol_at(*ref, t).star) continue;
    BlockRow row;
    row.level = k;
    row.block_start = t;
    row.bound = out.bound;
    for (Index i = t; i < t + pk; ++i) {
      const bool sx = symbol_at(x, i).star;
      const bool sy = symbol_at(y, i).star;
      if (sx && sy) ++row.star_count;
      if (sx != sy) ++row.separation_count;
    }
    row.pass = row.separation_count >= row.bound;
    out.pass = out.pass && row.pass;
    out.rows.push_back(row);
  }
  return out;
}

// --- m' and orbit windows ---------------------------------------------------

MPrime compute_mprime(const PointSpec& x, Index m, int K) {
  if (x.is_all_star()) throw std::invalid_argument("compute_mprime: the all-star point has no orbit coordinates");
  const Tower& tower = x.tower();
  const int D = tower.depth();
  if (K < 0 || K > D) throw std::out_of_range("compute_mprime: level beyond depth");
  if (!x.defined_at(m)) throw std::out_of_range("compute_mprime: m outside the tower's reach");
  if (symbol_at(x, m).star) throw std::invalid_argument("compute_mprime: x_m is *");

  const RSequence r = x.phases(D);
  const IndexDecomposition dec = decompose_index(tower, r, m, D);
  auto boundary = [&](int k) {
    const TowerLevel& lv = tower.level(k);
    const Index t = lv.tau(dec.digits[static_cast<std::size_t>(k)]);
    return t == 0 || t == 1 || t == lv.b() - 2 || t == lv.b() - 1;
  };
  for (int k = K + 1; k <= D; ++k) {
    if (boundary(k)) {
      throw std::runtime_error("compute_mprime: level " + std::to_string(k) +
                               " above K = " + std::to_string(K) + " has a boundary digit");
    }
  }

  MPrime out;
  out.m = m;
  out.m_prime = m;
  for (int k = 0; k <= K; ++k) {
    const TowerLevel& lv = tower.level(k);
    const Index i = dec.digits[static_cast<std::size_t>(k)];
    out.digits.push_back(i);
    Index ip = i;
    if (boundary(k)) {
      out.boundary_levels.push_back(k);
      ip = lv.f_inv(lv.f(i));
    }
    out.digits_prime.push_back(ip);
    out.m_prime += (ip - i) * tower.p(k - 1);
  }
  out.m_top = decompose_index(tower, r, m, K).m_top;
  return out;
}

OrbitWindowReport check_orbit_window(const PointSpec& z, Index m_prime, int k) {
  if (z.is_all_star()) throw std::invalid_argument("check_orbit_window: the all-star point has no orbit");
  const Tower& tower = z.tower();
  if (k < 0 || k > tower.depth()) throw std::out_of_range("check_orbit_window: level beyond depth");
  const RSequence r = z.phases(k);
  const IndexDecomposition dec = decompose_index(tower, r, m_prime, k);
  OrbitWindowReport rep;
  rep.level = k;
  rep.block_start = r.at(k) + dec.m_top * tower.p(k);
  for (int l = 0; l <= k; ++l) {
    const Index d = dec.digits[static_cast<std::size_t>(l)];
    const TowerLevel& lv = tower.level(l);
    if (!lv.in_b(d) || d == 0 || d == lv.n() - 1) {
      throw std::invalid_argument("check_orbit_window: digit " + std::to_string(d) + " at level " +
                                  std::to_string(l) + " is not interior");
    }
  }
  if (!z.defined_at(rep.block_start) || !z.defined_at(rep.block_start + tower.p(k) - 1)) {
    throw std::out_of_range("check_orbit_window: block outside the tower's reach");
  }
  rep.alpha = phi_inv(tower, k, m_prime - rep.block_start);
  const Index bp = tower.b_prime(k);
  rep.n_lo = -(bp - 1) - rep.alpha;
  rep.n_hi = -rep.alpha;
  rep.achieved_N = std::min(1 - rep.alpha, bp + rep.alpha);

  const Coordinate center = symbol_at(z, m_prime);
  for (Index n = rep.n_lo; n <= rep.n_hi; ++n) {
    const Coordinate got = symbol_at(z, rep.block_start + phi(tower, k, n + rep.alpha));
    const Coordinate want = center.star ? center : Coordinate::orbit(center.root, center.exponent + n);
    ++rep.probes;
    if (!(got == want)) ++rep.mismatches;
  }
  rep.pass = rep.mismatches == 0;
  return rep;
}

// --- entropy ----------------------------------------------------------------

EntropyBound entropy_lower_bound(const Tower& tower, int K, double h_base) {
  if (K < 0 || K > tower.depth()) throw std::out_of_range("entropy_lower_bound: level beyond depth");
  EntropyBound e;
  e.level = K;
  e.h_base = h_base;
  e.ratio = BigRational(tower.b_prime(K), tower.p(K));
  e.schedule_product = tower.schedule().product_lower_bound(K);
  e.bound = e.ratio.convert_to<double>() * h_base;
  e.schedule_bound = e.schedule_product.convert_to<double>() * h_base;
  e.strict = tower.all_strict(K);
  e.pass = e.ratio >= e.schedule_product;
  return e;
}

// --- pair classification ----------------------------------------------------

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::proximal_witness: return "proximal_witness";
    case Verdict::separation_witness: return "separation_witness";
    case Verdict::both: return "both";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

PairReport classify_pair(const PointSpec& x, const PointSpec& y, Index lo, Index hi, double delta,
                         Index N, Index threshold) {
  if (hi < lo) throw std::invalid_argument("classify_pair: empty range");
  PairReport rep;
  rep.lo = lo;
  rep.hi = hi;
  rep.N = N;
  rep.delta = delta;

  if (x.is_all_star() || y.is_all_star()) {
    rep.r_match = x.is_all_star() && y.is_all_star();
  } else {
    const int D = std::min(x.depth(), y.depth());
    rep.r_match = x.phases(D) == y.phases(D);
  }

  const RootTable roots = roots_of(x, y);
  const StarSpace& space = x.is_all_star() ? y.tower().base() : x.tower().base();
  Index run_start = 0;
  Index run_len = 0;
  auto close_run = [&]() {
    if (run_len == 0) return;
    rep.star_blocks.push_back({run_start, run_len});
    const Index left = std::max<Index>(0, std::min(run_start + run_len, Index{0}) - run_start);
    const Index right = run_start + run_len - std::max(run_start, Index{0});
    rep.longest_left = std::max(rep.longest_left, left);
    rep.longest_right = std::max(rep.longest_right, std::max<Index>(right, 0));
    run_len = 0;
  };
  for (Index i = lo; i < hi; ++i) {
    const Coordinate cx = symbol_at(x, i);
    const Coordinate cy = symbol_at(y, i);
    if (cx.star && cy.star) {
      if (run_len == 0) run_start = i;
      ++run_len;
    } else {
      close_run();
    }
    if (roots.distance(cx, cy, space) > delta) {
      rep.separation_hits.push_back(i);
      ++(i < 0 ? rep.separations_left : rep.separations_right);
    }
  }
  close_run();

  const bool proximal = N > 0 && rep.longest_left >= N && rep.longest_right >= N;
  const bool separated = rep.separations_left > threshold && rep.separations_right > threshold;
  if (proximal && separated) {
    rep.verdict = Verdict::both;
  } else if (proximal) {
    rep.verdict = Verdict::proximal_witness;
  } else if (separated) {
    rep.verdict = Verdict::separation_witness;
  } else {
    rep.verdict = Verdict::inconclusive;
  }
  return rep;
}

bool shift_fixed_on(const PointSpec& p, Index lo, Index hi) {
  for (Index i = lo; i + 1 < hi; ++i) {
    if (!(symbol_at(p, i) == symbol_at(p, i + 1))) return false;
  }
  return true;
}

}  // namespace proxshift

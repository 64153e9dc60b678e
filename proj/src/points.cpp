#include "proxshift/points.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace proxshift {

namespace {

Index floor_mod(Index a, Index m) {
  Index r = a % m;
  return r < 0 ? r + m : r;
}

Index floor_div(Index a, Index m) { return (a - floor_mod(a, m)) / m; }

Index parse_index(std::string_view s) {
  Index v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

// --- coordinates ------------------------------------------------------------

std::string to_token(const Coordinate& c) {
  if (c.star) return "*";
  return "@" + std::to_string(c.root) + "^" + std::to_string(c.exponent);
}

Coordinate coordinate_from_token(std::string_view token) {
  if (token == "*") return Coordinate::star_symbol();
  if (token.size() < 4 || token.front() != '@') {
    throw std::invalid_argument("bad coordinate token '" + std::string(token) + "'");
  }
  const auto caret = token.find('^');
  if (caret == std::string_view::npos) {
    throw std::invalid_argument("bad coordinate token '" + std::string(token) + "'");
  }
  const Index root = parse_index(token.substr(1, caret - 1));
  if (root < 0 || root > std::numeric_limits<RootId>::max()) throw std::invalid_argument("root id out of range");
  return Coordinate::orbit(static_cast<RootId>(root), parse_index(token.substr(caret + 1)));
}

void RootTable::add(RootId id, BasePoint point) {
  for (auto& [rid, p] : roots_) {
    if (rid == id) {
      p = std::move(point);
      return;
    }
  }
  roots_.emplace_back(id, std::move(point));
}

const BasePoint& RootTable::get(RootId id) const {
  for (const auto& [rid, p] : roots_) {
    if (rid == id) return p;
  }
  throw std::out_of_range("unknown root id " + std::to_string(id));
}

bool RootTable::contains(RootId id) const {
  return std::any_of(roots_.begin(), roots_.end(), [&](const auto& e) { return e.first == id; });
}

bool RootTable::same_point(const Coordinate& a, const Coordinate& b) const {
  if (a.star || b.star) return a.star == b.star;
  if (a.root == b.root) return a.exponent == b.exponent;
  return shift(get(a.root), a.exponent) == shift(get(b.root), b.exponent);
}

double RootTable::distance(const Coordinate& a, const Coordinate& b, const StarSpace& space,
                           double tol) const {
  if (a.star && b.star) return 0.0;
  if (a.star || b.star) return space.star_distance;
  if (a.root == b.root && a.exponent == b.exponent) return 0.0;
  return proxshift::distance(shift(get(a.root), a.exponent), shift(get(b.root), b.exponent), tol);
}

// --- phases -----------------------------------------------------------------

bool RSequence::consistent(const Tower& tower) const {
  for (std::size_t k = 0; k < r.size(); ++k) {
    const int level = static_cast<int>(k);
    if (r[k] < 0 || r[k] >= tower.p(level)) return false;
    if (k > 0 && floor_mod(r[k] - r[k - 1], tower.p(level - 1)) != 0) return false;
  }
  return true;
}

RSequence phases_of_shift(const Tower& tower, Index s, int K) {
  RSequence out;
  for (int k = 0; k <= K; ++k) out.r.push_back(floor_mod(-s, tower.p(k)));
  return out;
}

// --- PointSpec --------------------------------------------------------------

PointSpec PointSpec::sample(std::shared_ptr<const Tower> tower, BasePoint root, RootId id) {
  if (!tower) throw std::invalid_argument("sample point needs a tower");
  if (!contains_point(tower->base().base, root)) {
    throw std::invalid_argument("root is not a point of base system '" + tower->base().base.name() + "'");
  }
  PointSpec p;
  p.tower_ = std::move(tower);
  p.root_ = std::move(root);
  p.root_id_ = id;
  return p;
}

PointSpec PointSpec::all_star(std::shared_ptr<const Tower> tower) {
  if (!tower) throw std::invalid_argument("all-star point needs a tower");
  PointSpec p;
  p.tower_ = std::move(tower);
  p.all_star_ = true;
  return p;
}

const BasePoint& PointSpec::root() const {
  if (!root_) throw std::logic_error("the all-star point has no root");
  return *root_;
}

Index PointSpec::lo() const {
  if (all_star_) return std::numeric_limits<Index>::min() / 4;
  return -tower_->p(tower_->depth()) - shift_;
}

Index PointSpec::hi() const {
  if (all_star_) return std::numeric_limits<Index>::max() / 4;
  return tower_->p(tower_->depth()) - shift_;
}

bool PointSpec::defined_at(Index i) const { return i >= lo() && i < hi(); }

RSequence PointSpec::phases(int K) const {
  if (all_star_) throw std::logic_error("the all-star point has no phases");
  if (K > depth()) throw std::out_of_range("phases: level beyond tower depth");
  return phases_of_shift(*tower_, shift_, K);
}

PointSpec shift_point(const PointSpec& p, Index s) {
  PointSpec q = p;
  if (!q.all_star_) q.shift_ += s;
  return q;
}

// --- evaluation -------------------------------------------------------------

namespace {

// Exponent of offset j in [0, p_k) of a level-k block relative to its head.
std::optional<Index> block_exponent(const Tower& tower, int k, Index j) {
  Index e = 0;
  for (int l = k; l >= 0; --l) {
    const TowerLevel& lv = tower.level(l);
    const Index digit = j / lv.p_prev();
    j %= lv.p_prev();
    if (lv.in_a(digit)) return std::nullopt;
    e += lv.g_exponent(digit);
  }
  return e;
}

}  // namespace

std::optional<Index> sample_exponent(const Tower& tower, Index i) {
  const int D = tower.depth();
  int k = 0;
  while (k <= D && !(i >= -tower.p(k) && i < tower.p(k))) ++k;
  if (k > D) {
    throw std::out_of_range("index " + std::to_string(i) + " lies outside [-p_D, p_D) for depth " +
                            std::to_string(D));
  }
  if (i >= 0) return block_exponent(tower, k, i);
  auto e = block_exponent(tower, k, i + tower.p(k));
  if (!e) return std::nullopt;
  return tower.negative_seed_exponent(k) + *e;
}

Coordinate symbol_at(const PointSpec& p, Index i) {
  if (p.is_all_star()) return Coordinate::star_symbol();
  auto e = sample_exponent(p.tower(), i + p.shift());
  if (!e) return Coordinate::star_symbol();
  return Coordinate::orbit(p.root_id(), *e);
}

Window window(const PointSpec& p, Index lo, Index hi, Index cap) {
  if (hi < lo) throw std::invalid_argument("window needs lo <= hi");
  if (hi - lo > cap) throw std::length_error("window of " + std::to_string(hi - lo) + " exceeds cap");
  if (!p.is_all_star() && (lo < p.lo() || hi > p.hi())) {
    throw std::out_of_range("window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            ") exceeds the tower's reach [" + std::to_string(p.lo()) + ", " +
                            std::to_string(p.hi()) + ")");
  }
  Window w{lo, hi, {}};
  w.coords.reserve(static_cast<std::size_t>(hi - lo));
  for (Index i = lo; i < hi; ++i) w.coords.push_back(symbol_at(p, i));
  return w;
}

std::string window_to_text(const Window& w) {
  std::string out = std::to_string(w.lo) + " " + std::to_string(w.hi) + "\n";
  for (const auto& c : w.coords) {
    out += to_token(c);
    out += '\n';
  }
  return out;
}

Window window_from_text(const std::string& text) {
  std::istringstream in(text);
  Window w;
  if (!(in >> w.lo >> w.hi) || w.hi < w.lo) throw std::invalid_argument("window text needs 'lo hi' header");
  std::string token;
  while (in >> token) w.coords.push_back(coordinate_from_token(token));
  if (static_cast<Index>(w.coords.size()) != w.hi - w.lo) {
    throw std::invalid_argument("window text has " + std::to_string(w.coords.size()) +
                                " coordinates, header promises " + std::to_string(w.hi - w.lo));
  }
  return w;
}

// --- membership -------------------------------------------------------------

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

MembershipReport check_level(const Window& w, const Tower& tower, Index r_k, int k, bool stop_at_first) {
  const TowerLevel& lv = tower.level(k);
  const Index pk = lv.p();
  const Index step = lv.p_prev();
  MembershipReport rep;
  rep.blocks_checked.assign(static_cast<std::size_t>(k + 1), 0);
  bool failed = false;
  for (Index t = w.lo + floor_mod(r_k - w.lo, pk); t + pk <= w.hi; t += pk) {
    const Coordinate& head = w.at(t);
    for (Index a = 1; a < lv.n(); ++a) {
      const Index idx = t + a * step;
      const Coordinate& c = w.at(idx);
      bool ok;
      std::string what;
      if (lv.in_a(a)) {
        ok = c.star;
        what = "A-slot must be *";
      } else if (head.star) {
        ok = c.star;
        what = "B-slot of a * block must be *";
      } else {
        ok = c == Coordinate::orbit(head.root, head.exponent + lv.g_exponent(a));
        what = "B-slot must equal T^(b' f(i)) of the block head";
      }
      if (!ok && !failed) {
        failed = true;
        rep.fail_level = k;
        rep.fail_index = idx;
        rep.fail_block = t;
        rep.message = "level " + std::to_string(k) + ", block " + std::to_string(t) + ", slot " +
                      std::to_string(a) + ": " + what;
        if (stop_at_first) {
          rep.status = CheckStatus::fail;
          return rep;
        }
      }
    }
    ++rep.blocks_checked[static_cast<std::size_t>(k)];
  }
  if (failed) {
    rep.status = CheckStatus::fail;
  } else {
    rep.status = rep.blocks_checked[static_cast<std::size_t>(k)] > 0 ? CheckStatus::pass
                                                                     : CheckStatus::inconclusive;
  }
  return rep;
}

MembershipReport check_membership(const Window& w, const Tower& tower, const RSequence& r, int K) {
  if (K > tower.depth()) throw std::out_of_range("check_membership: level beyond tower depth");
  if (r.depth() < K) throw std::invalid_argument("check_membership: phases shorter than K");
  MembershipReport rep;
  rep.blocks_checked.assign(static_cast<std::size_t>(K + 1), 0);
  bool inconclusive = false;
  for (int k = 0; k <= K; ++k) {
    MembershipReport lv = check_level(w, tower, r.at(k), k);
    rep.blocks_checked[static_cast<std::size_t>(k)] = lv.blocks_checked[static_cast<std::size_t>(k)];
    if (lv.status == CheckStatus::fail) {
      rep.status = CheckStatus::fail;
      rep.fail_level = lv.fail_level;
      rep.fail_index = lv.fail_index;
      rep.fail_block = lv.fail_block;
      rep.message = lv.message;
      return rep;
    }
    if (lv.status == CheckStatus::inconclusive) inconclusive = true;
  }
  rep.status = inconclusive ? CheckStatus::inconclusive : CheckStatus::pass;
  return rep;
}

// --- decoding ---------------------------------------------------------------

std::string to_string(DecodeStatus s) {
  switch (s) {
    case DecodeStatus::unique: return "unique";
    case DecodeStatus::ambiguous: return "ambiguous";
    case DecodeStatus::none_found: return "none_found";
  }
  return "?";
}

DecodeResult decode_r(const Window& w, const Tower& tower, int K) {
  if (K < 0 || K > tower.depth()) throw std::out_of_range("decode_r: level beyond tower depth");
  const Index pK = tower.p(K);
  const Index center = w.lo + (w.hi - w.lo) / 2;
  std::optional<Index> anchor;
  bool any_orbit = false;
  for (Index i = w.lo; i < w.hi; ++i) {
    if (w.at(i).star) continue;
    any_orbit = true;
    if (i - 2 * pK + 1 < w.lo || i + 2 * pK > w.hi) continue;
    if (!anchor || std::abs(i - center) < std::abs(*anchor - center)) anchor = i;
  }
  if (!any_orbit) throw std::invalid_argument("decode_r: window is all *, phases are undefined");
  if (!anchor) {
    throw std::invalid_argument("decode_r: no non-* coordinate with 2 p_K of window on each side");
  }

  DecodeResult res;
  res.anchor = *anchor;
  for (int k = 0; k <= K; ++k) {
    const Index base = k == 0 ? 0 : res.r.r.back();
    const Index step = tower.p(k - 1);
    std::vector<Index> alive;
    for (Index j = 0; j < tower.level(k).n(); ++j) {
      const Index cand = base + j * step;
      if (check_level(w, tower, cand, k).status == CheckStatus::pass) alive.push_back(cand);
    }
    res.survivors.push_back(static_cast<Index>(alive.size()));
    if (alive.empty()) {
      res.status = DecodeStatus::none_found;
      return res;
    }
    if (alive.size() > 1) {
      res.status = DecodeStatus::ambiguous;
      return res;
    }
    res.r.r.push_back(alive.front());
  }
  res.status = DecodeStatus::unique;
  return res;
}

IndexDecomposition decompose_index(const Tower& tower, const RSequence& r, Index m, int K) {
  if (K < 0 || K > tower.depth()) throw std::out_of_range("decompose_index: level beyond tower depth");
  if (r.depth() < K) throw std::invalid_argument("decompose_index: phases shorter than K");
  IndexDecomposition d;
  const Index pK = tower.p(K);
  d.m_top = floor_div(m - r.at(K), pK);
  Index rest = m - r.at(K) - d.m_top * pK;
  d.digits.assign(static_cast<std::size_t>(K + 1), 0);
  for (int k = K; k >= 0; --k) {
    const Index step = tower.p(k - 1);
    d.digits[static_cast<std::size_t>(k)] = rest / step;
    rest %= step;
  }
  for (int k = 0; k <= K; ++k) d.block.push_back(floor_div(m - r.at(k), tower.p(k)));
  return d;
}

}  // namespace proxshift

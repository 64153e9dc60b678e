#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "proxshift/base_system.hpp"
#include "proxshift/tower.hpp"

namespace proxshift {

using RootId = std::uint32_t;

/// An element of X u {*}: either the star or T^exponent applied to a root.
struct Coordinate {
  bool star = true;
  RootId root = 0;
  Index exponent = 0;

  static Coordinate star_symbol() { return {}; }
  static Coordinate orbit(RootId root, Index exponent) { return {false, root, exponent}; }

  /// Representation equality: both stars, or the same (root, exponent).
  friend bool operator==(const Coordinate& a, const Coordinate& b) {
    if (a.star || b.star) return a.star == b.star;
    return a.root == b.root && a.exponent == b.exponent;
  }
};

std::string to_token(const Coordinate& c);
Coordinate coordinate_from_token(std::string_view token);

/// Roots known to an evaluation, used to compare coordinates over different
/// roots as actual points of X.
class RootTable {
 public:
  void add(RootId id, BasePoint point);
  const BasePoint& get(RootId id) const;
  bool contains(RootId id) const;

  /// Same point of X u {*}. Equal roots compare exponents exactly.
  bool same_point(const Coordinate& a, const Coordinate& b) const;
  /// Distance in X_*: 0 / star_distance involving *, the base metric otherwise.
  double distance(const Coordinate& a, const Coordinate& b, const StarSpace& space,
                  double tol = 1e-9) const;

 private:
  std::vector<std::pair<RootId, BasePoint>> roots_;
};

/// Per-level phases r_k in [0, p_k) with r_{k+1} = r_k mod p_k.
struct RSequence {
  std::vector<Index> r;

  Index at(int k) const { return r.at(static_cast<std::size_t>(k)); }
  int depth() const { return static_cast<int>(r.size()) - 1; }
  bool consistent(const Tower& tower) const;
  friend bool operator==(const RSequence&, const RSequence&) = default;
};

/// The phases of sigma^s applied to the sample point: r_k = -s mod p_k.
RSequence phases_of_shift(const Tower& tower, Index s, int K);

/// A point of Y described intensionally: sigma^shift of the sample point
/// built over `root`, or the all-star point.
class PointSpec {
 public:
  static PointSpec sample(std::shared_ptr<const Tower> tower, BasePoint root, RootId id = 0);
  static PointSpec all_star(std::shared_ptr<const Tower> tower);

  const Tower& tower() const { return *tower_; }
  std::shared_ptr<const Tower> tower_ptr() const { return tower_; }
  bool is_all_star() const { return all_star_; }
  const BasePoint& root() const;
  RootId root_id() const { return root_id_; }
  Index shift() const { return shift_; }
  /// Top level realized by the tower.
  int depth() const { return tower_->depth(); }

  /// Coordinates where the point is defined: [-p_D - s, p_D - s) for a sample
  /// shift, everything for the all-star point.
  Index lo() const;
  Index hi() const;
  bool defined_at(Index i) const;

  /// Phases up to level K; throws for the all-star point.
  RSequence phases(int K) const;

  friend PointSpec shift_point(const PointSpec& p, Index s);

 private:
  PointSpec() = default;
  std::shared_ptr<const Tower> tower_;
  std::optional<BasePoint> root_;
  RootId root_id_ = 0;
  Index shift_ = 0;
  bool all_star_ = false;
};

/// sigma^s p: coordinate i of the result is coordinate i + s of p.
PointSpec shift_point(const PointSpec& p, Index s);

/// Exponent of the sample point (root exponent 0 at coordinate 0) at index
/// i in [-p_D, p_D), or nullopt for *. Descends from the smallest level whose
/// block covers i.
std::optional<Index> sample_exponent(const Tower& tower, Index i);

/// Throws std::out_of_range when the tower is too shallow for i.
Coordinate symbol_at(const PointSpec& p, Index i);

inline constexpr Index kDefaultWindowCap = 50'000'000;

/// Half-open materialized segment [lo, hi).
struct Window {
  Index lo = 0;
  Index hi = 0;
  std::vector<Coordinate> coords;

  const Coordinate& at(Index i) const { return coords.at(static_cast<std::size_t>(i - lo)); }
  bool contains(Index i) const { return i >= lo && i < hi; }
  Index size() const { return hi - lo; }
};

Window window(const PointSpec& p, Index lo, Index hi, Index cap = kDefaultWindowCap);

/// Text form: "lo hi" then one token per line, "*" or "@<root>^<exponent>".
std::string window_to_text(const Window& w);
Window window_from_text(const std::string& text);

enum class CheckStatus { pass, fail, inconclusive };
std::string to_string(CheckStatus s);

struct MembershipReport {
  CheckStatus status = CheckStatus::inconclusive;
  std::vector<Index> blocks_checked;  // per level
  // First violation, when status == fail.
  int fail_level = -1;
  Index fail_index = 0;
  Index fail_block = 0;
  std::string message;
};

/// Checks, for every level k <= K and every aligned block r_k + n p_k +
/// [0, p_k) inside the window, that A-slots are * and B-slots follow the
/// head by b'_{k-1} f_k. A level with no complete block makes the result
/// inconclusive unless another level has already failed.
MembershipReport check_membership(const Window& w, const Tower& tower, const RSequence& r, int K);

/// Single-level variant used by the decoder.
MembershipReport check_level(const Window& w, const Tower& tower, Index r_k, int k,
                             bool stop_at_first = true);

enum class DecodeStatus { unique, ambiguous, none_found };
std::string to_string(DecodeStatus s);

struct DecodeResult {
  DecodeStatus status = DecodeStatus::none_found;
  RSequence r;                       // levels resolved so far
  std::vector<Index> survivors;      // candidates surviving at each level
  Index anchor = 0;                  // non-star coordinate the span is measured from
};

/// Recovers the phases level by level, testing the n_k candidates
/// r = r_{k-1} mod p_{k-1} at each level. Requires a non-star coordinate m
/// with [m - 2 p_K + 1, m + 2 p_K) inside the window; throws
/// std::invalid_argument for all-star windows or insufficient span.
DecodeResult decode_r(const Window& w, const Tower& tower, int K);

/// m = r_K + m_K p_K + sum_{k <= K} i_k p_{k-1} with 0 <= i_k < n_k.
struct IndexDecomposition {
  Index m_top = 0;              // m_K
  std::vector<Index> digits;    // i_0 .. i_K
  std::vector<Index> block;     // m_k for every k <= K
};

IndexDecomposition decompose_index(const Tower& tower, const RSequence& r, Index m, int K);

}  // namespace proxshift

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "proxshift/base_system.hpp"
#include "proxshift/partition.hpp"
#include "proxshift/rational.hpp"

namespace proxshift {

/// Decreasing sequence eps_0 > eps_1 > ... in (0, 1/2). Either geometric,
/// eps_k = num / base^(k + offset), or an explicit finite list.
class EpsSchedule {
 public:
  /// eps_k = 2^-(k+3).
  EpsSchedule() = default;
  static EpsSchedule geometric(std::int64_t num, std::int64_t base, int offset = 3);
  static EpsSchedule explicit_list(std::vector<Rational> values);

  Rational eps(int k) const;
  /// Levels available (unbounded for geometric schedules).
  std::optional<int> length() const;

  /// prod_{k <= K} (1 - 2 eps_k), exact.
  BigRational product_lower_bound(int K) const;

  /// Every eps_k in (0, 1/2) and the sequence nonincreasing, on levels 0..K.
  bool well_formed(int K) const;
  /// The infinite product stays positive. True for every geometric schedule
  /// with base >= 2 whose terms are below 1/2; explicit lists are finite.
  bool product_positive() const;

  std::string describe() const;

 private:
  std::int64_t num_ = 1;
  std::int64_t base_ = 2;
  int offset_ = 3;
  std::vector<Rational> list_;
};

enum class TowerMode { strict, toy };

/// One level of the construction. Digits i in [0, n) index the n sub-blocks
/// of length p_prev inside a block of length p.
class TowerLevel {
 public:
  /// Throws std::invalid_argument unless the partition is well formed with
  /// #B >= 4.
  TowerLevel(int k, Partition part, Index p_prev, Index b_prime_prev);

  int k() const { return k_; }
  const Partition& part() const { return part_; }
  Index n() const { return part_.n; }
  Index p_prev() const { return p_prev_; }
  Index p() const { return p_; }
  Index b() const { return static_cast<Index>(part_.b.size()); }
  Index b_prime_prev() const { return b_prime_prev_; }
  Index b_prime() const { return b_prime_; }
  /// B without its endpoints 0 and n-1.
  const std::vector<Index>& c() const { return c_; }

  bool in_a(Index i) const { return i >= 0 && i < n() && tau_[i] < 0; }
  bool in_b(Index i) const { return i >= 0 && i < n() && tau_[i] >= 0; }

  /// Rank of i inside B (the increasing bijection B -> {0..b-1}).
  Index tau(Index i) const;
  Index tau_inv(Index t) const;
  /// f(0) = 0, f(n-1) = -(b-3), f(i) = tau(i) - (b-2) otherwise.
  Index f(Index i) const;
  /// Inverse of f restricted to C, defined on (-(b-2), 0].
  Index f_inv(Index v) const;
  /// b'_{k-1} f(i): exponent of slot i relative to the block head.
  Index g_exponent(Index i) const;

  /// Gate results recorded when the level was built.
  bool strict() const { return strict_; }
  bool structural() const { return structural_; }
  const PartitionReport& report() const { return report_; }

 private:
  int k_;
  Partition part_;
  Index p_prev_;
  Index p_;
  Index b_prime_prev_;
  Index b_prime_;
  std::vector<Index> c_;
  std::vector<Index> tau_;      // -1 on A
  std::vector<Index> tau_inv_;  // B in increasing order
  PartitionReport report_;
  bool strict_ = false;
  bool structural_ = false;
};

/// Explicit tables of tau and f for reports and tests.
struct CodingTable {
  std::vector<std::pair<Index, Index>> tau;    // (i, tau(i)), i in B
  std::vector<std::pair<Index, Index>> f;      // (i, f(i)), i in B
  std::vector<std::pair<Index, Index>> f_inv;  // (v, f^{-1}(v)), v in (-(b-2), 0]
};

CodingTable level_coding(const TowerLevel& level);

/// The stack of levels 0..K over a star space.
class Tower {
 public:
  /// Assembles levels from the given partitions. Each level must satisfy
  /// TowerLevel's requirements and n must increase; the gate outcome of each
  /// partition is recorded, not enforced (build_tower enforces it).
  Tower(EpsSchedule schedule, const std::vector<Partition>& parts, TowerMode mode, StarSpace base);

  const EpsSchedule& schedule() const { return schedule_; }
  TowerMode mode() const { return mode_; }
  const StarSpace& base() const { return base_; }
  const std::vector<TowerLevel>& levels() const { return levels_; }
  const TowerLevel& level(int k) const { return levels_.at(static_cast<std::size_t>(k)); }

  /// Index of the top level.
  int depth() const { return static_cast<int>(levels_.size()) - 1; }

  /// p_k with p_{-1} = 1.
  Index p(int k) const;
  /// b'_k with b'_{-1} = 1.
  Index b_prime(int k) const;
  /// Exponent of the sample point at -p_k relative to its coordinate 0:
  /// h_0 = b_0 - 3, h_{k+1} = h_k + b'_k (b_{k+1} - 3).
  Index negative_seed_exponent(int k) const;

  /// Every level passed the strict gate.
  bool all_strict(int K) const;

 private:
  EpsSchedule schedule_;
  TowerMode mode_;
  StarSpace base_;
  std::vector<TowerLevel> levels_;
  std::vector<Index> seed_;
};

struct ToyLevels {
  std::vector<Rational> eps;
  std::vector<Partition> parts;
};

/// Reads {"eps": ["2/5", ...], "levels": [{"n": 12, "A": [...]}, ...]}.
ToyLevels parse_toy_levels(const std::string& json_text);
ToyLevels load_toy_levels(const std::string& path);

struct BuildOptions {
  TowerMode mode = TowerMode::strict;
  /// Toy mode: user-supplied levels; when absent, levels are searched.
  std::optional<ToyLevels> toy;
  Index toy_search_n_max = 48;
  std::uint64_t toy_search_budget = 2'000'000;
};

/// Strict mode: n_k is the least n > n_{k-1} with n >= min_valid_n(eps_k),
/// partitioned by make_partition. Toy mode: user levels or searched
/// structural partitions; any level failing the structural gate, or with
/// #B < 4, is rejected with std::runtime_error.
Tower build_tower(const EpsSchedule& schedule, int K, const StarSpace& base,
                  const BuildOptions& options = {});

struct IndexSets {
  Index i_lo = 0;  // I_k = [i_lo, 0] = (-b'_k, 0]
  Index count = 0;  // #I_k = #J_k = b'_k
  std::vector<Index> j;  // J_k ascending; empty when elided
  bool elided = false;
};

inline constexpr Index kDefaultIndexSetCap = 5'000'000;

/// I_k and J_k, with J_{k+1} = p_k C_{k+1} + J_k. J is left empty (and
/// marked elided) when b'_k exceeds `cap`.
IndexSets index_sets(const Tower& tower, int k, Index cap = kDefaultIndexSetCap);

/// The increasing bijection I_k -> J_k.
Index phi(const Tower& tower, int k, Index n);
Index phi_inv(const Tower& tower, int k, Index m);

}  // namespace proxshift

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "proxshift/points.hpp"
#include "proxshift/tower.hpp"

namespace proxshift {

/// Coordinates of [lo, hi) that every point with phases r is guaranteed to
/// have as *: the union over k <= K of r_k + p_k Z + p_{k-1} A_k + [0, p_{k-1}).
std::vector<Index> star_support(const Tower& tower, const RSequence& r, int K, Index lo, Index hi);

/// Complement form: indices of [lo, hi) lying in r_k + p_k Z + p_{k-1} B_k +
/// [0, p_{k-1}) for every k <= K. Every non-* coordinate falls here.
std::vector<Index> orbit_support(const Tower& tower, const RSequence& r, int K, Index lo, Index hi);

/// Roots of both points, keyed by root id. Throws when one id names two
/// different base points.
RootTable roots_of(const PointSpec& x, const PointSpec& y);

struct CommonStarBlock {
  Index N = 0;
  int level = 0;          // k with N < p_k / 2; blocks come from level k + 1
  int case_id = 0;        // 1: offset b < p_k / 2, 2: otherwise
  Index a = 0;            // phase difference at level k+1 is a p_k + b
  Index b = 0;
  Index selector = 0;     // a_1 (case 1) or a_2 (case 2), an element of A_{k+1}
  Index n_plus = 0;       // both points * on [n_plus, n_plus + N), n_plus > N
  Index n_minus = 0;      // both points * on [n_minus - N, n_minus), n_minus < -N
  bool verified = false;  // coordinate-by-coordinate recheck
};

/// Locates two-sided common * blocks of length N by the phase-difference case
/// split at level k + 1, then rechecks them on actual coordinates. When
/// `level` is absent the least k with 2N < p_k is used. Throws
/// std::out_of_range when the tower is too shallow, std::runtime_error when
/// level k + 1 lacks the difference-cover property or the recheck fails.
CommonStarBlock find_common_star_block(const PointSpec& x, const PointSpec& y, Index N,
                                       std::optional<int> level = std::nullopt);

struct SeparationCount {
  Index count = 0;
  std::vector<Index> indices;
};

/// Indices of [lo, hi) where the two coordinates are more than delta apart.
SeparationCount separation_count(const PointSpec& x, const PointSpec& y, Index lo, Index hi,
                                 double delta);

/// One row of the per-block tables (also the CSV row layout).
struct BlockRow {
  int level = 0;
  Index block_start = 0;
  Index star_count = 0;        // coordinates of the block where both points are *
  Index separation_count = 0;  // coordinates with exactly one *, i.e. at star_distance
  Index bound = 0;
  bool pass = false;
};

struct SeparationBlocks {
  int level = 0;
  int case_id = 0;       // which point's blocks are examined (see below)
  int reference = 0;     // 0: x, 1: y
  Index bound = 0;       // ceil(sqrt(n_k/2) - 1), or #B_k against the all-star point
  bool asserted = false; // bound is only claimed on strict levels
  bool pass = false;     // every row meets the bound (meaningful when asserted)
  std::vector<BlockRow> rows;
};

/// Per-block separation certificate at level k for points whose phases
/// differ at k. With d = r_k(v) - r_k(u) > 0 written a p_{k-1} + b
/// (0 < b <= p_{k-1}), non-* blocks of u are examined when 2a <= n_k and
/// those of v otherwise; each must hold at least ceil(sqrt(n_k/2) - 1)
/// coordinates at distance exactly star_distance.
/// When one point is all-star, the other point's non-* blocks are examined
/// against #B_k instead. Blocks outside either point's reach are skipped.
SeparationBlocks separation_blocks(const PointSpec& x, const PointSpec& y, int k, Index lo, Index hi);

struct MPrime {
  std::vector<int> boundary_levels;   // S restricted to k <= K
  std::vector<Index> digits;          // i_0 .. i_K
  std::vector<Index> digits_prime;    // i'_0 .. i'_K, all in C_k
  Index m = 0;
  Index m_prime = 0;
  Index m_top = 0;                    // m_K = m'_K (digits above K unchanged)
};

/// Moves every boundary digit of m (rank 0, 1, b-2, b-1 in B) to the
/// preimage of its f-value inside C. Throws std::invalid_argument when x_m is
/// *, std::runtime_error when a level above K still has a boundary digit.
MPrime compute_mprime(const PointSpec& x, Index m, int K);

struct OrbitWindowReport {
  int level = 0;
  Index block_start = 0;       // r_k + m'_k p_k
  Index alpha = 0;             // phi_k^{-1}(m' - block_start)
  Index n_lo = 0;              // I_k - alpha = [n_lo, n_hi]
  Index n_hi = 0;
  Index achieved_N = 0;        // largest N with (-N, N) inside I_k - alpha
  Index probes = 0;
  Index mismatches = 0;
  bool pass = false;
};

/// Checks z_{block + phi_k(n + alpha)} = T^n z_{m'} for every n in I_k - alpha.
OrbitWindowReport check_orbit_window(const PointSpec& z, Index m_prime, int k);

struct EntropyBound {
  int level = 0;
  BigRational ratio;            // #J_K / p_K
  BigRational schedule_product; // prod_{k <= K} (1 - 2 eps_k)
  double h_base = 0.0;
  double bound = 0.0;           // ratio * h_base
  double schedule_bound = 0.0;  // schedule_product * h_base
  bool strict = false;
  bool pass = false;            // ratio >= schedule_product, exact
};

EntropyBound entropy_lower_bound(const Tower& tower, int K, double h_base);

enum class Verdict { proximal_witness, separation_witness, both, inconclusive };
std::string to_string(Verdict v);

struct StarRun {
  Index start = 0;
  Index length = 0;
};

struct PairReport {
  Index lo = 0;
  Index hi = 0;
  Index N = 0;
  double delta = 0.0;
  std::vector<StarRun> star_blocks;   // maximal runs of common *
  std::vector<Index> separation_hits;
  bool r_match = false;
  Index longest_left = 0;             // longest common * run inside [lo, 0)
  Index longest_right = 0;            // ... inside [0, hi)
  Index separations_left = 0;
  Index separations_right = 0;
  Verdict verdict = Verdict::inconclusive;
};

/// Window-scale certificate: proximality when common * runs of length >= N
/// occur on both sides of 0, non-asymptoticity when more than `threshold`
/// separations occur on both sides.
PairReport classify_pair(const PointSpec& x, const PointSpec& y, Index lo, Index hi, double delta,
                         Index N, Index threshold = 0);

/// x_i = x_{i+1} for every i in [lo, hi - 1).
bool shift_fixed_on(const PointSpec& p, Index lo, Index hi);

}  // namespace proxshift

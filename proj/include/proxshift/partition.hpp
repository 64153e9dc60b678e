#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proxshift/rational.hpp"

namespace proxshift {

/// A split {0, ..., n-1} = A u B. Built by make_partition or supplied by the
/// user; nothing here is trusted until verify_partition has looked at it.
struct Partition {
  Index n = 0;
  std::vector<Index> a;  // sorted
  std::vector<Index> b;  // sorted
  Rational eps{1, 2};
};

struct PartitionReport {
  // Well-formedness: disjoint, covering, 0 and n-1 in B.
  bool well_formed = false;
  std::string issue;

  // (i) 2 <= #A < n * eps
  bool prop_i = false;
  Index size_a = 0;
  Rational n_eps{0, 1};

  // (ii) every i in [0, n) is a difference a' - a (mod n) of elements of A
  bool prop_ii = false;
  std::vector<Index> prop_ii_failures;

  // (iii) #((A + i) n B) >= sqrt(n/2) - 1 for 0 < i <= n/2 + 1;
  // prop_iii_counts[i - 1] holds the count for shift i.
  bool prop_iii = false;
  std::vector<Index> prop_iii_counts;
  Index prop_iii_bound = 0;  // ceil(sqrt(n/2) - 1)

  bool strict = false;
  bool structural = false;
};

enum class Gate { structural, strict };

/// Least n >= 32 with sqrt(2/n) + 3/n < eps, evaluated in integer arithmetic.
Index min_valid_n(const Rational& eps);

/// The explicit two-comb partition: A = {1..p} u {jp + r0 : 1 <= j <= q+1}
/// with p = ceil(sqrt(n/2)), q = ceil(n/(2p)), n = k0 p + r0.
/// Throws std::invalid_argument when n < min_valid_n(eps).
Partition make_partition(Index n, const Rational& eps);

/// Exhaustive O(n^2) check of all three properties. Malformed input never
/// throws; it simply fails the structural gate.
PartitionReport verify_partition(const Partition& part, const Rational& eps);

bool passes(const PartitionReport& report, Gate gate);

/// Shape parameters of make_partition, exposed for tests and reports.
struct CombShape {
  Index p = 0;
  Index q = 0;
  Index k0 = 0;
  Index r0 = 0;
};
CombShape comb_shape(Index n);

struct SearchOptions {
  Gate gate = Gate::structural;
  Index n_min = 1;
  Index min_b = 0;                  // reject partitions with #B below this
  std::uint64_t budget = 2'000'000;    // candidate subsets examined before giving up
};

/// Smallest-n partition in [n_min, n_max] that satisfies property (i) for
/// eps and the requested gate. Subsets A are enumerated by increasing size,
/// so the first hit at a given n also has minimal #A. Absence is returned
/// when nothing exists in range or the budget runs out.
std::optional<Partition> search_min_partition(const Rational& eps, Index n_max,
                                              const SearchOptions& options = {});

}  // namespace proxshift

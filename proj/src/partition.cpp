#include "proxshift/partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace proxshift {

namespace {

// 4 <= sqrt(n/2) and sqrt(2/n) + 3/n < eps, both decided exactly.
bool satisfies_size_conditions(Index n, const Rational& eps) {
  if (n < 32) return false;
  // sqrt(2/n) < eps - 3/n  <=>  a n > 3 b  and  2 b^2 n < (a n - 3 b)^2  (eps = a/b)
  const __int128 a = eps.num();
  const __int128 b = eps.den();
  const __int128 gap = a * n - 3 * b;
  if (gap <= 0) return false;
  return 2 * b * b * n < gap * gap;
}

Index ceil_sqrt_half(Index n) {
  Index p = 0;
  while (2 * static_cast<__int128>(p) * p < n) ++p;
  return p;
}

}  // namespace

Index min_valid_n(const Rational& eps) {
  if (eps <= Rational(0, 1) || eps >= Rational(1, 1)) {
    throw std::invalid_argument("eps must lie in (0, 1), got " + eps.str());
  }
  Index n = 32;
  while (!satisfies_size_conditions(n, eps)) ++n;
  return n;
}

CombShape comb_shape(Index n) {
  CombShape s;
  s.p = ceil_sqrt_half(n);
  s.q = (n + 2 * s.p - 1) / (2 * s.p);
  s.k0 = n / s.p;
  s.r0 = n % s.p;
  return s;
}

Partition make_partition(Index n, const Rational& eps) {
  const Index floor_n = min_valid_n(eps);
  if (n < floor_n) {
    throw std::invalid_argument("n = " + std::to_string(n) + " is below the admissible minimum " +
                                std::to_string(floor_n) + " for eps = " + eps.str());
  }
  const CombShape s = comb_shape(n);
  std::vector<bool> in_a(static_cast<std::size_t>(n), false);
  for (Index i = 1; i <= s.p; ++i) in_a[i] = true;
  for (Index j = 1; j <= s.q + 1; ++j) in_a[j * s.p + s.r0] = true;

  Partition part;
  part.n = n;
  part.eps = eps;
  for (Index i = 0; i < n; ++i) (in_a[i] ? part.a : part.b).push_back(i);
  return part;
}

PartitionReport verify_partition(const Partition& part, const Rational& eps) {
  PartitionReport rep;
  const Index n = part.n;
  rep.size_a = static_cast<Index>(part.a.size());
  rep.n_eps = Rational(n * eps.num(), eps.den());

  // membership: 0 unseen, 1 in A, 2 in B, 3 both
  std::vector<int> member(static_cast<std::size_t>(std::max<Index>(n, 0)), 0);
  rep.well_formed = n > 0;
  auto flag = [&](const std::string& what) {
    if (rep.well_formed) rep.issue = what;
    rep.well_formed = false;
  };
  if (n <= 0) rep.issue = "n must be positive";
  for (Index x : part.a) {
    if (x < 0 || x >= n) {
      flag("A element " + std::to_string(x) + " outside [0, n)");
      continue;
    }
    member[x] |= 1;
  }
  for (Index x : part.b) {
    if (x < 0 || x >= n) {
      flag("B element " + std::to_string(x) + " outside [0, n)");
      continue;
    }
    member[x] |= 2;
  }
  for (Index i = 0; i < n; ++i) {
    if (member[i] == 0) flag(std::to_string(i) + " is in neither A nor B");
    if (member[i] == 3) flag(std::to_string(i) + " is in both A and B");
  }
  if (n > 0 && (member[0] != 2 || member[n - 1] != 2)) flag("0 and n-1 must belong to B only");
  if (!std::is_sorted(part.a.begin(), part.a.end()) ||
      std::adjacent_find(part.a.begin(), part.a.end()) != part.a.end()) {
    flag("A must be sorted without repeats");
  }
  if (!std::is_sorted(part.b.begin(), part.b.end()) ||
      std::adjacent_find(part.b.begin(), part.b.end()) != part.b.end()) {
    flag("B must be sorted without repeats");
  }

  auto in_a = [&](Index x) { return x >= 0 && x < n && (member[x] & 1); };
  auto in_b_only = [&](Index x) { return x >= 0 && x < n && member[x] == 2; };

  rep.prop_i = rep.size_a >= 2 && below_scaled(rep.size_a, n, eps);

  // (ii): a + i lands in A or n + A; since a + i < 2n this is (a + i) mod n in A.
  for (Index i = 0; i < n; ++i) {
    bool hit = false;
    for (Index a : part.a) {
      if (a < 0 || a >= n) continue;
      if (in_a((a + i) % n)) {
        hit = true;
        break;
      }
    }
    if (!hit) rep.prop_ii_failures.push_back(i);
  }
  rep.prop_ii = rep.prop_ii_failures.empty() && !part.a.empty();

  // (iii): shifts 0 < i <= n/2 + 1, i.e. 2i <= n + 2.
  rep.prop_iii_bound = n > 0 ? ceil_sqrt_half_minus_one(n) : 0;
  rep.prop_iii = true;
  bool every_shift_meets_b = true;
  for (Index i = 1; 2 * i <= n + 2; ++i) {
    Index count = 0;
    for (Index a : part.a) {
      if (in_b_only(a + i)) ++count;
    }
    rep.prop_iii_counts.push_back(count);
    if (!meets_sqrt_half_bound(count, n)) rep.prop_iii = false;
    if (count == 0) every_shift_meets_b = false;
  }

  rep.structural = rep.well_formed && rep.size_a >= 2 && rep.prop_ii && every_shift_meets_b;
  rep.strict = rep.structural && rep.prop_i && rep.prop_iii;
  return rep;
}

bool passes(const PartitionReport& report, Gate gate) {
  return gate == Gate::strict ? report.strict : report.structural;
}

namespace {

// Enumerates size-k subsets of [1, n-2] in lexicographic order.
class SubsetSearch {
 public:
  SubsetSearch(Index n, const Rational& eps, const SearchOptions& opt, std::uint64_t& spent)
      : n_(n), eps_(eps), opt_(opt), spent_(spent) {}

  std::optional<Partition> run(Index k) {
    chosen_.clear();
    return extend(1, k);
  }

  bool exhausted() const { return spent_ >= opt_.budget; }

 private:
  std::optional<Partition> extend(Index next, Index remaining) {
    if (exhausted()) return std::nullopt;
    if (remaining == 0) {
      ++spent_;
      Partition part = build();
      const PartitionReport rep = verify_partition(part, eps_);
      if (rep.prop_i && passes(rep, opt_.gate)) return part;
      return std::nullopt;
    }
    for (Index x = next; x + remaining - 1 <= n_ - 2; ++x) {
      chosen_.push_back(x);
      if (auto found = extend(x + 1, remaining - 1)) return found;
      chosen_.pop_back();
      if (exhausted()) return std::nullopt;
    }
    return std::nullopt;
  }

  Partition build() const {
    Partition part;
    part.n = n_;
    part.eps = eps_;
    part.a = chosen_;
    std::size_t j = 0;
    for (Index i = 0; i < n_; ++i) {
      if (j < chosen_.size() && chosen_[j] == i) {
        ++j;
      } else {
        part.b.push_back(i);
      }
    }
    return part;
  }

  Index n_;
  Rational eps_;
  const SearchOptions& opt_;
  std::uint64_t& spent_;
  std::vector<Index> chosen_;
};

}  // namespace

std::optional<Partition> search_min_partition(const Rational& eps, Index n_max,
                                              const SearchOptions& options) {
  std::uint64_t spent = 0;
  for (Index n = std::max<Index>(options.n_min, 4); n <= n_max; ++n) {
    // (ii) needs #A(#A-1) + 1 >= n distinct differences mod n.
    Index k = 2;
    while (k * (k - 1) + 1 < n) ++k;
    for (; k <= n - 2; ++k) {
      if (!below_scaled(k, n, eps)) break;
      if (n - k < options.min_b) break;
      SubsetSearch search(n, eps, options, spent);
      if (auto found = search.run(k)) return found;
      if (search.exhausted()) return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace proxshift

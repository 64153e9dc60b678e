#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <vector>

#include "proxshift/analysis.hpp"

namespace testing {

using namespace proxshift;

inline Partition split(Index n, std::vector<Index> a) {
  Partition p;
  p.n = n;
  std::sort(a.begin(), a.end());
  p.a = a;
  for (Index i = 0; i < n; ++i) {
    if (!std::binary_search(a.begin(), a.end(), i)) p.b.push_back(i);
  }
  return p;
}

inline StarSpace full2() { return StarSpace(BaseSystem::full_shift(2)); }

/// Searched toy levels for eps = 1/3: n = 13, 16, 17, 18.
inline std::shared_ptr<const Tower> toy_tower(int depth = 3) {
  const Rational third(1, 3);
  BuildOptions options;
  options.mode = TowerMode::toy;
  return std::make_shared<const Tower>(
      build_tower(EpsSchedule::explicit_list(std::vector<Rational>(static_cast<std::size_t>(depth) + 1, third)),
                  depth, full2(), options));
}

/// Hand-made levels with small n: n = 10 (fails the structural gate) and
/// n = 11 with C = {2, 3, 5}.
inline std::shared_ptr<const Tower> hand_tower() {
  std::vector<Partition> parts{split(10, {1, 2, 5, 7, 8}), split(11, {1, 4, 6, 7, 8, 9})};
  return std::make_shared<const Tower>(
      EpsSchedule::explicit_list({Rational(3, 5), Rational(3, 5)}), parts, TowerMode::toy, full2());
}

/// Exponents of a level-k block whose head carries exponent e, built by
/// concatenating translated level-(k-1) blocks as in the definition of
/// P_k and Q_k. nullopt marks *.
inline std::vector<std::optional<Index>> block_oracle(const Tower& tower, int k, Index e) {
  const TowerLevel& lv = tower.level(k);
  std::vector<std::optional<Index>> out;
  out.reserve(static_cast<std::size_t>(lv.p()));
  for (Index i = 0; i < lv.n(); ++i) {
    const bool star = std::binary_search(lv.part().a.begin(), lv.part().a.end(), i);
    const Index head = star ? 0 : e + tower.b_prime(k - 1) * lv.f(i);
    if (k == 0) {
      out.push_back(star ? std::nullopt : std::optional<Index>(head));
      continue;
    }
    if (star) {
      out.insert(out.end(), static_cast<std::size_t>(lv.p_prev()), std::nullopt);
    } else {
      const auto sub = block_oracle(tower, k - 1, head);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  return out;
}

/// The sample point on [-p_k, p_k) from the block oracle: [0, p_k) is the
/// block with head exponent 0, [-p_k, 0) the block whose head is chosen so
/// that its last coordinate carries exponent 0 (x_{-1} = x_0).
inline std::vector<std::optional<Index>> sample_oracle(const Tower& tower, int k) {
  const auto right = block_oracle(tower, k, 0);
  const auto probe = block_oracle(tower, k, 0);
  const Index seed = -*probe.back();
  const auto left = block_oracle(tower, k, seed);
  std::vector<std::optional<Index>> out(left.begin(), left.end());
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

}  // namespace testing

#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace proxshift {

using Index = std::int64_t;

/// Arbitrary-precision rational used where products of schedule factors
/// and index-set ratios must be compared exactly.
using BigRational = boost::multiprecision::cpp_rational;

/// Small exact rational with a positive denominator, always in lowest terms.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den);

  /// Parses "p/q", an integer, or a finite decimal such as "0.125".
  static Rational parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  BigRational to_big() const { return BigRational(num_, den_); }
  std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

/// True when count < n * eps, evaluated without rounding.
bool below_scaled(Index count, Index n, const Rational& eps);

/// Smallest c >= 0 with c >= sqrt(n/2) - 1, i.e. 2(c+1)^2 >= n.
Index ceil_sqrt_half_minus_one(Index n);

/// True when count >= sqrt(n/2) - 1, by squaring.
bool meets_sqrt_half_bound(Index count, Index n);

}  // namespace proxshift

#include "proxshift/rational.hpp"

#include <charconv>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace proxshift {

namespace {

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Rational Rational::parse(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return {parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1))};
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto frac = text.substr(dot + 1);
    if (frac.size() > 17) throw std::invalid_argument("too many decimal digits: " + std::string(text));
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    std::string whole(text.substr(0, dot));
    bool negative = !whole.empty() && whole.front() == '-';
    std::int64_t ip = (whole.empty() || whole == "-" || whole == "+") ? 0 : parse_int(whole);
    std::int64_t fp = frac.empty() ? 0 : parse_int(frac);
    std::int64_t num = (negative ? -1 : 1) * ((ip < 0 ? -ip : ip) * scale + fp);
    return {num, scale};
  }
  return {parse_int(text), 1};
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

bool below_scaled(Index count, Index n, const Rational& eps) {
  return static_cast<__int128>(count) * eps.den() < static_cast<__int128>(n) * eps.num();
}

bool meets_sqrt_half_bound(Index count, Index n) {
  if (count + 1 < 0) return false;
  const __int128 c = count + 1;
  return 2 * c * c >= n;
}

Index ceil_sqrt_half_minus_one(Index n) {
  Index c = 0;
  while (!meets_sqrt_half_bound(c, n)) ++c;
  return c;
}

}  // namespace proxshift

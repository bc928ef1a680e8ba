#pragma once

#include <charconv>
#include <compare>
#include <limits>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "k4count/error.hpp"

namespace k4c {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Exact rational with 64-bit numerator and positive denominator, always
/// stored in lowest terms. Intermediate products use 128-bit integers;
/// results that do not fit back into 64 bits throw `Errc::domain_error`.
class Rational {
 public:
  using int_type = std::int64_t;
  using wide_type = __int128;

  constexpr Rational() = default;
  constexpr Rational(int_type value) : num_(value), den_(1) {}  // NOLINT(implicit)
  Rational(int_type num, int_type den) { assign(num, den); }

  int_type num() const noexcept { return num_; }
  int_type den() const noexcept { return den_; }

  bool is_zero() const noexcept { return num_ == 0; }
  bool is_integer() const noexcept { return den_ == 1; }

  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  BigRational to_big() const { return BigRational(BigInt(num_), BigInt(den_)); }

  /// Parses "p/q" or "p". Decimal notation is rejected so that verdicts
  /// never depend on a binary approximation.
  static Rational parse(std::string_view text) {
    auto fail = [&] {
      return Error(Errc::invalid_parameter,
                   "expected an exact fraction p/q, got '" + std::string(text) + "'");
    };
    if (text.empty()) throw fail();
    auto slash = text.find('/');
    auto parse_int = [&](std::string_view s) {
      int_type v = 0;
      if (s.empty()) throw fail();
      auto first = s.data();
      if (*first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size()) throw fail();
      return v;
    };
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    int_type den = parse_int(text.substr(slash + 1));
    if (den == 0) throw Error(Errc::invalid_parameter, "zero denominator in '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash)), den);
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(wide_type(a.num_) * b.den_ + wide_type(b.num_) * a.den_, wide_type(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_wide(wide_type(a.num_) * b.den_ - wide_type(b.num_) * a.den_, wide_type(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(wide_type(a.num_) * b.num_, wide_type(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error(Errc::domain_error, "division by zero");
    return from_wide(wide_type(a.num_) * b.den_, wide_type(a.den_) * b.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    wide_type lhs = wide_type(a.num_) * b.den_;
    wide_type rhs = wide_type(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  static wide_type gcd_wide(wide_type a, wide_type b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      wide_type t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational from_wide(wide_type num, wide_type den) {
    if (den == 0) throw Error(Errc::domain_error, "zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    wide_type g = gcd_wide(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    constexpr wide_type lo = std::numeric_limits<int_type>::min();
    constexpr wide_type hi = std::numeric_limits<int_type>::max();
    if (num < lo || num > hi || den > hi) throw Error(Errc::domain_error, "rational overflow");
    Rational r;
    r.num_ = static_cast<int_type>(num);
    r.den_ = static_cast<int_type>(den);
    return r;
  }

  void assign(int_type num, int_type den) { *this = from_wide(num, den); }

  int_type num_ = 0;
  int_type den_ = 1;
};

inline std::string to_string(const BigRational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Smallest integer k with k >= r.
inline BigInt ceil(const BigRational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  BigInt q = numerator(r) / denominator(r);  // truncates toward zero
  if (numerator(r) > 0 && q * denominator(r) != numerator(r)) ++q;
  return q;
}

}  // namespace k4c

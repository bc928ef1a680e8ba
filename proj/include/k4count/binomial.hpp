#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "k4count/error.hpp"
#include "k4count/rational.hpp"

namespace k4c {

/// ln C(a, b) via log-gamma in extended precision.
inline long double log_choose(std::uint64_t a, std::uint64_t b) {
  if (b > a) throw Error(Errc::domain_error, "log_choose needs 0 <= b <= a");
  if (b == 0 || b == a) return 0.0L;
  return std::lgamma(static_cast<long double>(a) + 1) - std::lgamma(static_cast<long double>(b) + 1) -
         std::lgamma(static_cast<long double>(a - b) + 1);
}

/// Exact C(a, b); zero when b > a.
inline BigInt choose(std::uint64_t a, std::uint64_t b) {
  if (b > a) return 0;
  if (b > a - b) b = a - b;
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= b; ++i) {
    r *= a - b + i;
    r /= i;
  }
  return r;
}

/// Pascal triangle of exact binomials up to row `max_n`.
class BinomialTable {
 public:
  explicit BinomialTable(std::size_t max_n) : rows_(max_n + 1) {
    for (std::size_t n = 0; n <= max_n; ++n) {
      rows_[n].resize(n + 1);
      rows_[n][0] = rows_[n][n] = 1;
      for (std::size_t k = 1; k < n; ++k) rows_[n][k] = rows_[n - 1][k - 1] + rows_[n - 1][k];
    }
  }

  std::size_t max_n() const noexcept { return rows_.size() - 1; }

  BigInt operator()(std::size_t n, std::size_t k) const {
    if (n > max_n()) throw Error(Errc::domain_error, "binomial table too small");
    return k > n ? BigInt(0) : rows_[n][k];
  }

 private:
  std::vector<std::vector<BigInt>> rows_;
};

/// C(x a, b) <= C(a, b) x^b for x = p/q in [0,1] with x a integral.
inline bool binomial_scaling_holds(const BinomialTable& t, std::size_t a, std::size_t b, Rational x) {
  if (x < Rational(0) || x > Rational(1)) throw Error(Errc::domain_error, "x must lie in [0,1]");
  if ((static_cast<std::int64_t>(a) * x.num()) % x.den() != 0) throw Error(Errc::domain_error, "x*a must be integral");
  auto xa = static_cast<std::size_t>(static_cast<std::int64_t>(a) * x.num() / x.den());
  BigInt lhs = t(xa, b) * boost::multiprecision::pow(BigInt(x.den()), static_cast<unsigned>(b));
  BigInt rhs = t(a, b) * boost::multiprecision::pow(BigInt(x.num()), static_cast<unsigned>(b));
  return lhs <= rhs;
}

/// C(a, b - c) C(a, c) <= 4^b C(a, b) for 0 <= c <= b <= a.
inline bool binomial_split_holds(const BinomialTable& t, std::size_t a, std::size_t b, std::size_t c) {
  if (c > b || b > a) throw Error(Errc::domain_error, "need c <= b <= a");
  return t(a, b - c) * t(a, c) <= (BigInt(1) << (2 * b)) * t(a, b);
}

/// C(a, b) C(c, d) <= C(a + c, b + d).
inline bool binomial_product_holds(const BinomialTable& t, std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
  return t(a, b) * t(c, d) <= t(a + c, b + d);
}

}  // namespace k4c

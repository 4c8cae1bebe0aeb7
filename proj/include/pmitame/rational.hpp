#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace pmitame {

// Exact rational, kept in lowest terms with positive denominator.
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational of(long long n, long long d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    const long long g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    return Rational{n, d};
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_integer() const { return den == 1; }

  bool operator==(const Rational&) const = default;
};

}  // namespace pmitame

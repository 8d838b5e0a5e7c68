#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace gkaw {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(long n, long d = 1) {
    if (d < 0) { n = -n; d = -d; }
    return Rational(n, d);
}

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

inline bool fits_long(const Integer& i) {
    return i >= std::numeric_limits<long>::min() && i <= std::numeric_limits<long>::max();
}

// r^e for integer e; e < 0 requires r != 0.
Rational pow_rational(const Rational& r, long e);

// Exact q-th root of a rational if one exists (q >= 1).
std::optional<Rational> exact_root(const Rational& r, long q);

std::string to_string(const Rational& r);
double to_double(const Rational& r);

std::size_t hash_rational(const Rational& r);

} // namespace gkaw

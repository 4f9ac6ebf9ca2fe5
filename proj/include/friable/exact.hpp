#pragma once

// Exact counts and probabilities.  Counts are arbitrary-precision integers;
// probabilities are kept as numerator/denominator pairs over the natural
// denominator (n! or q^n) and only reduced on request.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

#include "friable/error.hpp"

namespace friable {

using ExactCount = boost::multiprecision::cpp_int;

inline ExactCount factorial(unsigned n) {
    ExactCount r = 1;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return r;
}

inline ExactCount ipow(std::uint64_t base, unsigned exponent) {
    return boost::multiprecision::pow(ExactCount(base), exponent);
}

inline ExactCount binomial(const ExactCount& top, unsigned k) {
    if (top < k) return 0;
    ExactCount r = 1;
    for (unsigned i = 0; i < k; ++i) {
        r *= top - i;
        r /= i + 1;  // exact at every step: r = C(top, i+1)
    }
    return r;
}

namespace detail {

/// Natural log of a positive big integer, accurate to double precision.
inline double log_of(const ExactCount& v) {
    ensure(v > 0, "log_of requires a positive integer");
    const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(v)) + 1;
    if (bits <= 60) return std::log(v.convert_to<double>());
    const unsigned shift = bits - 60;
    const double top = static_cast<double>(static_cast<std::uint64_t>(v >> shift));
    return std::log(top) + shift * std::log(2.0);
}

/// num/den rounded to double without overflowing the intermediate conversions.
inline double ratio_to_double(const ExactCount& num, const ExactCount& den) {
    if (num == 0) return 0.0;
    const long nb = static_cast<long>(boost::multiprecision::msb(num));
    const long db = static_cast<long>(boost::multiprecision::msb(den));
    // Scale so that the integer quotient carries about 62 significant bits.
    const long shift = 62 - (nb - db);
    ExactCount quotient = shift >= 0 ? ExactCount((num << shift) / den)
                                     : ExactCount(num / (den << -shift));
    return std::ldexp(quotient.convert_to<double>(), static_cast<int>(-shift));
}

} // namespace detail

/// Exact rational in [0, 1] (or any nonnegative rational for gaps/expectations).
struct ExactProb {
    ExactCount num{0};
    ExactCount den{1};

    ExactProb() = default;
    ExactProb(ExactCount n, ExactCount d) : num(std::move(n)), den(std::move(d)) {
        if (den <= 0) fail(ErrorKind::InvalidArgument, "ExactProb denominator must be positive");
    }

    ExactProb reduced() const {
        ExactCount g = boost::multiprecision::gcd(num, den);
        if (g == 0) return *this;
        return ExactProb(num / g, den / g);
    }

    double to_double() const {
        if (num < 0) return -detail::ratio_to_double(-num, den);
        return detail::ratio_to_double(num, den);
    }

    /// log of the value; -inf for zero.
    double log_value() const {
        if (num == 0) return -INFINITY;
        return detail::log_of(num) - detail::log_of(den);
    }

    std::string to_string() const {
        ExactProb r = reduced();
        return r.num.str() + "/" + r.den.str();
    }

    friend bool operator==(const ExactProb& a, const ExactProb& b) {
        return a.num * b.den == b.num * a.den;
    }
    friend std::strong_ordering operator<=>(const ExactProb& a, const ExactProb& b) {
        const ExactCount lhs = a.num * b.den;
        const ExactCount rhs = b.num * a.den;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    friend ExactProb operator-(const ExactProb& a, const ExactProb& b) {
        if (a.den == b.den) return ExactProb(a.num - b.num, a.den);
        return ExactProb(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend ExactProb operator+(const ExactProb& a, const ExactProb& b) {
        if (a.den == b.den) return ExactProb(a.num + b.num, a.den);
        return ExactProb(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend ExactProb operator/(const ExactProb& a, const ExactProb& b) {
        ensure(b.num != 0, "division by a zero ExactProb");
        ExactCount n = a.num * b.den;
        ExactCount d = a.den * b.num;
        if (d < 0) { n = -n; d = -d; }
        return ExactProb(std::move(n), std::move(d));
    }
};

} // namespace friable

#pragma once

// Dickman's rho, the Laplace-side saddle parameter xi(u), the entire
// exponential integral I(s), the Laplace transform of rho, and the
// correction integral T(s) that links exp(sum_{i<=m} z^i/i) to I.

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "friable/error.hpp"
#include "friable/exact.hpp"
#include "friable/numeric.hpp"

namespace friable::dickman {

using Complex = std::complex<double>;

/// A nonnegative real carried as its logarithm.  abs_err_budget bounds the
/// absolute error of log_value, i.e. the relative error of the value.
struct LogReal {
    long double log_value = 0.0L;  // -inf encodes zero
    double abs_err_budget = 0.0;

    static LogReal zero() { return {-std::numeric_limits<long double>::infinity(), 0.0}; }
    static LogReal from_value(long double v, double rel_err = 0.0) {
        if (v < 0) fail(ErrorKind::DomainError, "LogReal holds nonnegative values only");
        return {v == 0 ? -std::numeric_limits<long double>::infinity() : std::log(v), rel_err};
    }

    bool is_zero() const { return std::isinf(log_value) && log_value < 0; }
    double value() const { return static_cast<double>(std::exp(log_value)); }

    friend LogReal operator*(const LogReal& a, const LogReal& b) {
        return {a.log_value + b.log_value, a.abs_err_budget + b.abs_err_budget};
    }
    friend LogReal operator/(const LogReal& a, const LogReal& b) {
        return {a.log_value - b.log_value, a.abs_err_budget + b.abs_err_budget};
    }
};

// --------------------------------------------------------------------------
// Constants

struct NamedConstants {
    static constexpr unsigned kHarmonicExactLimit = 10'000;

    static long double euler_gamma() {
        return boost::math::constants::euler<long double>();
    }

    /// gamma to 40 significant digits.
    static std::string euler_gamma_digits() {
        using boost::multiprecision::cpp_bin_float_50;
        return boost::math::constants::euler<cpp_bin_float_50>().str(40);
    }

    /// H_n = sum_{i <= n} 1/i as an exact rational.
    static ExactProb harmonic_exact(unsigned n) {
        if (n > kHarmonicExactLimit) fail(ErrorKind::BudgetExceeded, "exact harmonic numbers are limited to n <= 10^4");
        ExactCount num = 0, den = 1;
        for (unsigned i = 1; i <= n; ++i) {
            num = num * i + den;
            den *= i;
            ExactCount g = boost::multiprecision::gcd(num, den);
            num /= g;
            den /= g;
        }
        return ExactProb(num, den);
    }

    static double harmonic(unsigned n) {
        numeric::CompensatedSum<long double> s;
        for (unsigned i = n; i >= 1; --i) s.add(1.0L / i);
        return static_cast<double>(s.value());
    }
};

// --------------------------------------------------------------------------
// rho

/// Piecewise polynomial representation of rho on [0, u_max].  On [k-1, k]
/// rho(u) = sum_i c_i (k - u)^i; the delay equation u rho'(u) = -rho(u-1)
/// gives k (i+1) c_{i+1} = c'_i + i c_i in terms of the previous piece c',
/// and k rho(k) = int_{k-1}^k rho fixes c_0 = sum_{i>=1} c_i/((i+1)(k-1)).
/// All c_i are positive, so unlike matching rho(k-1) by subtraction nothing
/// cancels and the relative accuracy survives deep into the tail.
/// Coefficients are generated in 50-digit arithmetic and stored as long double.
class RhoTable {
public:
    static constexpr unsigned kDefaultDegree = 100;

    explicit RhoTable(double u_max = 100.0, unsigned degree = kDefaultDegree) : u_max_(u_max) {
        if (!(u_max >= 1.0)) fail(ErrorKind::InvalidArgument, "u_max must be >= 1");
        using Big = boost::multiprecision::cpp_bin_float_50;
        const auto pieces = static_cast<unsigned>(std::ceil(u_max));
        std::vector<Big> prev(degree + 1, Big(0));
        prev[0] = 1;  // rho = 1 on [0, 1]
        pieces_.emplace_back(degree + 1, 0.0L);
        pieces_[0][0] = 1.0L;
        certified_error_ = 0.0;
        for (unsigned k = 2; k <= pieces; ++k) {
            std::vector<Big> c(degree + 1, Big(0));
            c[1] = prev[0] / k;
            for (unsigned j = 1; j < degree; ++j) c[j + 1] = (prev[j] + j * c[j]) / (Big(k) * (j + 1));
            Big area = 0;
            for (unsigned j = 1; j <= degree; ++j) area += c[j] / (j + 1);
            c[0] = area / (k - 1);
            // Truncation: coefficients decay like k^{-j}; bound the dropped tail
            // at z = 1 by a geometric series in 1/k relative to the piece minimum.
            const Big dropped = abs(c[degree]) * k / (k - 1);
            const double rel = static_cast<double>(dropped / c[0]);
            certified_error_ = std::max(certified_error_, rel);
            std::vector<long double> stored(degree + 1);
            for (unsigned j = 0; j <= degree; ++j) stored[j] = static_cast<long double>(c[j]);
            pieces_.push_back(std::move(stored));
            prev = std::move(c);
        }
        // long double rounding of the coefficients and Horner evaluation
        certified_error_ += 4.0 * degree * std::numeric_limits<long double>::epsilon();
    }

    double u_max() const noexcept { return u_max_; }
    unsigned pieces() const noexcept { return static_cast<unsigned>(pieces_.size()); }
    /// Bound on the relative error of evaluate() over the table.
    double certified_error() const noexcept { return certified_error_; }
    const std::vector<long double>& piece(unsigned k) const { return pieces_.at(k - 1); }

    long double evaluate(double u) const {
        if (u < 0 || u > u_max_) fail(ErrorKind::OutOfTabulatedRange, "u = " + std::to_string(u) + " outside [0, u_max]");
        if (u <= 1.0) return 1.0L;
        const auto k = static_cast<unsigned>(std::ceil(u));
        const auto& c = pieces_[k - 1];
        const long double z = static_cast<long double>(k) - static_cast<long double>(u);
        long double acc = 0.0L;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

private:
    double u_max_;
    std::vector<std::vector<long double>> pieces_;
    double certified_error_ = 0.0;
};

inline const RhoTable& default_rho_table() {
    static const RhoTable table(100.0);
    return table;
}

inline constexpr double kMinRhoTolerance = 1e-14;

/// rho(u) in log domain; exactly 1 on [0, 1].
inline LogReal rho(double u, double tol = kMinRhoTolerance, const RhoTable& table = default_rho_table()) {
    if (!(tol >= kMinRhoTolerance)) fail(ErrorKind::InvalidArgument, "tolerance must be >= 1e-14");
    if (u < 0 || u > table.u_max()) fail(ErrorKind::OutOfTabulatedRange, "rho is tabulated on [0, " + std::to_string(table.u_max()) + "]");
    if (u <= 1.0) return {0.0L, 0.0};
    if (table.certified_error() > tol) fail(ErrorKind::BudgetExceeded, "rho table cannot meet the requested tolerance");
    const long double v = table.evaluate(u);
    ensure(v > 0, "rho must be positive on its tabulated range");
    return {std::log(v), table.certified_error()};
}

inline double rho_value(double u) { return rho(u).value(); }

// --------------------------------------------------------------------------
// xi

namespace detail {

/// (e^x - 1 - x)/x without cancellation.
inline double excess_ratio(double x) {
    if (std::abs(x) < 0.1) {
        double term = x / 2.0, sum = 0.0;
        for (int k = 2; k < 30 && std::abs(term) > 1e-18 * std::abs(sum); ++k) {
            sum += term;
            term *= x / (k + 1);
        }
        return sum;
    }
    return (std::expm1(x) - x) / x;
}

} // namespace detail

/// Positive root of e^xi = 1 + u xi for u > 1.  Newton seeded at log(u log u)
/// with bisection fallback on [log u, 2 log u].
inline double xi(double u) {
    if (!(u > 1.0)) fail(ErrorKind::DomainError, "xi is defined for u > 1");
    const double excess = u - 1.0;
    auto f_df = [excess](double x) -> std::pair<double, double> {
        const double f = detail::excess_ratio(x) - excess;
        const double df = x < 1e-4 ? 0.5 + x / 3.0 : ((x - 1.0) * std::exp(x) + 1.0) / (x * x);
        return {f, df};
    };
    const double lo = std::log(u), hi = 2.0 * std::log(u);
    const double ulogu = u * std::log(u);
    const double seed = ulogu > 1.0 ? std::log(ulogu) : 0.5 * (lo + hi);
    // The upper end can coincide with the root to rounding; widen slightly.
    const auto root = numeric::newton_bracketed(f_df, lo, hi * (1.0 + 1e-12), seed, 1e-16);
    if (!root.converged) fail(ErrorKind::DomainError, "xi iteration did not converge");
    return root.x;
}

/// d xi / du = xi / (u xi - u + 1), from implicit differentiation.
inline double xi_prime(double u) {
    const double x = xi(u);
    return x / (u * x - u + 1.0);
}

// --------------------------------------------------------------------------
// I(s), rho-hat(s), T(s)

inline constexpr double kSeriesBudget = 200.0;

/// I(s) = int_0^s (e^v - 1)/v dv = sum_{k>=1} s^k/(k k!), summed in 110-digit
/// arithmetic so cancellation for Re s < 0 stays harmless up to |s| = 200.
inline Complex exp_integral_I(Complex s) {
    if (std::abs(s) > kSeriesBudget) fail(ErrorKind::BudgetExceeded, "|s| exceeds the series budget of 200");
    if (s == Complex(0.0, 0.0)) return {0.0, 0.0};
    using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<110>>;
    const Big sr = s.real(), si = s.imag();
    Big pr = 1, pi = 0;  // s^k / k!
    Big sum_r = 0, sum_i = 0;
    const double mod = std::abs(s);
    const Big eps("1e-45");
    for (unsigned k = 1; k < 20000; ++k) {
        const Big nr = (pr * sr - pi * si) / k;
        const Big ni = (pr * si + pi * sr) / k;
        pr = nr;
        pi = ni;
        sum_r += pr / k;
        sum_i += pi / k;
        if (k > mod + 2) {
            const Big term = abs(pr) + abs(pi);
            const Big size = abs(sum_r) + abs(sum_i);
            if (term < eps * size) break;
        }
    }
    return {static_cast<double>(sum_r), static_cast<double>(sum_i)};
}

/// Laplace transform of rho through exp(gamma + I(-s)).
inline Complex rho_laplace(Complex s) {
    return std::exp(static_cast<double>(NamedConstants::euler_gamma()) + exp_integral_I(-s));
}

namespace detail {

/// (e^v - 1)/v, entire.
inline Complex exp_ratio(Complex v) {
    if (std::abs(v) < 0.5) {
        Complex term = 1.0, sum = 0.0;
        for (int k = 1; k < 40; ++k) {
            sum += term;
            term *= v / static_cast<double>(k + 1);
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum + term;
    }
    return (std::exp(v) - 1.0) / v;
}

/// w e^w/(e^w - 1) - 1, analytic for |Im w| < 2 pi.
inline Complex bernoulli_excess(Complex w) {
    if (std::abs(w) < 0.25) {
        // w/2 + sum_k B_{2k}/(2k)! w^{2k}
        static constexpr double coeff[] = {1.0 / 12.0,        -1.0 / 720.0,         1.0 / 30240.0,
                                           -1.0 / 1209600.0,  1.0 / 47900160.0,     -691.0 / 1307674368000.0,
                                           1.0 / 74724249600.0};
        const Complex w2 = w * w;
        Complex power = w2, sum = w / 2.0;
        for (double c : coeff) {
            sum += c * power;
            power *= w2;
        }
        return sum;
    }
    return w / (1.0 - std::exp(-w)) - 1.0;
}

} // namespace detail

/// T(s) = int_0^s (e^v-1)/v (v/m e^{v/m}/(e^{v/m}-1) - 1) dv along the
/// straight segment, for s in the window |Re s|, |Im s| <= pi m.
inline Complex t_correction(Complex s, unsigned m, double rel_tol = 1e-12) {
    if (m < 1) fail(ErrorKind::InvalidArgument, "m must be >= 1");
    const double window = std::numbers::pi * m;
    if (std::abs(s.real()) > window || std::abs(s.imag()) > window)
        fail(ErrorKind::DomainError, "T(s) is evaluated only for |Re s|, |Im s| <= pi m");
    if (s == Complex(0.0, 0.0)) return {0.0, 0.0};
    const double inv_m = 1.0 / m;
    auto integrand = [&](double t) {
        const Complex v = t * s;
        return s * detail::exp_ratio(v) * detail::bernoulli_excess(v * inv_m);
    };
    return numeric::integrate<Complex>(integrand, 0.0, 1.0, rel_tol, 1e-300).value;
}

} // namespace friable::dickman

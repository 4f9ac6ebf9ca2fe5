#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>

#include <cmath>

#include "friable/dickman.hpp"

using namespace friable;
using namespace friable::dickman;

namespace {

constexpr double kGamma = 0.57721566490153286060651209008240243;

double rel(double a, double b) { return std::abs(a / b - 1.0); }

double gk(auto f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-13);
}

} // namespace

TEST(Rho, ClosedForms) {
    EXPECT_EQ(rho_value(0.0), 1.0);
    EXPECT_EQ(rho_value(1.0), 1.0);
    for (double u : {1.1, 1.5, 1.9, 2.0})
        EXPECT_NEAR(rho_value(u), 1.0 - std::log(u), 1e-15) << u;
    EXPECT_NEAR(rho_value(2.0), 0.30685281944005469, 1e-16);
}

// mpmath values (tests/oracles/derive_values.py).
TEST(Rho, HighPrecisionAnchors) {
    EXPECT_LE(rel(rho_value(3.0), 0.04860838829113157), 1e-14);
    EXPECT_LE(rel(rho_value(1.5), 0.59453489189183562), 1e-14);
    EXPECT_LE(rel(rho_value(2.5), 0.13031956183225075), 1e-14);
    EXPECT_LE(rel(rho_value(10.0), 2.770171837725959e-11), 1e-13);
    EXPECT_LE(rel(rho_value(20.0), 2.4617828287649181e-29), 1e-13);
}

TEST(Rho, DeepTailInLogDomain) {
    // 900-digit, degree-400 reference values from derive_values.py
    const auto r37 = rho(37.3);
    const auto r50 = rho(50.0);
    EXPECT_NEAR(static_cast<double>(r37.log_value), std::log(1.2691714245611969e-66), 1e-12);
    EXPECT_NEAR(static_cast<double>(r50.log_value), std::log(6.7153344966801123e-97), 1e-12);
    EXPECT_LE(r50.abs_err_budget, 1e-14);
    EXPECT_TRUE(std::isfinite(static_cast<double>(rho(100.0).log_value)));
}

TEST(Rho, DelayIdentityAgainstIndependentQuadrature) {
    for (double u : {1.5, 2.5, 5.0, 10.0, 20.0, 33.3}) {
        auto f = [u](double t) { return rho_value(u - t); };
        const double frac = u - std::floor(u);
        const double lhs = frac > 0 ? gk(f, 0.0, frac) + gk(f, frac, 1.0) : gk(f, 0.0, 1.0);
        EXPECT_LE(rel(lhs, u * rho_value(u)), 1e-12) << u;
    }
}

TEST(Rho, TotalMassIsExpGamma) {
    double total = 0.0;
    for (int k = 0; k < 40; ++k) total += gk([](double u) { return rho_value(u); }, k, k + 1.0);
    EXPECT_NEAR(total, std::exp(kGamma), 1e-13);
    EXPECT_NEAR(static_cast<double>(NamedConstants::euler_gamma()), kGamma, 1e-18);
}

TEST(Rho, MonotoneAndPositive) {
    double prev = 1.0;
    for (int i = 0; i <= 6000; ++i) {
        const double v = static_cast<double>(rho(i * 0.01).log_value);
        EXPECT_LE(v, prev + 1e-15) << i;
        prev = v;
    }
}

// u rho'(u) = -rho(u - 1), by central differences.
TEST(Rho, DelayDifferentialEquation) {
    for (double u : {1.7, 2.3, 4.5, 7.25, 12.5}) {
        const double h = 1e-5;
        const double d = (rho_value(u + h) - rho_value(u - h)) / (2 * h);
        EXPECT_LE(rel(-u * d, rho_value(u - 1)), 1e-7) << u;
    }
}

TEST(Rho, Errors) {
    EXPECT_THROW(rho(2.0, 1e-15), Error);
    EXPECT_THROW(rho(-0.5), Error);
    EXPECT_THROW(rho(100.5), Error);
    try {
        rho(200.0);
        FAIL() << "expected OutOfTabulatedRange";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OutOfTabulatedRange);
    }
}

TEST(Xi, RootBoundsAndResidual) {
    for (double u : {1.01, 2.0, 10.0, 100.0, 1e4}) {
        const double x = xi(u);
        EXPECT_GT(x, std::log(u)) << u;
        EXPECT_LE(x, 2.0 * std::log(u)) << u;
        EXPECT_LE(std::abs(std::expm1(x) - u * x), 1e-10 * (1 + u * x)) << u;
    }
    EXPECT_NEAR(xi(2.0), 1.2564312086261697, 1e-14);
    EXPECT_NEAR(xi(10.0), 3.6149504270875306, 1e-14);
    EXPECT_THROW(xi(1.0), Error);
}

TEST(Xi, DerivativeMatchesDifference) {
    for (double u : {1.5, 3.0, 20.0, 500.0}) {
        const double h = 1e-5 * u;
        EXPECT_LE(rel(xi_prime(u), (xi(u + h) - xi(u - h)) / (2 * h)), 1e-7) << u;
    }
}

// I(s) = Ei(s) - gamma - log s for s > 0, and -E1(-s) - gamma - log(-s) for s < 0.
TEST(ExpIntegral, MatchesBoostEi) {
    for (double s : {0.25, 1.0, 3.6, 10.0, 40.0}) {
        const double ref = boost::math::expint(s) - kGamma - std::log(s);
        EXPECT_LE(std::abs(exp_integral_I({s, 0.0}).real() - ref), 1e-13 * std::max(1.0, std::abs(ref))) << s;
    }
    for (double s : {-0.5, -1.0, -7.0, -60.0}) {
        const double ref = -boost::math::expint(1, -s) - kGamma - std::log(-s);
        EXPECT_LE(std::abs(exp_integral_I({s, 0.0}).real() - ref), 1e-13 * std::max(1.0, std::abs(ref))) << s;
    }
    EXPECT_NEAR(exp_integral_I({1.0, 0.0}).real(), 1.3179021514544039, 1e-15);
    EXPECT_NEAR(exp_integral_I({-1.0, 0.0}).real(), -0.79659959929705313, 1e-15);
    const auto c = exp_integral_I({1.0, 2.0});
    EXPECT_NEAR(c.real(), -0.33976691295364736, 1e-14);
    EXPECT_NEAR(c.imag(), 2.5943527081437838, 1e-14);
    EXPECT_THROW(exp_integral_I({250.0, 0.0}), Error);
}

TEST(ExpIntegral, LaplaceTransformOfRho) {
    for (double s : {0.5, 1.0, 3.0}) {
        double direct = 0.0;
        for (int k = 0; k < 40; ++k) direct += gk([s](double u) { return std::exp(-s * u) * rho_value(u); }, k, k + 1.0);
        EXPECT_LE(rel(direct, rho_laplace({s, 0.0}).real()), 1e-12) << s;
    }
}

TEST(TCorrection, FrozenValuesAndQuadrature) {
    EXPECT_NEAR(t_correction({1.0, 0.0}, 2).real(), 0.18996003347524687, 1e-14);
    const auto t = t_correction({2.0, 1.0}, 3);
    EXPECT_NEAR(t.real(), 0.14061746939837640, 1e-13);
    EXPECT_NEAR(t.imag(), 0.94549549346604645, 1e-13);
    // real axis: independent quadrature of (e^v-1)/v (v/m/(1-e^{-v/m}) - 1)
    for (auto [s, m] : {std::pair{3.0, 2u}, {-4.0, 5u}, {10.0, 7u}}) {
        auto f = [m = m](double v) {
            if (v == 0) return 0.0;
            const double w = v / m;
            return std::expm1(v) / v * (w / -std::expm1(-w) - 1.0);
        };
        const double ref = s > 0 ? gk(f, 0.0, s) : -gk(f, s, 0.0);
        EXPECT_LE(std::abs(t_correction({s, 0.0}, m).real() - ref), 1e-12 * std::max(1.0, std::abs(ref))) << s;
    }
    EXPECT_THROW(t_correction({10.0, 0.0}, 1), Error);
}

TEST(Constants, Harmonic) {
    EXPECT_EQ(NamedConstants::harmonic_exact(4).to_string(), "25/12");
    EXPECT_NEAR(NamedConstants::harmonic(1000), std::log(1000.0) + kGamma + 1.0 / 2000 - 1.0 / 12e6, 1e-13);
    EXPECT_EQ(NamedConstants::euler_gamma_digits().substr(0, 12), "0.5772156649");
}

TEST(LogReal, Arithmetic) {
    const auto a = LogReal::from_value(6.0L, 1e-15), b = LogReal::from_value(3.0L, 2e-15);
    EXPECT_NEAR((a / b).value(), 2.0, 1e-15);
    EXPECT_NEAR((a * b).abs_err_budget, 3e-15, 1e-30);
    EXPECT_TRUE(LogReal::from_value(0.0L).is_zero());
    EXPECT_THROW(LogReal::from_value(-1.0L), Error);
}

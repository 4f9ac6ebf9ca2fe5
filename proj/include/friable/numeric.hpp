#pragma once

// Numerical building blocks shared by the analytic modules.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <vector>

#include "friable/error.hpp"

namespace friable::numeric {

/// Neumaier-compensated accumulator.
template <class T = double>
struct CompensatedSum {
    T sum{0};
    T carry{0};

    void add(T x) {
        const T t = sum + x;
        if (std::abs(sum) >= std::abs(x)) carry += (sum - t) + x;
        else carry += (x - t) + sum;
        sum = t;
    }
    T value() const { return sum + carry; }
};

template <class T>
struct Integral {
    T value{};
    double error = 0.0;
    int intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T, class F>
std::pair<T, double> kronrod_panel(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const T f_centre = f(centre);
    T kronrod = f_centre * kKronrodWeights[7];
    T gauss = f_centre * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const T sum = f(centre - dx) + f(centre + dx);
        kronrod += sum * kKronrodWeights[j];
        if (j % 2 == 1) gauss += sum * kGaussWeights[j / 2];
    }
    kronrod *= half;
    gauss *= half;
    return {kronrod, std::abs(kronrod - gauss)};
}

} // namespace detail

/// Adaptive Gauss-Kronrod (7/15) quadrature of a real- or complex-valued
/// integrand over [a, b]; bisects the worst panel until the summed error
/// estimate meets max(abs_tol, rel_tol * |integral|).
template <class T, class F>
Integral<T> integrate(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0,
                      int max_panels = 4000) {
    struct Panel {
        double a, b;
        T value;
        double error;
        bool operator<(const Panel& other) const { return error < other.error; }
    };
    std::priority_queue<Panel> panels;
    auto [v0, e0] = detail::kronrod_panel<T>(f, a, b);
    panels.push({a, b, v0, e0});
    T total = v0;
    double error = e0;
    int count = 1;
    while (error > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_panels) {
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto [vl, el] = detail::kronrod_panel<T>(f, worst.a, mid);
        auto [vr, er] = detail::kronrod_panel<T>(f, mid, worst.b);
        total += vl + vr - worst.value;
        error += el + er - worst.error;
        panels.push({worst.a, mid, vl, el});
        panels.push({mid, worst.b, vr, er});
        ++count;
    }
    // Re-sum to drop the drift accumulated by incremental updates.
    T resummed{};
    double err_sum = 0.0;
    while (!panels.empty()) {
        resummed += panels.top().value;
        err_sum += panels.top().error;
        panels.pop();
    }
    return {resummed, err_sum, count};
}

struct Root {
    double x = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Newton iteration safeguarded by a sign-change bracket [lo, hi].  f_df
/// returns (f, f').  Steps leaving the bracket fall back to bisection.
template <class F>
Root newton_bracketed(F&& f_df, double lo, double hi, double seed, double rel_tol = 1e-15, int max_iter = 200) {
    auto [f_lo, d_lo] = f_df(lo);
    auto [f_hi, d_hi] = f_df(hi);
    if (f_lo == 0.0) return {lo, 0, true};
    if (f_hi == 0.0) return {hi, 0, true};
    if ((f_lo > 0) == (f_hi > 0)) fail(ErrorKind::DomainError, "root is not bracketed");
    const bool increasing = f_hi > 0;
    double x = (seed > lo && seed < hi) ? seed : 0.5 * (lo + hi);
    for (int it = 1; it <= max_iter; ++it) {
        auto [fx, dfx] = f_df(x);
        if (fx == 0.0) return {x, it, true};
        if ((fx > 0) == increasing) hi = x;
        else lo = x;
        double next = x - fx / dfx;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= rel_tol * std::abs(next) || hi - lo <= rel_tol * std::abs(hi)) return {next, it, true};
        x = next;
    }
    return {x, max_iter, false};
}

} // namespace friable::numeric

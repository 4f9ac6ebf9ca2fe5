#pragma once

// Saddle-point machinery for m-friable permutations and polynomials: the
// radius x with sum_{j<=m} x^j = n, the curvature sums, the correction
// factor G_q(z) = F_q(z)/F(z) with a certified truncation bound, and the
// ratio predictions with their error envelopes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "friable/census.hpp"
#include "friable/dickman.hpp"
#include "friable/error.hpp"
#include "friable/exact.hpp"
#include "friable/numeric.hpp"

namespace friable::saddle {

using census::Params;
using dickman::LogReal;

// --------------------------------------------------------------------------
// x and the power sums

namespace detail {

/// log(sum_{j=1}^m x^j) for x = 1 + y, y >= 0, without cancellation near y = 0.
inline double log_geometric_sum(double y, unsigned m) {
    if (y == 0.0) return std::log(static_cast<double>(m));
    const double lx = std::log1p(y);
    // sum = x (x^m - 1)/(x - 1)
    return lx + std::log(std::expm1(m * lx)) - std::log(y);
}

} // namespace detail

/// Positive root of sum_{j=1}^m x^j = n.  Exact at the endpoints m = 1 and
/// m = n; otherwise Newton in y = x - 1 on log of the geometric sum, which
/// stays well-conditioned as x -> 1.
inline double solve_x(unsigned n, unsigned m) {
    if (m < 1 || m > n) fail(ErrorKind::InvalidArgument, "solve_x needs 1 <= m <= n");
    if (m == 1) return static_cast<double>(n);
    if (m == n) return 1.0;
    const double target = std::log(static_cast<double>(n));
    auto f_df = [&](double y) -> std::pair<double, double> {
        const double x = 1.0 + y;
        const double f = detail::log_geometric_sum(y, m) - target;
        // d/dy log S = (sum j x^{j-1}) / S
        numeric::CompensatedSum<> lam, s;
        double p = 1.0;
        for (unsigned j = 1; j <= m; ++j) {
            p *= x;
            s.add(p);
            lam.add(j * p);
        }
        return {f, lam.value() / (x * s.value())};
    };
    const double hi = std::pow(static_cast<double>(n), 1.0 / m) - 1.0;
    const double seed = hi * 0.9;
    const auto root = numeric::newton_bracketed(f_df, 0.0, hi * (1.0 + 1e-12) + 1e-300, seed, 1e-16);
    return 1.0 + root.x;
}

struct PowerSums {
    double lambda = 0.0;   // sum j x^j
    double lambda2 = 0.0;  // sum j^2 x^j
    LogReal Q;             // exp(sum x^j/j) x^{-n}, with n = sum x^j
};

/// lambda, lambda_2 and Q(x).  The normalising power is x^{-n} (n = sum x^j):
/// that is the factor produced by Cauchy's formula on |z| = x, and the one
/// that makes Q(x)/sqrt(2 pi lambda) match 1/n! at m = 1.
inline PowerSums power_sums(double x, unsigned m) {
    if (!(x > 0)) fail(ErrorKind::DomainError, "power_sums needs x > 0");
    numeric::CompensatedSum<> lam, lam2, log_sum, n_sum;
    double p = 1.0;
    for (unsigned j = 1; j <= m; ++j) {
        p *= x;
        n_sum.add(p);
        lam.add(j * p);
        lam2.add(static_cast<double>(j) * j * p);
        log_sum.add(p / j);
    }
    PowerSums out;
    out.lambda = lam.value();
    out.lambda2 = lam2.value();
    out.Q = {static_cast<long double>(log_sum.value()) - static_cast<long double>(n_sum.value()) * std::log(static_cast<long double>(x)),
             4 * m * std::numeric_limits<double>::epsilon() * std::max(1.0, n_sum.value() * std::abs(std::log(x)))};
    return out;
}

/// Q(x)/sqrt(2 pi lambda), the saddle estimate of P(pi_n is m-friable).
inline LogReal perm_saddle_estimate(unsigned n, unsigned m) {
    const double x = solve_x(n, m);
    const auto sums = power_sums(x, m);
    LogReal est = sums.Q;
    est.log_value -= 0.5L * std::log(2.0L * std::numbers::pi_v<long double> * sums.lambda);
    return est;
}

// --------------------------------------------------------------------------
// G_q

/// a_i = W(i)/q^i in double, for i > m.  Each d pi_q(d)/q^d is converted
/// from the exact table once; the rest is a power of q handled in logs.
class CoefficientSeries {
public:
    CoefficientSeries(std::uint64_t q, unsigned m) : q_(q), m_(m), log_q_(std::log(static_cast<double>(q))) {
        census::validate_prime_power(q);
        if (m < 1) fail(ErrorKind::InvalidArgument, "m must be >= 1");
        auto table = census::table_for(q, m);
        scaled_.resize(m + 1, 0.0);
        for (unsigned d = 1; d <= m; ++d)
            scaled_[d] = friable::detail::ratio_to_double(table->count(d) * d, ipow(q, d));
    }

    std::uint64_t q() const noexcept { return q_; }
    unsigned m() const noexcept { return m_; }
    double log_q() const noexcept { return log_q_; }

    /// q^{d-i} straight from pow: exp((d - i) log q) would lose ~(i - d) ulps.
    double a(unsigned i) const {
        numeric::CompensatedSum<> s;
        for (unsigned d : census::divisors(i)) {
            if (d > m_) break;
            s.add(scaled_[d] * std::pow(static_cast<double>(q_), static_cast<double>(d) - i));
        }
        return s.value();
    }

    /// a_i z^i = sum_{d | i, d <= m} (d pi_q(d)/q^d) q^d (z/q)^i, which stays
    /// finite where z^i alone would overflow.
    double a_times_power(unsigned i, double z) const {
        const double log_ratio = std::log(z) - log_q_;
        numeric::CompensatedSum<> s;
        for (unsigned d : census::divisors(i)) {
            if (d > m_) break;
            s.add(scaled_[d] * std::exp(d * log_q_ + i * log_ratio));
        }
        return s.value();
    }

private:
    std::uint64_t q_;
    unsigned m_;
    double log_q_;
    std::vector<double> scaled_;
};

struct GqValue {
    double value = 1.0;
    double tail_bound = 0.0;  // certified bound on |G_q(z) - value|
    unsigned terms = 0;       // truncation index I
};

struct GqDerivatives {
    double first = 0.0;
    double second = 0.0;
    double first_tail = 0.0;
    double second_tail = 0.0;
};

inline constexpr unsigned kMaxSeriesTerms = 200'000;

namespace detail {

inline void check_convergent(std::uint64_t q, double z) {
    if (!(z >= 0)) fail(ErrorKind::DomainError, "G_q is evaluated on z >= 0");
    if (z * z >= static_cast<double>(q))
        fail(ErrorKind::DivergenceRisk, "z^2 >= q: the a_i tail bound does not converge");
}

/// Dropped tails of log G, (log G)' and (log G)'' past index I >= 2m, from
/// a_i <= 2 q^{min(m, floor(i/2)) - i} = 2 q^m q^{-i} for i >= 2m.  With
/// r = z/q the tails are geometric (times i for the second derivative).
struct Tails {
    double value = 0.0, first = 0.0, second = 0.0;
};

inline Tails tails_after(const CoefficientSeries& s, double z, unsigned last) {
    const double r = z / static_cast<double>(s.q());
    const double lead = std::exp(s.m() * s.log_q() + (last + 1.0) * std::log(r));  // q^m r^{I+1}
    Tails t;
    t.value = 2.0 * lead / ((last + 1.0) * (1.0 - r));
    t.first = 2.0 * lead / (z * (1.0 - r));
    t.second = 2.0 * lead * (last + 1.0) / (z * z * (1.0 - r) * (1.0 - r));
    return t;
}

inline unsigned truncation_index(const CoefficientSeries& s, double z, double tol, bool derivatives) {
    unsigned last = 2 * s.m();
    while (last < 2 * s.m() + kMaxSeriesTerms) {
        const Tails t = tails_after(s, z, last);
        if (t.value <= tol && (!derivatives || (t.first <= tol && t.second <= tol))) return last;
        last += std::max(4u, last / 8);
    }
    fail(ErrorKind::BudgetExceeded, "G_q series needs more than the term budget");
}

} // namespace detail

/// G_q(z) = exp(sum_{i>m} a_i z^i / i) for 0 <= z < sqrt(q).  The returned
/// tail_bound covers the dropped terms and the summation rounding.
inline GqValue g_q_eval(const CoefficientSeries& series, double z, double rel_tol = 1e-13) {
    detail::check_convergent(series.q(), z);
    const unsigned m = series.m();
    if (z == 0.0) return {1.0, 0.0, m};
    const unsigned last = detail::truncation_index(series, z, 0.5 * rel_tol, false);
    numeric::CompensatedSum<> log_g;
    for (unsigned i = m + 1; i <= last; ++i) log_g.add(series.a_times_power(i, z) / i);
    const double log_tail = detail::tails_after(series, z, last).value;
    const double value = std::exp(log_g.value());
    const double rounding = 8.0 * (last - m) * std::numeric_limits<double>::epsilon() * std::max(1.0, log_g.value());
    return {value, value * std::expm1(log_tail + rounding), last};
}

inline GqValue g_q_eval(std::uint64_t q, unsigned m, double z, double rel_tol = 1e-13) {
    return g_q_eval(CoefficientSeries(q, m), z, rel_tol);
}

/// G'_q(z) = G L', G''_q(z) = G (L'' + L'^2) with L = log G_q, differentiated
/// term-wise: L' = sum a_i z^{i-1}, L'' = sum (i-1) a_i z^{i-2}.
inline GqDerivatives g_q_derivatives(const CoefficientSeries& series, double z, double rel_tol = 1e-11) {
    detail::check_convergent(series.q(), z);
    const unsigned m = series.m();
    if (z == 0.0) {
        // lowest surviving term is i = m + 1 >= 2
        const double second = m == 1 ? series.a(2) : 0.0;
        return {0.0, second, 0.0, 0.0};
    }
    const auto g = g_q_eval(series, z, rel_tol);
    const unsigned last = detail::truncation_index(series, z, 1e-3 * rel_tol, true);
    numeric::CompensatedSum<> d1, d2;
    for (unsigned i = m + 1; i <= last; ++i) {
        const double term = series.a_times_power(i, z);  // a_i z^i
        d1.add(term / z);
        d2.add((i - 1.0) * term / (z * z));
    }
    const double l1 = d1.value(), l2 = d2.value();
    const auto t = detail::tails_after(series, z, last);
    GqDerivatives out;
    out.first = g.value * l1;
    out.second = g.value * (l2 + l1 * l1);
    out.first_tail = g.value * t.first + g.tail_bound * (l1 + t.first);
    out.second_tail = g.value * (t.second + 2 * l1 * t.first + t.first * t.first) +
                      g.tail_bound * (l2 + t.second + (l1 + t.first) * (l1 + t.first));
    return out;
}

inline GqDerivatives g_q_derivatives(std::uint64_t q, unsigned m, double z, double rel_tol = 1e-11) {
    return g_q_derivatives(CoefficientSeries(q, m), z, rel_tol);
}

// --------------------------------------------------------------------------
// SaddleData

struct SaddleData {
    Params params;
    double x = 0.0;
    double lambda = 0.0;
    double lambda2 = 0.0;
    LogReal Q;
    std::optional<double> gq_at_x;  // empty when x^2 >= q
    double tail_bound = INFINITY;
    LogReal estimate;               // Q(x)/sqrt(2 pi lambda)
};

inline SaddleData saddle_data(const Params& params) {
    SaddleData d{params};
    d.x = solve_x(params.n(), params.m());
    const auto sums = power_sums(d.x, params.m());
    d.lambda = sums.lambda;
    d.lambda2 = sums.lambda2;
    d.Q = sums.Q;
    d.estimate = perm_saddle_estimate(params.n(), params.m());
    if (d.x * d.x < static_cast<double>(params.q())) {
        const auto g = g_q_eval(params.q(), params.m(), d.x);
        d.gq_at_x = g.value;
        d.tail_bound = g.tail_bound;
    }
    return d;
}

// --------------------------------------------------------------------------
// Ratio predictions

enum class Theorem { None, Thm1_1, Thm1_2, Thm1_3_eq15, Thm1_3_eq16, Thm5_1 };

inline std::string_view to_string(Theorem t) {
    switch (t) {
    case Theorem::None: return "none";
    case Theorem::Thm1_1: return "Thm1.1";
    case Theorem::Thm1_2: return "Thm1.2";
    case Theorem::Thm1_3_eq15: return "Thm1.3-eq15";
    case Theorem::Thm1_3_eq16: return "Thm1.3-eq16";
    case Theorem::Thm5_1: return "Thm5.1";
    }
    return "none";
}

enum class PredictionStatus { Ok, RangeNotCovered, DivergenceRisk };

inline std::string_view to_string(PredictionStatus s) {
    switch (s) {
    case PredictionStatus::Ok: return "ok";
    case PredictionStatus::RangeNotCovered: return "RangeNotCovered";
    case PredictionStatus::DivergenceRisk: return "DivergenceRisk";
    }
    return "ok";
}

/// How the error envelope is compared with the exact ratio R = P_f/P_pi.
enum class EnvelopeForm {
    RelativeToOne,   // |R - 1| <~ envelope
    RelativeToG,     // |R/G - 1| <~ envelope
    AbsoluteFromG,   // |R - G| <~ envelope
};

struct RatioPrediction {
    Params params;
    PredictionStatus status = PredictionStatus::RangeNotCovered;
    Theorem applicable_theorem = Theorem::None;
    EnvelopeForm form = EnvelopeForm::RelativeToOne;
    std::vector<Theorem> all_applicable;
    std::optional<double> g_q_x;
    double main_term = 1.0;
    double thm_error_envelope = 0.0;  // implied constant set to 1
    bool range_discrepancy = false;   // bare eq16 range disagrees with the min-form
    std::string notes;
};

/// Ranges of the main theorems, with strict inequalities (boundary points are
/// not claimed) and natural logs; log_q n = ln n / ln q.
struct TheoremRanges {
    double ln_n, log_q_n, thm13_upper, thm51_upper;

    TheoremRanges(std::uint64_t q, unsigned n) {
        ln_n = std::log(static_cast<double>(n));
        log_q_n = ln_n / std::log(static_cast<double>(q));
        const double lln = std::log(std::log(n + 1.0));
        thm13_upper = n / (ln_n * lln * lln * lln);
        thm51_upper = std::min(thm13_upper, n / 3.0);
    }

    bool thm1_1(double m) const { return m > 6.0 * ln_n; }
    bool thm1_2(double m) const { return m < 8.0 * ln_n && m > 2.0 * log_q_n; }
    bool thm1_3_eq15(double m) const { return m > log_q_n && m < 2.0 * log_q_n; }
    bool thm1_3_eq16(double m) const { return m > 2.0 * log_q_n && m < thm51_upper; }
    bool thm1_3_eq16_bare(double m) const { return m > 2.0 * log_q_n && m < thm13_upper; }
    bool thm5_1(double m) const { return m >= log_q_n && m < thm51_upper; }
};

inline RatioPrediction ratio_prediction(const Params& params) {
    RatioPrediction out{params};
    const unsigned n = params.n(), m = params.m();
    const double q = static_cast<double>(params.q());
    const double u = params.u();
    const TheoremRanges ranges(params.q(), n);
    const double md = m;
    const double q_half = std::pow(q, std::ceil((m + 1) / 2.0));
    const double a = (m % 2 == 0) ? 1.0 : 0.0;

    if (ranges.thm1_1(md)) out.all_applicable.push_back(Theorem::Thm1_1);
    if (ranges.thm1_2(md)) out.all_applicable.push_back(Theorem::Thm1_2);
    if (ranges.thm1_3_eq15(md)) out.all_applicable.push_back(Theorem::Thm1_3_eq15);
    if (ranges.thm1_3_eq16(md)) out.all_applicable.push_back(Theorem::Thm1_3_eq16);
    if (ranges.thm5_1(md)) out.all_applicable.push_back(Theorem::Thm5_1);
    out.range_discrepancy = ranges.thm1_3_eq16(md) != ranges.thm1_3_eq16_bare(md);
    if (out.range_discrepancy) out.notes = "bare eq16 range and the min-form range disagree here; min-form used";

    const double x = solve_x(n, m);
    std::optional<CoefficientSeries> series;
    if (x * x < q) {
        series.emplace(params.q(), m);
        out.g_q_x = g_q_eval(*series, x).value;
    }

    if (out.all_applicable.empty()) {
        out.status = PredictionStatus::RangeNotCovered;
        return out;
    }
    out.applicable_theorem = out.all_applicable.front();
    out.status = PredictionStatus::Ok;
    switch (out.applicable_theorem) {
    case Theorem::Thm1_1:
        out.form = EnvelopeForm::RelativeToOne;
        out.thm_error_envelope = u * std::log(u + 1.0) / (md * q_half);
        break;
    case Theorem::Thm1_2:
        out.form = EnvelopeForm::RelativeToOne;
        out.thm_error_envelope = u * std::pow(static_cast<double>(n), (1.0 + a) / md) / q_half;
        break;
    case Theorem::Thm1_3_eq15: {
        out.form = EnvelopeForm::RelativeToG;
        // largest eps with (1+eps) log_q n <= m <= (2-eps) log_q n
        const double theta = md / ranges.log_q_n;
        const double eps = std::min(theta - 1.0, 2.0 - theta);
        out.thm_error_envelope = std::pow(static_cast<double>(n), std::max(1.0 - 2.0 * eps, -eps));
        break;
    }
    case Theorem::Thm1_3_eq16:
        out.form = EnvelopeForm::AbsoluteFromG;
        out.thm_error_envelope = std::pow(static_cast<double>(n), (1.0 + a) / md) * std::min(md, std::log(u)) / (md * q_half);
        break;
    case Theorem::Thm5_1:
        out.form = EnvelopeForm::RelativeToG;
        if (series) {
            const auto d = g_q_derivatives(*series, x);
            out.thm_error_envelope = (d.second * x * x + d.first * x * md) / (n * md * *out.g_q_x);
        }
        break;
    case Theorem::None: break;
    }
    if (out.form != EnvelopeForm::RelativeToOne) {
        if (!out.g_q_x) {
            out.status = PredictionStatus::DivergenceRisk;
            out.notes += (out.notes.empty() ? "" : "; ") + std::string("x^2 >= q, G_q(x) not evaluable");
            return out;
        }
        out.main_term = *out.g_q_x;
    }
    return out;
}

} // namespace friable::saddle

#pragma once

// Exact friable counts for permutations of S_n and monic polynomials over
// F_q, their brute-force oracles, and the derived probabilities and
// expectations of the largest cycle / largest irreducible factor.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "friable/census.hpp"
#include "friable/error.hpp"
#include "friable/exact.hpp"
#include "friable/numeric.hpp"
#include "friable/parallel.hpp"

namespace friable::counts {

using census::Params;

enum class Kind { Perm, Poly };

inline std::string_view to_string(Kind kind) { return kind == Kind::Perm ? "perm" : "poly"; }

// --------------------------------------------------------------------------
// Recurrences

/// psi_pi(k, m) for k = 0..n_max.  Uses k P(k) = sum_{i<=min(m,k)} P(k-i) in
/// count form: psi(k) = sum_i (k-1)!/(k-i)! psi(k-i).
inline std::vector<ExactCount> psi_perm_row(unsigned m, unsigned n_max) {
    if (m < 1) fail(ErrorKind::InvalidArgument, "m must be >= 1");
    std::vector<ExactCount> psi(n_max + 1);
    psi[0] = 1;
    for (unsigned k = 1; k <= n_max; ++k) {
        ExactCount falling = 1;  // (k-1)!/(k-i)!
        ExactCount sum = 0;
        for (unsigned i = 1; i <= std::min(m, k); ++i) {
            if (i > 1) falling *= k - i + 1;
            sum += falling * psi[k - i];
        }
        psi[k] = std::move(sum);
    }
    return psi;
}

inline ExactCount psi_perm(unsigned n, unsigned m) {
    if (m < 1) fail(ErrorKind::InvalidArgument, "m must be >= 1");
    if (m >= n) return factorial(n);
    return psi_perm_row(m, n)[n];
}

/// psi_q(k, m) for k = 0..n_max from k psi(k) = sum_j psi(k-j) W(j),
/// W(j) = sum_{d | j, d <= m} d pi_q(d).
inline std::vector<ExactCount> psi_poly_row(std::uint64_t q, unsigned m, unsigned n_max) {
    if (m < 1) fail(ErrorKind::InvalidArgument, "m must be >= 1");
    auto table = census::table_for(q, std::max(1u, std::min(m, n_max)));
    std::vector<ExactCount> weight(n_max + 1);
    for (unsigned j = 1; j <= n_max; ++j) weight[j] = table->weighted_divisor_sum(m, j);
    std::vector<ExactCount> psi(n_max + 1);
    psi[0] = 1;
    for (unsigned k = 1; k <= n_max; ++k) {
        ExactCount sum = 0;
        for (unsigned j = 1; j <= k; ++j) sum += psi[k - j] * weight[j];
        ensure(sum % k == 0, "polynomial recurrence did not divide exactly by n");
        psi[k] = sum / k;
    }
    return psi;
}

inline ExactCount psi_poly(std::uint64_t q, unsigned n, unsigned m) {
    census::validate_prime_power(q);
    if (m < 1) fail(ErrorKind::InvalidArgument, "m must be >= 1");
    return psi_poly_row(q, std::min(m, std::max(n, 1u)), n)[n];
}

/// Second route to psi_q(n, m): coefficient extraction from the Euler product
/// prod_{d <= m} (1 - z^d)^{-pi_q(d)}.  Shares only pi_q(d) with psi_poly.
inline ExactCount psi_poly_product(std::uint64_t q, unsigned n, unsigned m) {
    if (m < 1) fail(ErrorKind::InvalidArgument, "m must be >= 1");
    const unsigned top = std::min(m, std::max(n, 1u));
    auto table = census::table_for(q, top);
    std::vector<ExactCount> series(n + 1);
    series[0] = 1;
    for (unsigned d = 1; d <= top; ++d) {
        const ExactCount& primes = table->count(d);
        std::vector<ExactCount> next(n + 1);
        // (1 - z^d)^{-N} = sum_k C(N+k-1, k) z^{dk}
        ExactCount multiset = 1;
        for (unsigned k = 0; d * k <= n; ++k) {
            if (k > 0) multiset = multiset * (primes + k - 1) / k;
            for (unsigned j = 0; j + d * k <= n; ++j) next[j + d * k] += multiset * series[j];
        }
        series = std::move(next);
    }
    return series[n];
}

// --------------------------------------------------------------------------
// Oracles

inline constexpr unsigned kPermOracleMaxN = 30;
inline constexpr std::uint64_t kPolyOracleBudget = 1'000'000;

/// Sum over partitions of n with parts <= m of n! / prod_k (k^{c_k} c_k!).
inline ExactCount psi_perm_oracle(unsigned n, unsigned m) {
    if (n > kPermOracleMaxN) fail(ErrorKind::BudgetExceeded, "partition oracle is limited to n <= 30");
    if (m < 1) fail(ErrorKind::InvalidArgument, "m must be >= 1");
    const ExactCount n_fact = factorial(n);
    ExactCount total = 0;
    std::vector<unsigned> multiplicity(n + 1, 0);
    // Parts are chosen in nonincreasing order so each partition is visited once.
    std::function<void(unsigned, unsigned)> visit = [&](unsigned remaining, unsigned max_part) {
        if (remaining == 0) {
            ExactCount denom = 1;
            for (unsigned k = 1; k <= n; ++k) {
                if (multiplicity[k] == 0) continue;
                denom *= ipow(k, multiplicity[k]) * factorial(multiplicity[k]);
            }
            total += n_fact / denom;
            return;
        }
        for (unsigned part = std::min(max_part, remaining); part >= 1; --part) {
            ++multiplicity[part];
            visit(remaining - part, part);
            --multiplicity[part];
        }
    };
    visit(n, m);
    return total;
}

namespace detail {

using Poly = std::vector<std::uint32_t>;  // coefficients mod p, lowest degree first, monic

inline unsigned degree(const Poly& f) { return static_cast<unsigned>(f.size() - 1); }

/// If g divides f, replaces f by f/g and returns true.  g must be monic.
inline bool divide_out(Poly& f, const Poly& g, std::uint32_t p) {
    const unsigned df = degree(f), dg = degree(g);
    if (dg > df) return false;
    Poly rem = f;
    Poly quot(df - dg + 1, 0);
    for (unsigned s = df - dg + 1; s-- > 0;) {
        const std::uint64_t c = rem[s + dg];
        quot[s] = static_cast<std::uint32_t>(c);
        if (c == 0) continue;
        for (unsigned i = 0; i <= dg; ++i)
            rem[s + i] = static_cast<std::uint32_t>((rem[s + i] + (p - c) * g[i]) % p);
    }
    for (unsigned i = 0; i < dg; ++i)
        if (rem[i] != 0) return false;
    f = std::move(quot);
    return true;
}

/// Calls visit(f) for every monic polynomial of degree d over F_p.
template <class Visit>
void for_each_monic(std::uint32_t p, unsigned d, Visit&& visit) {
    Poly f(d + 1, 0);
    f[d] = 1;
    while (true) {
        visit(f);
        unsigned i = 0;
        while (i < d && ++f[i] == p) f[i++] = 0;
        if (i == d) return;
    }
}

/// Monic irreducibles of degree <= max_degree, ordered by degree.
inline std::vector<Poly> enumerate_irreducibles(std::uint32_t p, unsigned max_degree) {
    std::vector<Poly> irreducible;
    for (unsigned d = 1; d <= max_degree; ++d) {
        for_each_monic(p, d, [&](const Poly& f) {
            for (const Poly& g : irreducible) {
                if (2 * degree(g) > d) break;
                Poly copy = f;
                if (divide_out(copy, g, p)) return;
            }
            irreducible.push_back(f);
        });
    }
    return irreducible;
}

} // namespace detail

/// histogram[L] = number of monic degree-n polynomials over F_p whose largest
/// irreducible factor has degree L, by enumeration and trial division.
inline std::vector<std::uint64_t> largest_factor_histogram(std::uint64_t q, unsigned n) {
    const auto field = census::validate_prime_power(q);
    if (field.k != 1) fail(ErrorKind::NonPrimeField, "enumeration oracle needs a prime field, got q=" + std::to_string(q));
    double size = 1;
    for (unsigned i = 0; i < n; ++i) size *= static_cast<double>(q);
    if (size > static_cast<double>(kPolyOracleBudget))
        fail(ErrorKind::BudgetExceeded, "q^n exceeds the enumeration budget of 1e6");
    const auto p = static_cast<std::uint32_t>(q);
    const auto irreducible = detail::enumerate_irreducibles(p, n / 2);
    std::vector<std::uint64_t> histogram(n + 1, 0);
    detail::for_each_monic(p, n, [&](const detail::Poly& f) {
        detail::Poly rest = f;
        unsigned largest = 0;
        for (const auto& g : irreducible) {
            if (2 * detail::degree(g) > detail::degree(rest)) break;
            while (detail::divide_out(rest, g, p)) largest = std::max(largest, detail::degree(g));
        }
        largest = std::max(largest, detail::degree(rest));
        ++histogram[largest];
    });
    return histogram;
}

inline ExactCount psi_poly_oracle(std::uint64_t q, unsigned n, unsigned m) {
    const auto histogram = largest_factor_histogram(q, n);
    ExactCount count = 0;
    for (unsigned l = 0; l <= std::min(m, n); ++l) count += histogram[l];
    return count;
}

// --------------------------------------------------------------------------
// Tables over all m

/// psi(k, m) for 0 <= k <= n_max and every 1 <= m <= n_max, built bottom-up.
class FriableTable {
public:
    static FriableTable permutations(unsigned n_max) {
        FriableTable t(Kind::Perm, 0, n_max);
        parallel_for(n_max, [&](std::size_t i) { t.rows_[i] = psi_perm_row(static_cast<unsigned>(i + 1), n_max); });
        return t;
    }

    static FriableTable polynomials(std::uint64_t q, unsigned n_max) {
        census::validate_prime_power(q);
        census::table_for(q, std::max(1u, n_max));
        FriableTable t(Kind::Poly, q, n_max);
        parallel_for(n_max, [&](std::size_t i) { t.rows_[i] = psi_poly_row(q, static_cast<unsigned>(i + 1), n_max); });
        return t;
    }

    Kind kind() const noexcept { return kind_; }
    std::uint64_t q() const noexcept { return q_; }
    unsigned n_max() const noexcept { return n_max_; }

    const ExactCount& psi(unsigned n, unsigned m) const {
        if (n > n_max_ || m < 1) fail(ErrorKind::OutOfTabulatedRange, "psi outside table");
        if (n == 0) return one_;
        return rows_[std::min(m, n) - 1][n];
    }

    /// n! or q^n.
    ExactCount total(unsigned n) const { return kind_ == Kind::Perm ? factorial(n) : ipow(q_, n); }

    ExactProb prob(unsigned n, unsigned m) const { return ExactProb(psi(n, m), total(n)); }

private:
    FriableTable(Kind kind, std::uint64_t q, unsigned n_max) : kind_(kind), q_(q), n_max_(n_max), rows_(n_max) {}

    Kind kind_;
    std::uint64_t q_;
    unsigned n_max_;
    std::vector<std::vector<ExactCount>> rows_;
    ExactCount one_ = 1;
};

// --------------------------------------------------------------------------
// Probabilities and expectations

struct FriableProfile {
    Kind kind;
    Params params;
    ExactCount psi;
    ExactCount total;
    ExactProb prob;
};

inline FriableProfile friable_prob(Kind kind, const Params& params) {
    const unsigned n = params.n(), m = params.m();
    ExactCount psi = kind == Kind::Perm ? psi_perm(n, m) : psi_poly(params.q(), n, m);
    ExactCount total = kind == Kind::Perm ? factorial(n) : ipow(params.q(), n);
    ensure(psi <= total, "friable count exceeds total");
    ExactProb prob(psi, total);
    return {kind, params, std::move(psi), std::move(total), std::move(prob)};
}

/// E L = n - sum_{i=1}^{n-1} P(L <= i), with denominator n! or q^n.
inline ExactProb expected_largest(const FriableTable& table, unsigned n) {
    if (n < 1) fail(ErrorKind::InvalidArgument, "n must be >= 1");
    const ExactCount total = table.total(n);
    ExactCount num = total * n;
    for (unsigned i = 1; i < n; ++i) num -= table.psi(n, i);
    return ExactProb(std::move(num), total);
}

inline ExactProb expected_largest(Kind kind, unsigned n, std::uint64_t q = 2) {
    if (n < 1) fail(ErrorKind::InvalidArgument, "n must be >= 1");
    const auto table = kind == Kind::Perm ? FriableTable::permutations(n) : FriableTable::polynomials(q, n);
    return expected_largest(table, n);
}

/// gap(n, q) = sum_{m=1}^{n} (P(f_n m-friable) - P(pi_n m-friable))
///           = E L(pi_n) - E L_q(f_n) >= 0, over the denominator n! q^n.
inline ExactProb expectation_gap(const FriableTable& perm, const FriableTable& poly, unsigned n) {
    const ExactCount n_fact = factorial(n);
    const ExactCount q_pow = ipow(poly.q(), n);
    ExactCount num = 0;
    for (unsigned m = 1; m <= n; ++m) num += poly.psi(n, m) * n_fact - perm.psi(n, m) * q_pow;
    return ExactProb(std::move(num), n_fact * q_pow);
}

inline ExactProb expectation_gap(unsigned n, std::uint64_t q) {
    if (n < 1) fail(ErrorKind::InvalidArgument, "n must be >= 1");
    return expectation_gap(FriableTable::permutations(n), FriableTable::polynomials(q, n), n);
}

// --------------------------------------------------------------------------
// Float mode


/// P(pi_k is m-friable) for k = 0..n_max in double precision.
inline std::vector<double> perm_prob_float_row(unsigned m, unsigned n_max) {
    std::vector<double> prob(n_max + 1);
    prob[0] = 1.0;
    for (unsigned k = 1; k <= n_max; ++k) {
        numeric::CompensatedSum<> window;
        for (unsigned i = 1; i <= std::min(m, k); ++i) window.add(prob[k - i]);
        prob[k] = window.value() / k;
    }
    return prob;
}

/// P(f_k is m-friable) for k = 0..n_max in double precision, from
/// k P(k) = sum_j a_j P(k-j) with a_j = W(j)/q^j.
inline std::vector<double> poly_prob_float_row(std::uint64_t q, unsigned m, unsigned n_max) {
    auto table = census::table_for(q, std::max(1u, std::min(m, n_max)));
    std::vector<double> a(n_max + 1, 0.0);
    for (unsigned j = 1; j <= n_max; ++j) {
        // each d pi_q(d) q^{-d} is O(1); the remaining factor q^{d-j} is a plain power
        numeric::CompensatedSum<> s;
        for (unsigned d : census::divisors(j)) {
            if (d > m) break;
            const double scaled = friable::detail::ratio_to_double(table->count(d) * d, ipow(q, d));
            s.add(scaled * std::pow(static_cast<double>(q), static_cast<double>(d) - j));
        }
        a[j] = s.value();
    }
    std::vector<double> prob(n_max + 1);
    prob[0] = 1.0;
    for (unsigned k = 1; k <= n_max; ++k) {
        numeric::CompensatedSum<> s;
        for (unsigned j = 1; j <= k; ++j) s.add(a[j] * prob[k - j]);
        prob[k] = s.value() / k;
    }
    return prob;
}

/// E L(pi_n) in double precision (n up to a few thousand).
inline double expected_longest_cycle_float(unsigned n) {
    if (n < 1) fail(ErrorKind::InvalidArgument, "n must be >= 1");
    std::vector<double> tail(n, 0.0);
    parallel_for(n - 1, [&](std::size_t i) {
        const unsigned m = static_cast<unsigned>(i + 1);
        tail[m] = 1.0 - perm_prob_float_row(m, n)[n];
    });
    numeric::CompensatedSum<> s;
    s.add(1.0);
    for (unsigned m = 1; m < n; ++m) s.add(tail[m]);
    return s.value();
}

} // namespace friable::counts

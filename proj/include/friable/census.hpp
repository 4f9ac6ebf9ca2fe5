#pragma once

// Monic irreducible polynomials over F_q: counts per degree and the
// weighted divisor sums that feed the coefficients a_i of log G_q.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "friable/error.hpp"
#include "friable/exact.hpp"

namespace friable::census {

/// q = p^k with p prime.
struct PrimePower {
    std::uint64_t q = 0;
    std::uint64_t p = 0;
    unsigned k = 0;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Trial factorisation up to sqrt(q).
inline PrimePower validate_prime_power(std::uint64_t q) {
    if (q < 2) fail(ErrorKind::NotAPrimePower, std::to_string(q) + " is below 2");
    std::uint64_t p = q;
    for (std::uint64_t d = 2; d * d <= q; ++d) {
        if (q % d == 0) {
            p = d;
            break;
        }
    }
    std::uint64_t rest = q;
    unsigned k = 0;
    while (rest % p == 0) {
        rest /= p;
        ++k;
    }
    if (rest != 1) fail(ErrorKind::NotAPrimePower, std::to_string(q) + " has two distinct prime factors");
    return {q, p, k};
}

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

/// Validated (q, n, m) with 1 <= m <= n.
class Params {
public:
    Params(std::uint64_t q, unsigned n, unsigned m) : field_(validate_prime_power(q)), n_(n), m_(m) {
        if (n < 1) fail(ErrorKind::InvalidArgument, "n must be >= 1");
        if (m < 1 || m > n) fail(ErrorKind::InvalidArgument, "m must lie in [1, n]");
    }

    std::uint64_t q() const noexcept { return field_.q; }
    const PrimePower& field() const noexcept { return field_; }
    unsigned n() const noexcept { return n_; }
    unsigned m() const noexcept { return m_; }
    double u() const noexcept { return static_cast<double>(n_) / m_; }

    friend bool operator==(const Params&, const Params&) = default;

private:
    PrimePower field_;
    unsigned n_;
    unsigned m_;
};

inline int mobius(std::uint64_t n) {
    if (n < 1) fail(ErrorKind::InvalidArgument, "mobius requires n >= 1");
    int result = 1;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        n /= p;
        if (n % p == 0) return 0;
        result = -result;
    }
    if (n > 1) result = -result;
    return result;
}

inline std::vector<unsigned> divisors(unsigned n) {
    std::vector<unsigned> small, large;
    for (unsigned d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        small.push_back(d);
        if (d != n / d) large.push_back(n / d);
    }
    small.insert(small.end(), large.rbegin(), large.rend());
    return small;
}

/// pi_q(d) = (1/d) sum_{e | d} mu(e) q^{d/e}.
inline ExactCount count_irreducibles(std::uint64_t q, unsigned d) {
    validate_prime_power(q);
    if (d < 1) fail(ErrorKind::InvalidArgument, "degree must be >= 1");
    ExactCount sum = 0;
    for (unsigned e : divisors(d)) {
        const int mu = mobius(e);
        if (mu == 0) continue;
        ExactCount term = ipow(q, d / e);
        if (mu > 0) sum += term;
        else sum -= term;
    }
    ensure(sum % d == 0, "Moebius inversion did not divide exactly by d");
    return sum / d;
}

/// pi_q(d) for 1 <= d <= max_degree; immutable once built.
class IrreducibleTable {
public:
    IrreducibleTable(std::uint64_t q, unsigned max_degree) : q_(q), counts_(max_degree + 1) {
        validate_prime_power(q);
        for (unsigned d = 1; d <= max_degree; ++d) counts_[d] = count_irreducibles(q, d);
    }

    std::uint64_t q() const noexcept { return q_; }
    unsigned max_degree() const noexcept { return static_cast<unsigned>(counts_.size() - 1); }

    const ExactCount& count(unsigned d) const {
        if (d < 1 || d > max_degree())
            fail(ErrorKind::OutOfTabulatedRange, "degree " + std::to_string(d) + " not tabulated");
        return counts_[d];
    }

    /// sum_{d | i, d <= m} d pi_q(d); needs min(m, i) <= max_degree.
    ExactCount weighted_divisor_sum(unsigned m, unsigned i) const {
        ExactCount s = 0;
        for (unsigned d : divisors(i)) {
            if (d > m) break;
            s += count(d) * d;
        }
        return s;
    }

private:
    std::uint64_t q_;
    std::vector<ExactCount> counts_;
};

/// Shared table for q covering at least max_degree.  Tables are built under a
/// lock and then only read, so concurrent callers may share the result.
inline std::shared_ptr<const IrreducibleTable> table_for(std::uint64_t q, unsigned max_degree) {
    static std::mutex mutex;
    static std::map<std::uint64_t, std::shared_ptr<const IrreducibleTable>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[q];
    if (!slot || slot->max_degree() < max_degree)
        slot = std::make_shared<const IrreducibleTable>(q, max_degree);
    return slot;
}

/// Numerator of a_i = q^{-i} sum_{d | i, d <= m} d pi_q(d).
inline ExactCount weighted_divisor_sum(std::uint64_t q, unsigned m, unsigned i) {
    if (i < 1 || m < 1) fail(ErrorKind::InvalidArgument, "weighted_divisor_sum requires i, m >= 1");
    return table_for(q, std::min(m, i))->weighted_divisor_sum(m, i);
}

/// a_i as an exact rational with denominator q^i.
inline ExactProb coefficient_a(std::uint64_t q, unsigned m, unsigned i) {
    return ExactProb(weighted_divisor_sum(q, m, i), ipow(q, i));
}

} // namespace friable::census

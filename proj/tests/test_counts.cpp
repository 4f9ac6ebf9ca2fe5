#include <gtest/gtest.h>

#include <cmath>

#include "friable/counts.hpp"

using namespace friable;
using namespace friable::counts;
using census::Params;

namespace {

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no friable::Error thrown";
    return ErrorKind::InternalAssertion;
}

} // namespace

// Values fixed by brute-force enumeration (tests/oracles/derive_values.py).
TEST(Counts, FrozenPermutationValues) {
    EXPECT_EQ(psi_perm(3, 2), 4);
    EXPECT_EQ(psi_perm(4, 2), 10);
    EXPECT_EQ(psi_perm(6, 3), 276);
    EXPECT_EQ(psi_perm(5, 5), 120);
    EXPECT_EQ(psi_perm(5, 1), 1);
    EXPECT_EQ(psi_perm(20, 5), ExactCount("22750446292531200"));
    const auto table = FriableTable::permutations(100);
    EXPECT_NEAR(table.prob(100, 10).to_double(), 1.2704831101224763e-10, 1e-24);
}

TEST(Counts, FrozenPolynomialValues) {
    EXPECT_EQ(psi_poly(2, 2, 1), 3);
    EXPECT_EQ(psi_poly(2, 4, 1), 5);
    EXPECT_EQ(psi_poly(3, 4, 2), 39);
    EXPECT_EQ(psi_poly(3, 4, 1), 15);
    EXPECT_EQ(psi_poly(3, 2, 2), 9);
    EXPECT_EQ(psi_poly(9, 20, 6), ExactCount("422302654595419047"));
}

TEST(Counts, ExpectedLargest) {
    EXPECT_EQ(expected_largest(Kind::Perm, 2), ExactProb(3, 2));
    EXPECT_EQ(expected_largest(Kind::Poly, 2, 2), ExactProb(5, 4));
    EXPECT_EQ(expected_largest(Kind::Perm, 1), ExactProb(1, 1));
    EXPECT_EQ(expectation_gap(2, 2), ExactProb(1, 4));
    EXPECT_EQ(expectation_gap(4, 3), ExactProb(17, 72));
    EXPECT_EQ(expectation_gap(5, 2), ExactProb(17, 40));
}

TEST(Counts, PermMatchesPartitionOracle) {
    const auto table = FriableTable::permutations(14);
    for (unsigned n = 1; n <= 14; ++n)
        for (unsigned m = 1; m <= n; ++m) EXPECT_EQ(table.psi(n, m), psi_perm_oracle(n, m)) << n << "," << m;
}

TEST(Counts, PolyMatchesEnumeration) {
    for (auto [q, n_max] : std::initializer_list<std::pair<unsigned, unsigned>>{{2, 9}, {3, 6}, {5, 4}, {7, 3}}) {
        const auto table = FriableTable::polynomials(q, n_max);
        for (unsigned n = 1; n <= n_max; ++n)
            for (unsigned m = 1; m <= n; ++m)
                EXPECT_EQ(table.psi(n, m), psi_poly_oracle(q, n, m)) << q << "," << n << "," << m;
    }
}

// Two independent exact routes: the W-recurrence and the Euler product.
TEST(Counts, RecurrenceMatchesProduct) {
    for (std::uint64_t q : {2, 4, 9, 25}) {
        const auto table = FriableTable::polynomials(q, 18);
        for (unsigned n = 1; n <= 18; ++n)
            for (unsigned m = 1; m <= n; ++m) EXPECT_EQ(table.psi(n, m), psi_poly_product(q, n, m)) << q << "," << n << "," << m;
    }
}

// Properties: psi(n, n) is the total, psi is monotone in m, psi_q(n, 1) = C(q+n-1, n).
TEST(Counts, StructuralProperties) {
    for (std::uint64_t q : {2, 3, 8}) {
        const auto table = FriableTable::polynomials(q, 20);
        for (unsigned n = 1; n <= 20; ++n) {
            EXPECT_EQ(table.psi(n, n), ipow(q, n));
            EXPECT_EQ(table.psi(n, 1), binomial(ExactCount(q + n - 1), n));
            for (unsigned m = 2; m <= n; ++m) EXPECT_LE(table.psi(n, m - 1), table.psi(n, m));
            // beyond n the count does not change
            EXPECT_EQ(table.psi(n, 20), table.psi(n, n));
        }
    }
    const auto perm = FriableTable::permutations(20);
    for (unsigned n = 1; n <= 20; ++n) EXPECT_EQ(perm.psi(n, n), factorial(n));
}

TEST(Counts, FloatRowsTrackExact) {
    const auto perm = FriableTable::permutations(60);
    const auto poly = FriableTable::polynomials(3, 60);
    for (unsigned m : {1u, 2u, 5u, 17u, 60u}) {
        const auto pr = perm_prob_float_row(m, 60);
        const auto qr = poly_prob_float_row(3, m, 60);
        for (unsigned n = 1; n <= 60; ++n) {
            const double pe = perm.prob(n, m).to_double();
            const double qe = poly.prob(n, m).to_double();
            EXPECT_NEAR(pr[n], pe, 1e-12 * pe) << "perm " << n << "," << m;
            EXPECT_NEAR(qr[n], qe, 1e-12 * qe) << "poly " << n << "," << m;
        }
    }
    EXPECT_NEAR(expected_longest_cycle_float(50), expected_largest(perm, 50).to_double(), 1e-11);
}

TEST(Counts, FriableProfile) {
    const auto prof = friable_prob(Kind::Poly, Params(3, 4, 2));
    EXPECT_EQ(prof.psi, 39);
    EXPECT_EQ(prof.total, 81);
    EXPECT_EQ(prof.prob.reduced().to_string(), "13/27");
}

TEST(Counts, OracleErrors) {
    EXPECT_EQ(kind_of([] { psi_poly_oracle(4, 3, 2); }), ErrorKind::NonPrimeField);
    EXPECT_EQ(kind_of([] { psi_poly_oracle(2, 30, 2); }), ErrorKind::BudgetExceeded);
    EXPECT_EQ(kind_of([] { psi_perm_oracle(31, 2); }), ErrorKind::BudgetExceeded);
    EXPECT_EQ(kind_of([] { FriableTable::polynomials(6, 4); }), ErrorKind::NotAPrimePower);
    const auto t = FriableTable::permutations(5);
    EXPECT_EQ(kind_of([&] { t.psi(6, 2); }), ErrorKind::OutOfTabulatedRange);
}

TEST(Counts, Histogram) {
    // monic quadratics over F_3: 3 irreducible, 6 split
    const auto h = largest_factor_histogram(3, 2);
    EXPECT_EQ(h[1], 6u);
    EXPECT_EQ(h[2], 3u);
}

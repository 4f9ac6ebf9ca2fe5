#include <gtest/gtest.h>

#include <future>
#include <vector>

#include "friable/census.hpp"
#include "friable/counts.hpp"

using namespace friable;
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

TEST(PrimePower, AcceptsPrimePowers) {
    EXPECT_EQ(census::validate_prime_power(2), (census::PrimePower{2, 2, 1}));
    EXPECT_EQ(census::validate_prime_power(9), (census::PrimePower{9, 3, 2}));
    EXPECT_EQ(census::validate_prime_power(64), (census::PrimePower{64, 2, 6}));
    EXPECT_EQ(census::validate_prime_power(49), (census::PrimePower{49, 7, 2}));
    EXPECT_EQ(census::validate_prime_power(101), (census::PrimePower{101, 101, 1}));
}

TEST(PrimePower, RejectsOthers) {
    for (std::uint64_t q : {0, 1, 6, 10, 12, 36, 100})
        EXPECT_EQ(kind_of([&] { census::validate_prime_power(q); }), ErrorKind::NotAPrimePower) << q;
}

TEST(Params, RangeChecks) {
    EXPECT_EQ(kind_of([] { Params(2, 5, 0); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { Params(2, 5, 6); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { Params(6, 5, 2); }), ErrorKind::NotAPrimePower);
    const Params p(4, 10, 4);
    EXPECT_DOUBLE_EQ(p.u(), 2.5);
    EXPECT_EQ(p.field().p, 2u);
}

TEST(Mobius, SmallValues) {
    const int expected[] = {1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0};
    for (unsigned n = 1; n <= 12; ++n) EXPECT_EQ(census::mobius(n), expected[n - 1]) << n;
    EXPECT_EQ(census::divisors(12), (std::vector<unsigned>{1, 2, 3, 4, 6, 12}));
    EXPECT_EQ(census::divisors(1), (std::vector<unsigned>{1}));
}

TEST(Census, KnownCounts) {
    EXPECT_EQ(census::count_irreducibles(2, 2), 1);
    EXPECT_EQ(census::count_irreducibles(3, 2), 3);
    EXPECT_EQ(census::count_irreducibles(2, 1), 2);
    EXPECT_EQ(census::count_irreducibles(2, 4), 3);
    EXPECT_EQ(census::count_irreducibles(2, 10), 99);
    EXPECT_EQ(census::count_irreducibles(4, 3), 20);
}

// Gauss: sum_{d | n} d pi_q(d) = q^n.
TEST(Census, GaussIdentity) {
    for (std::uint64_t q : {2, 3, 4, 5, 8, 9}) {
        const auto table = census::table_for(q, 30);
        for (unsigned n = 1; n <= 30; ++n) {
            ExactCount s = 0;
            for (unsigned d : census::divisors(n)) s += table->count(d) * d;
            EXPECT_EQ(s, ipow(q, n)) << "q=" << q << " n=" << n;
        }
    }
}

TEST(Census, MatchesEnumeration) {
    for (std::uint32_t p : {2u, 3u, 5u}) {
        const unsigned d_max = p == 2 ? 8 : (p == 3 ? 5 : 3);
        const auto irr = counts::detail::enumerate_irreducibles(p, d_max);
        std::vector<unsigned> by_degree(d_max + 1, 0);
        for (const auto& f : irr) ++by_degree[counts::detail::degree(f)];
        for (unsigned d = 1; d <= d_max; ++d) EXPECT_EQ(census::count_irreducibles(p, d), by_degree[d]) << p << "," << d;
    }
}

TEST(Census, PPTShape) {
    // |pi_q(n) - q^n/n| <= 2 q^{n/2}/n
    for (std::uint64_t q : {2, 3, 5}) {
        for (unsigned n = 1; n <= 25; ++n) {
            const double pi = static_cast<double>(census::count_irreducibles(q, n));
            const double main = std::pow(static_cast<double>(q), n) / n;
            EXPECT_LE(std::abs(pi - main), 2.0 * std::pow(static_cast<double>(q), n / 2.0) / n) << q << "," << n;
        }
    }
}

TEST(Census, CoefficientA) {
    // a_i = q^{-i} sum_{d | i, d <= m} d pi_q(d); q=2, m=2: 2/8 and (2 + 2)/16
    EXPECT_EQ(census::coefficient_a(2, 2, 3), ExactProb(1, 4));
    EXPECT_EQ(census::coefficient_a(2, 2, 4), ExactProb(1, 4));
    EXPECT_EQ(census::weighted_divisor_sum(2, 2, 4), 4);
    EXPECT_EQ(census::weighted_divisor_sum(2, 2, 5), 2);
    // m >= i recovers Gauss: a_i = 1
    EXPECT_EQ(census::coefficient_a(3, 6, 6), ExactProb(1, 1));
}

TEST(Census, TableSharedAcrossThreads) {
    std::vector<std::future<ExactCount>> jobs;
    for (int i = 0; i < 8; ++i)
        jobs.push_back(std::async(std::launch::async, [] { return census::table_for(3, 40)->count(40); }));
    const ExactCount first = jobs.front().get();
    for (std::size_t i = 1; i < jobs.size(); ++i) EXPECT_EQ(jobs[i].get(), first);
    EXPECT_EQ(first, census::count_irreducibles(3, 40));
}

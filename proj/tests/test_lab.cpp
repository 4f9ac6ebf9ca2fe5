#include <gtest/gtest.h>

#include <cstdlib>

#include "friable/lab.hpp"

using namespace friable;
using namespace friable::lab;
using census::Params;

namespace {

const DeltaData& find(const std::vector<DeltaData>& data, unsigned n, unsigned m) {
    for (const auto& d : data)
        if (d.n == n && d.m == m) return d;
    throw std::runtime_error("missing delta entry");
}

std::string failing_checks(const SuiteReport& r) {
    std::string out;
    for (const auto& c : r.checks)
        if (!c.passed) out += c.name + " [" + c.detail + "]; ";
    return out;
}

} // namespace

TEST(Delta, FrozenValueAndSplit) {
    const auto data = delta_table(12);
    EXPECT_NEAR(find(data, 3, 2).delta, 0.12132471240721404, 1e-14);
    // m = 1 only one lag enters, so S2 = Delta(n-1, 1)/(n rho ratio) and S1 carries the rest
    for (unsigned n = 1; n <= 12; ++n) {
        const auto& e = find(data, n, n);
        EXPECT_EQ(e.delta, 0.0);
        EXPECT_EQ(e.s1, 0.0);
    }
    for (const auto& d : data) {
        EXPECT_NEAR(d.delta, d.s1 + d.s2, 1e-10 * std::max(1.0, std::abs(d.delta))) << d.n << "," << d.m;
        if (d.n > d.m) EXPECT_NEAR(d.s1, d.s1_integral, 1e-8 * std::max(1.0, d.s1)) << d.n << "," << d.m;
    }
}

TEST(Delta, DelayIntegral) {
    for (double u : {1.5, 2.0, 4.25}) EXPECT_NEAR(delay_integral(u), u * dickman::rho_value(u), 1e-13 * u) << u;
    EXPECT_NEAR(shape_F(1e-6), 0.5, 1e-6);
    EXPECT_NEAR(shape_F(2.0), 1.0 / (1.0 - std::exp(-2.0)) - 0.5, 1e-15);
}

TEST(Positivity, NormalizedPoint) {
    const auto perm = perm_table(4);
    const auto poly = poly_table(3, 4);
    const ExactProb diff = prob_difference(*perm, *poly, 4, 2);
    const ExactProb scaled(diff.num * 2 * ipow(3, half_ceil(2)), diff.den);
    EXPECT_EQ(scaled, ExactProb(7, 6));
    EXPECT_EQ(half_ceil(1), 1u);
    EXPECT_EQ(half_ceil(2), 2u);
    EXPECT_EQ(half_ceil(3), 2u);
}

TEST(Ratio, FrozenPoint) {
    const auto perm = perm_table(30);
    const auto poly = poly_table(2, 30);
    const auto pt = ratio_point(*perm, *poly, Params(2, 30, 15));
    EXPECT_NEAR(pt.excess, 0.0014204810900164632, 1e-17);
    ASSERT_TRUE(pt.normalized.has_value());
    EXPECT_LT(*pt.normalized, 1.0);
    const auto end = ratio_point(*perm, *poly, Params(2, 30, 30));
    EXPECT_EQ(end.ratio, 1.0);
}

TEST(Identity, HoldsExactly) {
    unsigned failures = 99;
    EXPECT_TRUE(hildebrand_identity_holds(4, 20, &failures));
    EXPECT_EQ(failures, 0u);
    EXPECT_TRUE(hildebrand_identity_holds(7, 12));
}

TEST(Golomb, Estimates) {
    EXPECT_EQ(golomb_dickman_estimate(2, Mode::Exact), 0.75);
    EXPECT_EQ(golomb_dickman_estimate(1, Mode::Float), 1.0);
    const double e = golomb_dickman_estimate(100, Mode::Exact);
    EXPECT_NEAR(golomb_dickman_estimate(100, Mode::Float), e, 1e-12 * e);
    EXPECT_NEAR(golomb_dickman_estimate(400), kGolombDickman, 0.01);
    EXPECT_THROW(golomb_dickman_estimate(kGolombExactMax + 1, Mode::Exact), Error);
    EXPECT_THROW(golomb_dickman_estimate(kGolombFloatMax + 1, Mode::Float), Error);
}

TEST(Dickman, Residuals) {
    EXPECT_LT(rho_and_i_residual(20.0), rho_and_i_residual(5.0));
    EXPECT_LE(rho_and_i_residual(20.0), 0.1);
    EXPECT_LT(hildebrand_ratio_residual(40.0), hildebrand_ratio_residual(10.0));
}

TEST(Saddle, ErrorTrendAtMTen) {
    double prev = INFINITY;
    for (unsigned u : {3u, 5u, 8u, 10u}) {
        const double e = saddle_relative_error(10 * u, 10);
        EXPECT_LT(e, prev) << u;
        prev = e;
    }
}

class SuiteTest : public ::testing::TestWithParam<std::string> {};

TEST_P(SuiteTest, PassesOnDefaultGrid) {
    const auto r = run_suite(GetParam());
    EXPECT_EQ(r.suite_id, GetParam());
    EXPECT_TRUE(r.passed) << failing_checks(r);
    EXPECT_FALSE(r.exact_failure());
    EXPECT_FALSE(r.checks.empty());
}

INSTANTIATE_TEST_SUITE_P(All, SuiteTest, ::testing::ValuesIn(suite_names()));

TEST(Suites, ReportedBands) {
    const auto pos = suite_positivity();
    const auto sup = pos.find_metric("normalized_sup");
    ASSERT_TRUE(sup.has_value());
    EXPECT_GT(*sup, 0.1);
    EXPECT_LT(*sup, 100.0);

    const auto gap = suite_gap();
    EXPECT_GT(*gap.find_metric("band_c"), 0.0);
    EXPECT_LT(*gap.find_metric("band_c"), *gap.find_metric("band_C"));

    const auto delta = suite_delta();
    EXPECT_GT(*delta.find_metric("inf_delta_lower"), 0.0);
    EXPECT_LE(*delta.find_metric("split_residual"), 1e-8);
}

TEST(Suites, UnknownName) { EXPECT_THROW(run_suite("nope"), Error); }

TEST(Suites, SingleThreadMatchesParallel) {
    LabConfig cfg;
    cfg.n_max = 18;
    const auto parallel = suite_positivity(cfg);
    ::setenv("FRIABLE_LAB_THREADS", "1", 1);
    const auto serial = suite_positivity(cfg);
    ::unsetenv("FRIABLE_LAB_THREADS");
    ASSERT_EQ(parallel.metrics.size(), serial.metrics.size());
    for (std::size_t i = 0; i < serial.metrics.size(); ++i) EXPECT_EQ(parallel.metrics[i].value, serial.metrics[i].value);
    ASSERT_TRUE(parallel.worst_case && serial.worst_case);
    EXPECT_EQ(parallel.worst_case->params, serial.worst_case->params);
}

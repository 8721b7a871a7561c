#include "dsde/error.hpp"
#include "dsde/examples.hpp"
#include "dsde/mc_harness.hpp"
#include "dsde/philox.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using dsde::HarnessConfig;
using dsde::Method;
using dsde::Philox4x32;
using dsde::PiecewiseFn;
using dsde::SdeProblem;

TEST(Philox, KnownAnswerVectors) {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    EXPECT_EQ(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
              (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
              (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
    static_assert(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0})[0] == 0x6627e8d5);
}

TEST(Philox, OpenUnitInterval) {
    EXPECT_GT(dsde::to_open_unit(0, 0), 0.0);
    EXPECT_LT(dsde::to_open_unit(0xffffffff, 0xffffffff), 1.0);
    EXPECT_EQ(dsde::to_open_unit(0x80000000, 0), 0.5 + 0x1.0p-53);
}

TEST(NormalQuantile, KnownValues) {
    EXPECT_NEAR(dsde::normal_quantile(0.5), 0.0, 1e-15);
    EXPECT_NEAR(dsde::normal_quantile(0.975), 1.959963984540054, 1e-12);
    EXPECT_NEAR(dsde::normal_quantile(0.025), -1.959963984540054, 1e-12);
    EXPECT_NEAR(dsde::normal_quantile(0.8413447460685429), 1.0, 1e-12);
    EXPECT_TRUE(std::isfinite(dsde::normal_quantile(0x1.0p-54)));
}

TEST(StandardNormal, PureFunctionOfCoordinates) {
    const double a = dsde::standard_normal(42, 17, 5);
    EXPECT_EQ(a, dsde::standard_normal(42, 17, 5));
    EXPECT_NE(a, dsde::standard_normal(43, 17, 5));
    EXPECT_NE(a, dsde::standard_normal(42, 18, 5));
    EXPECT_NE(a, dsde::standard_normal(42, 17, 4));
}

TEST(StandardNormal, Moments) {
    const std::size_t n = 100000;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = dsde::standard_normal(7, i / 100, i % 100);
    const double mean = dsde::pairwise_sum(x) / n;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (x[i] - mean) * (x[i] - mean);
    const double var = dsde::pairwise_sum(sq) / (n - 1);
    EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(double(n)));
    EXPECT_NEAR(var, 1.0, 0.03);
}

TEST(BrownianLattice, CoarseIncrementsArePairSums) {
    const dsde::BrownianLattice lat(42, 3, 8, 2.0);
    EXPECT_EQ(lat.max_level(), 8);
    EXPECT_EQ(lat.horizon(), 2.0);
    for (int k = 0; k < 8; ++k) {
        const auto coarse = lat.increments(k);
        const auto fine = lat.increments(k + 1);
        ASSERT_EQ(coarse.size(), std::size_t{1} << k);
        ASSERT_EQ(fine.size(), 2 * coarse.size());
        EXPECT_EQ(lat.step_size(k), 2.0 / double(std::size_t{1} << k));
        for (std::size_t i = 0; i < coarse.size(); ++i) EXPECT_EQ(coarse[i], fine[2 * i] + fine[2 * i + 1]);
    }
}

TEST(BrownianLattice, FinestLevelVariance) {
    const int level = 10;
    std::vector<double> sq;
    for (std::uint64_t path = 0; path < 100; ++path) {
        const dsde::BrownianLattice lat(11, path, level, 1.0);
        for (double dw : lat.increments(level)) sq.push_back(dw * dw);
    }
    const double var = dsde::pairwise_sum(sq) / double(sq.size());
    EXPECT_NEAR(var / std::ldexp(1.0, -level), 1.0, 0.03);
}

TEST(PairwiseSum, Values) {
    EXPECT_EQ(dsde::pairwise_sum({}), 0.0);
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0};
    EXPECT_EQ(dsde::pairwise_sum(v), 15.0);
    std::vector<double> many(1000001, 0.1);
    EXPECT_NEAR(dsde::pairwise_sum(many), 100000.1, 1e-8);
}

TEST(FitOrder, ExactPowerLaw) {
    for (double p : {0.5, 0.75, 1.0}) {
        std::vector<std::pair<double, double>> pts;
        for (int k = 5; k <= 10; ++k) {
            const double delta = std::ldexp(1.0, -k);
            pts.emplace_back(delta, 3.0 * std::pow(delta, p));
        }
        const auto fit = dsde::fit_order(pts);
        EXPECT_NEAR(fit.order, p, 1e-12);
        EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-12);
        EXPECT_EQ(fit.points_used, 6u);
        EXPECT_TRUE(fit.warnings.empty());
    }
}

TEST(FitOrder, NoisyPowerLaw) {
    std::mt19937_64 rng(20150101);
    std::uniform_real_distribution<double> noise(0.95, 1.05);
    std::vector<std::pair<double, double>> pts;
    for (int k = 3; k <= 14; ++k) {
        const double delta = std::ldexp(1.0, -k);
        pts.emplace_back(delta, std::pow(delta, 0.5) * noise(rng));
    }
    EXPECT_NEAR(dsde::fit_order(pts).order, 0.5, 0.02);
}

TEST(FitOrder, ZerosExcludedAndTooFewPoints) {
    const std::vector<std::pair<double, double>> pts{{0.5, 0.5}, {0.25, 0.0}, {0.125, 0.125}};
    const auto fit = dsde::fit_order(pts);
    EXPECT_EQ(fit.points_used, 2u);
    EXPECT_NEAR(fit.order, 1.0, 1e-12);
    EXPECT_FALSE(fit.warnings.empty());

    const std::vector<std::pair<double, double>> one{{0.5, 0.1}, {0.25, 0.0}};
    EXPECT_THROW(dsde::fit_order(one), dsde::ValidationError);
    EXPECT_THROW(dsde::fit_order({}), dsde::ValidationError);
}

TEST(Harness, DeterministicProblemHasOrderOne) {
    SdeProblem p{PiecewiseFn::parse({}, {"-x"}), PiecewiseFn::constant(0.0), 1.0, 1.0, 1e-6};
    HarnessConfig c;
    c.method = Method::Em;
    c.paths = 4;
    const auto r = dsde::consecutive_l2_errors(p, c);
    EXPECT_GE(r.fitted_order, 0.9);
    EXPECT_LE(r.fitted_order, 1.1);
    ASSERT_EQ(r.levels.size(), 6u);
    EXPECT_EQ(r.levels.front().level, 5);
    EXPECT_EQ(r.levels.back().level, 10);
    for (const auto& l : r.levels) EXPECT_EQ(l.delta, std::ldexp(1.0, -l.level));
}

TEST(Harness, LipschitzProblemErrorsDecrease) {
    SdeProblem p{PiecewiseFn::parse({}, {"-x"}), PiecewiseFn::parse({}, {"1+0.5*sin(x)"}), 0.5, 1.0, 1e-6};
    HarnessConfig c;
    c.method = Method::Em;
    c.paths = 512;
    const auto r = dsde::consecutive_l2_errors(p, c);
    for (std::size_t i = 1; i < r.levels.size(); ++i) {
        EXPECT_LT(r.levels[i].l2_error, r.levels[i - 1].l2_error);
    }
    // Multiplicative noise: strong order 1/2.
    EXPECT_GT(r.fitted_order, 0.4);
}

TEST(Harness, ReproducibleAndThreadIndependent) {
    const auto p = dsde::load_example("ex2").problem;
    HarnessConfig c;
    c.paths = 200;
    c.max_level = 8;
    c.threads = 1;
    const auto a = dsde::consecutive_l2_errors(p, c);
    c.threads = 4;
    const auto b = dsde::consecutive_l2_errors(p, c);
    ASSERT_EQ(a.levels.size(), b.levels.size());
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
        EXPECT_EQ(a.levels[i].l2_error, b.levels[i].l2_error);
        EXPECT_EQ(a.levels[i].sq_diff_stderr, b.levels[i].sq_diff_stderr);
    }
    EXPECT_EQ(a.fitted_order, b.fitted_order);
    c.seed = 43;
    EXPECT_NE(dsde::consecutive_l2_errors(p, c).levels[0].l2_error, a.levels[0].l2_error);
}

TEST(Harness, MorePathsKeepsEstimateStable) {
    const auto p = dsde::load_example("ex1").problem;
    HarnessConfig c;
    c.paths = 512;
    c.max_level = 8;
    const auto a = dsde::consecutive_l2_errors(p, c);
    c.paths = 1024;
    const auto b = dsde::consecutive_l2_errors(p, c);
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
        const double ratio = b.levels[i].l2_error / a.levels[i].l2_error;
        EXPECT_GT(ratio, 0.6);
        EXPECT_LT(ratio, 1.6);
    }
}

TEST(Harness, InvalidConfig) {
    const auto p = dsde::load_example("ex1").problem;
    HarnessConfig c;
    c.paths = 1;
    EXPECT_THROW(dsde::consecutive_l2_errors(p, c), dsde::ValidationError);
    c.paths = 8;
    c.min_level = 6;
    c.max_level = 6;
    EXPECT_THROW(dsde::consecutive_l2_errors(p, c), dsde::ValidationError);
}

TEST(Harness, BlowUpReportsPath) {
    SdeProblem p{PiecewiseFn::parse({}, {"x^2"}), PiecewiseFn::constant(0.0), 10.0, 1.0, 1e-6};
    try {
        dsde::simulate_terminals(p, Method::Em, 0.5, 1, 3, 5);
        FAIL();
    } catch (const dsde::PathError& e) {
        EXPECT_EQ(e.path(), 0u);
        EXPECT_EQ(e.level(), 5);
        EXPECT_GT(e.step(), 0u);
    }
}

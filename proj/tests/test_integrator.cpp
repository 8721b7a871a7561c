#include "dsde/error.hpp"
#include "dsde/examples.hpp"
#include "dsde/integrator.hpp"
#include "dsde/mc_harness.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <vector>

using dsde::Method;
using dsde::PiecewiseFn;
using dsde::SdeProblem;
using dsde::TransformedSde;

namespace {

auto constant(double c) {
    return [c](double) { return c; };
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST(EmStep, Examples) {
    EXPECT_EQ(dsde::em_step(constant(0.0), constant(1.0), 0.0, 0.1, 0.3), 0.3);
    EXPECT_EQ(dsde::em_step(constant(1.0), constant(0.0), 0.0, 0.25, 0.7), 0.25);
}

TEST(EmPath, LinearDriftMatchesEulerProduct) {
    auto drift = [](double z) { return -z; };
    const std::vector<double> zero(10, 0.0);
    const auto r = dsde::em_path(drift, constant(0.0), 1.0, zero, 0.1);
    EXPECT_NEAR(r.terminal, std::pow(0.9, 10), 1e-15);
    EXPECT_NEAR(r.terminal, 0.34867844010000004, 1e-15);
    EXPECT_EQ(r.steps, 10u);
    EXPECT_EQ(r.step_size, 0.1);
}

TEST(EmPath, BaseCases) {
    const std::vector<double> zero(7, 0.0);
    EXPECT_EQ(dsde::em_path(constant(0.0), constant(2.0), 1.25, zero, 0.01).terminal, 1.25);
    const std::vector<double> one{0.4};
    auto drift = [](double z) { return z * z; };
    EXPECT_EQ(dsde::em_path(drift, constant(0.5), 0.3, one, 0.2).terminal,
              dsde::em_step(drift, constant(0.5), 0.3, 0.2, 0.4));
}

TEST(EmPath, NonFiniteStateReportsStep) {
    auto drift = [](double z) { return z * z; };
    const std::vector<double> zero(50, 0.0);
    try {
        dsde::em_path(drift, constant(0.0), 10.0, zero, 1.0);
        FAIL();
    } catch (const dsde::PathError& e) {
        EXPECT_GT(e.step(), 1u);
        EXPECT_LE(e.step(), 50u);
    }
}

TEST(CrudeEm, ExampleOneWithoutNoise) {
    auto p = dsde::load_example("ex1").problem;
    p.x0 = 1.0;
    const std::vector<double> zero(5, 0.0);
    const auto r = dsde::crude_em_path(p, zero, 0.1);
    double x = 1.0;
    for (int i = 0; i < 5; ++i) x = x - 0.1;
    EXPECT_EQ(r.terminal, x);
    EXPECT_NEAR(r.terminal, 0.5, 1e-15);
    EXPECT_EQ(r.method, Method::Em);
}

TEST(SchemePhi, DegeneratesToCrudeEmForContinuousDrift) {
    SdeProblem p{PiecewiseFn::parse({-0.2, 0.4}, {"1-x", "1-x", "1-x"}), PiecewiseFn::parse({}, {"0.5+0.2*cos(x)"}),
                 0.1, 1.0, 1e-6};
    const TransformedSde m(p, 1.0 / 16.0);
    for (std::uint64_t path = 0; path < 50; ++path) {
        const dsde::BrownianLattice lattice(7, path, 6, 1.0);
        const auto em = dsde::crude_em_path(p, lattice.increments(6), lattice.step_size(6));
        const auto emt = dsde::scheme_phi(m, lattice.increments(6), lattice.step_size(6));
        EXPECT_TRUE(same_bits(em.terminal, emt.terminal));
        EXPECT_EQ(emt.method, Method::Emt);
    }
}

// Zero noise on ex1 from x0 = 0.5 with a coarse step enters the bump around 0;
// the expected value comes from the integrated case-list oracle.
TEST(SchemePhi, ZeroNoiseMatchesOracleRecursion) {
    auto p = dsde::load_example("ex1").problem;
    const double kappa = 1.0 / 16.0;
    const TransformedSde m(p, kappa);

    const double d = 6.0 * kappa / ((1.0 + kappa) * 2.0);
    const dsde::oracle::Forward g({{0.0, 2.0, -2.0, d, d}});
    auto mu_tilde = [&](double z) {
        const double x = g.inverse(z);
        const double mu = x < 0.0 ? 1.0 : -1.0;
        return mu * g.prime(x) + 0.5 * g.second(x);
    };

    const double dt = 0.125;
    const std::vector<double> zero(8, 0.0);
    double z = g.value(0.5);
    for (int i = 0; i < 8; ++i) z = z + mu_tilde(z) * dt;
    const double expected = g.inverse(z);

    const auto r = dsde::scheme_phi(m, zero, dt);
    EXPECT_NEAR(r.terminal, expected, 1e-9);
    EXPECT_EQ(r.steps, 8u);
}

TEST(Integrator, PathsStayFiniteOnExamples) {
    for (const auto& id : dsde::example_ids()) {
        const auto p = dsde::load_example(id).problem;
        for (Method method : {Method::Em, Method::Emt}) {
            const auto t = dsde::simulate_terminals(p, method, 1.0 / 16.0, 99, 10000, 6);
            for (double v : t) ASSERT_TRUE(std::isfinite(v)) << id;
        }
    }
}

TEST(Integrator, DeterministicAcrossThreadCounts) {
    const auto p = dsde::load_example("ex2").problem;
    const auto a = dsde::simulate_terminals(p, Method::Emt, 1.0 / 64.0, 5, 300, 8, 1);
    const auto b = dsde::simulate_terminals(p, Method::Emt, 1.0 / 64.0, 5, 300, 8, 8);
    const auto c = dsde::simulate_terminals(p, Method::Emt, 1.0 / 64.0, 5, 300, 8, 3);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_TRUE(same_bits(a[i], b[i]));
        EXPECT_TRUE(same_bits(a[i], c[i]));
    }
}

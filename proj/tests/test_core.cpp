#include <gtest/gtest.h>

#include <random>

#include "vsys/core.hpp"
#include "vsys/generator.hpp"
#include "vsys/propagate.hpp"

using namespace vsys;

TEST(Core, ValidateAcceptsPhysicalParams) {
    const VParams p{1.0, 0.1, 1.0, 1000.0};
    EXPECT_NO_THROW(validate(p));
    EXPECT_DOUBLE_EQ(validate(p).r(), 1000.0);
}

TEST(Core, ValidateNamesTheViolatedBound) {
    VParams p{1.0, 0.1, 1.2, 1000.0};
    try {
        validate(p);
        FAIL() << "expected DomainError";
    } catch (const DomainError& ex) {
        EXPECT_NE(std::string(ex.what()).find("p "), std::string::npos);
    }
    p.p = 1.0;
    p.gamma = -1.0;
    try {
        validate(p);
        FAIL() << "expected DomainError";
    } catch (const DomainError& ex) {
        EXPECT_NE(std::string(ex.what()).find("gamma"), std::string::npos);
    }
    p.gamma = 1.0;
    p.nbar = -0.5;
    EXPECT_THROW(validate(p), DomainError);
    p.nbar = 1.0;
    p.delta = -1.0;
    EXPECT_THROW(validate(p), DomainError);
}

TEST(Core, PumpingRateRoundTrip) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> g(0.1, 10.0), n(0.5, 1e4);
    for (int i = 0; i < 100; ++i) {
        VParams p;
        p.gamma = g(rng);
        p.nbar = n(rng);
        EXPECT_DOUBLE_EQ(p.r() / p.gamma * p.x(), 1.0);
    }
}

TEST(Core, StateVectorDerivedQuantities) {
    const StateVector s{0.2, 0.1, -0.05};
    EXPECT_DOUBLE_EQ(s.rho_bb(), 0.2);
    EXPECT_DOUBLE_EQ(s.rho_cc(), 0.6);
    EXPECT_TRUE(s.physically_admissible());
    const StateVector over_coherent{0.2, 0.25, 0.0};
    const StateVector over_populated{0.7, 0.0, 0.0};
    EXPECT_FALSE(over_coherent.physically_admissible());
    EXPECT_FALSE(over_populated.physically_admissible());
    // diagnostic, not a constructor constraint: the state still exists
    EXPECT_DOUBLE_EQ(over_populated.rho_cc(), 1.0 - 1.4);
}

// Every sample of the figure-parameter trajectories stays physically admissible.
TEST(Core, PositivityDiagnosticAlongFigureTrajectories) {
    const VParams sets[] = {
        {1.0, 10.0, 1.0, 1e3}, {1.0, 10.0, 0.9, 1e3}, {1.0, 0.1, 1.0, 1e3}, {1.0, 0.1, 0.9, 1e3}};
    for (const VParams& params : sets) {
        const double t_end = 10.0 * slowest_timescale(params);
        const Trajectory tr = propagate_exact(params, StateVector{}, log_time_grid(1e-6, t_end));
        for (const StateVector& s : tr.states)
            ASSERT_TRUE(s.physically_admissible(1e-9))
                << "p=" << params.p << " delta=" << params.delta;
    }
}

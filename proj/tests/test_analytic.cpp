#include <gtest/gtest.h>

#include <cmath>

#include "vsys/analytic.hpp"
#include "vsys/propagate.hpp"

using namespace vsys;

namespace {

double max_abs_dev(const std::vector<StateVector>& a, const std::vector<StateVector>& b) {
    double dev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dev = std::max(dev, std::abs(a[i].rho_aa - b[i].rho_aa));
        dev = std::max(dev, std::abs(a[i].rho_ab_re - b[i].rho_ab_re));
        dev = std::max(dev, std::abs(a[i].rho_ab_im - b[i].rho_ab_im));
    }
    return dev;
}

// straight-line fit of log(values) against times
double fitted_rate(const std::vector<double>& ts, const std::vector<double>& vals) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double y = std::log(std::abs(vals[i]));
        sx += ts[i];
        sy += y;
        sxx += ts[i] * ts[i];
        sxy += ts[i] * y;
    }
    const double n = double(ts.size());
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST(Analytic, CoefficientsAtAlignedLimit) {
    for (double p : {1.0, 1.0 - 1e-9}) {
        const TrajectoryCoeffs cc = coeffs(p);
        EXPECT_NEAR(cc.T1, -4.0, 1e-6);
        EXPECT_NEAR(cc.T2, 1.33, 0.01);
        const double a_expect[7] = {0, -4.0, 2.92, 0.0, -0.25, 0.44, 0};
        const double b_expect[7] = {0, -4.0, 3.249, 0.0, 0.75, -0.89, 0};
        const double c_expect[7] = {0, -1.33, 0.99, 0.0, -0.75, 1.33, -0.25};
        for (int i = 1; i <= 5; ++i) EXPECT_NEAR(cc.A[i], a_expect[i], 0.01) << "A" << i;
        for (int i = 1; i <= 5; ++i) EXPECT_NEAR(cc.B[i], b_expect[i], 0.01) << "B" << i;
        for (int i = 1; i <= 6; ++i) EXPECT_NEAR(cc.C[i], c_expect[i], 0.01) << "C" << i;
        // normalized quasisteady coherence amplitude
        EXPECT_NEAR(std::abs(cc.B[4] / (cc.T1 * cc.f1[1])), 0.25, 1e-3);
    }
}

TEST(Analytic, CoefficientsSmoothInP) {
    const TrajectoryCoeffs a = coeffs(0.95);
    const TrajectoryCoeffs b = coeffs(0.951);
    const auto close = [](double x, double y) {
        return std::abs(x - y) <= 0.05 * std::max({std::abs(x), std::abs(y), 1e-6});
    };
    for (int i = 1; i <= 6; ++i) {
        EXPECT_TRUE(close(a.A[i], b.A[i])) << "A" << i << " " << a.A[i] << " vs " << b.A[i];
        EXPECT_TRUE(close(a.B[i], b.B[i])) << "B" << i << " " << a.B[i] << " vs " << b.B[i];
        EXPECT_TRUE(close(a.C[i], b.C[i])) << "C" << i << " " << a.C[i] << " vs " << b.C[i];
    }
    EXPECT_TRUE(close(a.T1, b.T1));
    EXPECT_TRUE(close(a.T2, b.T2));
    EXPECT_THROW(coeffs(0.05), OutsideValidity);
}

TEST(Analytic, SupercriticalStartsAtZeroAndThermalizes) {
    const VParams params{1.0, 10.0, 1.0, 1e3};
    const StateVector t0 = rho_supercritical(params, 0.0);
    EXPECT_DOUBLE_EQ(t0.rho_aa, 0.0);
    EXPECT_DOUBLE_EQ(t0.rho_ab_re, 0.0);
    EXPECT_DOUBLE_EQ(t0.rho_ab_im, 0.0);
    const double tau = 1.34e3 / 100.0;
    const StateVector late = rho_supercritical(params, 1e3 * tau);
    EXPECT_NEAR(late.rho_aa, 1.0 / 3.0, 2e-3);
    EXPECT_NEAR(late.rho_ab_re, 0.0, 2e-3);
    EXPECT_NEAR(late.rho_ab_im, 0.0, 2e-3);
}

TEST(Analytic, SupercriticalMatchesExactDynamics) {
    const VParams params{1.0, 10.0, 1.0, 1e3};
    const auto times = log_time_grid(1e-5, 100.0 * 13.4, 32);
    const Trajectory exact = propagate_exact(params, StateVector{}, times);
    std::vector<StateVector> analytic;
    for (double t : times) analytic.push_back(rho_supercritical(params, t));
    EXPECT_LT(max_abs_dev(exact.states, analytic), 0.02);
}

TEST(Analytic, SubcriticalMatchesExactDynamics) {
    const VParams params{1.0, 10.0, 0.9, 1e3};
    const auto times = log_time_grid(1e-5, 100.0 / 148.0, 32);
    const Trajectory exact = propagate_exact(params, StateVector{}, times);
    std::vector<StateVector> analytic;
    for (double t : times) {
        analytic.push_back(rho_subcritical(params, t));
        ASSERT_DOUBLE_EQ(rho_subcritical(params, 0.0).rho_aa, 0.0);
    }
    EXPECT_LT(max_abs_dev(exact.states, analytic), 0.02);
    // long-time limit agrees with the steady state
    const StateVector late = rho_subcritical(params, 1.0);
    EXPECT_NEAR(late.rho_aa, steady_state(params).rho_aa, 2e-3);
    EXPECT_NEAR(late.rho_ab_re, 0.0, 2e-3);
}

TEST(Analytic, SubcriticalCoherenceDecayRate) {
    // the exact real coherence decays at gamma |z20| nbar once the faster modes die
    const VParams params{1.0, 10.0, 0.9, 1e3};
    const double z20 = std::abs(-2.0 + std::sqrt(1.0 + 3.0 * 0.81));
    const double slow = z20 * 1e3;
    std::vector<double> ts, vals;
    for (double t = 2.0 / slow; t <= 4.0 / slow; t += 0.1 / slow) ts.push_back(t);
    const Trajectory exact = propagate_exact(params, StateVector{}, ts);
    for (const auto& s : exact.states) vals.push_back(s.rho_ab_re);
    EXPECT_NEAR(fitted_rate(ts, vals), slow, 0.1 * slow);
}

TEST(Analytic, BranchGuards) {
    EXPECT_THROW(rho_supercritical({1.0, 10.0, 0.9, 1e3}, 1.0), WrongBranch);
    EXPECT_THROW(rho_subcritical({1.0, 10.0, 1.0, 1e3}, 1.0), WrongBranch);
    // underdamped point inside the expansion window
    EXPECT_THROW(rho_supercritical({1.0, 1e3, 1.0, 1e3}, 1.0), WrongRegime);
    EXPECT_THROW(rho_supercritical({1.0, 0.1, 1.0, 50.0}, 1.0), OutsideValidity);
}

TEST(Analytic, SmallDeltaQuasisteadyPlateau) {
    const VParams params{1.0, 0.1, 1.0, 1e3};
    const double tau_c = 1.34e5;
    for (double t : log_time_grid(10.0 / 1e3, 0.01 * tau_c, 8)) {
        const StateVector s = rho_small_delta(params, t);
        EXPECT_NEAR(s.rho_ab_re, 0.25, 0.01);
        EXPECT_NEAR(s.rho_aa, 0.25, 0.01);
        EXPECT_LE(std::abs(s.rho_ab_im), 5e-4);
        // the exact propagator shows the same plateau
        const StateVector ex = propagate_exact(params, StateVector{}, {t}).states[0];
        EXPECT_NEAR(ex.rho_ab_re, 0.25, 0.01);
        EXPECT_NEAR(ex.rho_aa, 0.25, 0.01);
    }
}

TEST(Analytic, SmallDeltaConsistentWithGeneralForm) {
    const VParams params{1.0, 0.1, 1.0, 1e3};
    const auto times = log_time_grid(1e-5, 10.0 * 1.34e5, 24);
    std::vector<StateVector> small, small_p1, general;
    for (double t : times) {
        small.push_back(rho_small_delta(params, t, SmallDeltaBranch::Supercritical));
        small_p1.push_back(rho_small_delta(params, t, SmallDeltaBranch::SupercriticalP1));
        general.push_back(rho_supercritical(params, t));
    }
    EXPECT_LT(max_abs_dev(small, general), 0.01);
    EXPECT_LT(max_abs_dev(small_p1, general), 0.01);
}

TEST(Analytic, NumeralFormMatchesCoefficientForm) {
    const VParams near1{1.0, 0.1, 1.0 - 1e-9, 1e3};
    const auto times = log_time_grid(1e-5, 1e6, 24);
    std::vector<StateVector> numeral, coefficient;
    for (double t : times) {
        numeral.push_back(rho_small_delta(near1, t, SmallDeltaBranch::SupercriticalP1));
        coefficient.push_back(rho_small_delta(near1, t, SmallDeltaBranch::Supercritical));
    }
    EXPECT_LT(max_abs_dev(numeral, coefficient), 0.01);
}

TEST(Analytic, SmallDeltaSubcriticalBranch) {
    const VParams params{1.0, 0.1, 0.9, 1e3};
    const auto times = log_time_grid(1e-5, 1.0, 24);
    const Trajectory exact = propagate_exact(params, StateVector{}, times);
    std::vector<StateVector> analytic;
    for (double t : times) analytic.push_back(rho_small_delta(params, t));
    EXPECT_LT(max_abs_dev(exact.states, analytic), 0.02);
    const StateVector late = rho_small_delta(params, 1.0);
    EXPECT_NEAR(late.rho_aa, steady_state(params).rho_aa, 2e-3);
}

TEST(Analytic, SmallDeltaGuards) {
    EXPECT_THROW(rho_small_delta({1.0, 0.5, 1.0, 1e3}, 1.0), SplittingTooLarge);
    EXPECT_THROW(rho_small_delta({1.0, 0.1, 0.9, 1e3}, 1.0, SmallDeltaBranch::Supercritical),
                 WrongBranch);
    EXPECT_THROW(rho_small_delta({1.0, 0.1, 1.0, 1e3}, 1.0, SmallDeltaBranch::Subcritical),
                 WrongBranch);
    EXPECT_THROW(rho_small_delta({1.0, 0.1, 0.95, 1e3}, 1.0, SmallDeltaBranch::SupercriticalP1),
                 WrongBranch);
    EXPECT_TRUE(small_delta_marginal({1.0, 0.15, 1.0, 1e3}));
    EXPECT_FALSE(small_delta_marginal({1.0, 0.05, 1.0, 1e3}));
}

TEST(Analytic, TwoTimescaleStructure) {
    // fitted fast rise of the real coherence at 4 gamma nbar, slow decay at
    // 0.75 (gamma/nbar)(delta/gamma)^2
    const VParams params{1.0, 0.1, 1.0, 1e3};
    const double fast = 4e3, slow = 0.75e-2 / 1e3;
    std::vector<double> ts, vals;
    for (double t = 0.2 / fast; t <= 1.5 / fast; t += 0.05 / fast) {
        ts.push_back(t);
        vals.push_back(1.0 - propagate_exact(params, StateVector{}, {t}).states[0].rho_ab_re / 0.25);
    }
    EXPECT_NEAR(fitted_rate(ts, vals), fast, 0.05 * fast);
    ts.clear();
    vals.clear();
    for (double t = 0.2 / slow; t <= 1.5 / slow; t += 0.05 / slow) {
        ts.push_back(t);
        vals.push_back(propagate_exact(params, StateVector{}, {t}).states[0].rho_ab_re);
    }
    EXPECT_NEAR(fitted_rate(ts, vals), slow, 0.05 * slow);
}

TEST(Analytic, GeneralFormEqualsDuhamel) {
    const VParams params{1.0, 0.1, 0.9, 1e3};
    const Spectrum sp = eigenvalues_cardano(params);
    EXPECT_DOUBLE_EQ(dm_general(params, sp, 0.0).rho_aa, 0.0);
    const auto times = log_time_grid(1e-5, 1.0, 20);
    const Trajectory exact = propagate_exact(params, StateVector{}, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const StateVector s = dm_general(params, sp, times[i]);
        ASSERT_NEAR(s.rho_aa, exact.states[i].rho_aa, 1e-9);
        ASSERT_NEAR(s.rho_ab_re, exact.states[i].rho_ab_re, 1e-9);
        ASSERT_NEAR(s.rho_ab_im, exact.states[i].rho_ab_im, 1e-9);
    }
}

TEST(Analytic, GeneralFormRateEquationLimit) {
    // the cofactor structure kills the coherence components exactly at p = 0
    const VParams params{1.0, 2.0, 0.0, 10.0};
    const Spectrum sp = eigenvalues_cardano(params);
    for (double t : {0.01, 0.1, 1.0}) {
        const StateVector s = dm_general(params, sp, t);
        EXPECT_NEAR(s.rho_ab_re, 0.0, 1e-15);
        EXPECT_NEAR(s.rho_ab_im, 0.0, 1e-15);
        EXPECT_GT(s.rho_aa, 0.0);
    }
}

TEST(Analytic, TruncatedThirdModeTermsAreSmall) {
    // the general-splitting population/real-coherence forms drop the X^2 pieces
    // of the third mode; quantify that they are indeed negligible
    const TrajectoryCoeffs cc = coeffs(1.0);
    const double X = (10.0 / 1e3) * (10.0 / 1e3);
    EXPECT_LT(std::abs(cc.A[6] * X * X / cc.T1), 1e-6);
    EXPECT_LT(std::abs(cc.B[6] * X * X / cc.T1), 1e-6);
}

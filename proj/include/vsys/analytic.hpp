// analytic.hpp — Closed-form overdamped trajectories and their p-dependent coefficients
//
// The Duhamel solution collapses, in the strong-pumping limit, to three decaying
// exponentials weighted by p-only amplitudes (the A_i/B_i/C_i composites built
// from the eigenvector components and cofactor coefficients m_i). Four branch
// families are covered: super/subcritical alignment, each in a general-splitting
// and a small-splitting form, plus the p -> 1 numeral form of the latter.

#pragma once

#include <array>
#include <cmath>

#include "vsys/core.hpp"
#include "vsys/errors.hpp"
#include "vsys/generator.hpp"
#include "vsys/spectral.hpp"

namespace vsys {

// Everything here depends on p alone; arrays are indexed 1..6 (slot 0 unused)
// to keep the composite names aligned with their conventional numbering.
struct TrajectoryCoeffs {
    double p{};
    std::array<double, 7> A{}, B{}, C{};
    double T1{}, T2{};
    std::array<double, 17> m{};
    std::array<double, 3> z0{}, z1{};      // z_j0, z_j1 (real)
    std::array<double, 3> f1{}, f2{};      // z_j2 = f_j1 (delta/gamma)^2 + f_j2
    std::array<double, 3> F1{}, F2{};      // (4 + 2 z_j0) split of L_j2
    std::array<double, 3> L0{}, L1{};      // leading eigenvector-denominator rows
};

inline TrajectoryCoeffs coeffs(double p) {
    if (!(p > 0.1 && p <= 1.0))
        throw OutsideValidity("coeffs: strong-pumping composites need 0.1 < p <= 1");
    const auto at0 = detail::eigenvalue_series(p, 0.0);
    const auto at1 = detail::eigenvalue_series(p, 1.0);
    TrajectoryCoeffs out;
    out.p = p;
    for (int j = 0; j < 3; ++j) {
        out.z0[j] = at0[j][0].real();
        out.z1[j] = at0[j][1].real();
        out.f2[j] = at0[j][2].real();
        out.f1[j] = (at1[j][2] - at0[j][2]).real();
        out.F1[j] = (4.0 + 2.0 * out.z0[j]) * out.f1[j];
        out.F2[j] = (4.0 + 2.0 * out.z0[j]) * out.f2[j] + out.z1[j] * out.z1[j] +
                    2.0 * out.z1[j] + (1.0 - p * p);
        out.L0[j] = out.z0[j] * out.z0[j] + 4.0 * out.z0[j] + 3.0 * (1.0 - p * p);
        out.L1[j] = 2.0 * out.z0[j] * out.z1[j] + 2.0 * out.z0[j] + 4.0 * out.z1[j] +
                    4.0 * (1.0 - p * p);
    }
    const double z10 = out.z0[0], z20 = out.z0[1], z30 = out.z0[2];
    const double f11 = out.f1[0];
    const double F11 = out.F1[0], F21 = out.F1[1];
    const double L30 = out.L0[2];  // = -3 p^2
    auto& m = out.m;
    m[1] = (3 + z20) / F21;
    m[2] = -(3 + z30) / L30;
    m[3] = p / F21;
    m[4] = -p / L30;
    m[5] = -(3 + z10) / F11;
    m[6] = -((f11 / F11) * ((1 + z10) / (4 + 2 * z10)) - (3 + z30) / L30);
    m[7] = -p / F11;
    m[8] = p * ((f11 / F11) / (2 * z10 + 4) + 1 / L30);
    m[9] = p * (z10 + z30 + 6) / (F11 * L30);
    m[10] = p * (f11 / (F11 * L30)) * (z10 - z30 - 2) / (2 * z10 + 4);
    m[11] = (3 + z10) / F11 - (3 + z20) / F21;
    m[12] = (f11 / F11) * (1 + z10) / (4 + 2 * z10);
    m[13] = p * (1 / F11 - 1 / F21);
    m[14] = -(f11 / F11) / (2 * z10 + 4);
    m[15] = p * (z10 - z20) / (F11 * F21);
    m[16] = p * (f11 / (F11 * F21)) * (z10 + z20 + 4) / (2 * z10 + 4);
    out.T1 = p * (-m[1] / F11 - m[5] / F21);
    out.T2 = -p * m[11] / L30;
    const double cf = (f11 / F11) / (2 * z10 + 4);
    const double w1 = m[1] + p * m[3];
    const double w2 = m[2] + p * m[4];
    const double w3 = m[5] + p * m[7];
    const double w4 = m[6] + p * m[8];
    const double w5 = m[11] + p * m[13];
    const double w6 = m[12] + p * m[14];
    out.A = {0, -p * w1 / F11, p * (cf * w1 - w2 / F11), -p * w3 / F21,
             -p * w4 / F21, -p * w5 / L30, -p * w6 / L30};
    out.B = {0, (3 + z10) * w1 / F11, m[12] * w1 + (3 + z10) * w2 / F11, (3 + z20) * w3 / F21,
             (3 + z20) * w4 / F21, (3 + z30) * w5 / L30, (3 + z30) * w6 / L30};
    out.C = {0, w1, w2, w3, w4, w5, w6};
    return out;
}

namespace detail {

inline bool is_supercritical(const VParams& params) {
    if (params.p == 1.0) return true;
    if (params.p <= 0.9) return false;
    try {
        return params.p > critical_p(params.nbar, params.delta_over_gamma());
    } catch (const NoCrossing&) {
        return false;
    }
}

inline void require_overdamped(const VParams& params, const char* who) {
    if (classify(params).tag == RegimeTag::Underdamped)
        throw WrongRegime(std::string(who) + ": underdamped: analytic branch unavailable");
}

inline double grow(double rate, double t) { return -std::expm1(-rate * t); }  // 1 - e^{-rate t}

} // namespace detail

// Supercritical (p > p_c) overdamped solution: fast population mode, slow
// coherent mode at gamma |f21| (delta/gamma)^2 / nbar, fast third mode.
inline StateVector rho_supercritical(const VParams& params, double t) {
    const VParams q = validate(params);
    detail::require_expansion_window(q, "rho_supercritical", false);
    detail::require_overdamped(q, "rho_supercritical");
    if (!detail::is_supercritical(q))
        throw WrongBranch("rho_supercritical: p <= p_c (subcritical alignment)");
    const TrajectoryCoeffs cc = coeffs(q.p);
    const double y = q.delta_over_gamma(), n = q.nbar, g = q.gamma;
    const double X = (y / n) * (y / n);
    const double den = cc.T1 + cc.T2 * X;
    const double az1 = std::abs(cc.z0[0]), az3 = std::abs(cc.z0[2]), af = std::abs(cc.f1[1]);
    const double e1 = detail::grow(g * az1 * n, t);
    const double e2 = detail::grow(g * af * y * y / n, t);
    const double e3 = detail::grow(g * az3 * n, t);
    const double slow_weight = (n * n) / (y * y);
    StateVector s;
    s.rho_aa = ((cc.A[1] + cc.A[2] * X) * e1 / az1 + (cc.A[3] + cc.A[4] * X) * slow_weight * e2 / af +
                cc.A[5] * X * e3 / az3) / den;
    s.rho_ab_re = ((cc.B[1] + cc.B[2] * X) * e1 / az1 +
                   (cc.B[3] + cc.B[4] * X) * slow_weight * e2 / af + cc.B[5] * X * e3 / az3) / den;
    s.rho_ab_im = ((cc.C[1] + cc.C[2] * X) * e1 / az1 +
                   (cc.C[3] + cc.C[4] * X) * slow_weight * e2 / af +
                   (cc.C[5] + cc.C[6] * X) * e3 / az3) * (y / n) / den;
    return s;
}

// Subcritical (p < p_c) overdamped solution: every mode decays at a rate
// proportional to nbar, so no long-lived coherence survives.
inline StateVector rho_subcritical(const VParams& params, double t) {
    const VParams q = validate(params);
    detail::require_expansion_window(q, "rho_subcritical", false);
    detail::require_overdamped(q, "rho_subcritical");
    if (detail::is_supercritical(q))
        throw WrongBranch("rho_subcritical: p > p_c (supercritical alignment)");
    const TrajectoryCoeffs cc = coeffs(q.p);
    const double y = q.delta_over_gamma(), n = q.nbar, g = q.gamma;
    const double X = (y / n) * (y / n);
    const double den = cc.T1 + cc.T2 * X;
    const double az1 = std::abs(cc.z0[0]), az2 = std::abs(cc.z0[1]), az3 = std::abs(cc.z0[2]);
    const double e1 = detail::grow(g * az1 * n, t);
    const double e2 = detail::grow(g * az2 * n, t);
    const double e3 = detail::grow(g * az3 * n, t);
    StateVector s;
    s.rho_aa = ((cc.A[1] + cc.A[2] * X) * e1 / az1 + (cc.A[3] + cc.A[4] * X) * e2 / az2 +
                cc.A[5] * X * e3 / az3) / den;
    s.rho_ab_re = ((cc.B[1] + cc.B[2] * X) * e1 / az1 + (cc.B[3] + cc.B[4] * X) * e2 / az2 +
                   cc.B[5] * X * e3 / az3) / den;
    s.rho_ab_im = ((cc.C[1] + cc.C[2] * X) * e1 / az1 + (cc.C[3] + cc.C[4] * X) * e2 / az2 +
                   (cc.C[5] + cc.C[6] * X) * e3 / az3) * (y / n) / den;
    return s;
}

enum class SmallDeltaBranch { Auto, Supercritical, SupercriticalP1, Subcritical };

// True when delta/gamma sits in the (0.1, 0.2] band where the small-splitting
// forms are accepted but their quadratic error is no longer negligible.
inline bool small_delta_marginal(const VParams& params) {
    const double y = params.delta_over_gamma();
    return y > 0.1 && y <= 0.2;
}

// Small-splitting (delta/gamma <= 0.2) overdamped solutions. The p -> 1 numeral
// form is a convenience path quoted to three digits; it takes over automatically
// only within 1e-6 of p = 1.
inline StateVector rho_small_delta(const VParams& params, double t,
                                   SmallDeltaBranch branch = SmallDeltaBranch::Auto) {
    const VParams q = validate(params);
    const double y = q.delta_over_gamma(), n = q.nbar, g = q.gamma;
    if (!(y <= 0.2))
        throw SplittingTooLarge("rho_small_delta: requires delta/gamma <= 0.2");
    detail::require_expansion_window(q, "rho_small_delta", false);
    detail::require_overdamped(q, "rho_small_delta");
    const bool supercritical = detail::is_supercritical(q);
    if (branch == SmallDeltaBranch::Auto)
        branch = !supercritical            ? SmallDeltaBranch::Subcritical
                 : q.p >= 1.0 - 1e-6       ? SmallDeltaBranch::SupercriticalP1
                                           : SmallDeltaBranch::Supercritical;
    if (branch == SmallDeltaBranch::Subcritical && supercritical)
        throw WrongBranch("rho_small_delta: p > p_c (supercritical alignment)");
    if (branch != SmallDeltaBranch::Subcritical && !supercritical)
        throw WrongBranch("rho_small_delta: p <= p_c (subcritical alignment)");
    if (branch == SmallDeltaBranch::SupercriticalP1 && q.p < 1.0 - 1e-6)
        throw WrongBranch("rho_small_delta: numeral form needs p within 1e-6 of 1");

    StateVector s;
    if (branch == SmallDeltaBranch::SupercriticalP1) {
        const double ef = std::exp(-4.0 * g * n * t);
        const double es = std::exp(-0.75 * (g / n) * y * y * t);
        const double em = std::exp(-g * n * t);
        s.rho_aa = 1.0 / 3.0 - (3.0 * ef + es) / 12.0;
        s.rho_ab_re = 0.25 * (es - ef);
        s.rho_ab_im = -(y / n) * (ef + 3.0 * es - 4.0 * em) / 12.0;
        return s;
    }
    const TrajectoryCoeffs cc = coeffs(q.p);
    const double az1 = std::abs(cc.z0[0]), az2 = std::abs(cc.z0[1]), az3 = std::abs(cc.z0[2]);
    const double af = std::abs(cc.f1[1]);
    const double e1 = detail::grow(g * az1 * n, t);
    const double e3 = detail::grow(g * az3 * n, t);
    if (branch == SmallDeltaBranch::Supercritical) {
        const double e2 = detail::grow(g * af * y * y / n, t);
        s.rho_aa = (cc.A[1] * e1 / az1 + cc.A[4] * e2 / af) / cc.T1;
        s.rho_ab_re = (cc.B[1] * e1 / az1 + cc.B[4] * e2 / af) / cc.T1;
        s.rho_ab_im = (cc.C[1] * e1 / az1 + cc.C[4] * e2 / af + cc.C[5] * e3 / az3) * (y / n) / cc.T1;
    } else {
        const double e2 = detail::grow(g * az2 * n, t);
        s.rho_aa = (cc.A[1] * e1 / az1 + cc.A[3] * e2 / az2) / cc.T1;
        s.rho_ab_re = (cc.B[1] * e1 / az1 + cc.B[3] * e2 / az2) / cc.T1;
        s.rho_ab_im = (cc.C[1] * e1 / az1 + cc.C[3] * e2 / az2 + cc.C[5] * e3 / az3) * (y / n) / cc.T1;
    }
    return s;
}

// Truncated eigenvector matrix, its cofactors and determinant in the
// strong-pumping forms (all built from the m_i chain).
struct EigvecExpansion {
    Mat3c vectors;                          // columns V_1..V_3, third row ones
    std::array<std::array<double, 3>, 3> minors{};  // minors[k][j] = T_{k+1,j+1}
    double det_m{};
    double T1{}, T2{};
};

inline EigvecExpansion eigenvector_expansion(const VParams& params) {
    const VParams q = validate(params);
    detail::require_expansion_window(q, "eigenvector_expansion", false);
    const TrajectoryCoeffs cc = coeffs(q.p);
    const double p = q.p, y = q.delta_over_gamma(), n = q.nbar;
    const double X = (y / n) * (y / n);
    const double ny = n / y;  // the recurring nbar (delta/gamma)^-1 weight
    const double z10 = cc.z0[0], z20 = cc.z0[1], z30 = cc.z0[2];
    const double f11 = cc.f1[0], F11 = cc.F1[0], F21 = cc.F1[1], L30 = cc.L0[2];
    EigvecExpansion out;
    auto& v = out.vectors.m;
    v[0][0] = p * (-1.0 / F11 + (f11 / F11) / (2 * z10 + 4) * X) * ny;
    v[1][0] = ((3 + z10) / F11 + (f11 / F11) * ((1 + z10) / (4 + 2 * z10)) * X) * ny;
    v[2][0] = 1.0;
    v[0][1] = -(p / F21) * ny;
    v[1][1] = ((3 + z20) / F21) * ny;
    v[2][1] = 1.0;
    v[0][2] = -(p / L30) / ny;
    v[1][2] = ((3 + z30) / L30) / ny;
    v[2][2] = 1.0;
    const auto& m = cc.m;
    out.minors[0] = {(m[1] + m[2] * X) * ny, (m[3] + m[4] * X) * ny, p * (z20 - z30) / (F21 * L30)};
    out.minors[1] = {(m[5] + m[6] * X) * ny, (m[7] + m[8] * X) * ny, m[9] + m[10] * X};
    out.minors[2] = {(m[11] + m[12] * X) * ny, (m[13] + m[14] * X) * ny,
                     (m[15] + m[16] * X) * ny * ny};
    out.T1 = cc.T1;
    out.T2 = cc.T2;
    out.det_m = (cc.T1 + cc.T2 * X) * ny * ny;
    return out;
}

// General density-matrix evolution from the exact eigenvectors and cofactors;
// algebraically identical to the Duhamel propagator, kept as the closed-form
// reference the truncated branches are measured against. The combination is
// invariant under rescaling any eigenvector column, so columns whose
// third-component normalization degenerates (p = 0) fall back to null-space
// directions instead of failing.
inline StateVector dm_general(const VParams& params, const Spectrum& spectrum, double t) {
    const VParams q = validate(params);
    const Generator gen = build(q);
    const double scale = gen.norm_inf();
    Mat3c m;
    double colnorm = 1.0;
    for (int k = 0; k < 3; ++k) {
        const auto col = detail::eigvec_any(q, gen, spectrum.lambdas[k]);
        if (eigen_residual(gen, spectrum.lambdas[k], col) > 1e-8 * scale)
            throw DegenerateEigenvector("dm_general: defective spectrum");
        double n = 0.0;
        for (int i = 0; i < 3; ++i) {
            m.m[i][k] = col[i];
            n += std::norm(col[i]);
        }
        colnorm *= std::sqrt(n);
    }
    if (std::abs(m.det()) < 1e-10 * colnorm)
        throw DegenerateEigenvector("dm_general: eigenvector matrix is singular");
    // adjugate: adj[k][j] = cofactor_{j,k}
    std::array<std::array<Complex, 3>, 3> adj;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            const int r1 = (j + 1) % 3, r2 = (j + 2) % 3;
            const int c1 = (k + 1) % 3, c2 = (k + 2) % 3;
            adj[k][j] = m.m[r1][c1] * m.m[r2][c2] - m.m[r1][c2] * m.m[r2][c1];
        }
    const Complex det = m.det();
    const double r = q.r(), p = q.p;
    std::array<Complex, 3> acc{};
    for (int k = 0; k < 3; ++k) {
        const Complex lam = spectrum.lambdas[k];
        const Complex u = lam * t;
        // (e^{lambda t} - 1)/lambda, stable for small |lambda t|
        const Complex phi = std::abs(u) < 1e-10 ? t * (1.0 + 0.5 * u) : (std::exp(u) - 1.0) / lam;
        const Complex weight = phi * (adj[k][0] + p * adj[k][1]);
        for (int i = 0; i < 3; ++i) acc[i] += weight * m.m[i][k];
    }
    StateVector s;
    s.rho_aa = (r * acc[0] / det).real();
    s.rho_ab_re = (r * acc[1] / det).real();
    s.rho_ab_im = (r * acc[2] / det).real();
    return s;
}

} // namespace vsys

// regime.hpp — Dynamical-regime classification of the driven V-system
//
// The sign of the characteristic-cubic discriminant D separates underdamped
// (D > 0, one real eigenvalue plus a complex pair), overdamped (D < 0, three
// real eigenvalues) and critical (D = 0) dynamics. D is available through two
// independent algebraic routes: the matrix-invariant form and a degree-6
// polynomial in the occupation number. Near the critical boundary both routes
// suffer catastrophic cancellation in double precision, so the arithmetic runs
// in __float128 internally and rounds once on return (the same idea as robust
// geometric predicates); only signs and relative magnitudes matter downstream.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "vsys/core.hpp"
#include "vsys/errors.hpp"

namespace vsys {

namespace detail {
using quad = __float128;
} // namespace detail

// Degree-6 polynomial coefficients of 108*D in nbar, at gamma = 1.
struct DiscriminantCoeffs {
    std::array<double, 7> d{};
};

inline DiscriminantCoeffs discriminant_coeffs(double p, double delta_over_gamma) {
    using detail::quad;
    const quad pp = p, y = delta_over_gamma;
    const quad p2 = pp * pp, p4 = p2 * p2, p6 = p4 * p2;
    const quad y2 = y * y;
    const quad w = y2 - p2;
    DiscriminantCoeffs out;
    out.d[0] = static_cast<double>(quad(4) * w * w * w);
    out.d[1] = static_cast<double>(quad(-48) * p2 * w * w);
    out.d[2] = static_cast<double>(quad(12) * (2 * y2 + p2) * (2 * y2 + p2) + quad(192) * p4 * w -
                                   quad(4) * (4 + 9 * p2) * w * w);
    out.d[3] = static_cast<double>(quad(96) * p2 * (2 * y2 + p2) + quad(32) * p2 * (4 + 9 * p2) * w -
                                   quad(256) * p6);
    out.d[4] = static_cast<double>(quad(8) / 3 * (8 + 27 * p2) * (2 * y2 + p2) +
                                   quad(4) / 3 * (4 + 9 * p2) * (4 + 9 * p2) * w -
                                   quad(64) * p4 * (1 + 9 * p2));
    out.d[5] = static_cast<double>(quad(-16) * p4 * (6 + 27 * p2));
    out.d[6] = static_cast<double>(quad(-36) * p4 * (1 + 3 * p2));
    return out;
}

namespace detail {

// Invariants of the coefficient matrix at gamma = 1 (so D carries units gamma^6).
struct CubicInvariants {
    quad a, b, c, e;  // e = c - (3/2) a (b + a^2), half the depressed-cubic constant
};

inline CubicInvariants cubic_invariants(double p, double delta_over_gamma, double nbar) {
    const quad pp = p, y = delta_over_gamma, n = nbar;
    const quad p2 = pp * pp, y2 = y * y;
    CubicInvariants inv;
    inv.a = (3 + 5 * n) / quad(3);
    inv.b = (y2 - p2 - 4 * p2 * n - (quad(4) / 3 + 3 * p2) * n * n) / quad(3);
    inv.c = (y2 + (3 - p2) + (15 - 5 * p2 + 3 * y2) * n + (quad(71) / 3 - 7 * p2) * n * n +
             (quad(331) / 27 - 3 * p2) * n * n * n) / quad(2);
    inv.e = inv.c - quad(3) / 2 * inv.a * (inv.b + inv.a * inv.a);
    return inv;
}

inline quad discriminant_direct_q(double p, double delta_over_gamma, double nbar) {
    const CubicInvariants inv = cubic_invariants(p, delta_over_gamma, nbar);
    return inv.b * inv.b * inv.b + inv.e * inv.e;
}

} // namespace detail

// D from the matrix-invariant route, in physical units (gamma^6 prefactor applied).
inline double discriminant_direct(const VParams& params) {
    const double g6 = std::pow(params.gamma, 6);
    return static_cast<double>(detail::discriminant_direct_q(params.p, params.delta_over_gamma(),
                                                             params.nbar)) * g6;
}

// D from the polynomial-in-nbar route; agrees with discriminant_direct identically.
inline double discriminant_poly(const VParams& params) {
    using detail::quad;
    const quad pp = params.p, y = params.delta_over_gamma(), n = params.nbar;
    const quad p2 = pp * pp, p4 = p2 * p2, p6 = p4 * p2;
    const quad y2 = y * y;
    const quad w = y2 - p2;
    const quad d0 = 4 * w * w * w;
    const quad d1 = -48 * p2 * w * w;
    const quad d2 = 12 * (2 * y2 + p2) * (2 * y2 + p2) + 192 * p4 * w - 4 * (4 + 9 * p2) * w * w;
    const quad d3 = 96 * p2 * (2 * y2 + p2) + 32 * p2 * (4 + 9 * p2) * w - 256 * p6;
    const quad d4 = quad(8) / 3 * (8 + 27 * p2) * (2 * y2 + p2) +
                    quad(4) / 3 * (4 + 9 * p2) * (4 + 9 * p2) * w - 64 * p4 * (1 + 9 * p2);
    const quad d5 = -16 * p4 * (6 + 27 * p2);
    const quad d6 = -36 * p4 * (1 + 3 * p2);
    const quad sum = d0 + n * (d1 + n * (d2 + n * (d3 + n * (d4 + n * (d5 + n * d6)))));
    return static_cast<double>(sum / 108) * std::pow(params.gamma, 6);
}

// |D| band treated as critical. D spans many orders of magnitude, so the
// tolerance is tied to the dominant term of the polynomial form (an absolute
// tolerance would swallow the whole small-p, small-delta corner).
inline double critical_tolerance(const VParams& params) {
    const auto dk = discriminant_coeffs(params.p, params.delta_over_gamma()).d;
    double scale = 0.0;
    double nk = 1.0;
    for (int k = 0; k <= 6; ++k, nk *= params.nbar)
        scale = std::max(scale, std::abs(dk[k]) * nk);
    return 1e-9 * scale / 108.0;
}

inline Regime classify(const VParams& params) {
    const VParams checked = validate(params);
    const double d = static_cast<double>(detail::discriminant_direct_q(
        checked.p, checked.delta_over_gamma(), checked.nbar));
    const double tol = critical_tolerance(checked);
    Regime out;
    out.discriminant_value = d * std::pow(checked.gamma, 6);
    if (std::abs(d) <= tol)
        out.tag = RegimeTag::Critical;
    else
        out.tag = d > 0.0 ? RegimeTag::Underdamped : RegimeTag::Overdamped;
    return out;
}

// Universal slope of the zero-discriminant line delta/gamma = f(p)*nbar in the
// strong-pumping limit, from the depressed cubic in (delta/(gamma*nbar))^2.
// Both cube roots are real (t1 > 0 > t2 on (0,1]).
inline double slope_f(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("slope_f: p must lie in [0, 1]");
    const double p2 = p * p, p4 = p2 * p2;
    const double P = 16.0 + 60.0 * p2 + 27.0 * p4;
    const double Q = -9.0 * p4 * (1.0 + 3.0 * p2);
    const double s = std::sqrt(Q * Q / 4.0 + P * P * P / 27.0);
    const double t1 = -Q / 2.0 + s;
    const double t2 = -Q / 2.0 - s;
    return std::sqrt(std::max(0.0, std::cbrt(t1) + std::cbrt(t2)));
}

// Locates the delta/gamma value where D changes sign at fixed (p, nbar).
// The zero-D line can cross a horizontal cut more than once at small nbar;
// the largest root is the boundary separating the asymptotic regimes.
inline double boundary_delta(double p, double nbar) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("boundary_delta: requires 0 < p <= 1");
    if (!(nbar > 0.0)) throw DomainError("boundary_delta: requires nbar > 0");
    const auto dval = [&](double y) {
        return detail::discriminant_direct_q(p, y, nbar);
    };
    const double y_lo_limit = 1e-6;
    double hi = 1e3 * std::max(1.0, nbar);
    if (!(dval(hi) > 0))
        throw NoRoot("boundary_delta: discriminant not positive at top of bracket");
    // Geometric scan downward for the first (largest) sign change.
    double lo = hi / 2.0;
    while (!(dval(lo) < 0)) {
        hi = lo;
        lo /= 2.0;
        if (lo < y_lo_limit)
            throw NoRoot("boundary_delta: no sign change in [1e-6, 1e3*max(1,nbar)]");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-8 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (dval(mid) < 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace vsys

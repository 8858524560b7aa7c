// spectral.hpp — Eigenvalues and eigenvectors of the V-system generator
//
// Two independent eigenvalue routes: the closed-form cubic (Cardano, with the
// root labels fixed by the cube-roots-of-unity pairs) and a QR-based numeric
// solver used as an oracle. On top of the cubic sits the strong-pumping
// expansion lambda_j = r * sum_k z_jk x^k in x = 1/nbar, from which the
// critical alignment p_c and the coherence lifetimes follow.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "vsys/core.hpp"
#include "vsys/detail/series.hpp"
#include "vsys/errors.hpp"
#include "vsys/generator.hpp"
#include "vsys/regime.hpp"

namespace vsys {

using Complex = std::complex<double>;

struct Mat3c {
    // m[row][col]; columns are eigenvectors
    std::array<std::array<Complex, 3>, 3> m{};

    Complex det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
};

enum class SpectrumMethod { Cardano, Numeric, Expansion };

struct Spectrum {
    std::array<Complex, 3> lambdas{};
    Mat3c eigvecs{};
    SpectrumMethod method{SpectrumMethod::Cardano};
};

namespace detail {

inline constexpr Complex omega{-0.5, 0.8660254037844386467637231707529362};
inline const std::array<std::array<Complex, 2>, 3> cardano_labels = {{
    {Complex(1.0, 0.0), Complex(1.0, 0.0)},
    {omega * omega, omega},
    {omega, omega * omega},
}};

// Closed-form eigenvector column for a given eigenvalue, third component 1.
// Returns nullopt when the denominator is too small (near-defective pair).
inline std::optional<std::array<Complex, 3>> eigvec_closed(const VParams& params, Complex lam) {
    const double g = params.gamma, r = params.r(), p = params.p, delta = params.delta;
    const Generator gen = build(params);
    const double scale = gen.norm_inf();
    const Complex den = p * p * (3 * r + g) * (r + g) - (r + g + lam) * (3 * r + g + lam);
    if (std::abs(den) < 1e-12 * scale * scale) return std::nullopt;
    return std::array<Complex, 3>{delta * p * (r + g) / den, -delta * (3 * r + g + lam) / den,
                                  Complex(1.0, 0.0)};
}

// Null-space direction of (A - lam I) from the best-conditioned row cross product.
inline std::array<Complex, 3> eigvec_nullspace(const Generator& gen, Complex lam) {
    std::array<std::array<Complex, 3>, 3> rows;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            rows[i][j] = gen.a_matrix[i][j] - (i == j ? lam : Complex(0.0));
    std::array<Complex, 3> best{};
    double best_norm = -1.0;
    for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3;
        std::array<Complex, 3> cr = {rows[a][1] * rows[b][2] - rows[a][2] * rows[b][1],
                                     rows[a][2] * rows[b][0] - rows[a][0] * rows[b][2],
                                     rows[a][0] * rows[b][1] - rows[a][1] * rows[b][0]};
        const double n = std::abs(cr[0]) + std::abs(cr[1]) + std::abs(cr[2]);
        if (n > best_norm) {
            best_norm = n;
            best = cr;
        }
    }
    double mx = 0.0;
    int mi = 0;
    for (int i = 0; i < 3; ++i)
        if (std::abs(best[i]) > mx) {
            mx = std::abs(best[i]);
            mi = i;
        }
    if (mx == 0.0) {
        // fully defective direction; callers see it through residual checks
        best = {1.0, 0.0, 0.0};
        mi = 0;
    }
    const Complex piv = best[mi];
    for (auto& c : best) c /= piv;
    return best;
}

inline std::array<Complex, 3> eigvec_any(const VParams& params, const Generator& gen, Complex lam) {
    if (auto col = eigvec_closed(params, lam)) return *col;
    auto v = eigvec_nullspace(gen, lam);
    // keep the third-component-1 convention whenever it is well defined
    if (std::abs(v[2]) > 1e-8) {
        const Complex s = v[2];
        for (auto& c : v) c /= s;
    }
    return v;
}

struct CubicCoeffs {
    double c2, c1, c0;  // lambda^3 + c2 lambda^2 + c1 lambda + c0, gamma = 1 units
};

inline CubicCoeffs char_cubic(double p, double y, double nbar) {
    const auto inv = cubic_invariants(p, y, nbar);
    const double a = static_cast<double>(inv.a);
    const double b = static_cast<double>(inv.b);
    const double e = static_cast<double>(inv.e);
    const double c1 = 3 * b + 3 * a * a;
    return CubicCoeffs{3 * a, c1, 2 * e + c1 * a - 2 * a * a * a};
}

} // namespace detail

// Residual ||A v - lambda v||_2 / ||v||_2 of an eigenpair.
inline double eigen_residual(const Generator& gen, Complex lam, const std::array<Complex, 3>& v) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 3; ++i) {
        Complex row = -lam * v[i];
        for (int j = 0; j < 3; ++j) row += gen.a_matrix[i][j] * v[j];
        num += std::norm(row);
        den += std::norm(v[i]);
    }
    return std::sqrt(num / den);
}

// Eigenvalues from the closed-form cubic. Computed in units of gamma, polished
// by two Newton steps on the characteristic polynomial, and symmetrized to an
// exactly conjugate-closed set according to the regime.
inline Spectrum eigenvalues_cardano(const VParams& params) {
    const VParams q = validate(params);
    const double p = q.p, y = q.delta_over_gamma(), n = q.nbar;
    const auto inv = detail::cubic_invariants(p, y, n);
    const double a = static_cast<double>(inv.a);
    const double b = static_cast<double>(inv.b);
    const double e = static_cast<double>(inv.e);
    const double disc = static_cast<double>(detail::discriminant_direct_q(p, y, n));
    const Complex sqrt_d = disc >= 0.0 ? Complex(std::sqrt(disc), 0.0)
                                       : Complex(0.0, std::sqrt(-disc));
    const Complex w_plus = e + sqrt_d;
    const double tiny = 1e-280;
    Spectrum out;
    out.method = SpectrumMethod::Cardano;
    if (std::abs(w_plus) < tiny) {
        // b and e vanish together here; the roots collapse onto -a plus the
        // cube roots of the remaining constant
        const Complex w_minus = e - sqrt_d;
        const Complex root = std::abs(w_minus) < tiny ? Complex(0.0)
                                                      : std::exp(std::log(-w_minus) / 3.0);
        for (int j = 0; j < 3; ++j)
            out.lambdas[j] = -a + detail::cardano_labels[j][0] * root;
    } else {
        const Complex t = std::exp(std::log(w_plus) / 3.0);
        for (int j = 0; j < 3; ++j) {
            const auto& lab = detail::cardano_labels[j];
            out.lambdas[j] = -a + lab[0] * b / t - lab[1] * t;
        }
    }
    // Newton polish on the characteristic cubic; recovers the digits the
    // -a + alpha B/T - beta T combination cancels away for the slow mode.
    const auto cubic = detail::char_cubic(p, y, n);
    for (auto& lam : out.lambdas) {
        for (int it = 0; it < 2; ++it) {
            const Complex f = ((lam + cubic.c2) * lam + cubic.c1) * lam + cubic.c0;
            const Complex fp = (3.0 * lam + 2.0 * cubic.c2) * lam + cubic.c1;
            if (std::abs(fp) == 0.0) break;
            lam -= f / fp;
        }
    }
    const double tol = critical_tolerance(q);
    if (disc > tol) {
        // one real root (label 1) and a conjugate pair
        out.lambdas[0].imag(0.0);
        const Complex pair = 0.5 * (out.lambdas[1] + std::conj(out.lambdas[2]));
        out.lambdas[1] = pair;
        out.lambdas[2] = std::conj(pair);
    } else if (disc < -tol) {
        for (auto& lam : out.lambdas) lam.imag(0.0);
    }
    for (auto& lam : out.lambdas) lam *= q.gamma;
    const Generator gen = build(q);
    for (int j = 0; j < 3; ++j) {
        const auto col = detail::eigvec_any(q, gen, out.lambdas[j]);
        for (int i = 0; i < 3; ++i) out.eigvecs.m[i][j] = col[i];
    }
    return out;
}

// Independent numeric oracle: QR iteration on the matrix itself. Shares no
// root-finding code with the Cardano route.
inline Spectrum eigenvalues_numeric(const VParams& params) {
    const VParams q = validate(params);
    const Generator gen = build(q);
    Eigen::Matrix3d a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = gen.a_matrix[i][j];
    Eigen::EigenSolver<Eigen::Matrix3d> solver(a, /*computeEigenvectors=*/true);
    Spectrum out;
    out.method = SpectrumMethod::Numeric;
    for (int j = 0; j < 3; ++j) {
        out.lambdas[j] = solver.eigenvalues()(j);
        std::array<Complex, 3> col = {solver.eigenvectors()(0, j), solver.eigenvectors()(1, j),
                                      solver.eigenvectors()(2, j)};
        if (std::abs(col[2]) > 1e-8) {
            const Complex s = col[2];
            for (auto& c : col) c /= s;
        }
        for (int i = 0; i < 3; ++i) out.eigvecs.m[i][j] = col[i];
    }
    return out;
}

namespace detail {

// Full strong-pumping expansion of the three eigenvalues as series in x = 1/nbar:
// lambda_j = r * series_j(x). Built by truncated power-series composition of
// the Cardano expression, which regenerates every multinomial coefficient of
// the intermediate expansion chains exactly.
inline std::array<Series, 3> eigenvalue_series(double p, double delta_over_gamma) {
    const double y = delta_over_gamma;
    const auto dk = discriminant_coeffs(p, y).d;
    const double c1 = 4 * y * y + 2 * p * p;
    const double c2 = 8 * p * p;
    const double c3 = (16 + 54 * p * p) / 9.0;

    // sqrt(D)/r^3 = i sqrt(|d6|/108) * sqrt(1 + alpha(x))
    const Complex sq(0.0, std::sqrt(std::abs(dk[6]) / 108.0));
    Series alpha;
    for (int k = 1; k <= 6; ++k) alpha[k] = dk[6 - k] / dk[6];
    const Series sqrt_d = sq * binomial_power(alpha, 0.5);

    Series e;  // E/r^3
    e[0] = c3 / 6.0;
    e[1] = c2 / 6.0;
    e[2] = c1 / 6.0;

    const Series t_cubed = e + sqrt_d;  // (T/r)^3
    const Complex k3 = t_cubed[0];
    const Complex kf = std::exp(std::log(k3) / 3.0);
    Series beta = (1.0 / k3) * t_cubed;
    beta[0] = 0.0;
    const Series t = kf * binomial_power(beta, 1.0 / 3.0);               // T/r
    const Series inv_t = (1.0 / kf) * binomial_power(beta, -1.0 / 3.0);  // r/T

    Series b;  // B/r^2
    b[0] = -(4.0 / 3.0 + 3.0 * p * p) / 3.0;
    b[1] = -4.0 * p * p / 3.0;
    b[2] = (y * y - p * p) / 3.0;

    Series neg_a;  // -A/r
    neg_a[0] = -5.0 / 3.0;
    neg_a[1] = -1.0;

    std::array<Series, 3> out;
    for (int j = 0; j < 3; ++j) {
        const auto& lab = cardano_labels[j];
        out[j] = neg_a + lab[0] * (b * inv_t) - lab[1] * t;
    }
    return out;
}

inline bool in_expansion_window(const VParams& params) {
    const double y = params.delta_over_gamma();
    if (params.nbar < 100.0) return false;
    if (y <= 1.0) return params.p > 0.1;
    return params.p > 0.89 && params.p <= 1.0;
}

inline void require_expansion_window(const VParams& params, const char* who, bool force) {
    if (force || in_expansion_window(params)) return;
    throw OutsideValidity(std::string(who) +
                          ": outside the strong-pumping window (need nbar >= 100 and p > 0.1 for "
                          "delta/gamma <= 1, or 0.89 < p <= 1 for delta/gamma > 1)");
}

// z20 = -2 + sqrt(1 + 3 p^2) in a form that keeps full precision as p -> 1.
inline double z20_stable(double p) {
    const double s = std::sqrt(1.0 + 3.0 * p * p);
    return (3.0 * p * p - 3.0) / (s + 2.0);
}

} // namespace detail

// Lowest orders of the eigenvalue expansion plus the delta/gamma split of the
// quadratic coefficient: z_j2 = f_j1(p) (delta/gamma)^2 + f_j2(p).
struct ZCoeffs {
    std::array<std::array<Complex, 3>, 3> z{};  // z[j][k], j = 0..2, k = 0..2
    Complex k_factor{};
    std::array<double, 3> f1{};
    std::array<double, 3> f2{};
};

inline ZCoeffs z_expansion(const VParams& params, bool force = false) {
    const VParams q = validate(params);
    detail::require_expansion_window(q, "z_expansion", force);
    const double y = q.delta_over_gamma();
    const auto at_y = detail::eigenvalue_series(q.p, y);
    const auto at_0 = detail::eigenvalue_series(q.p, 0.0);
    const auto at_1 = detail::eigenvalue_series(q.p, 1.0);
    ZCoeffs out;
    const double c3 = (16 + 54 * q.p * q.p) / 9.0;
    const Complex k3(c3 / 6.0, std::sqrt(36.0 * std::pow(q.p, 4) * (1 + 3 * q.p * q.p) / 108.0));
    out.k_factor = std::exp(std::log(k3) / 3.0);
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) out.z[j][k] = at_y[j][k];
        out.f2[j] = at_0[j][2].real();
        out.f1[j] = (at_1[j][2] - at_0[j][2]).real();
    }
    return out;
}

// Eigenvalues from the expansion truncated at x^2, as a Spectrum.
inline Spectrum eigenvalues_expansion(const VParams& params, bool force = false) {
    const ZCoeffs zc = z_expansion(params, force);
    const double x = params.x(), r = params.r();
    Spectrum out;
    out.method = SpectrumMethod::Expansion;
    const Generator gen = build(params);
    for (int j = 0; j < 3; ++j) {
        const auto& zj = zc.z[j];
        out.lambdas[j] = r * (zj[0] + zj[1] * x + zj[2] * x * x);
        const auto col = detail::eigvec_any(params, gen, out.lambdas[j]);
        for (int i = 0; i < 3; ++i) out.eigvecs.m[i][j] = col[i];
    }
    return out;
}

// Critical alignment p_c where |z20(p)| crosses |z22(p) x^2|. Above p_c the
// slow coherent mode scales as (delta/gamma)^2 / nbar; below it every mode
// scales with nbar. Bisection runs in log(1-p) because 1-p_c spans many decades.
inline double critical_p(double nbar, double delta_over_gamma) {
    if (!(nbar >= 100.0)) throw OutsideValidity("critical_p: requires nbar >= 100");
    const double x2 = 1.0 / (nbar * nbar);
    const auto gap = [&](double eps) {
        const double p = 1.0 - eps;
        const auto zs = detail::eigenvalue_series(p, delta_over_gamma);
        const double z22 = std::abs(zs[1][2]);
        return std::abs(detail::z20_stable(p)) - z22 * x2;
    };
    double lo = std::log(1e-14), hi = std::log(0.1);
    if (gap(std::exp(hi)) <= 0.0)
        throw NoCrossing("critical_p: |z22 x^2| already dominates at p = 0.9");
    if (gap(std::exp(lo)) >= 0.0)
        throw NoCrossing("critical_p: no crossing for p up to 1 - 1e-14");
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (gap(std::exp(mid)) > 0.0)
            hi = mid;  // z20 still dominates: p_c is closer to 1
        else
            lo = mid;
    }
    return 1.0 - std::exp(0.5 * (lo + hi));
}

enum class LifetimeBranch { Supercritical, Subcritical };

inline const char* to_string(LifetimeBranch b) {
    return b == LifetimeBranch::Supercritical ? "supercritical" : "subcritical";
}

struct LifetimeResult {
    double tau_exact;    // 1/|lambda_2| from the Cardano slow mode
    double tau_formula;  // closed-form branch value
    LifetimeBranch branch;
    double p_critical;   // NaN when the branch was decided without a crossing
};

// Coherence lifetime tau_c = 1/|lambda_2| in the overdamped regime, paired with
// the closed-form branch value: 1.34 (nbar/gamma)(gamma/delta)^2 above p_c and
// 1/(gamma |z20| nbar) below it.
inline LifetimeResult coherence_lifetime(const VParams& params) {
    const VParams q = validate(params);
    if (classify(q).tag == RegimeTag::Underdamped)
        throw WrongRegime("coherence_lifetime: oscillatory (underdamped) coherence has no "
                          "overdamped lifetime formula");
    if (!(q.nbar >= 100.0)) throw OutsideValidity("coherence_lifetime: requires nbar >= 100");
    const Spectrum sp = eigenvalues_cardano(q);
    // slow mode: smallest magnitude of the (real) spectrum; label 2 by construction
    double slow = std::abs(sp.lambdas[0]);
    for (const auto& lam : sp.lambdas) slow = std::min(slow, std::abs(lam));
    LifetimeResult out;
    out.tau_exact = 1.0 / slow;
    out.p_critical = std::numeric_limits<double>::quiet_NaN();
    bool supercritical;
    if (q.p == 1.0) {
        supercritical = true;
    } else if (q.p <= 0.9) {
        supercritical = false;
    } else {
        try {
            out.p_critical = critical_p(q.nbar, q.delta_over_gamma());
            supercritical = q.p > out.p_critical;
        } catch (const NoCrossing&) {
            supercritical = false;
        }
    }
    const double y = q.delta_over_gamma();
    if (supercritical) {
        out.branch = LifetimeBranch::Supercritical;
        out.tau_formula = 1.34 * (q.nbar / q.gamma) / (y * y);
    } else {
        out.branch = LifetimeBranch::Subcritical;
        out.tau_formula = 1.0 / (q.gamma * std::abs(detail::z20_stable(q.p)) * q.nbar);
    }
    return out;
}

// Weak-pumping coherence lifetime for the small-splitting regime, the baseline
// for the strong-pumping enhancement factor 0.67*nbar.
inline double weak_pumping_lifetime(const VParams& params) {
    const double y = params.delta_over_gamma();
    return 2.0 / (params.gamma * y * y);
}

// Exact closed-form eigenvector matrix with the third row normalized to ones.
// Throws when an eigenvector denominator is too small for the normalization
// (near-defective pair, or modes orthogonal to the third axis as at p = 0);
// callers then fall back to null-space extraction.
inline Mat3c eigenvectors_exact(const VParams& params, const Spectrum& spectrum) {
    const VParams q = validate(params);
    const Generator gen = build(q);
    const double scale = gen.norm_inf();
    Mat3c out;
    for (int j = 0; j < 3; ++j) {
        const Complex lam = spectrum.lambdas[j];
        const auto col = detail::eigvec_closed(q, lam);
        if (!col)
            throw DegenerateEigenvector(
                "eigenvectors_exact: denominator below 1e-12*||A||^2 for eigenvalue " +
                std::to_string(j + 1));
        if (eigen_residual(gen, lam, *col) > 1e-8 * scale)
            throw DegenerateEigenvector("eigenvectors_exact: residual check failed for eigenvalue " +
                                        std::to_string(j + 1));
        for (int i = 0; i < 3; ++i) out.m[i][j] = (*col)[i];
    }
    return out;
}

// Slowest relaxation timescale 1/min|Re lambda|.
inline double slowest_timescale(const VParams& params) {
    const Spectrum sp = eigenvalues_cardano(params);
    double slow = std::numeric_limits<double>::infinity();
    for (const auto& lam : sp.lambdas)
        if (std::abs(lam.real()) > 0.0) slow = std::min(slow, 1.0 / std::abs(lam.real()));
    return slow;
}

} // namespace vsys

// propagate.hpp — Time evolution of the driven V-system
//
// Primary method: the Duhamel solution x(t) = x_ss + sum_k c_k e^{lambda_k t} v_k
// evaluated through the closed-form eigendecomposition; it is exact on any time
// grid. The independent oracle is an adaptive embedded Dormand-Prince 5(4)
// integrator of the raw equations of motion. Being explicit, the oracle is
// stability-limited to steps ~1/||A||, so callers compare against it on
// stiffness-limited windows; the timescale spread reaches ~nbar^2 (gamma/delta)^2.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "vsys/core.hpp"
#include "vsys/errors.hpp"
#include "vsys/generator.hpp"
#include "vsys/spectral.hpp"

namespace vsys {

namespace detail {

// Complex 3x3 linear solve (partial pivoting).
inline bool solve3c(std::array<std::array<Complex, 3>, 3> m, std::array<Complex, 3> b,
                    std::array<Complex, 3>& x) {
    std::array<int, 3> idx = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(m[idx[row]][col]) > std::abs(m[idx[best]][col])) best = row;
        std::swap(idx[col], idx[best]);
        const Complex piv = m[idx[col]][col];
        if (std::abs(piv) == 0.0) return false;
        for (int row = col + 1; row < 3; ++row) {
            const Complex f = m[idx[row]][col] / piv;
            if (f == Complex(0.0)) continue;
            for (int k = col; k < 3; ++k) m[idx[row]][k] -= f * m[idx[col]][k];
            b[idx[row]] -= f * b[idx[col]];
        }
    }
    for (int col = 2; col >= 0; --col) {
        Complex s = b[idx[col]];
        for (int k = col + 1; k < 3; ++k) s -= m[idx[col]][k] * x[k];
        x[col] = s / m[idx[col]][col];
    }
    return true;
}

struct EigenBasis {
    std::array<Complex, 3> lambdas;
    std::array<std::array<Complex, 3>, 3> vecs;  // vecs[k] = k-th eigenvector
};

// Eigenbasis for propagation. The closed-form path covers almost everything;
// near-defective input first retries with a split splitting, then falls back
// to a Schur-type numeric decomposition of a diagonally jittered matrix.
inline EigenBasis propagation_basis(const VParams& params) {
    const Generator gen = build(params);
    const double scale = gen.norm_inf();
    const auto basis_ok = [&](const EigenBasis& basis) {
        double colnorm = 1.0;
        Mat3c m;
        for (int k = 0; k < 3; ++k) {
            if (eigen_residual(gen, basis.lambdas[k], basis.vecs[k]) > 1e-8 * scale) return false;
            double n = 0.0;
            for (int i = 0; i < 3; ++i) {
                m.m[i][k] = basis.vecs[k][i];
                n += std::norm(basis.vecs[k][i]);
            }
            colnorm *= std::sqrt(n);
        }
        return std::abs(m.det()) >= 1e-6 * colnorm;
    };
    const auto try_params = [&](const VParams& q) {
        const Spectrum sp = eigenvalues_cardano(q);
        EigenBasis basis;
        for (int k = 0; k < 3; ++k) {
            basis.lambdas[k] = sp.lambdas[k];
            for (int i = 0; i < 3; ++i) basis.vecs[k][i] = sp.eigvecs.m[i][k];
        }
        return basis;
    };
    const EigenBasis basis = try_params(params);
    if (basis_ok(basis)) return basis;
    VParams nudged = params;
    nudged.delta += 1e-10 * params.gamma;
    const EigenBasis basis2 = try_params(nudged);
    if (basis_ok(basis2)) return basis2;
    // defective generator: jitter the diagonal to split the degenerate pair
    Eigen::Matrix3d a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = gen.a_matrix[i][j];
    for (int i = 0; i < 3; ++i) a(i, i) += (i + 1) * 1e-12 * scale;
    Eigen::EigenSolver<Eigen::Matrix3d> solver(a, true);
    EigenBasis out;
    for (int k = 0; k < 3; ++k) {
        out.lambdas[k] = solver.eigenvalues()(k);
        for (int i = 0; i < 3; ++i) out.vecs[k][i] = solver.eigenvectors()(i, k);
    }
    return out;
}

inline void check_times(const std::vector<double>& times) {
    if (times.empty()) throw DomainError("propagate: empty time grid");
    if (times.front() < 0.0) throw DomainError("propagate: times must be >= 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw DomainError("propagate: times must increase");
}

} // namespace detail

// Closed-form Duhamel propagation on an arbitrary time grid.
inline Trajectory propagate_exact(const VParams& params, const StateVector& x0,
                                  const std::vector<double>& times) {
    const VParams q = validate(params);
    detail::check_times(times);
    const StateVector ss = steady_state(q);  // throws SingularGenerator when A is not invertible
    const auto basis = detail::propagation_basis(q);
    std::array<std::array<Complex, 3>, 3> m;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) m[i][k] = basis.vecs[k][i];
    const std::array<Complex, 3> rhs = {Complex(x0.rho_aa - ss.rho_aa),
                                        Complex(x0.rho_ab_re - ss.rho_ab_re),
                                        Complex(x0.rho_ab_im - ss.rho_ab_im)};
    std::array<Complex, 3> c{};
    if (!detail::solve3c(m, rhs, c))
        throw DegenerateEigenvector("propagate_exact: eigenvector matrix is singular");
    Trajectory out;
    out.method = TrajectoryMethod::ExactDuhamel;
    out.times = times;
    out.states.reserve(times.size());
    for (const double t : times) {
        std::array<Complex, 3> acc = {ss.rho_aa, ss.rho_ab_re, ss.rho_ab_im};
        for (int k = 0; k < 3; ++k) {
            const Complex ph = c[k] * std::exp(basis.lambdas[k] * t);
            for (int i = 0; i < 3; ++i) acc[i] += ph * basis.vecs[k][i];
        }
        StateVector s;
        s.rho_aa = acc[0].real();
        s.rho_ab_re = acc[1].real();
        s.rho_ab_im = acc[2].real();
        for (int i = 0; i < 3; ++i)
            out.max_imag_residue = std::max(out.max_imag_residue, std::abs(acc[i].imag()));
        out.states.push_back(s);
    }
    return out;
}

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double dp_b4[7] = {5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

using State3 = std::array<double, 3>;

inline State3 rhs_of(const Generator& gen, const State3& x) {
    State3 dxdt;
    for (int i = 0; i < 3; ++i)
        dxdt[i] = gen.a_matrix[i][0] * x[0] + gen.a_matrix[i][1] * x[1] +
                  gen.a_matrix[i][2] * x[2] + gen.drive[i];
    return dxdt;
}

} // namespace detail

// Adaptive embedded Dormand-Prince 5(4) integration of dx/dt = A x + d,
// recording the state at every grid time (steps land on grid points exactly).
// Step control: dt starts at the fast scale 1/||A|| (the stiff end of the
// stability window) and the accept/reject loop keeps the embedded error below
// rel_tol; on stiff input dt saturates at the stability boundary, which is why
// long spans carry a step budget instead of silently running forever.
inline Trajectory propagate_stepped(const VParams& params, const StateVector& x0,
                                    const std::vector<double>& times, double rel_tol,
                                    long max_steps = 50'000'000L) {
    const VParams q = validate(params);
    detail::check_times(times);
    if (!(rel_tol >= 1e-12 && rel_tol <= 1e-3))
        throw DomainError("propagate_stepped: rel_tol must lie in [1e-12, 1e-3]");
    const Generator gen = build(q);
    const double fast_scale = std::max(gen.norm_inf(), q.gamma);
    detail::State3 x = {x0.rho_aa, x0.rho_ab_re, x0.rho_ab_im};
    double t = 0.0;
    double dt = 1e-2 / fast_scale;
    long steps = 0;
    int rejects_in_a_row = 0;
    detail::State3 k[7];
    k[0] = detail::rhs_of(gen, x);  // FSAL
    Trajectory out;
    out.method = TrajectoryMethod::Stepped;
    out.times = times;
    out.states.reserve(times.size());
    for (const double target : times) {
        while (t < target) {
            const double h = std::min(dt, target - t);
            detail::State3 stage;
            for (int s = 1; s < 7; ++s) {
                for (int i = 0; i < 3; ++i) {
                    double acc = x[i];
                    for (int j = 0; j < s; ++j) acc += h * detail::dp_a[s][j] * k[j][i];
                    stage[i] = acc;
                }
                k[s] = detail::rhs_of(gen, stage);
            }
            // stage 7 value (the 5th-order solution) is `stage`; k[6] = f(stage)
            double err = 0.0;
            for (int i = 0; i < 3; ++i) {
                double e4 = x[i];
                for (int j = 0; j < 7; ++j) e4 += h * detail::dp_b4[j] * k[j][i];
                const double scale = rel_tol * (1.0 + std::max(std::abs(x[i]), std::abs(stage[i])));
                err = std::max(err, std::abs(stage[i] - e4) / scale);
            }
            if (++steps > max_steps)
                throw StepFailure("propagate_stepped: step budget exhausted at t = " +
                                      std::to_string(t) + " (stiff span; shrink the window)",
                                  t);
            if (err <= 1.0) {
                t += h;
                x = stage;
                k[0] = k[6];
                rejects_in_a_row = 0;
                if (h == dt)  // only grow when the step was not target-clamped
                    dt *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
            } else {
                dt = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (++rejects_in_a_row > 200 || !(dt > 1e-15 * std::max(t, 1.0 / fast_scale)))
                    throw StepFailure("propagate_stepped: step size underflow at t = " +
                                          std::to_string(t),
                                      t);
            }
        }
        out.states.push_back(StateVector{x[0], x[1], x[2]});
    }
    return out;
}

// Convenience overload on the default logarithmic grid up to t_end.
inline Trajectory propagate_stepped(const VParams& params, const StateVector& x0, double t_end,
                                    double rel_tol) {
    if (!(t_end > 0.0)) throw DomainError("propagate_stepped: t_end must be > 0");
    const double t_min = std::min(1e-3 / (params.gamma * std::max(1.0, params.nbar)), t_end / 10.0);
    return propagate_stepped(params, x0, log_time_grid(t_min, t_end), rel_tol);
}

// Largest window the explicit oracle can cover in the given step budget;
// callers clip their comparison spans with this (stiffness-limited windows).
inline double stepped_window_limit(const VParams& params, long step_budget = 200'000L) {
    const Generator gen = build(params);
    return 2.0 * double(step_budget) / gen.norm_inf();
}

} // namespace vsys

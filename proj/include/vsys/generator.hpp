// generator.hpp — Coefficient matrix and drive vector of the V-system master equation
//
// The reduced state x = [rho_aa, Re rho_ab, Im rho_ab] obeys dx/dt = A x + d
// with constant A and d once the bath is switched on at t = 0.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "vsys/core.hpp"
#include "vsys/errors.hpp"

namespace vsys {

struct Generator {
    std::array<std::array<double, 3>, 3> a_matrix{};
    std::array<double, 3> drive{};

    double norm_inf() const {
        double n = 0.0;
        for (const auto& row : a_matrix)
            n = std::max(n, std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]));
        return n;
    }

    double det() const {
        const auto& a = a_matrix;
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    }
};

inline Generator build(const VParams& params) {
    const VParams q = validate(params);
    const double g = q.gamma, r = q.r(), p = q.p, delta = q.delta;
    Generator out;
    out.a_matrix = {{{-(3 * r + g), -p * (r + g), 0.0},
                     {-p * (3 * r + g), -(r + g), delta},
                     {0.0, -delta, -(r + g)}}};
    out.drive = {r, p * r, 0.0};
    return out;
}

namespace detail {

// 3x3 linear solve (partial pivoting). Returns false on a vanishing pivot.
inline bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> b,
                   std::array<double, 3>& x, double pivot_tol) {
    std::array<int, 3> idx = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(m[idx[row]][col]) > std::abs(m[idx[best]][col])) best = row;
        std::swap(idx[col], idx[best]);
        const double piv = m[idx[col]][col];
        if (std::abs(piv) <= pivot_tol) return false;
        for (int row = col + 1; row < 3; ++row) {
            const double f = m[idx[row]][col] / piv;
            if (f == 0.0) continue;
            for (int k = col; k < 3; ++k) m[idx[row]][k] -= f * m[idx[col]][k];
            b[idx[row]] -= f * b[idx[col]];
        }
    }
    for (int col = 2; col >= 0; --col) {
        double s = b[idx[col]];
        for (int k = col + 1; k < 3; ++k) s -= m[idx[col]][k] * x[k];
        x[col] = s / m[idx[col]][col];
    }
    return true;
}

} // namespace detail

// Fixed point -A^{-1} d of the driven evolution.
inline StateVector steady_state(const VParams& params) {
    const Generator gen = build(params);
    const double scale = gen.norm_inf();
    if (std::abs(gen.det()) <= 1e-13 * scale * scale * scale)
        throw SingularGenerator("steady_state: coefficient matrix is singular "
                                "(p = 1 with delta = 0, or gamma = 0)");
    std::array<double, 3> rhs = {-gen.drive[0], -gen.drive[1], -gen.drive[2]};
    std::array<double, 3> x{};
    if (!detail::solve3(gen.a_matrix, rhs, x, 1e-300))
        throw SingularGenerator("steady_state: pivot underflow");
    return StateVector{x[0], x[1], x[2]};
}

enum class TrajectoryMethod {
    ExactDuhamel,
    Stepped,
    AnalyticOverdamped,
    AnalyticSubcritical,
    AnalyticSmallDelta,
    AnalyticP1,
};

inline const char* to_string(TrajectoryMethod m) {
    switch (m) {
        case TrajectoryMethod::ExactDuhamel: return "exact";
        case TrajectoryMethod::Stepped: return "stepped";
        case TrajectoryMethod::AnalyticOverdamped: return "analytic-overdamped";
        case TrajectoryMethod::AnalyticSubcritical: return "analytic-subcritical";
        case TrajectoryMethod::AnalyticSmallDelta: return "analytic-small-delta";
        case TrajectoryMethod::AnalyticP1: return "analytic-p1";
    }
    return "?";
}

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
    TrajectoryMethod method{TrajectoryMethod::ExactDuhamel};
    double max_imag_residue{0.0};  // ExactDuhamel diagnostic
};

// Logarithmic time grid, the default sampling for dynamics spanning many decades.
inline std::vector<double> log_time_grid(double t_min, double t_max, int points_per_decade = 64) {
    if (!(t_min > 0.0 && t_max > t_min)) throw DomainError("log_time_grid: need 0 < t_min < t_max");
    const double decades = std::log10(t_max / t_min);
    const int n = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = t_min * std::pow(t_max / t_min, double(i) / (n - 1));
    out.back() = t_max;
    return out;
}

} // namespace vsys

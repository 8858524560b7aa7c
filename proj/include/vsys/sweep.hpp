// sweep.hpp — Parallel evaluation of regime/spectral quantities over 2-D parameter grids
//
// Cells are independent closed-form evaluations, so the sweep partitions rows
// across threads into a preallocated row-major buffer and emits in grid order:
// output is byte-identical for any worker count. Per-cell failures (validity
// windows, wrong regime) degrade to NaN with the error recorded, never aborting
// the sweep — phase maps intentionally cross validity boundaries.

#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "vsys/core.hpp"
#include "vsys/errors.hpp"
#include "vsys/regime.hpp"
#include "vsys/spectral.hpp"

namespace vsys {

enum class SweepQuantity { Discriminant, Regime, Lambda2Mag, Lifetime, SlopeF, Epsilon };

inline const char* to_string(SweepQuantity q) {
    switch (q) {
        case SweepQuantity::Discriminant: return "discriminant";
        case SweepQuantity::Regime: return "regime";
        case SweepQuantity::Lambda2Mag: return "lambda2mag";
        case SweepQuantity::Lifetime: return "lifetime";
        case SweepQuantity::SlopeF: return "slopef";
        case SweepQuantity::Epsilon: return "epsilon";
    }
    return "?";
}

enum class AxisName { Nbar, DeltaOverGamma, P };

inline const char* to_string(AxisName a) {
    switch (a) {
        case AxisName::Nbar: return "nbar";
        case AxisName::DeltaOverGamma: return "delta_over_gamma";
        case AxisName::P: return "p";
    }
    return "?";
}

struct AxisSpec {
    AxisName name{AxisName::Nbar};
    double min{0.0};
    double max{0.0};
    int points{0};
    bool log_spacing{true};

    std::vector<double> values() const {
        std::vector<double> out(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i) {
            const double f = points == 1 ? 0.0 : double(i) / (points - 1);
            out[static_cast<std::size_t>(i)] =
                log_spacing ? min * std::pow(max / min, f) : min + f * (max - min);
        }
        return out;
    }
};

struct GridSpec {
    AxisSpec axis1, axis2;
    VParams fixed{};  // parameters not owned by an axis
    SweepQuantity quantity{SweepQuantity::Regime};
};

struct SweepRow {
    double a1, a2, value;
    std::string error;  // empty on success
};

struct SweepTable {
    GridSpec spec;
    std::vector<SweepRow> rows;  // row-major: axis1 outer, axis2 inner
};

inline int default_worker_count() {
    if (const char* env = std::getenv("VSYS_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

inline void validate_axis(const AxisSpec& axis) {
    if (axis.points < 2) throw DomainError("sweep: axis needs at least 2 points");
    if (!(axis.min < axis.max)) throw DomainError("sweep: axis needs min < max");
    if (axis.log_spacing && !(axis.min > 0.0))
        throw DomainError("sweep: log spacing needs min > 0");
}

inline void apply_axis(VParams& params, AxisName name, double value) {
    switch (name) {
        case AxisName::Nbar: params.nbar = value; break;
        case AxisName::DeltaOverGamma: params.delta = value * params.gamma; break;
        case AxisName::P: params.p = value; break;
    }
}

inline double eval_quantity(SweepQuantity q, const VParams& params) {
    switch (q) {
        case SweepQuantity::Discriminant:
            return discriminant_direct(validate(params));
        case SweepQuantity::Regime: {
            switch (classify(params).tag) {
                case RegimeTag::Overdamped: return -1.0;
                case RegimeTag::Critical: return 0.0;
                case RegimeTag::Underdamped: return 1.0;
            }
            return std::numeric_limits<double>::quiet_NaN();
        }
        case SweepQuantity::Lambda2Mag:
            return std::abs(eigenvalues_cardano(params).lambdas[1]);
        case SweepQuantity::Lifetime:
            return coherence_lifetime(params).tau_exact;
        case SweepQuantity::SlopeF:
            return slope_f(params.p);
        case SweepQuantity::Epsilon:
            return 1.0 - critical_p(params.nbar, params.delta_over_gamma());
    }
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace detail

inline SweepTable run(const GridSpec& grid, int workers = default_worker_count()) {
    detail::validate_axis(grid.axis1);
    detail::validate_axis(grid.axis2);
    if (grid.axis1.name == grid.axis2.name) throw DomainError("sweep: axes must differ");
    if (workers < 1) workers = 1;
    const auto v1 = grid.axis1.values();
    const auto v2 = grid.axis2.values();
    SweepTable table;
    table.spec = grid;
    table.rows.resize(v1.size() * v2.size());
    const auto fill_row = [&](std::size_t i) {
        for (std::size_t j = 0; j < v2.size(); ++j) {
            SweepRow& cell = table.rows[i * v2.size() + j];
            cell.a1 = v1[i];
            cell.a2 = v2[j];
            VParams params = grid.fixed;
            detail::apply_axis(params, grid.axis1.name, v1[i]);
            detail::apply_axis(params, grid.axis2.name, v2[j]);
            try {
                cell.value = detail::eval_quantity(grid.quantity, params);
            } catch (const std::exception& ex) {
                cell.value = std::numeric_limits<double>::quiet_NaN();
                cell.error = ex.what();
            }
        }
    };
    if (workers == 1) {
        for (std::size_t i = 0; i < v1.size(); ++i) fill_row(i);
        return table;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = static_cast<std::size_t>(w); i < v1.size();
                 i += static_cast<std::size_t>(workers))
                fill_row(i);
        });
    }
    for (auto& th : pool) th.join();
    return table;
}

// |z_jk x^k| magnitudes (j = 1..3, k = 0..2) across an alignment grid, the
// term-balance picture behind the critical alignment.
struct ZTermTable {
    std::vector<double> p;
    std::vector<std::array<std::array<double, 3>, 3>> mag;  // mag[i][j][k]
};

inline ZTermTable zjk_magnitudes(const std::vector<double>& p_grid, double nbar,
                                 double delta_over_gamma) {
    ZTermTable out;
    out.p = p_grid;
    out.mag.resize(p_grid.size());
    const double x = 1.0 / nbar;
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        VParams params;
        params.p = p_grid[i];
        params.nbar = nbar;
        params.delta = delta_over_gamma;
        try {
            const ZCoeffs zc = z_expansion(params);
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    out.mag[i][j][k] = std::abs(zc.z[j][k]) * std::pow(x, k);
        } catch (const std::exception&) {
            for (auto& row : out.mag[i])
                row.fill(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return out;
}

} // namespace vsys

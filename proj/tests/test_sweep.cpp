#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <sstream>

#include "vsys/io.hpp"
#include "vsys/spectral.hpp"
#include "vsys/sweep.hpp"

using namespace vsys;

namespace {

GridSpec regime_grid(int points) {
    GridSpec grid;
    grid.quantity = SweepQuantity::Regime;
    grid.axis1 = {AxisName::Nbar, 10.0, 1e4, points, true};
    grid.axis2 = {AxisName::DeltaOverGamma, 1.0, 1e4, points, true};
    grid.fixed = VParams{1.0, 0.0, 1.0, 0.0};
    return grid;
}

std::string serialize(const SweepTable& table) {
    std::ostringstream os;
    for (const SweepRow& row : table.rows)
        os << format_double(row.a1) << ',' << format_double(row.a2) << ','
           << format_double(row.value) << ',' << row.error << '\n';
    return os.str();
}

} // namespace

TEST(Sweep, DeterministicAcrossWorkerCounts) {
    const GridSpec grid = regime_grid(40);
    const std::string one = serialize(run(grid, 1));
    EXPECT_EQ(one, serialize(run(grid, 2)));
    EXPECT_EQ(one, serialize(run(grid, 8)));
}

TEST(Sweep, RegimeFrontierTracksBoundaryLine) {
    // along each nbar row the under/overdamped frontier sits within one grid
    // cell of delta/gamma = 0.6 nbar
    const int points = 100;
    const GridSpec grid = regime_grid(points);
    const SweepTable table = run(grid);
    const double cell_factor = std::pow(1e4 / 1.0, 1.0 / (points - 1));
    for (int i = 0; i < points; ++i) {
        const double nbar = table.rows[i * points].a1;
        if (0.6 * nbar < 2.0 || 0.6 * nbar > 0.5e4) continue;  // frontier outside the grid
        double frontier = -1.0;
        for (int j = 0; j + 1 < points; ++j) {
            const SweepRow& lo = table.rows[i * points + j];
            const SweepRow& hi = table.rows[i * points + j + 1];
            if (lo.value < 0.0 && hi.value > 0.0) {
                frontier = std::sqrt(lo.a2 * hi.a2);
                break;
            }
        }
        ASSERT_GT(frontier, 0.0) << "no frontier at nbar=" << nbar;
        EXPECT_LT(frontier / (0.6 * nbar), cell_factor);
        EXPECT_GT(frontier / (0.6 * nbar), 1.0 / cell_factor);
    }
}

TEST(Sweep, EpsilonSpanAndErrors) {
    GridSpec grid;
    grid.quantity = SweepQuantity::Epsilon;
    grid.axis1 = {AxisName::DeltaOverGamma, 1e-2, 1e2, 17, true};
    grid.axis2 = {AxisName::Nbar, 50.0, 1e3, 2, true};  // first column below validity
    grid.fixed = VParams{1.0, 0.0, 1.0, 0.0};
    const SweepTable table = run(grid);
    double lo = 1e300, hi = 0.0;
    int errors = 0;
    for (const SweepRow& row : table.rows) {
        if (std::isnan(row.value)) {
            ++errors;
            EXPECT_FALSE(row.error.empty());
            continue;
        }
        lo = std::min(lo, row.value);
        hi = std::max(hi, row.value);
    }
    EXPECT_GT(errors, 0);  // nbar = 50 cells degrade to NaN, sweep never aborts
    EXPECT_LT(lo, 5e-10);
    EXPECT_GT(lo, 5e-12);
    EXPECT_GT(hi, 5e-4);
    EXPECT_LT(hi, 5e-2);
}

TEST(Sweep, SlowModeQuadraticSlope) {
    GridSpec grid;
    grid.quantity = SweepQuantity::Lambda2Mag;
    grid.axis1 = {AxisName::DeltaOverGamma, 1e-2, 1.0, 25, true};
    grid.axis2 = {AxisName::Nbar, 1e3, 2e3, 2, true};
    grid.fixed = VParams{1.0, 0.0, 1.0, 0.0};
    const SweepTable table = run(grid);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const SweepRow& row : table.rows) {
        if (row.a2 != 1e3) continue;
        const double lx = std::log(row.a1), ly = std::log(row.value);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_NEAR(slope, 2.0, 0.05);
}

TEST(Sweep, ValidatesGrid) {
    GridSpec grid = regime_grid(10);
    grid.axis2.name = AxisName::Nbar;
    EXPECT_THROW(run(grid), DomainError);
    grid = regime_grid(1);
    EXPECT_THROW(run(grid), DomainError);
    grid = regime_grid(10);
    grid.axis1.min = 0.0;
    EXPECT_THROW(run(grid), DomainError);
}

TEST(Sweep, ZTermDominanceAndCrossing) {
    std::vector<double> ps;
    for (int i = 0; i <= 320; ++i) ps.push_back(0.2 + 0.8 * i / 320.0);
    const double nbar = 1e3, y = 0.1;
    const ZTermTable table = zjk_magnitudes(ps, nbar, y);
    // constant terms dominate modes 1 and 3 everywhere
    for (std::size_t i = 0; i < ps.size(); ++i) {
        ASSERT_GT(table.mag[i][0][0], table.mag[i][0][1]);
        ASSERT_GT(table.mag[i][0][0], table.mag[i][0][2]);
        ASSERT_GT(table.mag[i][2][0], table.mag[i][2][1]);
        ASSERT_GT(table.mag[i][2][0], table.mag[i][2][2]);
    }
    // mode 2 crossing between |z20| and |z22 x^2| matches critical_p within a cell
    const double pc = critical_p(nbar, y);
    double crossing = -1.0;
    for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
        const double gap_lo = table.mag[i][1][0] - table.mag[i][1][2];
        const double gap_hi = table.mag[i + 1][1][0] - table.mag[i + 1][1][2];
        if (gap_lo > 0.0 && gap_hi <= 0.0) crossing = ps[i + 1];
    }
    ASSERT_GT(crossing, 0.0);
    EXPECT_NEAR(crossing, pc, 0.8 / 320.0 + 1e-9);
}

TEST(Sweep, ThroughputRegimeMap) {
    const auto start = std::chrono::steady_clock::now();
    const SweepTable table = run(regime_grid(200), 4);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_EQ(table.rows.size(), 200u * 200u);
    EXPECT_LT(seconds, 10.0);
}

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vsys/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code;
    std::string stdout_text;
};

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out = fs::temp_directory_path() / ("vsys_cli_" + std::to_string(counter++) + ".out");
    const std::string cmd = std::string(VSYS_CLI_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    fs::remove(out);
    return {WEXITSTATUS(rc), ss.str()};
}

std::vector<std::vector<double>> parse_csv(const std::string& text, int& header_lines) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    header_lines = 0;
    bool seen_columns = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            ++header_lines;
            continue;
        }
        if (!seen_columns) {
            seen_columns = true;  // column-name row
            continue;
        }
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            if (cell.empty())
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            else
                row.push_back(std::strtod(cell.c_str(), nullptr));
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace

TEST(Cli, ClassifyRegimes) {
    CliResult res = run_cli("classify --delta 10 --p 1 --nbar 1000");
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_NE(res.stdout_text.find("overdamped"), std::string::npos);
    EXPECT_NE(res.stdout_text.find("delta/(nbar*gamma) = 0.01"), std::string::npos);
    res = run_cli("classify --delta 1000 --p 1 --nbar 10");
    EXPECT_NE(res.stdout_text.find("underdamped"), std::string::npos);
    res = run_cli("classify --delta 10 --p 1 --nbar 1000 --json");
    EXPECT_NE(res.stdout_text.find("\"regime\""), std::string::npos);
}

TEST(Cli, SimulateRateEquationLimit) {
    const CliResult res = run_cli("simulate --p 0 --nbar 10 --delta 1 --t-max 5 --method exact");
    EXPECT_EQ(res.exit_code, 0);
    int headers = 0;
    const auto rows = parse_csv(res.stdout_text, headers);
    EXPECT_GE(headers, 5);  // version + gamma/delta/p/nbar + method
    ASSERT_FALSE(rows.empty());
    for (const auto& row : rows) {
        ASSERT_EQ(row.size(), 6u);
        EXPECT_EQ(row[4], 0.0);  // re rho_ab
        EXPECT_EQ(row[5], 0.0);  // im rho_ab
        EXPECT_NEAR(row[1] + row[1] + row[3], 1.0, 1e-12);  // trace
    }
}

TEST(Cli, SimulateCsvRoundTrip) {
    const std::string args = "simulate --p 0.9 --nbar 1000 --delta 10 --t-max 1 --points 40 --method exact";
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    EXPECT_EQ(a.exit_code, 0);
    EXPECT_EQ(a.stdout_text, b.stdout_text);  // byte identical across runs
    int headers = 0;
    for (const auto& row : parse_csv(a.stdout_text, headers))
        for (double v : row) {
            // shortest round-trip formatting reparses to the same double
            EXPECT_EQ(std::strtod(vsys::format_double(v).c_str(), nullptr), v);
        }
}

TEST(Cli, SimulateAnalyticAutoSelectsBranch) {
    const CliResult res =
        run_cli("simulate --p 0.9 --nbar 1000 --delta 0.1 --t-max 0.5 --method analytic-auto");
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_NE(res.stdout_text.find("# method = analytic-small-delta"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    // underdamped point: closed-form branch unavailable
    CliResult res = run_cli("simulate --p 1 --nbar 10 --delta 1000 --t-max 1 --method analytic-overdamped");
    EXPECT_EQ(res.exit_code, 3);
    // invalid arguments
    res = run_cli("simulate --p 1.7 --nbar 10 --delta 1 --t-max 1");
    EXPECT_EQ(res.exit_code, 2);
    res = run_cli("simulate --no-such-flag 3");
    EXPECT_EQ(res.exit_code, 2);
    res = run_cli("lifetime --p 1 --nbar 10 --delta 1000");
    EXPECT_EQ(res.exit_code, 3);
}

TEST(Cli, LifetimeReportsFormulaAndBranch) {
    const CliResult res = run_cli("lifetime --p 1 --nbar 1000 --delta 10");
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_NE(res.stdout_text.find("tau_formula = 13.4"), std::string::npos);
    EXPECT_NE(res.stdout_text.find("branch = supercritical"), std::string::npos);
}

TEST(Cli, SpectrumMethodsAgree) {
    const CliResult a = run_cli("spectrum --p 1 --nbar 1000 --delta 10 --method cardano");
    const CliResult b = run_cli("spectrum --p 1 --nbar 1000 --delta 10 --method numeric");
    EXPECT_EQ(a.exit_code, 0);
    EXPECT_EQ(b.exit_code, 0);
    int ha = 0, hb = 0;
    const auto ra = parse_csv(a.stdout_text, ha);
    const auto rb = parse_csv(b.stdout_text, hb);
    ASSERT_EQ(ra.size(), 3u);
    ASSERT_EQ(rb.size(), 3u);
    // compare as sets of real parts (overdamped point)
    std::vector<double> va, vb;
    for (int i = 0; i < 3; ++i) {
        va.push_back(ra[i][1]);
        vb.push_back(rb[i][1]);
    }
    std::sort(va.begin(), va.end());
    std::sort(vb.begin(), vb.end());
    for (int i = 0; i < 3; ++i) ASSERT_NEAR(va[i], vb[i], 1e-9 * std::abs(vb[0]));
}

TEST(Cli, CoeffsAtAlignedLimit) {
    const CliResult res = run_cli("coeffs --p 1");
    EXPECT_EQ(res.exit_code, 0);
    int headers = 0;
    const auto rows = parse_csv(res.stdout_text, headers);
    ASSERT_EQ(rows.size(), 1u);
    // columns: p, A1..A6, B1..B6, C1..C6, T1, T2, m1..m16
    EXPECT_NEAR(rows[0][19], -4.0, 1e-9);   // T1
    EXPECT_NEAR(rows[0][20], 1.3333, 1e-3); // T2
}

TEST(Cli, ScanRegimeDataset) {
    const CliResult res = run_cli(
        "scan --quantity regime --p 1 --axis1 nbar:10:10000:20:log --axis2 delta:1:10000:20:log");
    EXPECT_EQ(res.exit_code, 0);
    int headers = 0;
    const auto rows = parse_csv(res.stdout_text, headers);
    EXPECT_EQ(rows.size(), 400u);
}

TEST(Cli, ReproduceFigurePresets) {
    const fs::path dir = fs::temp_directory_path() / "vsys_fig_test";
    fs::remove_all(dir);
    CliResult res = run_cli("reproduce-fig --fig 4a --out-dir " + dir.string());
    EXPECT_EQ(res.exit_code, 0);
    ASSERT_TRUE(fs::exists(dir / "fig4a.csv"));
    ASSERT_TRUE(fs::exists(dir / "fig4a.json"));
    std::ifstream in(dir / "fig4a.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    int headers = 0;
    const auto rows = parse_csv(ss.str(), headers);
    ASSERT_EQ(rows.size(), 501u);
    EXPECT_NEAR(rows.back()[1], 0.5908481180, 1e-9);  // f(1)
    EXPECT_DOUBLE_EQ(rows.front()[1], 0.0);           // f(0)

    res = run_cli("reproduce-fig --fig 9 --out-dir " + dir.string());
    EXPECT_EQ(res.exit_code, 0);
    for (const char panel : {'a', 'b', 'c', 'd', 'e', 'f'})
        EXPECT_TRUE(fs::exists(dir / (std::string("fig9") + panel + ".csv")));
    EXPECT_TRUE(fs::exists(dir / "fig9.json"));
    fs::remove_all(dir);
}

// vsys_cli.cpp — Command-line front end: simulation, classification, spectral
// analysis, lifetimes, parameter sweeps and figure-style dataset presets.
// Emits CSV (with '#' metadata headers) or JSON; everything is deterministic.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vsys/vsys.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vsys;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_condition = 3;
constexpr int exit_preset = 4;

struct ParamFlags {
    double gamma = 1.0;
    double delta = 0.0;
    double p = 0.0;
    double nbar = 0.0;

    VParams params() const { return VParams{gamma, delta, p, nbar}; }
};

void add_param_flags(CLI::App* cmd, ParamFlags& f) {
    cmd->add_option("--gamma", f.gamma, "spontaneous decay rate (default 1: all rates in units of gamma)");
    cmd->add_option("--delta", f.delta, "excited-state splitting");
    cmd->add_option("--p", f.p, "transition dipole alignment in [0,1]");
    cmd->add_option("--nbar", f.nbar, "thermal occupation number");
}

std::unique_ptr<std::ostream> open_output(const std::string& path, std::ostream*& os) {
    if (path.empty() || path == "-") {
        os = &std::cout;
        return nullptr;
    }
    auto file = std::make_unique<std::ofstream>(path);
    if (!*file) throw DomainError("cannot open output file: " + path);
    os = file.get();
    return file;
}

// "name:min:max:points[:log|lin]"
AxisSpec parse_axis(const std::string& text) {
    AxisSpec axis;
    std::stringstream ss(text);
    std::string name, smin, smax, spoints, sspacing = "log";
    if (!std::getline(ss, name, ':') || !std::getline(ss, smin, ':') ||
        !std::getline(ss, smax, ':') || !std::getline(ss, spoints, ':'))
        throw DomainError("axis spec must be name:min:max:points[:log|lin]");
    std::getline(ss, sspacing, ':');
    if (name == "nbar")
        axis.name = AxisName::Nbar;
    else if (name == "delta" || name == "delta_over_gamma")
        axis.name = AxisName::DeltaOverGamma;
    else if (name == "p")
        axis.name = AxisName::P;
    else
        throw DomainError("axis name must be nbar, delta or p");
    axis.min = std::stod(smin);
    axis.max = std::stod(smax);
    axis.points = std::stoi(spoints);
    axis.log_spacing = sspacing != "lin";
    return axis;
}

SweepQuantity parse_quantity(const std::string& name) {
    if (name == "discriminant") return SweepQuantity::Discriminant;
    if (name == "regime") return SweepQuantity::Regime;
    if (name == "lambda2mag") return SweepQuantity::Lambda2Mag;
    if (name == "lifetime") return SweepQuantity::Lifetime;
    if (name == "slopef") return SweepQuantity::SlopeF;
    if (name == "epsilon") return SweepQuantity::Epsilon;
    throw DomainError("unknown quantity: " + name);
}

std::vector<double> linear_grid(double lo, double hi, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * double(i) / (n - 1);
    return out;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
    ParamFlags pf;
    double t_min = 0.0;  // 0 = auto
    double t_max = 0.0;  // 0 = auto (10 x slowest timescale)
    int points = 0;      // 0 = auto (64 per decade)
    double rel_tol = 1e-8;
    std::string method = "exact";
    std::string out;
};

Trajectory analytic_auto(const VParams& params, const std::vector<double>& times,
                         std::string& method_note) {
    const bool overdamped = classify(params).tag != RegimeTag::Underdamped;
    const bool in_window = detail::in_expansion_window(params) && params.p > 0.1;
    Trajectory tr;
    tr.times = times;
    tr.states.reserve(times.size());
    if (overdamped && in_window) {
        const double y = params.delta_over_gamma();
        if (y <= 0.2) {
            for (double t : times) tr.states.push_back(rho_small_delta(params, t));
            const bool p1 = params.p >= 1.0 - 1e-6 && detail::is_supercritical(params);
            tr.method = p1 ? TrajectoryMethod::AnalyticP1 : TrajectoryMethod::AnalyticSmallDelta;
            method_note = to_string(tr.method);
            return tr;
        }
        if (detail::is_supercritical(params)) {
            for (double t : times) tr.states.push_back(rho_supercritical(params, t));
            tr.method = TrajectoryMethod::AnalyticOverdamped;
        } else {
            for (double t : times) tr.states.push_back(rho_subcritical(params, t));
            tr.method = TrajectoryMethod::AnalyticSubcritical;
        }
        method_note = to_string(tr.method);
        return tr;
    }
    // no closed-form branch applies: exact eigenvector form of the same solution
    const Spectrum sp = eigenvalues_cardano(params);
    for (double t : times) tr.states.push_back(dm_general(params, sp, t));
    tr.method = TrajectoryMethod::ExactDuhamel;
    method_note = "analytic-auto(dm-general)";
    return tr;
}

int run_simulate(const SimulateOpts& opt) {
    const VParams params = validate(opt.pf.params());
    double t_max = opt.t_max;
    if (t_max <= 0.0) t_max = 10.0 * slowest_timescale(params);
    double t_min = opt.t_min;
    if (t_min <= 0.0) t_min = std::min(1e-3 / (params.gamma * std::max(1.0, params.nbar)), t_max / 1e6);
    std::vector<double> times;
    if (opt.points > 0) {
        times.resize(opt.points);
        for (int i = 0; i < opt.points; ++i)
            times[i] = t_min * std::pow(t_max / t_min, double(i) / std::max(1, opt.points - 1));
        times.back() = t_max;
    } else {
        times = log_time_grid(t_min, t_max);
    }

    std::string method_note = opt.method;
    Trajectory tr;
    if (opt.method == "exact") {
        tr = propagate_exact(params, StateVector{}, times);
    } else if (opt.method == "stepped") {
        tr = propagate_stepped(params, StateVector{}, times, opt.rel_tol);
    } else if (opt.method == "analytic-auto") {
        tr = analytic_auto(params, times, method_note);
    } else if (opt.method == "analytic-overdamped") {
        tr.times = times;
        for (double t : times) tr.states.push_back(rho_supercritical(params, t));
        tr.method = TrajectoryMethod::AnalyticOverdamped;
    } else if (opt.method == "analytic-subcritical") {
        tr.times = times;
        for (double t : times) tr.states.push_back(rho_subcritical(params, t));
        tr.method = TrajectoryMethod::AnalyticSubcritical;
    } else if (opt.method == "analytic-small-delta") {
        tr.times = times;
        for (double t : times) tr.states.push_back(rho_small_delta(params, t));
        tr.method = TrajectoryMethod::AnalyticSmallDelta;
    } else if (opt.method == "analytic-p1") {
        tr.times = times;
        for (double t : times)
            tr.states.push_back(rho_small_delta(params, t, SmallDeltaBranch::SupercriticalP1));
        tr.method = TrajectoryMethod::AnalyticP1;
    } else {
        throw DomainError("unknown --method: " + opt.method);
    }
    if ((opt.method == "analytic-small-delta" || opt.method == "analytic-p1") &&
        small_delta_marginal(params))
        std::cerr << "warning: delta/gamma in (0.1, 0.2]; small-splitting forms degrade "
                     "quadratically\n";

    std::ostream* os = nullptr;
    auto file = open_output(opt.out, os);
    CsvMetadata meta;
    meta.add_params(params);
    meta.add("method", method_note);
    write_csv_header(*os, meta, {"t", "rho_aa", "rho_bb", "rho_cc", "re_rho_ab", "im_rho_ab"});
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const StateVector& s = tr.states[i];
        write_csv_row(*os, {tr.times[i], s.rho_aa, s.rho_bb(), s.rho_cc(), s.rho_ab_re,
                            s.rho_ab_im});
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------
// classify / spectrum / lifetime

int run_classify(const ParamFlags& pf, bool as_json) {
    const VParams params = validate(pf.params());
    const Regime regime = classify(params);
    const double ratio = params.delta_over_gamma() / params.nbar;
    const double fp = slope_f(params.p);
    if (as_json) {
        json j = {{"regime", to_string(regime.tag)},
                  {"discriminant", regime.discriminant_value},
                  {"delta_over_nbar_gamma", ratio},
                  {"f_of_p", fp}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << to_string(regime.tag) << "\n"
                  << "D = " << format_double(regime.discriminant_value) << "\n"
                  << "delta/(nbar*gamma) = " << format_double(ratio) << "\n"
                  << "f(p) = " << format_double(fp) << "\n";
    }
    return exit_ok;
}

int run_spectrum(const ParamFlags& pf, const std::string& method, const std::string& out,
                 bool as_json) {
    const VParams params = validate(pf.params());
    Spectrum sp;
    if (method == "cardano")
        sp = eigenvalues_cardano(params);
    else if (method == "numeric")
        sp = eigenvalues_numeric(params);
    else if (method == "expansion")
        sp = eigenvalues_expansion(params);
    else
        throw DomainError("unknown --method: " + method);
    std::ostream* os = nullptr;
    auto file = open_output(out, os);
    if (as_json) {
        json j;
        j["method"] = method;
        for (int k = 0; k < 3; ++k) {
            json lam = {{"re", sp.lambdas[k].real()}, {"im", sp.lambdas[k].imag()}};
            json vec = json::array();
            for (int i = 0; i < 3; ++i)
                vec.push_back({{"re", sp.eigvecs.m[i][k].real()}, {"im", sp.eigvecs.m[i][k].imag()}});
            j["modes"].push_back({{"lambda", lam}, {"eigenvector", vec}});
        }
        *os << j.dump(2) << "\n";
        return exit_ok;
    }
    CsvMetadata meta;
    meta.add_params(params);
    meta.add("method", method);
    write_csv_header(*os, meta,
                     {"mode", "lambda_re", "lambda_im", "v1_re", "v1_im", "v2_re", "v2_im",
                      "v3_re", "v3_im"});
    for (int k = 0; k < 3; ++k)
        write_csv_row(*os, {double(k + 1), sp.lambdas[k].real(), sp.lambdas[k].imag(),
                            sp.eigvecs.m[0][k].real(), sp.eigvecs.m[0][k].imag(),
                            sp.eigvecs.m[1][k].real(), sp.eigvecs.m[1][k].imag(),
                            sp.eigvecs.m[2][k].real(), sp.eigvecs.m[2][k].imag()});
    return exit_ok;
}

int run_lifetime(const ParamFlags& pf, bool as_json) {
    const VParams params = validate(pf.params());
    const LifetimeResult lt = coherence_lifetime(params);
    const double wp = weak_pumping_lifetime(params);
    if (as_json) {
        json j = {{"tau_exact", lt.tau_exact},
                  {"tau_formula", lt.tau_formula},
                  {"branch", to_string(lt.branch)},
                  {"p_critical", lt.p_critical},
                  {"tau_weak_pumping", wp},
                  {"enhancement_over_weak_pumping", lt.tau_formula / wp}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "tau_exact = " << format_double(lt.tau_exact) << "\n"
                  << "tau_formula = " << format_double(lt.tau_formula) << "\n"
                  << "branch = " << to_string(lt.branch) << "\n"
                  << "tau_weak_pumping = " << format_double(wp) << "\n"
                  << "enhancement_over_weak_pumping = " << format_double(lt.tau_formula / wp)
                  << "\n";
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------
// scan / zterms / coeffs

int run_scan(const ParamFlags& pf, const std::string& quantity, const std::string& axis1,
             const std::string& axis2, int workers, const std::string& out) {
    GridSpec grid;
    grid.quantity = parse_quantity(quantity);
    grid.axis1 = parse_axis(axis1);
    grid.axis2 = parse_axis(axis2);
    grid.fixed = pf.params();
    const SweepTable table = run(grid, workers > 0 ? workers : default_worker_count());
    std::ostream* os = nullptr;
    auto file = open_output(out, os);
    CsvMetadata meta;
    meta.add_params(grid.fixed);
    meta.add("quantity", to_string(grid.quantity));
    meta.add("axis1", to_string(grid.axis1.name));
    meta.add("axis2", to_string(grid.axis2.name));
    write_csv_header(*os, meta, {std::string(to_string(grid.axis1.name)),
                                 std::string(to_string(grid.axis2.name)),
                                 "value", "error"});
    for (const SweepRow& row : table.rows) {
        *os << format_double(row.a1) << ',' << format_double(row.a2) << ','
            << format_double(row.value) << ',' << row.error << "\n";
    }
    return exit_ok;
}

int run_zterms(double nbar, double delta, double p_min, double p_max, int points,
               const std::string& out) {
    const ZTermTable table = zjk_magnitudes(linear_grid(p_min, p_max, points), nbar, delta);
    std::ostream* os = nullptr;
    auto file = open_output(out, os);
    CsvMetadata meta;
    meta.add("nbar", nbar);
    meta.add("delta_over_gamma", delta);
    std::vector<std::string> cols = {"p"};
    for (int j = 1; j <= 3; ++j)
        for (int k = 0; k <= 2; ++k)
            cols.push_back("mag_z" + std::to_string(j) + std::to_string(k));
    write_csv_header(*os, meta, cols);
    for (std::size_t i = 0; i < table.p.size(); ++i) {
        std::vector<double> row = {table.p[i]};
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) row.push_back(table.mag[i][j][k]);
        write_csv_row(*os, row);
    }
    return exit_ok;
}

void write_coeff_rows(std::ostream& os, const std::vector<double>& ps) {
    CsvMetadata meta;
    std::vector<std::string> cols = {"p"};
    for (char c : {'A', 'B', 'C'})
        for (int i = 1; i <= 6; ++i) cols.push_back(std::string(1, c) + std::to_string(i));
    cols.push_back("T1");
    cols.push_back("T2");
    for (int i = 1; i <= 16; ++i) cols.push_back("m" + std::to_string(i));
    write_csv_header(os, meta, cols);
    for (double p : ps) {
        const TrajectoryCoeffs cc = coeffs(p);
        std::vector<double> row = {p};
        for (int i = 1; i <= 6; ++i) row.push_back(cc.A[i]);
        for (int i = 1; i <= 6; ++i) row.push_back(cc.B[i]);
        for (int i = 1; i <= 6; ++i) row.push_back(cc.C[i]);
        row.push_back(cc.T1);
        row.push_back(cc.T2);
        for (int i = 1; i <= 16; ++i) row.push_back(cc.m[i]);
        write_csv_row(os, row);
    }
}

// ---------------------------------------------------------------------------
// reproduce-fig presets

struct PanelError {
    std::string panel;
    std::string what;
};

class FigureWriter {
public:
    FigureWriter(std::string fig, fs::path dir) : fig_(std::move(fig)), dir_(std::move(dir)) {
        fs::create_directories(dir_);
        sidecar_["figure"] = fig_;
        sidecar_["version"] = version_string;
        sidecar_["panels"] = json::array();
    }

    std::ofstream open(const std::string& name, const json& desc) {
        json entry = desc;
        entry["file"] = name;
        sidecar_["panels"].push_back(entry);
        std::ofstream os(dir_ / name);
        if (!os) throw DomainError("cannot write " + (dir_ / name).string());
        return os;
    }

    void finish() const {
        std::ofstream os(dir_ / ("fig" + fig_ + ".json"));
        os << sidecar_.dump(2) << "\n";
    }

private:
    std::string fig_;
    fs::path dir_;
    json sidecar_;
};

json param_json(const VParams& p) {
    return {{"gamma", p.gamma}, {"delta", p.delta}, {"p", p.p}, {"nbar", p.nbar}};
}

void fig_boundary(FigureWriter& fw, const std::string& name, double n_lo, double n_hi) {
    const std::vector<double> ps = {0.25, 0.5, 0.75, 1.0};
    auto os = fw.open(name, {{"quantity", "zero_discriminant_boundary"},
                             {"p_values", ps},
                             {"nbar_range", {n_lo, n_hi}}});
    CsvMetadata meta;
    meta.add("quantity", "boundary delta/gamma where D = 0 (largest root)");
    std::vector<std::string> cols = {"nbar"};
    for (double p : ps) cols.push_back("delta_p" + format_double(p));
    write_csv_header(os, meta, cols);
    for (double n : AxisSpec{AxisName::Nbar, n_lo, n_hi, 121, true}.values()) {
        std::vector<double> row = {n};
        for (double p : ps) {
            try {
                row.push_back(boundary_delta(p, n));
            } catch (const NoRoot&) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        write_csv_row(os, row);
    }
}

void fig_discriminant_map(FigureWriter& fw, const std::string& name, double lo, double hi) {
    GridSpec grid;
    grid.quantity = SweepQuantity::Discriminant;
    grid.axis1 = {AxisName::Nbar, lo, hi, 201, true};
    grid.axis2 = {AxisName::DeltaOverGamma, lo, hi, 201, true};
    grid.fixed = VParams{1.0, 0.0, 1.0, 0.0};
    auto os = fw.open(name, {{"quantity", "discriminant"}, {"p", 1.0}, {"range", {lo, hi}}});
    CsvMetadata meta;
    meta.add("p", 1.0);
    write_csv_header(os, meta, {"nbar", "delta_over_gamma", "value", "error"});
    for (const SweepRow& row : run(grid).rows)
        os << format_double(row.a1) << ',' << format_double(row.a2) << ','
           << format_double(row.value) << ',' << row.error << "\n";
}

void fig_slope(FigureWriter& fw) {
    auto os = fw.open("fig4a.csv", {{"quantity", "f_of_p"}});
    CsvMetadata meta;
    write_csv_header(os, meta, {"p", "f"});
    for (double p : linear_grid(0.0, 1.0, 501)) write_csv_row(os, {p, slope_f(p)});
}

void fig_epsilon(FigureWriter& fw) {
    auto os = fw.open("fig4b.csv", {{"quantity", "epsilon = 1 - p_c"}, {"nbar", 1e3}});
    CsvMetadata meta;
    meta.add("nbar", 1e3);
    write_csv_header(os, meta, {"delta_over_gamma", "epsilon"});
    for (double y : AxisSpec{AxisName::DeltaOverGamma, 1e-2, 1e2, 81, true}.values())
        write_csv_row(os, {y, 1.0 - critical_p(1e3, y)});
}

void fig_zterms(FigureWriter& fw) {
    const double nbar = 1e3, y = 0.1;
    auto os = fw.open("fig5.csv",
                      {{"quantity", "zjk magnitudes"}, {"nbar", nbar}, {"delta_over_gamma", y}});
    const ZTermTable table = zjk_magnitudes(linear_grid(0.2, 1.0, 161), nbar, y);
    CsvMetadata meta;
    meta.add("nbar", nbar);
    meta.add("delta_over_gamma", y);
    std::vector<std::string> cols = {"p"};
    for (int j = 1; j <= 3; ++j)
        for (int k = 0; k <= 2; ++k) cols.push_back("mag_z" + std::to_string(j) + std::to_string(k));
    write_csv_header(os, meta, cols);
    for (std::size_t i = 0; i < table.p.size(); ++i) {
        std::vector<double> row = {table.p[i]};
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) row.push_back(table.mag[i][j][k]);
        write_csv_row(os, row);
    }
}

void fig_eigenvalues(FigureWriter& fw, const std::string& name, double p) {
    const double nbar = 1e3;
    auto os = fw.open(name, {{"quantity", "|lambda_j| vs delta/gamma"}, {"nbar", nbar}, {"p", p}});
    CsvMetadata meta;
    meta.add("nbar", nbar);
    meta.add("p", p);
    write_csv_header(os, meta, {"delta_over_gamma", "lambda1_mag", "lambda2_mag", "lambda3_mag"});
    for (double y : AxisSpec{AxisName::DeltaOverGamma, 1e-2, 1e2, 121, true}.values()) {
        const Spectrum sp = eigenvalues_cardano(VParams{1.0, y, p, nbar});
        write_csv_row(os, {y, std::abs(sp.lambdas[0]), std::abs(sp.lambdas[1]),
                           std::abs(sp.lambdas[2])});
    }
}

void fig_coeffs_odd(FigureWriter& fw) {
    auto os = fw.open("fig7.csv", {{"quantity", "odd trajectory amplitudes / T1"}});
    CsvMetadata meta;
    write_csv_header(os, meta, {"p", "A1_over_T1", "A3_over_T1", "A5_over_T1", "B1_over_T1",
                                "B3_over_T1", "B5_over_T1", "C1_over_T1", "C3_over_T1",
                                "C5_over_T1"});
    for (double p : linear_grid(0.2, 1.0, 161)) {
        const TrajectoryCoeffs cc = coeffs(p);
        write_csv_row(os, {p, cc.A[1] / cc.T1, cc.A[3] / cc.T1, cc.A[5] / cc.T1, cc.B[1] / cc.T1,
                           cc.B[3] / cc.T1, cc.B[5] / cc.T1, cc.C[1] / cc.T1, cc.C[3] / cc.T1,
                           cc.C[5] / cc.T1});
    }
}

void fig_coeffs_even(FigureWriter& fw) {
    const double nbar = 1e3, y = 1e2;
    const double X = (y / nbar) * (y / nbar);
    auto os = fw.open("fig8.csv", {{"quantity", "even trajectory amplitudes / det"},
                                   {"nbar", nbar},
                                   {"delta_over_gamma", y}});
    CsvMetadata meta;
    meta.add("nbar", nbar);
    meta.add("delta_over_gamma", y);
    write_csv_header(os, meta, {"p", "A2_over_det", "A4_over_det", "A6_over_det", "B2_over_det",
                                "B4_over_det", "B6_over_det", "C2_over_det", "C4_over_det",
                                "C6_over_det"});
    for (double p : linear_grid(0.2, 1.0, 161)) {
        const TrajectoryCoeffs cc = coeffs(p);
        const double den = cc.T1 + cc.T2 * X;
        write_csv_row(os, {p, cc.A[2] / den, cc.A[4] / den, cc.A[6] / den, cc.B[2] / den,
                           cc.B[4] / den, cc.B[6] / den, cc.C[2] / den, cc.C[4] / den,
                           cc.C[6] / den});
    }
}

void fig_dynamics(FigureWriter& fw, const std::string& fig, double y) {
    struct Panel {
        char label;
        double p;
        int component;
    };
    const std::vector<Panel> panels = {{'a', 1.0, 0}, {'b', 1.0, 1}, {'c', 1.0, 2},
                                       {'d', 0.9, 0}, {'e', 0.9, 1}, {'f', 0.9, 2}};
    const char* comp_name[3] = {"rho_aa", "re_rho_ab", "im_rho_ab"};
    for (const Panel& panel : panels) {
        const VParams params{1.0, y, panel.p, 1e3};
        const double t_max = std::min(10.0 * slowest_timescale(params),
                                      y <= 0.2 && panel.p == 1.0 ? 2e4 : 1e9);
        const auto times = log_time_grid(1e-5, t_max);
        const Trajectory exact = propagate_exact(params, StateVector{}, times);
        Trajectory analytic;
        analytic.times = times;
        std::string method;
        if (y <= 0.2) {
            for (double t : times) analytic.states.push_back(rho_small_delta(params, t));
            method = panel.p == 1.0 ? "analytic-p1" : "analytic-small-delta";
        } else if (panel.p == 1.0) {
            for (double t : times) analytic.states.push_back(rho_supercritical(params, t));
            method = "analytic-overdamped";
        } else {
            for (double t : times) analytic.states.push_back(rho_subcritical(params, t));
            method = "analytic-subcritical";
        }
        json desc = param_json(params);
        desc["quantity"] = comp_name[panel.component];
        desc["analytic_method"] = method;
        auto os = fw.open("fig" + fig + panel.label + std::string(".csv"), desc);
        CsvMetadata meta;
        meta.add_params(params);
        meta.add("analytic_method", method);
        write_csv_header(os, meta, {"t", "exact", "analytic"});
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto pick = [&](const StateVector& s) {
                return panel.component == 0 ? s.rho_aa
                       : panel.component == 1 ? s.rho_ab_re
                                              : s.rho_ab_im;
            };
            write_csv_row(os, {times[i], pick(exact.states[i]), pick(analytic.states[i])});
        }
    }
}

int run_reproduce(const std::string& fig, const std::string& out_dir) {
    FigureWriter fw(fig, out_dir);
    std::vector<PanelError> failures;
    try {
        if (fig == "2a")
            fig_boundary(fw, "fig2a.csv", 10.0, 1e4);
        else if (fig == "2b")
            fig_boundary(fw, "fig2b.csv", 1e-3, 1.0);
        else if (fig == "3a")
            fig_discriminant_map(fw, "fig3a.csv", 1.0, 1e4);
        else if (fig == "3b")
            fig_discriminant_map(fw, "fig3b.csv", 1e-3, 1.0);
        else if (fig == "4a")
            fig_slope(fw);
        else if (fig == "4b")
            fig_epsilon(fw);
        else if (fig == "5")
            fig_zterms(fw);
        else if (fig == "6a")
            fig_eigenvalues(fw, "fig6a.csv", 1.0);
        else if (fig == "6b")
            fig_eigenvalues(fw, "fig6b.csv", 0.9);
        else if (fig == "7")
            fig_coeffs_odd(fw);
        else if (fig == "8")
            fig_coeffs_even(fw);
        else if (fig == "9")
            fig_dynamics(fw, "9", 10.0);
        else if (fig == "10")
            fig_dynamics(fw, "10", 0.1);
        else
            throw DomainError("unknown figure id: " + fig);
    } catch (const DomainError&) {
        throw;
    } catch (const std::exception& ex) {
        failures.push_back({fig, ex.what()});
    }
    fw.finish();
    if (!failures.empty()) {
        for (const auto& f : failures)
            std::cerr << "panel " << f.panel << " outside implemented validity: " << f.what
                      << "\n";
        return exit_preset;
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coherent dynamics of a thermally driven three-level V-system"};
    app.require_subcommand(1);

    SimulateOpts sim;
    auto* c_sim = app.add_subcommand("simulate", "propagate the density matrix and emit CSV");
    add_param_flags(c_sim, sim.pf);
    c_sim->add_option("--t-min", sim.t_min, "first output time (default: auto)");
    c_sim->add_option("--t-max", sim.t_max, "last output time (default: 10x slowest timescale)");
    c_sim->add_option("--points", sim.points, "total grid points (default: 64 per decade)");
    c_sim->add_option("--rel-tol", sim.rel_tol, "stepped-method tolerance");
    c_sim->add_option("--method", sim.method,
                      "exact|stepped|analytic-auto|analytic-overdamped|analytic-subcritical|"
                      "analytic-small-delta|analytic-p1");
    c_sim->add_option("--out", sim.out, "output file ('-' = stdout)");

    ParamFlags cls;
    bool cls_json = false;
    auto* c_cls = app.add_subcommand("classify", "dynamical regime from the discriminant sign");
    add_param_flags(c_cls, cls);
    c_cls->add_flag("--json", cls_json, "JSON output");

    ParamFlags spc;
    std::string spc_method = "cardano", spc_out;
    bool spc_json = false;
    auto* c_spc = app.add_subcommand("spectrum", "eigenvalues and eigenvectors");
    add_param_flags(c_spc, spc);
    c_spc->add_option("--method", spc_method, "cardano|numeric|expansion");
    c_spc->add_option("--out", spc_out, "output file ('-' = stdout)");
    c_spc->add_flag("--json", spc_json, "JSON output");

    ParamFlags lft;
    bool lft_json = false;
    auto* c_lft = app.add_subcommand("lifetime", "coherence lifetime (overdamped regime)");
    add_param_flags(c_lft, lft);
    c_lft->add_flag("--json", lft_json, "JSON output");

    ParamFlags scn;
    std::string scn_quantity = "regime", scn_axis1, scn_axis2, scn_out;
    int scn_workers = 0;
    auto* c_scn = app.add_subcommand("scan", "2-D parameter sweep");
    add_param_flags(c_scn, scn);
    c_scn->add_option("--quantity", scn_quantity,
                      "discriminant|regime|lambda2mag|lifetime|slopef|epsilon");
    c_scn->add_option("--axis1", scn_axis1, "name:min:max:points[:log|lin]")->required();
    c_scn->add_option("--axis2", scn_axis2, "name:min:max:points[:log|lin]")->required();
    c_scn->add_option("--workers", scn_workers, "worker threads (default: VSYS_WORKERS or cores)");
    c_scn->add_option("--out", scn_out, "output file ('-' = stdout)");

    double zt_nbar = 1e3, zt_delta = 0.1, zt_pmin = 0.2, zt_pmax = 1.0;
    int zt_points = 161;
    std::string zt_out;
    auto* c_zt = app.add_subcommand("zterms", "|z_jk x^k| magnitudes across alignment");
    c_zt->add_option("--nbar", zt_nbar, "occupation number");
    c_zt->add_option("--delta", zt_delta, "delta/gamma");
    c_zt->add_option("--p-min", zt_pmin, "alignment grid start");
    c_zt->add_option("--p-max", zt_pmax, "alignment grid end");
    c_zt->add_option("--points", zt_points, "alignment grid points");
    c_zt->add_option("--out", zt_out, "output file ('-' = stdout)");

    double cf_p = -1.0;
    std::string cf_grid, cf_out;
    auto* c_cf = app.add_subcommand("coeffs", "trajectory amplitude composites vs p");
    c_cf->add_option("--p", cf_p, "single alignment value");
    c_cf->add_option("--p-grid", cf_grid, "min:max:points");
    c_cf->add_option("--out", cf_out, "output file ('-' = stdout)");

    std::string rf_fig, rf_dir = ".";
    auto* c_rf = app.add_subcommand("reproduce-fig", "figure-style dataset presets");
    c_rf->add_option("--fig", rf_fig, "2a|2b|3a|3b|4a|4b|5|6a|6b|7|8|9|10")->required();
    c_rf->add_option("--out-dir", rf_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*c_sim) return run_simulate(sim);
        if (*c_cls) return run_classify(cls, cls_json);
        if (*c_spc) return run_spectrum(spc, spc_method, spc_out, spc_json);
        if (*c_lft) return run_lifetime(lft, lft_json);
        if (*c_scn) return run_scan(scn, scn_quantity, scn_axis1, scn_axis2, scn_workers, scn_out);
        if (*c_zt) return run_zterms(zt_nbar, zt_delta, zt_pmin, zt_pmax, zt_points, zt_out);
        if (*c_cf) {
            std::vector<double> ps;
            if (cf_p >= 0.0) ps.push_back(cf_p);
            if (!cf_grid.empty()) {
                std::stringstream ss(cf_grid);
                std::string lo, hi, n;
                if (!std::getline(ss, lo, ':') || !std::getline(ss, hi, ':') ||
                    !std::getline(ss, n, ':'))
                    throw DomainError("--p-grid must be min:max:points");
                for (double p : linear_grid(std::stod(lo), std::stod(hi), std::stoi(n)))
                    ps.push_back(p);
            }
            if (ps.empty()) throw DomainError("coeffs: give --p or --p-grid");
            std::ostream* os = nullptr;
            auto file = open_output(cf_out, os);
            write_coeff_rows(*os, ps);
            return exit_ok;
        }
        if (*c_rf) return run_reproduce(rf_fig, rf_dir);
    } catch (const DomainError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return exit_usage;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return exit_condition;
    }
    return exit_usage;
}

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dwell/asymptotic.hpp"
#include "dwell/f_iter.hpp"
#include "dwell/oracle.hpp"
#include "dwell/tau_iter.hpp"

namespace dwell {

/// Fixed 6-significant-digit rendering used everywhere a float leaves the
/// library, so identical inputs give byte-identical reports.
inline std::string format_energy(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// The same value rounded through its printed form, for JSON number output.
inline double round_energy(double v) {
    return std::strtod(format_energy(v).c_str(), nullptr);
}

struct TableConfig {
    int panels = 96;
    int order = 12;
    int iters = 5;
    int pyramid_rows = 45;
    bool with_oracle = true;
};

/// A row of Table 1 or 2: the five tau-iteration energies, E_5 = g - calE_5,
/// the three f-iteration energies where the reference row carries them, and
/// the oracle ground energy with its deviation from E_5.
struct IterationTableRow {
    double g;
    std::array<double, 5> tau_energies;
    double e5;
    std::optional<std::array<double, 3>> f_energies;
    std::optional<double> oracle_e;
    std::optional<double> oracle_dev;
};

struct Table3Row {
    double g;
    double cal_e;
    double e;
    std::optional<double> oracle_e;
    std::optional<double> oracle_dev;
};

struct Table4Row {
    double g;
    double cal_e_plus;
    double e_plus;
    PlateauReport plateau;
    double accuracy_scale;  // e^{-4g/3}
    std::optional<double> oracle_e;
    std::optional<double> oracle_dev;
};

namespace detail {

inline IterationTableRow iteration_row(double g, TrialState state, bool with_f,
                                       const TableConfig& cfg) {
    ModelParams p(g, state);
    Grid grid = build_grid(p, cfg.panels, cfg.order);
    auto tr = solve(p, grid, cfg.iters, 0.0);
    IterationTableRow row{};
    row.g = g;
    for (int i = 0; i < 5; ++i) row.tau_energies[i] = tr.energies.at(i);
    row.e5 = tr.e_final;
    if (with_f) {
        auto ft = solve_f(p, grid, 3, 0.0);
        row.f_energies = std::array<double, 3>{ft.energies.at(0), ft.energies.at(1),
                                               ft.energies.at(2)};
    }
    if (cfg.with_oracle) {
        row.oracle_e = ground_energy(g);
        row.oracle_dev = std::abs(row.e5 - *row.oracle_e);
    }
    return row;
}

}  // namespace detail

inline const std::vector<double>& table1_g_values() {
    static const std::vector<double> v{0.05, 0.1, 0.3, 0.5, 1.0, 3.0, 6.0, 7.0, 8.0};
    return v;
}
inline const std::vector<double>& table1_f_g_values() {
    static const std::vector<double> v{0.5, 1.0, 3.0, 6.0, 7.0, 8.0};
    return v;
}
inline const std::vector<double>& table2_g_values() {
    static const std::vector<double> v{1.0, 3.0, 6.0, 7.0, 8.0};
    return v;
}
inline const std::vector<double>& table3_g_values() {
    static const std::vector<double> v{0.05, 0.1, 0.3, 0.5, 0.7, 1.0, 1.5, 1.7, 2.0,
                                       2.2, 2.5, 2.7, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
    return v;
}
inline const std::vector<double>& table4_g_values() {
    static const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9};
    return v;
}

inline std::vector<IterationTableRow> compute_table1(const TableConfig& cfg = {}) {
    std::vector<IterationTableRow> rows;
    for (double g : table1_g_values()) {
        const auto& fset = table1_f_g_values();
        const bool with_f = std::find(fset.begin(), fset.end(), g) != fset.end();
        rows.push_back(detail::iteration_row(g, TrialState::Even, with_f, cfg));
    }
    return rows;
}

inline std::vector<IterationTableRow> compute_table2(const TableConfig& cfg = {}) {
    std::vector<IterationTableRow> rows;
    for (double g : table2_g_values())
        rows.push_back(detail::iteration_row(g, TrialState::Plus, true, cfg));
    return rows;
}

inline std::vector<Table3Row> compute_table3(const TableConfig& cfg = {}) {
    std::vector<Table3Row> rows;
    for (double g : table3_g_values()) {
        ModelParams p(g, TrialState::Even);
        Grid grid = build_grid(p, cfg.panels, cfg.order);
        auto tr = solve(p, grid, cfg.iters, 0.0);
        Table3Row row{g, tr.energies.back(), tr.e_final, {}, {}};
        if (cfg.with_oracle) {
            row.oracle_e = ground_energy(g);
            row.oracle_dev = std::abs(row.e - *row.oracle_e);
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<Table4Row> compute_table4(const TableConfig& cfg = {}) {
    BetaPyramid pyr = extend_pyramid(BetaPyramid::seed(), cfg.pyramid_rows);
    EpsilonSeries eps = EpsilonSeries::from_pyramid(pyr);
    std::vector<Table4Row> rows;
    for (double g : table4_g_values()) {
        ModelParams p(g, TrialState::Plus);
        Grid grid = build_grid(p, cfg.panels, cfg.order);
        auto tr = solve(p, grid, cfg.iters, 0.0);
        Table4Row row{};
        row.g = g;
        row.cal_e_plus = tr.energies.back();
        row.e_plus = tr.e_final;
        row.plateau = plateau(eps, g, table4_delta(g));
        row.accuracy_scale = std::exp(-4.0 * g / 3.0);
        if (cfg.with_oracle) {
            row.oracle_e = ground_energy(g);
            row.oracle_dev = std::abs(row.e_plus - *row.oracle_e);
        }
        rows.push_back(row);
    }
    return rows;
}

// ---- CSV rendering -------------------------------------------------------

inline std::string render_csv(const std::vector<IterationTableRow>& rows) {
    std::ostringstream os;
    os << "g,scheme,e_1,e_2,e_3,e_4,e_5,E_5,oracle_E,abs_dev\n";
    for (const auto& r : rows) {
        os << format_energy(r.g) << ",tau";
        for (double e : r.tau_energies) os << ',' << format_energy(e);
        os << ',' << format_energy(r.e5);
        os << ',' << (r.oracle_e ? format_energy(*r.oracle_e) : "");
        os << ',' << (r.oracle_dev ? format_energy(*r.oracle_dev) : "");
        os << '\n';
        if (r.f_energies) {
            os << format_energy(r.g) << ",f";
            for (double e : *r.f_energies) os << ',' << format_energy(e);
            os << ",,,,,\n";
        }
    }
    return os.str();
}

inline std::string render_csv(const std::vector<Table3Row>& rows) {
    std::ostringstream os;
    os << "g,calE_ev,E_ev,oracle_E,abs_dev\n";
    for (const auto& r : rows) {
        os << format_energy(r.g) << ',' << format_energy(r.cal_e) << ',' << format_energy(r.e);
        os << ',' << (r.oracle_e ? format_energy(*r.oracle_e) : "");
        os << ',' << (r.oracle_dev ? format_energy(*r.oracle_dev) : "");
        os << '\n';
    }
    return os.str();
}

inline std::string render_csv(const std::vector<Table4Row>& rows) {
    std::ostringstream os;
    os << "g,calE_plus,E_plus,N_min,N_max,series_value,accuracy_order,oracle_E,abs_dev\n";
    for (const auto& r : rows) {
        os << format_energy(r.g) << ',' << format_energy(r.cal_e_plus) << ','
           << format_energy(r.e_plus) << ',';
        if (r.plateau.found)
            os << r.plateau.n_min << ',' << r.plateau.n_max << ',' << format_energy(r.plateau.value);
        else
            os << ",,";
        os << ',' << format_energy(r.accuracy_scale);
        os << ',' << (r.oracle_e ? format_energy(*r.oracle_e) : "");
        os << ',' << (r.oracle_dev ? format_energy(*r.oracle_dev) : "");
        os << '\n';
    }
    return os.str();
}

// ---- text rendering ------------------------------------------------------

namespace detail {
inline void put_cell(std::ostringstream& os, const std::string& s, int width = 10) {
    os << ' ';
    for (int i = static_cast<int>(s.size()); i < width; ++i) os << ' ';
    os << s;
}
}  // namespace detail

inline std::string render_text(const std::vector<IterationTableRow>& rows, int table_id) {
    std::ostringstream os;
    os << "Table " << table_id << ": calE_n per iteration step and E_5 = g - calE_5\n";
    for (const char* h : {"g", "iter", "n=1", "n=2", "n=3", "n=4", "n=5", "E_5", "oracle"})
        detail::put_cell(os, h);
    os << '\n';
    for (const auto& r : rows) {
        detail::put_cell(os, format_energy(r.g));
        detail::put_cell(os, "tau");
        for (double e : r.tau_energies) detail::put_cell(os, format_energy(e));
        detail::put_cell(os, format_energy(r.e5));
        detail::put_cell(os, r.oracle_e ? format_energy(*r.oracle_e) : "-");
        os << '\n';
        if (r.f_energies) {
            detail::put_cell(os, format_energy(r.g));
            detail::put_cell(os, "f");
            for (double e : *r.f_energies) detail::put_cell(os, format_energy(e));
            os << '\n';
        }
    }
    return os.str();
}

inline std::string render_text(const std::vector<Table3Row>& rows) {
    std::ostringstream os;
    os << "Table 3: calE_ev and E_ev = g - calE_ev\n";
    for (const char* h : {"g", "calE_ev", "E_ev", "oracle", "dev"}) detail::put_cell(os, h);
    os << '\n';
    for (const auto& r : rows) {
        detail::put_cell(os, format_energy(r.g));
        detail::put_cell(os, format_energy(r.cal_e));
        detail::put_cell(os, format_energy(r.e));
        detail::put_cell(os, r.oracle_e ? format_energy(*r.oracle_e) : "-");
        detail::put_cell(os, r.oracle_dev ? format_energy(*r.oracle_dev) : "-");
        os << '\n';
    }
    return os.str();
}

inline std::string render_text(const std::vector<Table4Row>& rows) {
    std::ostringstream os;
    os << "Table 4: calE_plus, the 1/g series plateau, and the e^{-4g/3} accuracy scale\n";
    for (const char* h : {"g", "calE_plus", "E_plus", "N_min", "N_max", "series", "accuracy"})
        detail::put_cell(os, h);
    os << '\n';
    for (const auto& r : rows) {
        detail::put_cell(os, format_energy(r.g));
        detail::put_cell(os, format_energy(r.cal_e_plus));
        detail::put_cell(os, format_energy(r.e_plus));
        if (r.plateau.found) {
            detail::put_cell(os, std::to_string(r.plateau.n_min));
            detail::put_cell(os, std::to_string(r.plateau.n_max));
            detail::put_cell(os, format_energy(r.plateau.value));
        } else {
            detail::put_cell(os, "-");
            detail::put_cell(os, "-");
            detail::put_cell(os, "-");
        }
        detail::put_cell(os, format_energy(r.accuracy_scale));
        os << '\n';
    }
    return os.str();
}

}  // namespace dwell

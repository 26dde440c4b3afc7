// Command-line front end: reproduces the reference tables and exposes the
// solvers, the exact coefficient pyramid, and the finite-difference oracle
// with deterministic csv/json/text output.
//
// Exit codes: 0 success, 2 usage/validation error, 3 a solver reported
// instability (f-iteration breakdown or divergence guard).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dwell/dwell.hpp"

namespace {

using nlohmann::json;

int default_panels() {
    if (const char* env = std::getenv("DWELL_PANELS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 16 && v <= 100000) return static_cast<int>(v);
        std::cerr << "warning: ignoring invalid DWELL_PANELS value '" << env << "'\n";
    }
    return 96;
}

int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream os(out_path);
    if (!os) {
        std::cerr << "error: cannot write to '" << out_path << "'\n";
        return 2;
    }
    os << text;
    return os ? 0 : 2;
}

int emit_json(const json& j, const std::string& out_path) {
    return emit(j.dump(2) + "\n", out_path);
}

bool validate_g(const std::vector<double>& gs) {
    if (gs.empty()) {
        std::cerr << "error: at least one --g value is required\n";
        return false;
    }
    for (double g : gs)
        if (!(g > 0.0)) {
            std::cerr << "error: coupling g must be positive (got " << g << ")\n";
            return false;
        }
    return true;
}

dwell::TrialState parse_state(const std::string& s) {
    return s == "plus" ? dwell::TrialState::Plus : dwell::TrialState::Even;
}

struct CommonOpts {
    std::vector<double> g;
    std::string state = "ev";
    std::string format = "text";
    std::string out;
    int panels = default_panels();
    int iters = 5;
    double tol = 1e-10;
};

void add_format_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json", "text"}));
    cmd->add_option("--out", o.out, "write the report to this file instead of stdout");
}

int run_iteration_command(const CommonOpts& o, dwell::IterationScheme scheme) {
    if (!validate_g(o.g)) return 2;
    std::vector<double> gs = o.g;
    std::sort(gs.begin(), gs.end());
    const dwell::TrialState state = parse_state(o.state);

    std::vector<std::pair<double, dwell::IterationTrace>> results;
    bool any_instability = false;
    for (double g : gs) {
        dwell::ModelParams p(g, state);
        dwell::Grid grid = dwell::build_grid(p, o.panels);
        auto tr = scheme == dwell::IterationScheme::Tau ? dwell::solve(p, grid, o.iters, o.tol)
                                                        : dwell::solve_f(p, grid, o.iters, o.tol);
        any_instability = any_instability || tr.instability.has_value();
        results.emplace_back(g, std::move(tr));
    }

    std::string text;
    if (o.format == "json") {
        json j{{"command", scheme == dwell::IterationScheme::Tau ? "solve" : "fsolve"},
               {"state", o.state},
               {"iters", o.iters},
               {"panels", o.panels}};
        json arr = json::array();
        for (const auto& [g, tr] : results) arr.push_back(dwell::to_json(tr, g));
        j["results"] = arr;
        text = j.dump(2) + "\n";
    } else if (o.format == "csv") {
        std::ostringstream os;
        os << "g,scheme,step,calE,E,converged,instability\n";
        for (const auto& [g, tr] : results) {
            for (std::size_t n = 0; n < tr.energies.size(); ++n) {
                os << dwell::format_energy(g) << ','
                   << (tr.scheme == dwell::IterationScheme::Tau ? "tau" : "f") << ',' << (n + 1)
                   << ',' << dwell::format_energy(tr.energies[n]) << ','
                   << dwell::format_energy(g - tr.energies[n]) << ','
                   << (tr.converged ? "true" : "false") << ','
                   << (tr.instability ? tr.instability->what : "") << '\n';
            }
        }
        text = os.str();
    } else {
        std::ostringstream os;
        for (const auto& [g, tr] : results) {
            os << (scheme == dwell::IterationScheme::Tau ? "tau" : "f") << "-iteration  g="
               << dwell::format_energy(g) << "  state=" << o.state << "\n  calE:";
            for (double e : tr.energies) os << ' ' << dwell::format_energy(e);
            os << "\n  E = " << dwell::format_energy(tr.e_final)
               << (tr.converged ? "  (converged)" : "") << '\n';
            if (tr.instability)
                os << "  instability at step " << tr.instability->step << ": "
                   << tr.instability->what << '\n';
        }
        text = os.str();
    }
    const int rc = emit(text, o.out);
    if (rc != 0) return rc;
    return any_instability ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"double-well ground-state: Green-function iteration solvers, the exact 1/g "
                 "series, and a finite-difference oracle"};
    app.require_subcommand(1);

    CommonOpts solve_o, fsolve_o, asym_o, pyr_o, tab_o, orc_o, chk_o;

    auto* c_solve = app.add_subcommand("solve", "tau-iteration energies for one or more g");
    c_solve->add_option("--g", solve_o.g, "coupling value(s)")->delimiter(',');
    c_solve->add_option("--state", solve_o.state, "trial state")->check(CLI::IsMember({"ev", "plus"}));
    c_solve->add_option("--iters", solve_o.iters, "iteration steps")->check(CLI::Range(1, 200));
    c_solve->add_option("--tol", solve_o.tol, "early-stop tolerance on |calE_n - calE_{n-1}|");
    c_solve->add_option("--panels", solve_o.panels, "quadrature panels")->check(CLI::Range(16, 100000));
    add_format_opts(c_solve, solve_o);

    auto* c_fsolve = app.add_subcommand("fsolve", "f-iteration energies (original scheme)");
    c_fsolve->add_option("--g", fsolve_o.g, "coupling value(s)")->delimiter(',');
    c_fsolve->add_option("--state", fsolve_o.state, "trial state")->check(CLI::IsMember({"ev", "plus"}));
    c_fsolve->add_option("--iters", fsolve_o.iters, "iteration steps")->check(CLI::Range(1, 200));
    c_fsolve->add_option("--tol", fsolve_o.tol, "early-stop tolerance");
    c_fsolve->add_option("--panels", fsolve_o.panels, "quadrature panels")->check(CLI::Range(16, 100000));
    add_format_opts(c_fsolve, fsolve_o);

    auto* c_asym = app.add_subcommand("asym", "1/g series partial sums and plateau analysis");
    int asym_terms = 45;
    double asym_delta = 0.0;  // 0 = digits rule
    c_asym->add_option("--g", asym_o.g, "coupling value(s)")->delimiter(',');
    c_asym->add_option("--terms", asym_terms, "series terms (pyramid rows)")->check(CLI::Range(3, 200));
    c_asym->add_option("--delta", asym_delta, "plateau threshold (default: per-row digits rule)");
    add_format_opts(c_asym, asym_o);

    auto* c_pyr = app.add_subcommand("pyramid", "exact beta-coefficient pyramid");
    int pyr_rows = 4;
    c_pyr->add_option("--rows", pyr_rows, "number of rows")->check(CLI::Range(1, 200));
    add_format_opts(c_pyr, pyr_o);

    auto* c_tab = app.add_subcommand("tables", "reproduce the reference tables");
    std::vector<int> which{1, 2, 3, 4};
    bool no_oracle = false;
    c_tab->add_option("--which", which, "tables to emit")->delimiter(',')->check(CLI::Range(1, 4));
    c_tab->add_flag("--no-oracle", no_oracle, "skip the oracle columns");
    c_tab->add_option("--panels", tab_o.panels, "quadrature panels")->check(CLI::Range(16, 100000));
    add_format_opts(c_tab, tab_o);

    auto* c_orc = app.add_subcommand("oracle", "finite-difference ground energy");
    int orc_points = 4000;
    double orc_half_width = 0.0;  // 0 = rule of thumb
    c_orc->add_option("--g", orc_o.g, "coupling value(s)")->delimiter(',');
    c_orc->add_option("--points", orc_points, "interior grid points")->check(CLI::Range(64, 2000000));
    c_orc->add_option("--half-width", orc_half_width, "box half-width (default: automatic)");
    add_format_opts(c_orc, orc_o);

    auto* c_chk = app.add_subcommand("check", "perturbed-potential condition report");
    double chk_threshold = 0.2;
    c_chk->add_option("--g", chk_o.g, "coupling value(s)")->delimiter(',');
    c_chk->add_option("--state", chk_o.state, "trial state")->check(CLI::IsMember({"ev", "plus"}));
    c_chk->add_option("--decay-threshold", chk_threshold, "tail decay threshold");
    c_chk->add_option("--panels", chk_o.panels, "quadrature panels")->check(CLI::Range(16, 100000));
    add_format_opts(c_chk, chk_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(c_solve)) return run_iteration_command(solve_o, dwell::IterationScheme::Tau);
        if (app.got_subcommand(c_fsolve)) return run_iteration_command(fsolve_o, dwell::IterationScheme::F);

        if (app.got_subcommand(c_asym)) {
            if (!validate_g(asym_o.g)) return 2;
            auto pyr = dwell::extend_pyramid(dwell::BetaPyramid::seed(), asym_terms);
            auto eps = dwell::EpsilonSeries::from_pyramid(pyr);
            std::sort(asym_o.g.begin(), asym_o.g.end());
            if (asym_o.format == "json") {
                json arr = json::array();
                for (double g : asym_o.g) {
                    const double delta = asym_delta > 0.0 ? asym_delta : dwell::table4_delta(g);
                    json sums = json::array();
                    for (int n = 0; n < eps.terms(); ++n)
                        sums.push_back(dwell::round_energy(dwell::partial_sum(eps, g, n)));
                    arr.push_back({{"g", g},
                                   {"delta", delta},
                                   {"partial_sums", sums},
                                   {"plateau", dwell::to_json(dwell::plateau(eps, g, delta))}});
                }
                return emit_json(json{{"command", "asym"},
                                      {"terms", asym_terms},
                                      {"epsilon", dwell::epsilon_to_json(eps)},
                                      {"results", arr}},
                                 asym_o.out);
            }
            std::ostringstream os;
            if (asym_o.format == "csv") {
                os << "g,N,partial_sum,in_plateau\n";
                for (double g : asym_o.g) {
                    const double delta = asym_delta > 0.0 ? asym_delta : dwell::table4_delta(g);
                    const auto rep = dwell::plateau(eps, g, delta);
                    for (int n = 0; n < eps.terms(); ++n) {
                        const bool inside = rep.found && n >= rep.n_min && n <= rep.n_max;
                        os << dwell::format_energy(g) << ',' << n << ','
                           << dwell::format_energy(dwell::partial_sum(eps, g, n)) << ','
                           << (inside ? "true" : "false") << '\n';
                    }
                }
            } else {
                for (double g : asym_o.g) {
                    const double delta = asym_delta > 0.0 ? asym_delta : dwell::table4_delta(g);
                    const auto rep = dwell::plateau(eps, g, delta);
                    os << "g=" << dwell::format_energy(g) << "  delta=" << dwell::format_energy(delta);
                    if (rep.found)
                        os << "  plateau N=[" << rep.n_min << ',' << rep.n_max << "]  best N="
                           << rep.n_best << "  calE_+^N = " << dwell::format_energy(rep.value) << '\n';
                    else
                        os << "  no plateau\n";
                }
            }
            return emit(os.str(), asym_o.out);
        }

        if (app.got_subcommand(c_pyr)) {
            auto pyr = dwell::extend_pyramid(dwell::BetaPyramid::seed(), pyr_rows);
            if (pyr_o.format == "json")
                return emit_json(json{{"command", "pyramid"}, {"rows", dwell::pyramid_to_json(pyr)["rows"]}},
                                 pyr_o.out);
            std::ostringstream os;
            auto put_row = [&os](int m, const char* kind, const std::vector<dwell::BigInt>& v) {
                os << m << ',' << kind;
                for (std::size_t l = v.size(); l-- > 0;) os << ',' << v[l].str();
                os << '\n';
            };
            if (pyr_o.format == "csv") {
                os << "m,kind,values_l_descending\n";
                for (const auto& r : pyr.rows()) {
                    put_row(r.m, "beta0", r.beta0);
                    put_row(r.m, "delta", r.delta);
                    put_row(r.m, "beta", r.beta);
                }
            } else {
                for (const auto& r : pyr.rows()) {
                    os << "m=" << r.m << '\n';
                    auto put = [&os](const char* kind, const std::vector<dwell::BigInt>& v) {
                        os << "  " << kind << ":";
                        for (std::size_t l = v.size(); l-- > 0;) os << ' ' << v[l].str();
                        os << '\n';
                    };
                    put("beta0", r.beta0);
                    put("delta", r.delta);
                    put("beta ", r.beta);
                }
            }
            return emit(os.str(), pyr_o.out);
        }

        if (app.got_subcommand(c_tab)) {
            dwell::TableConfig cfg;
            cfg.panels = tab_o.panels;
            cfg.with_oracle = !no_oracle;
            std::sort(which.begin(), which.end());
            which.erase(std::unique(which.begin(), which.end()), which.end());
            std::ostringstream os;
            json jtables = json::array();
            for (int id : which) {
                if (id == 1 || id == 2) {
                    auto rows = id == 1 ? dwell::compute_table1(cfg) : dwell::compute_table2(cfg);
                    if (tab_o.format == "json") jtables.push_back(dwell::to_json(rows, id));
                    else if (tab_o.format == "csv") os << "# table " << id << '\n' << dwell::render_csv(rows);
                    else os << dwell::render_text(rows, id) << '\n';
                } else if (id == 3) {
                    auto rows = dwell::compute_table3(cfg);
                    if (tab_o.format == "json") jtables.push_back(dwell::to_json(rows));
                    else if (tab_o.format == "csv") os << "# table 3\n" << dwell::render_csv(rows);
                    else os << dwell::render_text(rows) << '\n';
                } else {
                    auto rows = dwell::compute_table4(cfg);
                    if (tab_o.format == "json") jtables.push_back(dwell::to_json(rows));
                    else if (tab_o.format == "csv") os << "# table 4\n" << dwell::render_csv(rows);
                    else os << dwell::render_text(rows) << '\n';
                }
            }
            if (tab_o.format == "json")
                return emit_json(json{{"command", "tables"}, {"tables", jtables}}, tab_o.out);
            return emit(os.str(), tab_o.out);
        }

        if (app.got_subcommand(c_orc)) {
            if (!validate_g(orc_o.g)) return 2;
            std::sort(orc_o.g.begin(), orc_o.g.end());
            json arr = json::array();
            std::ostringstream os;
            if (orc_o.format == "csv") os << "g,E,half_width,n_points\n";
            for (double g : orc_o.g) {
                const auto cfg = orc_half_width > 0.0
                                     ? dwell::OracleConfig(orc_half_width, orc_points)
                                     : dwell::OracleConfig::for_coupling(g, orc_points);
                const double e = dwell::ground_energy(g, cfg);
                if (orc_o.format == "json")
                    arr.push_back({{"g", g},
                                   {"E", dwell::round_energy(e)},
                                   {"half_width", cfg.half_width},
                                   {"n_points", cfg.n_points}});
                else if (orc_o.format == "csv")
                    os << dwell::format_energy(g) << ',' << dwell::format_energy(e) << ','
                       << dwell::format_energy(cfg.half_width) << ',' << cfg.n_points << '\n';
                else
                    os << "g=" << dwell::format_energy(g) << "  E = " << dwell::format_energy(e)
                       << "  (L=" << dwell::format_energy(cfg.half_width) << ", n=" << cfg.n_points
                       << ")\n";
            }
            if (orc_o.format == "json")
                return emit_json(json{{"command", "oracle"}, {"results", arr}}, orc_o.out);
            return emit(os.str(), orc_o.out);
        }

        if (app.got_subcommand(c_chk)) {
            if (!validate_g(chk_o.g)) return 2;
            std::sort(chk_o.g.begin(), chk_o.g.end());
            const dwell::TrialState state = parse_state(chk_o.state);
            json arr = json::array();
            std::ostringstream os;
            if (chk_o.format == "csv")
                os << "g,state,positive,monotone,decays,min_value,min_x,tail_value,jump_at_one\n";
            for (double g : chk_o.g) {
                dwell::ModelParams p(g, state);
                dwell::Grid grid = dwell::build_grid(p, chk_o.panels);
                const auto rep = dwell::check_trial_conditions(p, grid, chk_threshold);
                if (chk_o.format == "json") {
                    arr.push_back(dwell::to_json(rep, g, chk_o.state));
                } else if (chk_o.format == "csv") {
                    os << dwell::format_energy(g) << ',' << chk_o.state << ','
                       << (rep.positive ? "true" : "false") << ',' << (rep.monotone ? "true" : "false")
                       << ',' << (rep.decays ? "true" : "false") << ','
                       << dwell::format_energy(rep.min_value) << ',' << dwell::format_energy(rep.min_x)
                       << ',' << dwell::format_energy(rep.tail_value) << ','
                       << dwell::format_energy(rep.jump_at_one) << '\n';
                } else {
                    os << "g=" << dwell::format_energy(g) << "  state=" << chk_o.state
                       << "  w>0: " << (rep.positive ? "pass" : "FAIL")
                       << "  w decreasing: " << (rep.monotone ? "pass" : "FAIL")
                       << "  w decays: " << (rep.decays ? "pass" : "FAIL")
                       << "  min w = " << dwell::format_energy(rep.min_value) << " at x="
                       << dwell::format_energy(rep.min_x)
                       << "  jump at 1 = " << dwell::format_energy(rep.jump_at_one) << '\n';
                }
            }
            if (chk_o.format == "json")
                return emit_json(json{{"command", "check"}, {"results", arr}}, chk_o.out);
            return emit(os.str(), chk_o.out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

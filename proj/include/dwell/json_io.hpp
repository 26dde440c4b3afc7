#pragma once

#include <string>

#include <json.hpp>

#include "dwell/tables.hpp"

namespace dwell {

/// Pyramid export: row-major arrays of decimal integer strings, exact.
inline nlohmann::json pyramid_to_json(const BetaPyramid& p) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : p.rows()) {
        auto strings = [](const std::vector<BigInt>& v) {
            nlohmann::json a = nlohmann::json::array();
            for (const auto& b : v) a.push_back(b.str());
            return a;
        };
        rows.push_back({{"m", r.m},
                        {"beta0", strings(r.beta0)},
                        {"delta", strings(r.delta)},
                        {"beta", strings(r.beta)}});
    }
    return {{"rows", rows}};
}

/// Exact dyadic rationals as decimal strings plus the double projection.
inline nlohmann::json epsilon_to_json(const EpsilonSeries& eps) {
    nlohmann::json a = nlohmann::json::array();
    for (int m = 1; m <= eps.terms(); ++m) {
        const auto& r = eps.exact[m - 1];
        a.push_back({{"m", m},
                     {"numerator", boost::multiprecision::numerator(r).str()},
                     {"denominator", boost::multiprecision::denominator(r).str()},
                     {"value", eps.value[m - 1]}});
    }
    return a;
}

inline nlohmann::json to_json(const InstabilityReport& rep) {
    const char* kind = "";
    switch (rep.kind) {
        case InstabilityReport::Kind::NegativeF: kind = "negative_f"; break;
        case InstabilityReport::Kind::NonPositiveDenominator: kind = "non_positive_denominator"; break;
        case InstabilityReport::Kind::EnergyDivergence: kind = "energy_divergence"; break;
        case InstabilityReport::Kind::Overflow: kind = "overflow"; break;
    }
    return {{"kind", kind}, {"step", rep.step}, {"value", rep.value},
            {"x", rep.x}, {"what", rep.what}};
}

inline nlohmann::json to_json(const IterationTrace& tr, double g) {
    nlohmann::json energies = nlohmann::json::array();
    for (double e : tr.energies) energies.push_back(round_energy(e));
    nlohmann::json j{{"g", g},
                     {"scheme", tr.scheme == IterationScheme::Tau ? "tau" : "f"},
                     {"energies", energies},
                     {"E", round_energy(tr.e_final)},
                     {"converged", tr.converged},
                     {"sweeps", tr.cumulative_sweeps}};
    j["instability"] = tr.instability ? to_json(*tr.instability) : nlohmann::json();
    return j;
}

inline nlohmann::json to_json(const ConditionReport& rep, double g, const std::string& state) {
    nlohmann::json j{{"g", g},
                     {"state", state},
                     {"positive", rep.positive},
                     {"monotone", rep.monotone},
                     {"decays", rep.decays},
                     {"all_pass", rep.all_pass()},
                     {"min_value", rep.min_value},
                     {"min_x", rep.min_x},
                     {"tail_value", rep.tail_value},
                     {"decay_threshold", rep.decay_threshold},
                     {"jump_at_one", rep.jump_at_one}};
    j["first_positivity_violation_x"] =
        std::isnan(rep.first_positivity_violation_x)
            ? nlohmann::json()
            : nlohmann::json(rep.first_positivity_violation_x);
    j["first_monotonicity_violation_x"] =
        std::isnan(rep.first_monotonicity_violation_x)
            ? nlohmann::json()
            : nlohmann::json(rep.first_monotonicity_violation_x);
    return j;
}

inline nlohmann::json to_json(const PlateauReport& rep) {
    if (!rep.found) return {{"found", false}, {"delta", rep.delta}};
    return {{"found", true},   {"delta", rep.delta},          {"n_min", rep.n_min},
            {"n_max", rep.n_max}, {"n_best", rep.n_best},
            {"value", round_energy(rep.value)}};
}

inline nlohmann::json to_json(const std::vector<IterationTableRow>& rows, int id) {
    nlohmann::json out{{"table", id}};
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json tau = nlohmann::json::array();
        for (double e : r.tau_energies) tau.push_back(round_energy(e));
        nlohmann::json row{{"g", r.g}, {"tau", tau}, {"E_5", round_energy(r.e5)}};
        if (r.f_energies) {
            nlohmann::json f = nlohmann::json::array();
            for (double e : *r.f_energies) f.push_back(round_energy(e));
            row["f"] = f;
        }
        if (r.oracle_e) {
            row["oracle_E"] = round_energy(*r.oracle_e);
            row["abs_dev"] = round_energy(*r.oracle_dev);
        }
        jr.push_back(row);
    }
    out["rows"] = jr;
    return out;
}

inline nlohmann::json to_json(const std::vector<Table3Row>& rows) {
    nlohmann::json out{{"table", 3}};
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row{{"g", r.g},
                           {"calE_ev", round_energy(r.cal_e)},
                           {"E_ev", round_energy(r.e)}};
        if (r.oracle_e) {
            row["oracle_E"] = round_energy(*r.oracle_e);
            row["abs_dev"] = round_energy(*r.oracle_dev);
        }
        jr.push_back(row);
    }
    out["rows"] = jr;
    return out;
}

inline nlohmann::json to_json(const std::vector<Table4Row>& rows) {
    nlohmann::json out{{"table", 4}};
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row{{"g", r.g},
                           {"calE_plus", round_energy(r.cal_e_plus)},
                           {"E_plus", round_energy(r.e_plus)},
                           {"plateau", to_json(r.plateau)},
                           {"accuracy_order", round_energy(r.accuracy_scale)}};
        if (r.oracle_e) {
            row["oracle_E"] = round_energy(*r.oracle_e);
            row["abs_dev"] = round_energy(*r.oracle_dev);
        }
        jr.push_back(row);
    }
    out["rows"] = jr;
    return out;
}

}  // namespace dwell

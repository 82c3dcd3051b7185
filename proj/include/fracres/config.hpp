#pragma once

// Run configuration: a flat JSON object whose keys are dotted paths, e.g.
//   { "scenario": "fig3", "rabi_ac": 1.0, "grid.points": 600 }
// Unknown keys and wrongly typed values are rejected with the key name.
// Resolution order: scenario preset, then the file, then command-line
// overrides (which go through the same key table).

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracres/error.hpp"
#include "fracres/spectra.hpp"
#include "fracres/sweep.hpp"

namespace fracres {

inline constexpr const char* version_string = "0.3.0";

struct ClassicalConfig {
    double omega0 = 10.0;
    double damping = 0.2;
    double width_fraction = 1.0 / 500.0;
};

struct RunConfig {
    bool classical = false;
    SweepConfig sweep = scenario_preset(Scenario::fig2);
    ClassicalConfig oscillator;

    Channel channel = Channel::osc_amp_bc;
    double min_prominence_frac = 0.02;
    double match_tol_frac = 0.02;
    int max_n = 4;
    int max_m = 2;

    std::string out_dir = ".";
    bool strict = false;
    std::vector<double> dump_trajectory;

    std::string scenario_name() const { return classical ? "classical" : std::string(to_string(sweep.scenario)); }
};

inline RunConfig run_preset(const std::string& scenario) {
    RunConfig c;
    if (scenario == "classical") {
        c.classical = true;
        c.sweep.omega_rep_min = 2.0;
        c.sweep.omega_rep_max = 12.0;
        c.sweep.grid_points = 500;
        return c;
    }
    c.sweep = scenario_preset(scenario_from_string(scenario));
    // the rational comb needs n = 5 for the 2/5 resonance
    if (c.sweep.scenario == Scenario::fig5) c.max_n = 5;
    return c;
}

namespace detail {

using json = nlohmann::json;

inline double get_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(key, "must be finite");
    return x;
}

inline int get_int(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
    return v.get<int>();
}

inline bool get_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
    return v.get<bool>();
}

inline std::string get_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError(key, "expected a string");
    return v.get<std::string>();
}

struct Applier {
    RunConfig& c;
    std::optional<double> explicit_acb, explicit_bca;

    using Setter = std::function<void(const json&, const std::string&)>;

    std::map<std::string, Setter> table() {
        std::map<std::string, Setter> t;
        auto num = [&](double& target) {
            return [&target](const json& v, const std::string& k) { target = get_number(v, k); };
        };
        SystemParams& p = c.sweep.params;
        t["omega_ab"] = num(p.omega_ab);
        t["gamma_ab"] = num(p.gamma_ab);
        t["gamma_ac"] = num(p.gamma_ac);
        t["gamma_bc"] = num(p.gamma_bc);
        t["rabi_ac"] = num(p.rabi_ac);
        t["rabi_bc"] = num(p.rabi_bc);
        t["rabi_acb"] = [this](const json& v, const std::string& k) { explicit_acb = get_number(v, k); };
        t["rabi_bca"] = [this](const json& v, const std::string& k) { explicit_bca = get_number(v, k); };
        t["cross.follows_direct"] = [this](const json& v, const std::string& k) {
            c.sweep.cross_follows_direct = get_bool(v, k);
        };
        t["equation_form"] = [&p](const json& v, const std::string& k) {
            p.form = equation_form_from_string(get_string(v, k));
        };
        t["symmetric_coherence_decay"] = [&p](const json& v, const std::string& k) {
            p.symmetric_coherence_decay = get_bool(v, k);
        };
        for (auto* e : {&c.sweep.f1, &c.sweep.f2}) {
            const std::string pre = e == &c.sweep.f1 ? "f1." : "f2.";
            t[pre + "kind"] = [e](const json& v, const std::string& k) {
                try {
                    e->kind = envelope_kind_from_string(get_string(v, k));
                } catch (const ConfigError&) {
                    throw ConfigError(k, "expected 'cw', 'pulse_train' or 'mixed'");
                }
            };
            t[pre + "cw_level"] = num(e->cw_level);
            t[pre + "pulse_height"] = num(e->pulse_height);
            t[pre + "pulse_width"] = num(e->pulse_width);
        }
        t["drive.fixed_average_power"] = [this](const json& v, const std::string& k) {
            c.sweep.fixed_average_power = get_bool(v, k);
        };
        t["grid.min"] = num(c.sweep.omega_rep_min);
        t["grid.max"] = num(c.sweep.omega_rep_max);
        t["grid.points"] = [this](const json& v, const std::string& k) { c.sweep.grid_points = get_int(v, k); };
        t["grid.kind"] = [this](const json& v, const std::string& k) {
            c.sweep.grid_kind = grid_kind_from_string(get_string(v, k));
        };
        t["grid.refine_rounds"] = [this](const json& v, const std::string& k) {
            c.sweep.refine_rounds = get_int(v, k);
        };
        t["grid.refine_threshold"] = num(c.sweep.refine_threshold);
        t["integrator.tol"] = num(c.sweep.tol);
        t["integrator.decay_times"] = num(c.sweep.decay_times);
        t["integrator.min_periods"] = num(c.sweep.min_periods);
        t["integrator.sample_dt"] = num(c.sweep.sample_dt);
        t["analysis.fraction"] = num(c.sweep.analysis_fraction);
        t["initial.state"] = [this](const json& v, const std::string& k) {
            const std::string s = get_string(v, k);
            if (s == "a") c.sweep.initial = DensityState::ground_a();
            else if (s == "b") c.sweep.initial = DensityState::pure_b();
            else if (s == "c") c.sweep.initial = DensityState::pure_c();
            else throw ConfigError(k, "expected 'a', 'b' or 'c'");
        };
        t["workers"] = [this](const json& v, const std::string& k) {
            const int w = get_int(v, k);
            if (w < 1) throw ConfigError(k, "must be >= 1");
            c.sweep.workers = static_cast<unsigned>(w);
        };
        t["peaks.channel"] = [this](const json& v, const std::string& k) {
            c.channel = channel_from_string(get_string(v, k));
        };
        t["peaks.min_prominence_frac"] = num(c.min_prominence_frac);
        t["peaks.match_tol_frac"] = num(c.match_tol_frac);
        t["predict.max_n"] = [this](const json& v, const std::string& k) { c.max_n = get_int(v, k); };
        t["predict.max_m"] = [this](const json& v, const std::string& k) { c.max_m = get_int(v, k); };
        t["classical.omega0"] = num(c.oscillator.omega0);
        t["classical.damping"] = num(c.oscillator.damping);
        t["classical.width_fraction"] = num(c.oscillator.width_fraction);
        t["output.dir"] = [this](const json& v, const std::string& k) { c.out_dir = get_string(v, k); };
        t["output.strict"] = [this](const json& v, const std::string& k) { c.strict = get_bool(v, k); };
        t["output.dump_trajectory"] = [this](const json& v, const std::string& k) {
            if (!v.is_array()) throw ConfigError(k, "expected an array of repetition rates");
            c.dump_trajectory.clear();
            for (const auto& x : v) c.dump_trajectory.push_back(get_number(x, k));
        };
        return t;
    }
};

}  // namespace detail

/// Validates everything that can be checked without running a simulation.
inline void validate(const RunConfig& c) {
    if (!(c.min_prominence_frac > 0.0 && c.min_prominence_frac < 1.0))
        throw ConfigError("peaks.min_prominence_frac", "must lie in (0, 1)");
    if (!(c.match_tol_frac > 0.0)) throw ConfigError("peaks.match_tol_frac", "must be positive");
    if (c.max_n < 1) throw ConfigError("predict.max_n", "must be >= 1");
    if (c.max_m < 1) throw ConfigError("predict.max_m", "must be >= 1");
    if (c.classical) {
        if (!(c.oscillator.omega0 > 0.0)) throw ConfigError("classical.omega0", "must be positive");
        if (!(c.oscillator.damping > 0.0 && c.oscillator.damping < 2.0 * c.oscillator.omega0))
            throw ConfigError("classical.damping", "must lie in (0, 2 omega0)");
        if (!(c.oscillator.width_fraction > 0.0 && c.oscillator.width_fraction <= 1.0 / 20.0))
            throw ConfigError("classical.width_fraction", "must lie in (0, 1/20]");
        if (c.sweep.grid_points < 2) throw ConfigError("grid.points", "must be >= 2");
        if (!(c.sweep.omega_rep_min > 0.0 && c.sweep.omega_rep_max > c.sweep.omega_rep_min))
            throw ConfigError("grid.min", "need 0 < grid.min < grid.max");
        return;
    }
    c.sweep.validate();
    for (double w : c.dump_trajectory)
        if (!(w > 0.0)) throw ConfigError("output.dump_trajectory", "repetition rates must be positive");
}

/// Applies a flat object of dotted keys on top of `base`. "scenario" must be
/// handled by the caller (it selects the preset).
inline RunConfig apply_overrides(RunConfig base, const nlohmann::json& obj) {
    if (!obj.is_object()) throw ConfigError("config", "expected a JSON object of dotted keys");
    detail::Applier a{base, std::nullopt, std::nullopt};
    const auto table = a.table();
    for (const auto& [key, value] : obj.items()) {
        if (key == "scenario" || key == "version") continue;
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError(key, "unknown configuration key");
        it->second(value, key);
    }
    SystemParams& p = base.sweep.params;
    if (base.sweep.cross_follows_direct) {
        // explicit values are tolerated only when they agree with the rule
        if (a.explicit_acb && *a.explicit_acb != p.rabi_ac)
            throw ConfigError("rabi_acb", "set cross.follows_direct=false to give cross amplitudes explicitly");
        if (a.explicit_bca && *a.explicit_bca != p.rabi_bc)
            throw ConfigError("rabi_bca", "set cross.follows_direct=false to give cross amplitudes explicitly");
        p.set_cross_from_direct();
    } else {
        if (a.explicit_acb) p.rabi_acb = *a.explicit_acb;
        if (a.explicit_bca) p.rabi_bca = *a.explicit_bca;
    }
    return base;
}

/// Builds a config from an optional file and command-line overrides. The
/// scenario comes from `scenario_flag` if given, else from the file, else fig2.
inline RunConfig resolve_config(const std::optional<std::string>& path, const std::optional<std::string>& scenario_flag,
                                const nlohmann::json& flag_overrides) {
    nlohmann::json file = nlohmann::json::object();
    if (path) {
        std::ifstream in(*path);
        if (!in) throw ConfigError("config", "cannot open '" + *path + "'");
        try {
            file = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("config", std::string("parse error: ") + e.what());
        }
        if (!file.is_object()) throw ConfigError("config", "expected a JSON object of dotted keys");
    }
    std::string scenario = "fig2";
    if (file.contains("scenario")) scenario = detail::get_string(file["scenario"], "scenario");
    if (scenario_flag) scenario = *scenario_flag;
    RunConfig c = run_preset(scenario);
    c = apply_overrides(std::move(c), file);
    c = apply_overrides(std::move(c), flag_overrides);
    validate(c);
    return c;
}

/// Every resolved setting, as flat dotted keys; feeding it back through
/// resolve_config reproduces the configuration.
inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    const SystemParams p = c.sweep.resolved_params();
    j["scenario"] = c.scenario_name();
    j["omega_ab"] = p.omega_ab;
    j["gamma_ab"] = p.gamma_ab;
    j["gamma_ac"] = p.gamma_ac;
    j["gamma_bc"] = p.gamma_bc;
    j["rabi_ac"] = p.rabi_ac;
    j["rabi_bc"] = p.rabi_bc;
    j["rabi_acb"] = p.rabi_acb;
    j["rabi_bca"] = p.rabi_bca;
    j["cross.follows_direct"] = c.sweep.cross_follows_direct;
    j["equation_form"] = std::string(to_string(p.form));
    j["symmetric_coherence_decay"] = p.symmetric_coherence_decay;
    for (const auto* e : {&c.sweep.f1, &c.sweep.f2}) {
        const std::string pre = e == &c.sweep.f1 ? "f1." : "f2.";
        j[pre + "kind"] = std::string(to_string(e->kind));
        j[pre + "cw_level"] = e->cw_level;
        j[pre + "pulse_height"] = e->pulse_height;
        j[pre + "pulse_width"] = e->pulse_width;
    }
    j["drive.fixed_average_power"] = c.sweep.fixed_average_power;
    j["grid.min"] = c.sweep.omega_rep_min;
    j["grid.max"] = c.sweep.omega_rep_max;
    j["grid.points"] = c.sweep.grid_points;
    j["grid.kind"] = std::string(to_string(c.sweep.grid_kind));
    j["grid.refine_rounds"] = c.sweep.refine_rounds;
    j["grid.refine_threshold"] = c.sweep.refine_threshold;
    j["integrator.tol"] = c.sweep.tol;
    j["integrator.decay_times"] = c.sweep.decay_times;
    j["integrator.min_periods"] = c.sweep.min_periods;
    j["integrator.sample_dt"] = c.sweep.sample_dt;
    j["analysis.fraction"] = c.sweep.analysis_fraction;
    const DensityState& s = c.sweep.initial;
    j["initial.state"] = s.rho_aa == 1.0 ? "a" : (s.rho_bb == 1.0 ? "b" : "c");
    j["workers"] = c.sweep.workers;
    j["peaks.channel"] = std::string(to_string(c.channel));
    j["peaks.min_prominence_frac"] = c.min_prominence_frac;
    j["peaks.match_tol_frac"] = c.match_tol_frac;
    j["predict.max_n"] = c.max_n;
    j["predict.max_m"] = c.max_m;
    j["classical.omega0"] = c.oscillator.omega0;
    j["classical.damping"] = c.oscillator.damping;
    j["classical.width_fraction"] = c.oscillator.width_fraction;
    j["output.dir"] = c.out_dir;
    j["output.strict"] = c.strict;
    j["output.dump_trajectory"] = c.dump_trajectory;
    return j;
}

}  // namespace fracres

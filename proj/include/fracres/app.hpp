#pragma once

// End-to-end run behind the command-line tool: sweep (or classical comb),
// peak detection and labelling, artifacts on disk and a short text report.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "fracres/config.hpp"
#include "fracres/dressed.hpp"
#include "fracres/io.hpp"
#include "fracres/oracle.hpp"
#include "fracres/spectra.hpp"
#include "fracres/sweep.hpp"

namespace fracres {

struct RunOutcome {
    ResonanceSpectrum spectrum;
    PredictedComb predicted;
    MatchReport report;
    int exit_code = 0;
};

inline PredictedComb predicted_comb(const RunConfig& c) {
    if (c.classical) return predict_resonances(c.oscillator.omega0, 0.0, c.max_n, Scenario::fig2);
    const SweepConfig& s = c.sweep;
    const double step = (s.omega_rep_max - s.omega_rep_min) / (s.grid_points - 1);
    switch (s.scenario) {
        case Scenario::fig5: return predict_rational_comb(s.params.omega_ab, c.max_m, c.max_n);
        case Scenario::fig3:
        case Scenario::custom:
            return predict_resonances(s.params.omega_ab, s.params.rabi_ac, c.max_n, s.scenario, 10.0 * step);
        case Scenario::fig2: break;
    }
    return predict_resonances(s.params.omega_ab, s.params.rabi_ac, c.max_n, Scenario::fig2);
}

inline ResonanceSpectrum compute_spectrum(const RunConfig& c) {
    if (c.classical)
        return classical_sweep(c.oscillator.omega0, c.oscillator.damping, c.sweep.omega_rep_min, c.sweep.omega_rep_max,
                               c.sweep.grid_points, c.sweep.workers, c.oscillator.width_fraction);
    return run_sweep(c.sweep);
}

inline std::string trajectory_file_name(double omega_rep) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "trajectory_%.10g.csv", omega_rep);
    return buf;
}

inline RunOutcome run(const RunConfig& c, std::ostream& log) {
    validate(c);
    namespace fs = std::filesystem;
    const fs::path out(c.out_dir);
    fs::create_directories(out);

    RunOutcome r;
    r.spectrum = compute_spectrum(c);
    r.predicted = predicted_comb(c);
    r.report = match_peaks(detect_peaks(r.spectrum, c.channel, c.min_prominence_frac), r.predicted, c.match_tol_frac);
    r.spectrum.peaks = r.report.peaks;

    {
        std::ofstream csv(out / "spectrum.csv");
        write_spectrum_csv(csv, r.spectrum);
    }
    nlohmann::json meta;
    meta["config"] = to_json(c);
    meta["predicted"] = predicted_json(r.predicted, &r.report);
    meta["peaks"] = nlohmann::json::array();
    for (const auto& p : r.report.peaks) meta["peaks"].push_back(to_json(p));
    meta["failures"] = failures_json(r.spectrum.failures);
    meta["version"] = version_string;
    {
        std::ofstream js(out / "spectrum.meta.json");
        js << meta.dump(2) << '\n';
    }

    for (double w : c.dump_trajectory) {
        if (c.classical) {
            log << "trajectory dumps are only available for quantum scenarios\n";
            break;
        }
        try {
            const Trajectory tr = simulate_point(c.sweep, w);
            std::ofstream f(out / trajectory_file_name(w));
            write_trajectory_csv(f, tr);
        } catch (const IntegrationFailure& e) {
            log << "trajectory at omega_rep=" << w << " failed: " << e.what() << '\n';
        }
    }

    log << "scenario " << c.scenario_name() << ": " << r.spectrum.size() << " points, " << r.spectrum.failures.size()
        << " failed, channel " << to_string(c.channel) << '\n';
    log << "peaks (location, height, fwhm, label):\n";
    for (const auto& p : r.report.peaks) {
        log << "  " << format_double(p.location) << "  " << p.height << "  " << p.fwhm;
        if (p.label) log << "  " << p.label->m << "/" << p.label->n << " of " << p.label->base;
        log << '\n';
    }
    if (!r.report.unmatched_predictions.empty()) {
        log << "unmatched predictions:";
        for (std::size_t e : r.report.unmatched_predictions) log << ' ' << r.predicted.entries[e].frequency;
        log << '\n';
    }
    for (const auto& f : r.spectrum.failures) log << "  failed omega_rep=" << f.omega_rep << ": " << f.message << '\n';

    if (c.strict && !r.spectrum.failures.empty()) r.exit_code = 3;
    return r;
}

}  // namespace fracres

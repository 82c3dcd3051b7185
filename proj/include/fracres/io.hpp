#pragma once

// CSV and JSON artifacts. Numbers are written with 17 significant digits so
// that reruns can be compared byte for byte.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracres/dressed.hpp"
#include "fracres/integrator.hpp"
#include "fracres/spectra.hpp"
#include "fracres/sweep.hpp"

namespace fracres {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline constexpr const char* spectrum_csv_header =
    "omega_rep,osc_amp_bc,pop_a,pop_b,pop_c,abs_pump,abs_probe,inv_pump,inv_probe";
inline constexpr const char* trajectory_csv_header = "t,rho_aa,rho_bb,rho_cc,re_ac,im_ac,re_bc,im_bc,re_ab,im_ab";

/// One row per grid point; a failed point has "nan" in every observable
/// column (the failure itself goes to the JSON sidecar).
inline void write_spectrum_csv(std::ostream& os, const ResonanceSpectrum& s) {
    os << spectrum_csv_header << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << format_double(s.omega_rep[i]);
        if (const auto& o = s.observables[i]) {
            for (double v : {o->osc_amplitude_bc, o->mean_pops[0], o->mean_pops[1], o->mean_pops[2],
                             o->absorption_pump, o->absorption_probe, o->inversion_pump, o->inversion_probe})
                os << ',' << format_double(v);
        } else {
            for (int k = 0; k < 8; ++k) os << ",nan";
        }
        os << '\n';
    }
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << trajectory_csv_header << '\n';
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const DensityState& s = tr.states[k];
        os << format_double(tr.times[k]);
        for (double v : {s.rho_aa, s.rho_bb, rho_cc(s), s.rho_ac.real(), s.rho_ac.imag(), s.rho_bc.real(),
                         s.rho_bc.imag(), s.rho_ab.real(), s.rho_ab.imag()})
            os << ',' << format_double(v);
        os << '\n';
    }
}

inline nlohmann::json to_json(const PeakLabel& l) {
    return {{"base", l.base}, {"m", l.m}, {"n", l.n}, {"kind", std::string(to_string(l.kind))},
            {"predicted", l.predicted}};
}

inline nlohmann::json to_json(const Peak& p) {
    nlohmann::json j{{"location", p.location}, {"height", p.height}, {"prominence", p.prominence},
                     {"fwhm", p.fwhm}};
    j["label"] = p.label ? to_json(*p.label) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json predicted_json(const PredictedComb& comb, const MatchReport* rep) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t e = 0; e < comb.entries.size(); ++e) {
        const CombEntry& x = comb.entries[e];
        nlohmann::json j{{"frequency", x.frequency}, {"base", x.base}, {"m", x.m}, {"n", x.n},
                         {"kind", std::string(to_string(x.kind))}};
        if (rep) {
            bool matched = true;
            for (std::size_t u : rep->unmatched_predictions) matched = matched && u != e;
            j["matched"] = matched;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

inline nlohmann::json failures_json(const std::vector<PointFailure>& f) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& x : f)
        arr.push_back({{"index", x.index}, {"omega_rep", x.omega_rep}, {"t", x.time}, {"message", x.message}});
    return arr;
}

}  // namespace fracres

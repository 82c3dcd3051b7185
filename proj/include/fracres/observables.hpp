#pragma once

// Steady-state observables of a sampled trajectory: oscillation amplitude of
// Im rho_bc, mean populations, absorption/gain on both transitions and the
// CPT / GWI / ADI classification.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracres/error.hpp"
#include "fracres/integrator.hpp"
#include "fracres/model.hpp"

namespace fracres {

/// Magnitude below which a signed quantity is treated as zero for flagging.
inline constexpr double flag_noise_floor = 1e-4;
inline constexpr double cpt_population_threshold = 0.6;
/// Windows shorter than this many drive periods are rejected.
inline constexpr double min_window_periods = 5.0;

struct InterferenceFlags {
    bool cpt = false;
    bool gwi_probe = false;
    bool adi_pump = false;

    friend bool operator==(const InterferenceFlags&, const InterferenceFlags&) = default;
};

struct ObservableSet {
    double osc_amplitude_bc = 0.0;
    std::array<double, 3> mean_pops{1.0, 0.0, 0.0};
    double absorption_pump = 0.0;
    double absorption_probe = 0.0;
    double inversion_pump = 0.0;
    double inversion_probe = 0.0;
    InterferenceFlags flags;

    // diagnostics over the analysed samples
    double max_trace_drift = 0.0;
    double min_eigenvalue = 1.0;

    friend bool operator==(const ObservableSet&, const ObservableSet&) = default;
};

struct AnalysisWindow {
    double begin = 0.0;
    double end = 0.0;
    /// Drive period the window length is measured against.
    double period = 1.0;
};

/// Smallest eigenvalue of the 3x3 density matrix reconstructed from s, in
/// closed form (trigonometric solution of the characteristic cubic).
inline double min_eigenvalue(const DensityState& s) noexcept {
    const double d0 = s.rho_aa, d1 = s.rho_bb, d2 = rho_cc_raw(s);
    const complex h01 = s.rho_ab, h02 = s.rho_ac, h12 = s.rho_bc;
    const double off = std::norm(h01) + std::norm(h02) + std::norm(h12);
    const double q = (d0 + d1 + d2) / 3.0;
    if (off == 0.0) return std::min({d0, d1, d2});

    const double e0 = d0 - q, e1 = d1 - q, e2 = d2 - q;
    const double p = std::sqrt((e0 * e0 + e1 * e1 + e2 * e2 + 2.0 * off) / 6.0);
    // det(H - qI) for a hermitian matrix is real
    const double det = e0 * e1 * e2 + 2.0 * std::real(h01 * h12 * std::conj(h02)) - e0 * std::norm(h12) -
                       e1 * std::norm(h02) - e2 * std::norm(h01);
    const double r = std::clamp(det / (2.0 * p * p * p), -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    return q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
}

inline InterferenceFlags classify(const ObservableSet& o) noexcept {
    InterferenceFlags f;
    f.cpt = o.mean_pops[1] > cpt_population_threshold;
    f.gwi_probe = o.absorption_probe < -flag_noise_floor && o.inversion_probe < -flag_noise_floor;
    f.adi_pump = o.absorption_pump > flag_noise_floor && o.inversion_pump > flag_noise_floor;
    return f;
}

/// Absorption on a transition is the rate at which that coupling moves
/// population into |c>:  -2 Im(conj(coupling) rho_ic).  Positive means the
/// field loses energy to the atom.
inline double absorption_rate(complex coupling, complex rho_ic) noexcept {
    return -2.0 * std::imag(std::conj(coupling) * rho_ic);
}

inline ObservableSet analyze(const Trajectory& traj, const AnalysisWindow& w) {
    if (!(w.period > 0.0)) throw ConfigError("window.period", "must be positive");
    if (!(w.end > w.begin)) throw ConfigError("window", "end must exceed begin");
    if (w.end - w.begin < min_window_periods * w.period * (1.0 - 1e-12))
        throw ConfigError("window", "shorter than 5 drive periods; amplitude is ill-defined");
    if (traj.size() == 0 || w.begin < traj.times.front() - 1e-9 || w.end > traj.times.back() + 1e-9)
        throw ConfigError("window", "does not lie inside the trajectory");

    ObservableSet o;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    std::array<double, 3> pops{};
    double abs_p = 0.0, abs_q = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        if (t < w.begin - 1e-12 || t > w.end + 1e-12) continue;
        const DensityState& s = traj.states[k];
        hi = std::max(hi, s.rho_bc.imag());
        lo = std::min(lo, s.rho_bc.imag());
        pops[0] += s.rho_aa;
        pops[1] += s.rho_bb;
        pops[2] += rho_cc(s);
        const Couplings c = couplings_at(t, traj.params, traj.f1, traj.f2);
        abs_p += absorption_rate(c.a_c, s.rho_ac);
        abs_q += absorption_rate(c.b_c, s.rho_bc);
        o.max_trace_drift = std::max(o.max_trace_drift, std::abs(s.rho_aa + s.rho_bb + rho_cc(s) - 1.0));
        o.min_eigenvalue = std::min(o.min_eigenvalue, min_eigenvalue(s));
        ++n;
    }
    if (n < 2) throw ConfigError("window", "contains fewer than two samples");

    const double inv_n = 1.0 / static_cast<double>(n);
    o.osc_amplitude_bc = 0.5 * (hi - lo);
    for (int i = 0; i < 3; ++i) o.mean_pops[i] = pops[i] * inv_n;
    o.absorption_pump = abs_p * inv_n;
    o.absorption_probe = abs_q * inv_n;
    o.inversion_pump = o.mean_pops[2] - o.mean_pops[0];
    o.inversion_probe = o.mean_pops[2] - o.mean_pops[1];
    // the redundant rho_cc carried by the integrator is the stricter check
    o.max_trace_drift = std::max(o.max_trace_drift, traj.max_trace_drift);
    o.flags = classify(o);
    return o;
}

}  // namespace fracres

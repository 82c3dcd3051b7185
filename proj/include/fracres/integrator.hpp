#pragma once

// Time integration of the master equations with pulse-aware step control and
// uniform resampling through the Dormand-Prince dense output.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fracres/dopri5.hpp"
#include "fracres/drive.hpp"
#include "fracres/model.hpp"

namespace fracres {

/// A state leaving the physical manifold by more than this is a hard error.
inline constexpr double physical_violation_limit = 1e-4;

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityState> states;
    SystemParams params;
    DriveEnvelope f1;
    DriveEnvelope f2;

    /// max |rho_aa + rho_bb + rho_cc - 1| over samples, with rho_cc carried as
    /// an independent integration variable.
    double max_trace_drift = 0.0;
    Dopri5Stats stats;

    std::size_t size() const noexcept { return times.size(); }
};

struct IntegrateOptions {
    double tol = 1e-8;
    double sample_dt = 0.01;
    /// Samples are recorded for t >= sample_from only.
    double sample_from = 0.0;
    /// Refined step inside pulse windows, as a fraction of the pulse width.
    double pulse_step_fraction = 0.25;
};

namespace detail {

// Integration vector: rho_aa, rho_bb, re/im rho_ac, re/im rho_bc, re/im rho_ab,
// and a redundant rho_cc evolved by its own equation.
using QuantumVec = RealVec<9>;

inline QuantumVec pack(const DensityState& s) noexcept {
    return {s.rho_aa, s.rho_bb, s.rho_ac.real(), s.rho_ac.imag(), s.rho_bc.real(),
            s.rho_bc.imag(), s.rho_ab.real(), s.rho_ab.imag(), rho_cc_raw(s)};
}

inline DensityState unpack(const QuantumVec& v) noexcept {
    return {v[0], v[1], {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]}};
}

inline double worst_violation(const DensityState& s) noexcept {
    const double cc = rho_cc_raw(s);
    double worst = std::max({-s.rho_aa, -s.rho_bb, -cc, 0.0});
    worst = std::max(worst, std::norm(s.rho_ac) - s.rho_aa * cc);
    worst = std::max(worst, std::norm(s.rho_bc) - s.rho_bb * cc);
    worst = std::max(worst, std::norm(s.rho_ab) - s.rho_aa * s.rho_bb);
    return worst;
}

}  // namespace detail

inline void validate_integration(const DensityState& initial, double t_end, const SystemParams& p,
                                 const IntegrateOptions& o) {
    p.validate();
    if (!(o.tol >= 1e-12 && o.tol <= 1e-4)) throw ConfigError("tol", "must lie in [1e-12, 1e-4]");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end", "must be positive");
    if (!(o.sample_dt > 0.0)) throw ConfigError("sample_dt", "must be positive");
    if (p.omega_ab > 0.0 && o.sample_dt > 2.0 * std::numbers::pi / (20.0 * p.omega_ab) * (1 + 1e-12))
        throw ConfigError("sample_dt", "must resolve omega_ab (<= 2 pi / (20 omega_ab))");
    if (detail::worst_violation(initial) > physical_violation_limit)
        throw ConfigError("initial", "initial state is not a physical density matrix");
}

/// Integrates from t = 0 to t_end and samples the solution at
/// t = sample_from + k * sample_dt (k = 0, 1, ...), t <= t_end.
///
/// Inside a pulse window (centre +/- 6 widths) the step is capped at a quarter
/// of the pulse width, and no step crosses the start of a window.
///
/// Throws IntegrationFailure on step-size underflow or when the state leaves
/// the physical manifold by more than 1e-4.
inline Trajectory integrate(const DensityState& initial, double t_end, const SystemParams& params,
                            const DriveEnvelope& f1, const DriveEnvelope& f2,
                            const IntegrateOptions& opts = {}) {
    validate_integration(initial, t_end, params, opts);

    Trajectory traj;
    traj.params = params;
    traj.f1 = f1;
    traj.f2 = f2;

    const double first_sample = std::max(0.0, opts.sample_from);
    if (first_sample <= t_end) {
        const auto n = static_cast<std::size_t>(std::floor((t_end - first_sample) / opts.sample_dt + 1e-9)) + 1;
        traj.times.reserve(n);
        traj.states.reserve(n);
    }

    auto rhs = [&](double t, const detail::QuantumVec& y, detail::QuantumVec& dy) {
        const DensityState s = detail::unpack(y);
        const Couplings c = couplings_at(t, params, f1, f2);
        const DensityState d = master_rhs(s, params, c);
        dy = {d.rho_aa,        d.rho_bb,        d.rho_ac.real(), d.rho_ac.imag(), d.rho_bc.real(),
              d.rho_bc.imag(), d.rho_ab.real(), d.rho_ab.imag(),
              upper_population_rate(s, y[8], params, c)};
    };

    std::vector<const DriveEnvelope*> pulsed;
    for (const DriveEnvelope* e : {&f1, &f2})
        if (e->has_pulses() && e->pulse_height != 0.0) pulsed.push_back(e);

    auto limiter = [&](double t) {
        StepLimit lim;
        for (const DriveEnvelope* e : pulsed) {
            const auto w = pulse_window_at_or_after(*e, t);
            if (!w) continue;
            // Starting exactly at (or within roundoff of) a window counts as inside.
            if (w->begin <= t + 1e-12 * std::max(1.0, std::abs(t))) {
                lim.max_step = std::min(lim.max_step, opts.pulse_step_fraction * e->pulse_width);
            } else {
                lim.barrier = std::min(lim.barrier, w->begin);
            }
        }
        return lim;
    };

    std::size_t next_index = 0;
    auto next_time = [&](std::size_t k) { return first_sample + static_cast<double>(k) * opts.sample_dt; };

    auto record = [&](double t, const detail::QuantumVec& y) {
        const DensityState s = detail::unpack(y);
        traj.times.push_back(t);
        traj.states.push_back(s);
        traj.max_trace_drift = std::max(traj.max_trace_drift, std::abs(y[0] + y[1] + y[8] - 1.0));
    };

    if (first_sample == 0.0) {
        record(0.0, detail::pack(initial));
        next_index = 1;
    }

    auto observe = [&](const DenseSegment<9>& seg) {
        const double t1 = seg.t1();
        if (detail::worst_violation(detail::unpack(seg.r1 /*start*/)) > physical_violation_limit)
            throw IntegrationFailure(seg.t0, "state left the physical manifold");
        while (next_time(next_index) <= t1 + 1e-12 * t1 && next_time(next_index) <= t_end * (1 + 1e-15)) {
            const double ts = next_time(next_index);
            record(ts, seg(std::min(ts, t1)));
            ++next_index;
        }
    };

    Dopri5Options dopt;
    dopt.rtol = opts.tol;
    dopt.atol = opts.tol;
    const detail::QuantumVec y_end =
        dopri5_integrate<9>(rhs, detail::pack(initial), 0.0, t_end, dopt, limiter, observe, &traj.stats);
    if (detail::worst_violation(detail::unpack(y_end)) > physical_violation_limit)
        throw IntegrationFailure(t_end, "state left the physical manifold");
    return traj;
}

}  // namespace fracres

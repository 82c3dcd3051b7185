#pragma once

// Repetition-rate scan. Every grid point is an independent simulation over an
// immutable configuration; points are farmed out to a small thread pool and
// results are gathered by grid index, so the output does not depend on the
// worker count or on scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iterator>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "fracres/drive.hpp"
#include "fracres/error.hpp"
#include "fracres/integrator.hpp"
#include "fracres/model.hpp"
#include "fracres/observables.hpp"
#include "fracres/peak.hpp"

namespace fracres {

enum class Scenario { fig2, fig3, fig5, custom };

inline std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::fig2: return "fig2";
        case Scenario::fig3: return "fig3";
        case Scenario::fig5: return "fig5";
        case Scenario::custom: return "custom";
    }
    return "?";
}

inline Scenario scenario_from_string(std::string_view s) {
    if (s == "fig2") return Scenario::fig2;
    if (s == "fig3") return Scenario::fig3;
    if (s == "fig5") return Scenario::fig5;
    if (s == "custom") return Scenario::custom;
    throw ConfigError("scenario", "unknown scenario '" + std::string(s) + "'");
}

enum class GridKind { linear, adaptive_refine };

inline std::string_view to_string(GridKind g) { return g == GridKind::linear ? "linear" : "adaptive-refine"; }

inline GridKind grid_kind_from_string(std::string_view s) {
    if (s == "linear") return GridKind::linear;
    if (s == "adaptive-refine" || s == "adaptive_refine") return GridKind::adaptive_refine;
    throw ConfigError("grid.kind", "expected 'linear' or 'adaptive-refine'");
}

/// Shape of one field's envelope; the repetition period comes from the grid.
struct EnvelopeSpec {
    EnvelopeKind kind = EnvelopeKind::cw;
    double cw_level = 1.0;
    double pulse_height = 1.0;
    double pulse_width = 0.02;

    friend bool operator==(const EnvelopeSpec&, const EnvelopeSpec&) = default;
};

struct SweepConfig {
    Scenario scenario = Scenario::fig2;
    SystemParams params;
    /// Derive rabi_acb / rabi_bca from rabi_ac / rabi_bc (equal dipoles).
    bool cross_follows_direct = true;

    EnvelopeSpec f1;
    EnvelopeSpec f2;
    /// Scale pulse heights by tau / tau_ref (tau_ref = 2 pi / omega_ab) so
    /// the time-averaged pulse power does not change along the sweep.
    bool fixed_average_power = false;

    double omega_rep_min = 1.0;
    double omega_rep_max = 13.0;
    int grid_points = 600;
    GridKind grid_kind = GridKind::linear;
    int refine_rounds = 3;
    double refine_threshold = 0.1;

    double tol = 1e-8;
    /// Run length max(decay_times / min gamma, min_periods * tau).
    double decay_times = 50.0;
    double min_periods = 200.0;
    /// Trailing fraction of the run that is analysed.
    double analysis_fraction = 0.25;
    /// 0 selects min(2 pi / (20 omega_ab), pulse width / 2).
    double sample_dt = 0.0;

    DensityState initial = DensityState::ground_a();
    unsigned workers = 1;

    SystemParams resolved_params() const {
        SystemParams p = params;
        if (cross_follows_direct) p.set_cross_from_direct();
        return p;
    }

    double min_decay_rate() const {
        double g = std::numeric_limits<double>::infinity();
        for (double v : {params.gamma_ab, params.gamma_ac, params.gamma_bc})
            if (v > 0.0) g = std::min(g, v);
        return g;
    }

    double run_length(double omega_rep) const {
        return std::max(decay_times / min_decay_rate(), min_periods * rep_rate_to_period(omega_rep));
    }

    double resolved_sample_dt() const {
        if (sample_dt > 0.0) return sample_dt;
        double dt = params.omega_ab > 0.0 ? 2.0 * std::numbers::pi / (20.0 * params.omega_ab) : 0.05;
        for (const EnvelopeSpec* e : {&f1, &f2})
            if (e->kind != EnvelopeKind::cw) dt = std::min(dt, 0.5 * e->pulse_width);
        return dt;
    }

    DriveEnvelope envelope(const EnvelopeSpec& spec, double omega_rep) const {
        if (spec.kind == EnvelopeKind::cw) return DriveEnvelope::cw(spec.cw_level);
        const double tau = rep_rate_to_period(omega_rep);
        double height = spec.pulse_height;
        if (fixed_average_power && params.omega_ab > 0.0)
            height *= tau / (2.0 * std::numbers::pi / params.omega_ab);
        if (spec.kind == EnvelopeKind::pulse_train) return DriveEnvelope::pulse_train(tau, spec.pulse_width, height);
        return DriveEnvelope::mixed(spec.cw_level, tau, spec.pulse_width, height);
    }

    void validate() const {
        resolved_params().validate();
        if (!(omega_rep_min > 0.0) || !std::isfinite(omega_rep_min))
            throw ConfigError("grid.min", "must be positive");
        if (!(omega_rep_max > omega_rep_min) || !std::isfinite(omega_rep_max))
            throw ConfigError("grid.max", "must exceed grid.min");
        if (grid_points < 2) throw ConfigError("grid.points", "must be >= 2");
        if (refine_rounds < 0) throw ConfigError("grid.refine_rounds", "must be >= 0");
        if (!(refine_threshold > 0.0 && refine_threshold < 1.0))
            throw ConfigError("grid.refine_threshold", "must lie in (0, 1)");
        if (!std::isfinite(min_decay_rate()))
            throw ConfigError("gamma_ac", "at least one decay rate must be positive to reach a steady state");
        if (!(decay_times > 0.0)) throw ConfigError("integrator.decay_times", "must be positive");
        if (!(min_periods > 0.0)) throw ConfigError("integrator.min_periods", "must be positive");
        if (!(analysis_fraction > 0.0 && analysis_fraction <= 1.0))
            throw ConfigError("analysis.fraction", "must lie in (0, 1]");
        // one spare period covers the samples lost at the window edges
        if (min_periods * analysis_fraction < min_window_periods + 1.0)
            throw ConfigError("integrator.min_periods", "analysed tail must span at least 6 drive periods");
        if (workers < 1) throw ConfigError("workers", "must be >= 1");
        // the densest train is at omega_rep_max
        envelope(f1, omega_rep_max).validate();
        envelope(f2, omega_rep_max).validate();
        IntegrateOptions o;
        o.tol = tol;
        o.sample_dt = resolved_sample_dt();
        validate_integration(initial, run_length(omega_rep_min), resolved_params(), o);
    }
};

/// Parameter presets for the three figures. Pulse shapes are not given in
/// the source; pulses are 0.02 wide with a peak Rabi frequency equal to the
/// field's Rabi amplitude.
inline SweepConfig scenario_preset(Scenario s) {
    SweepConfig c;
    c.scenario = s;
    c.params = SystemParams{};
    const EnvelopeSpec cw1{EnvelopeKind::cw, 1.0, 0.0, 0.02};
    const EnvelopeSpec off{EnvelopeKind::cw, 0.0, 0.0, 0.02};
    const EnvelopeSpec pulses{EnvelopeKind::pulse_train, 0.0, 1.0, 0.02};
    switch (s) {
        case Scenario::fig2:
        case Scenario::custom:
            // cw E_ac, pulsed E_bc
            c.params.rabi_ac = 1.0;
            c.params.rabi_bc = 20.0;
            c.f1 = cw1;
            c.f2 = pulses;
            break;
        case Scenario::fig3:
            // E_ac with cw and pulsed parts, E_bc absent
            c.params.rabi_ac = 1.0;
            c.params.rabi_bc = 0.0;
            c.f1 = EnvelopeSpec{EnvelopeKind::mixed, 1.0, 1.0, 0.02};
            c.f2 = off;
            break;
        case Scenario::fig5:
            // strong pulsed pump, weak cw probe
            c.params.rabi_ac = 20.0;
            c.params.rabi_bc = 0.1;
            c.f1 = pulses;
            c.f2 = cw1;
            break;
    }
    c.params.set_cross_from_direct();
    return c;
}

struct PointFailure {
    std::size_t index = 0;
    double omega_rep = 0.0;
    double time = 0.0;
    std::string message;
};

struct PointResult {
    double omega_rep = 0.0;
    std::optional<ObservableSet> observables;
    std::optional<PointFailure> failure;
};

struct ResonanceSpectrum {
    std::vector<double> omega_rep;
    std::vector<std::optional<ObservableSet>> observables;
    std::vector<PointFailure> failures;
    std::vector<Peak> peaks;

    std::size_t size() const noexcept { return omega_rep.size(); }
};

/// Integrates one grid point and returns the trajectory over the analysis
/// window only.
inline Trajectory simulate_point(const SweepConfig& cfg, double omega_rep) {
    const SystemParams p = cfg.resolved_params();
    const double t_end = cfg.run_length(omega_rep);
    IntegrateOptions o;
    o.tol = cfg.tol;
    o.sample_dt = cfg.resolved_sample_dt();
    o.sample_from = (1.0 - cfg.analysis_fraction) * t_end;
    return integrate(cfg.initial, t_end, p, cfg.envelope(cfg.f1, omega_rep), cfg.envelope(cfg.f2, omega_rep), o);
}

inline AnalysisWindow analysis_window(const Trajectory& traj, double omega_rep) {
    return {traj.times.front(), traj.times.back(), rep_rate_to_period(omega_rep)};
}

inline PointResult evaluate_point(const SweepConfig& cfg, double omega_rep, std::size_t index = 0) {
    PointResult r;
    r.omega_rep = omega_rep;
    try {
        const Trajectory traj = simulate_point(cfg, omega_rep);
        r.observables = analyze(traj, analysis_window(traj, omega_rep));
    } catch (const IntegrationFailure& e) {
        r.failure = PointFailure{index, omega_rep, e.time(), e.what()};
    }
    return r;
}

/// Calls f(i) for i in [0, n) on `workers` threads and returns the results in
/// index order. The first exception thrown by f is rethrown after all
/// threads have joined.
template <class F>
auto parallel_map(std::size_t n, unsigned workers, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
    using R = decltype(f(std::size_t{}));
    std::vector<std::optional<R>> slots(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };

    const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
    if (nthreads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(nthreads);
        for (unsigned k = 0; k < nthreads; ++k) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);

    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

inline std::vector<double> linear_grid(double lo, double hi, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g[static_cast<std::size_t>(i)] = i == points - 1 ? hi : lo + (hi - lo) * i / (points - 1);
    return g;
}

namespace detail {

inline ResonanceSpectrum assemble(std::vector<PointResult>&& pts) {
    ResonanceSpectrum s;
    s.omega_rep.reserve(pts.size());
    s.observables.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        s.omega_rep.push_back(pts[i].omega_rep);
        s.observables.push_back(pts[i].observables);
        if (pts[i].failure) {
            PointFailure f = *pts[i].failure;
            f.index = i;
            s.failures.push_back(std::move(f));
        }
    }
    return s;
}

// Midpoints between neighbours whose amplitudes differ by more than
// threshold * global max. Failed points never trigger refinement.
inline std::vector<double> refinement_points(const std::vector<PointResult>& pts, double threshold) {
    double top = 0.0;
    for (const auto& p : pts)
        if (p.observables) top = std::max(top, p.observables->osc_amplitude_bc);
    std::vector<double> mids;
    if (!(top > 0.0)) return mids;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto& a = pts[i].observables;
        const auto& b = pts[i + 1].observables;
        if (!a || !b) continue;
        if (std::abs(a->osc_amplitude_bc - b->osc_amplitude_bc) > threshold * top)
            mids.push_back(0.5 * (pts[i].omega_rep + pts[i + 1].omega_rep));
    }
    return mids;
}

}  // namespace detail

/// Runs the scan. Integration failures are recorded per point; invalid
/// configuration throws ConfigError before any work starts.
inline ResonanceSpectrum run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const std::vector<double> grid = linear_grid(cfg.omega_rep_min, cfg.omega_rep_max, cfg.grid_points);
    auto eval = [&](const std::vector<double>& g) {
        return parallel_map(g.size(), cfg.workers, [&](std::size_t i) { return evaluate_point(cfg, g[i], i); });
    };
    std::vector<PointResult> pts = eval(grid);

    if (cfg.grid_kind == GridKind::adaptive_refine) {
        for (int round = 0; round < cfg.refine_rounds; ++round) {
            const std::vector<double> mids = detail::refinement_points(pts, cfg.refine_threshold);
            if (mids.empty()) break;
            std::vector<PointResult> extra = eval(mids);
            std::vector<PointResult> merged;
            merged.reserve(pts.size() + extra.size());
            std::merge(std::make_move_iterator(pts.begin()), std::make_move_iterator(pts.end()),
                       std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()),
                       std::back_inserter(merged),
                       [](const PointResult& a, const PointResult& b) { return a.omega_rep < b.omega_rep; });
            pts = std::move(merged);
        }
    }
    return detail::assemble(std::move(pts));
}

}  // namespace fracres

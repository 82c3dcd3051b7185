#pragma once

// Time envelopes f1(t), f2(t) of the two driving fields: cw, a Gaussian pulse
// train with repetition period tau, or the sum of both.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "fracres/error.hpp"

namespace fracres {

enum class EnvelopeKind { cw, pulse_train, mixed };

inline std::string_view to_string(EnvelopeKind k) {
    switch (k) {
        case EnvelopeKind::cw: return "cw";
        case EnvelopeKind::pulse_train: return "pulse_train";
        case EnvelopeKind::mixed: return "mixed";
    }
    return "?";
}

inline EnvelopeKind envelope_kind_from_string(std::string_view s) {
    if (s == "cw") return EnvelopeKind::cw;
    if (s == "pulse_train") return EnvelopeKind::pulse_train;
    if (s == "mixed") return EnvelopeKind::mixed;
    throw ConfigError("kind", "unknown envelope kind '" + std::string(s) + "'");
}

/// Half-width of the region around a pulse centre, in units of sigma, inside
/// which the integrator refines its step. The Gaussian is below 1.6e-8 of
/// its peak outside it.
inline constexpr double pulse_window_sigmas = 6.0;

/// Pulses must satisfy pulse_width < rep_period / min_period_over_width.
inline constexpr double min_period_over_width = 6.0;

struct DriveEnvelope {
    EnvelopeKind kind = EnvelopeKind::cw;
    double cw_level = 1.0;
    double rep_period = 1.0;
    double pulse_width = 0.05;
    double pulse_height = 1.0;
    long n_start = 0;

    static DriveEnvelope cw(double level = 1.0) {
        DriveEnvelope e;
        e.kind = EnvelopeKind::cw;
        e.cw_level = level;
        return e;
    }

    static DriveEnvelope pulse_train(double period, double width, double height = 1.0) {
        DriveEnvelope e;
        e.kind = EnvelopeKind::pulse_train;
        e.cw_level = 0.0;
        e.rep_period = period;
        e.pulse_width = width;
        e.pulse_height = height;
        return e;
    }

    static DriveEnvelope mixed(double level, double period, double width, double height) {
        DriveEnvelope e = pulse_train(period, width, height);
        e.kind = EnvelopeKind::mixed;
        e.cw_level = level;
        return e;
    }

    bool has_pulses() const noexcept { return kind != EnvelopeKind::cw; }
    bool has_cw() const noexcept { return kind != EnvelopeKind::pulse_train; }

    /// Throws ConfigError when the envelope violates its invariants. The
    /// width guard can be relaxed by callers that know what they are doing.
    void validate(double period_over_width = min_period_over_width) const {
        if (!std::isfinite(cw_level)) throw ConfigError("cw_level", "must be finite");
        if (!has_pulses()) return;
        if (!(rep_period > 0.0) || !std::isfinite(rep_period))
            throw ConfigError("rep_period", "must be positive");
        if (!(pulse_width > 0.0)) throw ConfigError("pulse_width", "must be positive");
        if (!std::isfinite(pulse_height)) throw ConfigError("pulse_height", "must be finite");
        if (!(pulse_width * period_over_width < rep_period))
            throw ConfigError("pulse_width", "pulses overlap: width must be below rep_period/" +
                                                 std::to_string(period_over_width));
    }
};

/// Value of a single Gaussian pulse of the train centred at the origin.
inline double gaussian_pulse(double dt, double width, double height) noexcept {
    const double x = dt / width;
    return height * std::exp(-0.5 * x * x);
}

/// f(t). Only the three pulse centres nearest to t are summed: with the width
/// guard every other centre lies at least 9 widths away, i.e. below exp(-40.5).
inline double evaluate(const DriveEnvelope& env, double t) noexcept {
    double v = env.has_cw() ? env.cw_level : 0.0;
    if (!env.has_pulses()) return v;
    const double tau = env.rep_period;
    const long nearest = static_cast<long>(std::llround(t / tau));
    for (long n = nearest - 1; n <= nearest + 1; ++n) {
        if (n < env.n_start) continue;
        v += gaussian_pulse(t - static_cast<double>(n) * tau, env.pulse_width, env.pulse_height);
    }
    return v;
}

/// tau = 2 pi / omega_rep.
inline double rep_rate_to_period(double omega_rep) {
    if (!(omega_rep > 0.0) || !std::isfinite(omega_rep))
        throw ConfigError("omega_rep", "repetition rate must be positive");
    return 2.0 * std::numbers::pi / omega_rep;
}

/// Time interval [begin, end] in which a pulse is active.
struct PulseWindow {
    double begin;
    double end;
};

/// The pulse window containing t, or the first one starting after t.
inline std::optional<PulseWindow> pulse_window_at_or_after(const DriveEnvelope& env, double t) {
    if (!env.has_pulses()) return std::nullopt;
    const double tau = env.rep_period;
    const double half = pulse_window_sigmas * env.pulse_width;
    long n = static_cast<long>(std::floor((t - half) / tau));
    n = std::max(n, env.n_start);
    for (;; ++n) {
        const double c = static_cast<double>(n) * tau;
        if (c + half > t) return PulseWindow{c - half, c + half};
    }
}

}  // namespace fracres

#pragma once

// Classical analogue: a damped oscillator kicked by a periodic train,
//   x'' + b x' + w0^2 x = sum_n delta(t - n tau).
// Its steady amplitude shows the same w0/n comb as the atom, so it serves as
// an independent end-to-end reference for the sweep and peak pipeline.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "fracres/dopri5.hpp"
#include "fracres/drive.hpp"
#include "fracres/error.hpp"
#include "fracres/sweep.hpp"

namespace fracres {

struct OscillatorParams {
    double omega0 = 10.0;
    double damping = 0.2;
    double rep_period = 2.0 * std::numbers::pi / 10.0;

    void validate() const {
        if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ConfigError("omega0", "must be positive");
        if (!(damping > 0.0) || !std::isfinite(damping)) throw ConfigError("damping", "must be positive");
        if (!(rep_period > 0.0) || !std::isfinite(rep_period)) throw ConfigError("rep_period", "must be positive");
    }
};

namespace detail {

// Locates max and min of a periodic function sampled on n points over one
// period and polishes each extremum with golden-section search.
template <class F>
double periodic_half_range(F&& x, double period, int n = 4096) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = x(period * i / n);
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double h = period / n;

    auto polish = [&](std::ptrdiff_t idx, double sign) {
        double a = period * static_cast<double>(idx) / n - h, b = a + 2.0 * h;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = sign * x(c), fd = sign * x(d);
        for (int it = 0; it < 60; ++it) {
            if (fc > fd) {
                b = d; d = c; fd = fc;
                c = b - g * (b - a);
                fc = sign * x(c);
            } else {
                a = c; c = d; fc = fd;
                d = a + g * (b - a);
                fd = sign * x(d);
            }
        }
        return std::max(sign * v[static_cast<std::size_t>(idx)], std::max(fc, fd));
    };
    const double hi = polish(hi_it - v.begin(), 1.0);
    const double lo = -polish(lo_it - v.begin(), -1.0);
    return 0.5 * (hi - lo);
}

}  // namespace detail

/// Periodic steady state x(t) on [0, tau) from the Fourier series of the
/// comb,
///   x(t) = sum_k (1/tau) e^{i k w t} / (w0^2 - (k w)^2 + i b k w).
/// The series converges only like 1/k^2, so the leading tail
/// -(1/tau) e^{ikwt}/(kw)^2 is summed in closed form (a Bernoulli polynomial)
/// and the remainder, decaying like 1/k^3, is summed until a term falls below
/// 1e-12 of the running sum.
class FourierSteadyState {
public:
    explicit FourierSteadyState(const OscillatorParams& p) : p_(p) {
        p.validate();
        if (!(p.damping < 2.0 * p.omega0)) throw ConfigError("damping", "overdamped (b >= 2 w0) is not supported");
        w_ = 2.0 * std::numbers::pi / p.rep_period;
        // terms are bounded by 2 |w0^2 + i b k w| / (|D_k| (k w)^2); pick K once
        const double scale = 1.0 / (p.omega0 * p.omega0);
        kmax_ = 1;
        for (long k = 1; k < 50'000'000; ++k) {
            const double kw = k * w_;
            const std::complex<double> dk{p.omega0 * p.omega0 - kw * kw, p.damping * kw};
            const double bound = 2.0 * std::abs(std::complex<double>{p.omega0 * p.omega0, p.damping * kw}) /
                                 (std::abs(dk) * kw * kw);
            if (k > 4 && kw > 2.0 * p.omega0 && bound < 1e-12 * scale) {
                kmax_ = k;
                break;
            }
            kmax_ = k;
        }
        coef_.resize(static_cast<std::size_t>(kmax_));
        for (long k = 1; k <= kmax_; ++k) {
            const double kw = k * w_;
            const std::complex<double> dk{p.omega0 * p.omega0 - kw * kw, p.damping * kw};
            coef_[static_cast<std::size_t>(k - 1)] = 1.0 / dk + 1.0 / (kw * kw);
        }
    }

    double operator()(double t) const {
        const double tau = p_.rep_period;
        double theta = std::fmod(w_ * t, 2.0 * std::numbers::pi);
        if (theta < 0.0) theta += 2.0 * std::numbers::pi;
        // sum_{k>=1} cos(k theta)/k^2 = pi^2/6 - pi theta/2 + theta^2/4 on [0, 2 pi]
        const double tail = std::numbers::pi * std::numbers::pi / 6.0 - std::numbers::pi * theta / 2.0 +
                            theta * theta / 4.0;
        double sum = 1.0 / (p_.omega0 * p_.omega0) - 2.0 * tail / (w_ * w_);
        const std::complex<double> step{std::cos(theta), std::sin(theta)};
        std::complex<double> e = step;
        for (long k = 1; k <= kmax_; ++k) {
            sum += 2.0 * std::real(e * coef_[static_cast<std::size_t>(k - 1)]);
            e *= step;
            if ((k & 63) == 0) e /= std::abs(e);
        }
        return sum / tau;
    }

    long terms() const noexcept { return kmax_; }

private:
    OscillatorParams p_;
    double w_ = 0.0;
    long kmax_ = 0;
    std::vector<std::complex<double>> coef_;
};

/// Steady-state amplitude (max - min)/2 from the Fourier series.
inline double classical_amplitude_analytic(const OscillatorParams& p) {
    const FourierSteadyState x(p);
    return detail::periodic_half_range(x, p.rep_period);
}

/// Steady-state amplitude obtained by integrating the oscillator with each
/// delta replaced by a unit-area Gaussian of the given width. The run lasts
/// until exp(-b t / 2) < 1e-6 and the last ten periods are analysed.
inline double classical_amplitude_timedomain(const OscillatorParams& p, double pulse_width, double area = 1.0,
                                             double tol = 1e-10) {
    p.validate();
    if (!(pulse_width > 0.0) || pulse_width > p.rep_period / 20.0 * (1.0 + 1e-12))
        throw ConfigError("pulse_width", "must lie in (0, tau/20]");
    const DriveEnvelope force =
        DriveEnvelope::pulse_train(p.rep_period, pulse_width, area / (pulse_width * std::sqrt(2.0 * std::numbers::pi)));

    const double settle = 2.0 * std::log(1e6) / p.damping;
    const double t_end = (std::ceil(settle / p.rep_period) + 10.0) * p.rep_period;
    const double t_from = t_end - 10.0 * p.rep_period;
    const double w02 = p.omega0 * p.omega0;

    auto rhs = [&](double t, const RealVec<2>& y, RealVec<2>& dy) {
        dy[0] = y[1];
        dy[1] = -p.damping * y[1] - w02 * y[0] + evaluate(force, t);
    };
    auto limiter = [&](double t) {
        StepLimit lim;
        if (const auto w = pulse_window_at_or_after(force, t)) {
            if (w->begin <= t + 1e-12 * std::max(1.0, std::abs(t)))
                lim.max_step = 0.25 * pulse_width;
            else
                lim.barrier = w->begin;
        }
        return lim;
    };
    double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
    const double dt = std::min(p.rep_period / 2000.0, 2.0 * std::numbers::pi / p.omega0 / 200.0);
    double next = t_from;
    auto observe = [&](const DenseSegment<2>& seg) {
        while (next <= seg.t1()) {
            const double x = seg(next)[0];
            hi = std::max(hi, x);
            lo = std::min(lo, x);
            next += dt;
        }
    };
    Dopri5Options opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-2;
    dopri5_integrate<2>(rhs, RealVec<2>{0.0, 0.0}, 0.0, t_end, opt, limiter, observe);
    if (area == 0.0) return 0.0;
    return 0.5 * (hi - lo);
}

/// Classical comb on a linear grid of repetition rates, in the same spectrum
/// layout as the quantum sweep (only osc_amplitude_bc is meaningful).
inline ResonanceSpectrum classical_sweep(double omega0, double damping, double omega_min, double omega_max,
                                         int points, unsigned workers = 1, double width_fraction = 1.0 / 500.0) {
    if (points < 2) throw ConfigError("grid.points", "must be >= 2");
    if (!(omega_min > 0.0) || !(omega_max > omega_min)) throw ConfigError("grid", "need 0 < min < max");
    const std::vector<double> grid = linear_grid(omega_min, omega_max, points);
    auto pts = parallel_map(grid.size(), workers, [&](std::size_t i) {
        PointResult r;
        r.omega_rep = grid[i];
        const OscillatorParams p{omega0, damping, rep_rate_to_period(grid[i])};
        ObservableSet o;
        o.osc_amplitude_bc = classical_amplitude_timedomain(p, width_fraction * p.rep_period);
        r.observables = o;
        return r;
    });
    return detail::assemble(std::move(pts));
}

}  // namespace fracres

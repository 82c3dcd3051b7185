#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with FSAL and the standard
// fourth-order continuous extension (Hairer, Norsett & Wanner, DOPRI5).
// The stepper is generic over fixed-size real state vectors; callers supply
// the right-hand side, an optional step limiter and an observer that receives
// every accepted step as a dense-output segment.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include "fracres/error.hpp"

namespace fracres {

template <std::size_t N>
using RealVec = std::array<double, N>;

struct Dopri5Options {
    double rtol = 1e-8;
    double atol = 1e-8;
    double initial_step = 0.0;  // 0: choose automatically
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 200'000'000;
};

struct Dopri5Stats {
    long accepted = 0;
    long rejected = 0;
    long rhs_calls = 0;
};

/// Limits for the next step starting at t: the step may not exceed max_step
/// and may not cross barrier.
struct StepLimit {
    double max_step = std::numeric_limits<double>::infinity();
    double barrier = std::numeric_limits<double>::infinity();
};

struct NoStepLimit {
    StepLimit operator()(double) const noexcept { return {}; }
};

/// Dense output over one accepted step [t0, t0 + h].
template <std::size_t N>
class DenseSegment {
public:
    double t0 = 0.0;
    double h = 0.0;

    double t1() const noexcept { return t0 + h; }

    RealVec<N> operator()(double t) const noexcept {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        RealVec<N> y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
        return y;
    }

    RealVec<N> r1{}, r2{}, r3{}, r4{}, r5{};
};

namespace dp {
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dp

/// Integrates y' = rhs(t, y) from t0 to t1. `rhs` has signature
/// void(double t, const RealVec<N>& y, RealVec<N>& dydt). `observe` is called
/// with each accepted DenseSegment and may throw to abort. Returns y(t1).
template <std::size_t N, class Rhs, class Limiter, class Observer>
RealVec<N> dopri5_integrate(Rhs&& rhs, RealVec<N> y, double t0, double t1, const Dopri5Options& opt,
                            Limiter&& limit, Observer&& observe, Dopri5Stats* stats = nullptr) {
    using namespace dp;
    Dopri5Stats local;
    Dopri5Stats& st = stats ? *stats : local;
    if (!(t1 > t0)) return y;

    RealVec<N> k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
    auto axpy = [&](auto&&... terms) {
        // tmp = y + sum(coef * k)
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + (0.0 + ... + (terms.first * (*terms.second)[i]));
    };

    double t = t0;
    rhs(t, y, k1);
    ++st.rhs_calls;

    auto scale = [&](std::size_t, double a, double b) {
        return opt.atol + opt.rtol * std::max(std::abs(a), std::abs(b));
    };

    double h = opt.initial_step;
    if (!(h > 0.0)) {
        // Hairer's starting-step heuristic, first stage only.
        double d0 = 0.0, d1n = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = scale(i, y[i], y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1n += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / N);
        d1n = std::sqrt(d1n / N);
        h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    }
    h = std::min(h, opt.max_step);

    double fac_old = 1e-4;  // PI controller memory
    bool last_rejected = false;
    DenseSegment<N> seg;

    while (t < t1) {
        if (st.accepted + st.rejected >= opt.max_steps)
            throw IntegrationFailure(t, "step budget exhausted");

        const StepLimit lim = limit(t);
        double hs = std::min({h, opt.max_step, lim.max_step});
        bool hit_barrier = false;
        if (lim.barrier > t && t + hs >= lim.barrier) {
            hs = lim.barrier - t;
            hit_barrier = true;
        }
        bool hit_end = false;
        if (t + hs >= t1 || (t1 - (t + hs)) < 1e-12 * std::abs(t1)) {
            hs = t1 - t;
            hit_end = true;
        }
        if (!(hs > 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))))
            throw IntegrationFailure(t, "step size underflow");

        axpy(std::pair{hs * a21, &k1});
        rhs(t + c2 * hs, tmp, k2);
        axpy(std::pair{hs * a31, &k1}, std::pair{hs * a32, &k2});
        rhs(t + c3 * hs, tmp, k3);
        axpy(std::pair{hs * a41, &k1}, std::pair{hs * a42, &k2}, std::pair{hs * a43, &k3});
        rhs(t + c4 * hs, tmp, k4);
        axpy(std::pair{hs * a51, &k1}, std::pair{hs * a52, &k2}, std::pair{hs * a53, &k3},
             std::pair{hs * a54, &k4});
        rhs(t + c5 * hs, tmp, k5);
        axpy(std::pair{hs * a61, &k1}, std::pair{hs * a62, &k2}, std::pair{hs * a63, &k3},
             std::pair{hs * a64, &k4}, std::pair{hs * a65, &k5});
        rhs(t + hs, tmp, k6);
        axpy(std::pair{hs * a71, &k1}, std::pair{hs * a73, &k3}, std::pair{hs * a74, &k4},
             std::pair{hs * a75, &k5}, std::pair{hs * a76, &k6});
        ynew = tmp;
        rhs(t + hs, ynew, k7);
        st.rhs_calls += 6;

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double r = e / scale(i, y[i], ynew[i]);
            err += r * r;
        }
        err = std::sqrt(err / N);
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            ++st.accepted;
            seg.t0 = t;
            seg.h = hs;
            for (std::size_t i = 0; i < N; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = hs * k1[i] - ydiff;
                seg.r1[i] = y[i];
                seg.r2[i] = ydiff;
                seg.r3[i] = bspl;
                seg.r4[i] = ydiff - hs * k7[i] - bspl;
                seg.r5[i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            y = ynew;
            k1 = k7;
            t = hit_end ? t1 : (hit_barrier ? lim.barrier : t + hs);
            seg.h = t - seg.t0;
            observe(static_cast<const DenseSegment<N>&>(seg));

            // PI step-size control (beta = 0.04 as in DOPRI5).
            const double e = std::max(err, 1e-10);
            double fac = std::pow(e, 0.2 - 0.04 * 0.75) * std::pow(fac_old, -0.04);
            fac = std::clamp(fac / 0.9, 0.1, 5.0);
            fac_old = std::max(err, 1e-4);
            double hnew = hs / fac;
            if (last_rejected) hnew = std::min(hnew, hs);
            // A step clipped by a barrier or the end says nothing about the
            // natural step length; keep the previous proposal if it was larger.
            if ((hit_barrier || hit_end) && h > hnew) hnew = h;
            h = hnew;
            last_rejected = false;
        } else {
            ++st.rejected;
            const double fac = std::clamp(std::pow(err, 0.2) / 0.9, 1.0, 10.0);
            h = hs / fac;
            last_rejected = true;
        }
    }
    return y;
}

/// Convenience overload without a limiter.
template <std::size_t N, class Rhs, class Observer>
RealVec<N> dopri5_integrate(Rhs&& rhs, RealVec<N> y, double t0, double t1, const Dopri5Options& opt,
                            Observer&& observe, Dopri5Stats* stats = nullptr) {
    return dopri5_integrate<N>(std::forward<Rhs>(rhs), y, t0, t1, opt, NoStepLimit{},
                               std::forward<Observer>(observe), stats);
}

}  // namespace fracres

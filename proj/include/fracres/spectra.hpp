#pragma once

// Peak detection (topographic prominence, parabolic refinement, FWHM at half
// prominence) and greedy matching of peaks against a predicted comb.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "fracres/dressed.hpp"
#include "fracres/error.hpp"
#include "fracres/peak.hpp"
#include "fracres/sweep.hpp"

namespace fracres {

enum class Channel { osc_amp_bc, pop_a, pop_b, pop_c, abs_pump, abs_probe, inv_pump, inv_probe };

inline std::string_view to_string(Channel c) {
    switch (c) {
        case Channel::osc_amp_bc: return "osc_amp_bc";
        case Channel::pop_a: return "pop_a";
        case Channel::pop_b: return "pop_b";
        case Channel::pop_c: return "pop_c";
        case Channel::abs_pump: return "abs_pump";
        case Channel::abs_probe: return "abs_probe";
        case Channel::inv_pump: return "inv_pump";
        case Channel::inv_probe: return "inv_probe";
    }
    return "?";
}

inline Channel channel_from_string(std::string_view s) {
    for (Channel c : {Channel::osc_amp_bc, Channel::pop_a, Channel::pop_b, Channel::pop_c, Channel::abs_pump,
                      Channel::abs_probe, Channel::inv_pump, Channel::inv_probe})
        if (s == to_string(c)) return c;
    throw ConfigError("peaks.channel", "unknown channel '" + std::string(s) + "'");
}

inline double channel_value(const ObservableSet& o, Channel c) noexcept {
    switch (c) {
        case Channel::osc_amp_bc: return o.osc_amplitude_bc;
        case Channel::pop_a: return o.mean_pops[0];
        case Channel::pop_b: return o.mean_pops[1];
        case Channel::pop_c: return o.mean_pops[2];
        case Channel::abs_pump: return o.absorption_pump;
        case Channel::abs_probe: return o.absorption_probe;
        case Channel::inv_pump: return o.inversion_pump;
        case Channel::inv_probe: return o.inversion_probe;
    }
    return 0.0;
}

/// Channel values on the spectrum grid. Failed points are filled by linear
/// interpolation between the nearest good neighbours (constant at the ends)
/// and reported through `filled`.
inline std::vector<double> channel_values(const ResonanceSpectrum& s, Channel c, std::vector<bool>* filled = nullptr) {
    const std::size_t n = s.size();
    std::vector<double> y(n, 0.0);
    std::vector<bool> gap(n, false);
    std::vector<std::size_t> good;
    for (std::size_t i = 0; i < n; ++i) {
        if (s.observables[i]) {
            y[i] = channel_value(*s.observables[i], c);
            good.push_back(i);
        } else {
            gap[i] = true;
        }
    }
    if (!good.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!gap[i]) continue;
            const auto it = std::lower_bound(good.begin(), good.end(), i);
            if (it == good.begin()) {
                y[i] = y[good.front()];
            } else if (it == good.end()) {
                y[i] = y[good.back()];
            } else {
                const std::size_t r = *it, l = *(it - 1);
                const double w = (s.omega_rep[i] - s.omega_rep[l]) / (s.omega_rep[r] - s.omega_rep[l]);
                y[i] = (1.0 - w) * y[l] + w * y[r];
            }
        }
    }
    if (filled) *filled = gap;
    return y;
}

namespace detail {

// Vertex of the parabola through three points (x may be non-uniform).
inline std::pair<double, double> parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d1 = (y1 - y0) / (x1 - x0);
    const double d2 = (y2 - y1) / (x2 - x1);
    const double a = (d2 - d1) / (x2 - x0);
    if (!(a < 0.0)) return {x1, y1};
    const double b = d1 - a * (x0 + x1);
    const double xv = std::clamp(-b / (2.0 * a), x0, x2);
    return {xv, y0 + d1 * (xv - x0) + a * (xv - x0) * (xv - x1)};
}

inline double crossing(double xa, double ya, double xb, double yb, double level) {
    if (ya == yb) return 0.5 * (xa + xb);
    return xa + (level - ya) * (xb - xa) / (yb - ya);
}

}  // namespace detail

/// Local maxima of y(x) whose prominence is at least min_prominence_frac
/// times (max y - min y). Plateaus count once, at their centre. Returned in
/// ascending x order.
inline std::vector<Peak> detect_peaks(const std::vector<double>& x, const std::vector<double>& y,
                                      double min_prominence_frac) {
    if (x.size() != y.size()) throw ConfigError("spectrum", "x and y differ in length");
    if (!(min_prominence_frac > 0.0 && min_prominence_frac < 1.0))
        throw ConfigError("peaks.min_prominence_frac", "must lie in (0, 1)");
    std::vector<Peak> peaks;
    const std::size_t n = y.size();
    if (n < 3) return peaks;
    const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
    const double range = *hi_it - *lo_it;
    if (!(range > 0.0)) return peaks;
    const double min_prom = min_prominence_frac * range;

    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(y[i] > y[i - 1])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && y[j + 1] == y[i]) ++j;
        if (j + 1 >= n || !(y[j + 1] < y[i])) {
            i = j + 1;
            continue;
        }
        const std::size_t top = (i + j) / 2;
        const double h = y[top];

        // bases: lowest point before reaching higher ground on each side
        double left_min = h, right_min = h;
        std::size_t l = i;
        while (l > 0 && y[l - 1] <= h) left_min = std::min(left_min, y[--l]);
        if (l == 0) left_min = std::min(left_min, y[0]);
        std::size_t r = j;
        while (r + 1 < n && y[r + 1] <= h) right_min = std::min(right_min, y[++r]);
        const double prom = h - std::max(left_min, right_min);

        if (prom >= min_prom && prom > 0.0) {
            Peak p;
            p.index = top;
            p.prominence = prom;
            if (i == j) {
                std::tie(p.location, p.height) =
                    detail::parabola_vertex(x[i - 1], y[i - 1], x[i], y[i], x[i + 1], y[i + 1]);
            } else {
                p.location = 0.5 * (x[i] + x[j]);
                p.height = h;
            }
            const double level = h - 0.5 * prom;
            std::optional<double> xl, xr;
            for (std::size_t k = i; k > 0; --k)
                if (y[k - 1] <= level) {
                    xl = detail::crossing(x[k - 1], y[k - 1], x[k], y[k], level);
                    break;
                }
            for (std::size_t k = j; k + 1 < n; ++k)
                if (y[k + 1] <= level) {
                    xr = detail::crossing(x[k], y[k], x[k + 1], y[k + 1], level);
                    break;
                }
            // a side that never drops to half prominence is mirrored
            if (xl && xr) p.fwhm = *xr - *xl;
            else if (xl) p.fwhm = 2.0 * (p.location - *xl);
            else if (xr) p.fwhm = 2.0 * (*xr - p.location);
            else p.fwhm = x.back() - x.front();
            if (!(p.fwhm > 0.0)) p.fwhm = x[std::min(j + 1, n - 1)] - x[i - 1];
            peaks.push_back(p);
        }
        i = j + 1;
    }
    return peaks;
}

inline std::vector<Peak> detect_peaks(const ResonanceSpectrum& s, Channel c, double min_prominence_frac) {
    return detect_peaks(s.omega_rep, channel_values(s, c), min_prominence_frac);
}

struct MatchReport {
    std::vector<Peak> peaks;                       // input order, labels filled
    std::vector<std::size_t> unmatched_predictions;  // indices into comb.entries
    std::vector<std::size_t> unlabeled_peaks;        // indices into peaks
};

/// Greedy nearest-first matching: candidate pairs within tol_frac * f of a
/// predicted frequency f are taken in order of increasing distance, each
/// prediction and each peak at most once.
inline MatchReport match_peaks(const std::vector<Peak>& peaks, const PredictedComb& comb, double tol_frac = 0.02) {
    if (!(tol_frac > 0.0)) throw ConfigError("peaks.match_tol_frac", "must be positive");
    struct Candidate {
        double dist;
        std::size_t pred;
        std::size_t peak;
    };
    std::vector<Candidate> cand;
    for (std::size_t e = 0; e < comb.entries.size(); ++e) {
        const double f = comb.entries[e].frequency;
        for (std::size_t k = 0; k < peaks.size(); ++k) {
            const double d = std::abs(peaks[k].location - f);
            if (d <= tol_frac * f) cand.push_back({d, e, k});
        }
    }
    std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.dist, a.pred, a.peak) < std::tie(b.dist, b.pred, b.peak);
    });

    MatchReport rep;
    rep.peaks = peaks;
    for (auto& p : rep.peaks) p.label.reset();
    std::vector<bool> pred_used(comb.entries.size(), false);
    for (const auto& c : cand) {
        if (pred_used[c.pred] || rep.peaks[c.peak].label) continue;
        const CombEntry& e = comb.entries[c.pred];
        rep.peaks[c.peak].label = PeakLabel{e.base, e.m, e.n, e.kind, e.frequency};
        pred_used[c.pred] = true;
    }
    for (std::size_t e = 0; e < pred_used.size(); ++e)
        if (!pred_used[e]) rep.unmatched_predictions.push_back(e);
    for (std::size_t k = 0; k < rep.peaks.size(); ++k)
        if (!rep.peaks[k].label) rep.unlabeled_peaks.push_back(k);
    return rep;
}

/// The matched peak for a comb entry (base, m, n), if any.
inline const Peak* find_matched(const MatchReport& rep, double base, int m, int n) {
    for (const auto& p : rep.peaks)
        if (p.label && std::abs(p.label->base - base) < 1e-9 && p.label->m == m && p.label->n == n) return &p;
    return nullptr;
}

}  // namespace fracres

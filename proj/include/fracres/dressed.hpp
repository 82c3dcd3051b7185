#pragma once

// Predicted resonance positions. In the dressed-state picture a cw field of
// Rabi amplitude rabi_ac splits the a-c pair, so a pulse train on the other
// transition is resonant at the sum and difference frequencies
// |omega_ab +- rabi_ac| and at their integer fractions.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fracres/error.hpp"
#include "fracres/peak.hpp"
#include "fracres/sweep.hpp"

namespace fracres {

inline std::string_view to_string(CombKind k) {
    switch (k) {
        case CombKind::eigen: return "eigen";
        case CombKind::sum: return "sum";
        case CombKind::difference: return "difference";
    }
    return "?";
}

struct CombEntry {
    double frequency = 0.0;
    double base = 0.0;
    int m = 1;
    int n = 1;
    CombKind kind = CombKind::eigen;

    friend bool operator==(const CombEntry&, const CombEntry&) = default;
};

struct PredictedComb {
    std::vector<double> base_frequencies;
    int max_n = 1;
    std::vector<CombEntry> entries;  // descending by frequency
};

namespace detail {

// Sort descending and drop entries within 1e-9 of one already kept. Among
// coincident entries the one with the smallest n (then m, then kind) wins.
inline void normalize(std::vector<CombEntry>& e) {
    std::stable_sort(e.begin(), e.end(), [](const CombEntry& a, const CombEntry& b) {
        if (std::abs(a.frequency - b.frequency) > 1e-9) return a.frequency > b.frequency;
        if (a.n != b.n) return a.n < b.n;
        if (a.m != b.m) return a.m < b.m;
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });
    std::vector<CombEntry> out;
    for (const auto& x : e)
        if (out.empty() || std::abs(out.back().frequency - x.frequency) > 1e-9) out.push_back(x);
    e = std::move(out);
}

}  // namespace detail

/// fig2 and fig5: omega_ab/n. fig3 (and custom): |omega_ab + rabi_ac|/n and
/// |omega_ab - rabi_ac|/n. A difference frequency below `min_frequency`
/// (callers pass ten grid steps) is dropped as unresolvable; exact zeros are
/// always dropped.
inline PredictedComb predict_resonances(double omega_ab, double rabi_ac, int max_n, Scenario scenario,
                                        double min_frequency = 0.0) {
    if (max_n < 1) throw ConfigError("predict.max_n", "must be >= 1");
    PredictedComb c;
    c.max_n = max_n;
    std::vector<std::pair<double, CombKind>> bases;
    if (scenario == Scenario::fig3 || scenario == Scenario::custom) {
        bases.emplace_back(std::abs(omega_ab + rabi_ac), rabi_ac == 0.0 ? CombKind::eigen : CombKind::sum);
        const double diff = std::abs(omega_ab - rabi_ac);
        if (rabi_ac != 0.0 && diff > 1e-9 && diff >= min_frequency) bases.emplace_back(diff, CombKind::difference);
    } else {
        bases.emplace_back(omega_ab, CombKind::eigen);
    }
    for (const auto& [f, kind] : bases) {
        if (!(f > 1e-9)) continue;
        c.base_frequencies.push_back(f);
        for (int n = 1; n <= max_n; ++n) c.entries.push_back({f / n, f, 1, n, kind});
    }
    detail::normalize(c.entries);
    return c;
}

/// All reduced fractions m/n <= 1 with m <= max_m, n <= max_n, times omega_ab.
inline PredictedComb predict_rational_comb(double omega_ab, int max_m, int max_n) {
    if (max_m < 1) throw ConfigError("predict.max_m", "must be >= 1");
    if (max_n < 1) throw ConfigError("predict.max_n", "must be >= 1");
    PredictedComb c;
    c.max_n = max_n;
    c.base_frequencies.push_back(omega_ab);
    for (int n = 1; n <= max_n; ++n)
        for (int m = 1; m <= std::min(max_m, n); ++m)
            if (std::gcd(m, n) == 1) c.entries.push_back({omega_ab * m / n, omega_ab, m, n, CombKind::eigen});
    detail::normalize(c.entries);
    return c;
}

}  // namespace fracres

#pragma once

#include <cstddef>
#include <optional>

namespace fracres {

enum class CombKind { eigen, sum, difference };

/// Which predicted resonance a detected peak was matched to: frequency
/// m * base / n.
struct PeakLabel {
    double base = 0.0;
    int m = 1;
    int n = 1;
    CombKind kind = CombKind::eigen;
    double predicted = 0.0;

    friend bool operator==(const PeakLabel&, const PeakLabel&) = default;
};

struct Peak {
    double location = 0.0;
    double height = 0.0;
    double prominence = 0.0;
    double fwhm = 0.0;
    std::size_t index = 0;  // grid index of the sampled maximum
    std::optional<PeakLabel> label;

    friend bool operator==(const Peak&, const Peak&) = default;
};

}  // namespace fracres

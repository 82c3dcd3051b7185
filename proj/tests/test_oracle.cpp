#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracres/oracle.hpp"

using namespace fracres;

namespace {

OscillatorParams at(double omega, double omega0 = 10.0, double b = 0.2) {
    return {omega0, b, rep_rate_to_period(omega)};
}

// Frozen from an independent evaluation of the closed-form periodic solution
//   x(t) = Im[e^{lt} / (1 - e^{l tau})] / wd,   l = -b/2 + i wd,
// on a 2e5-point grid per period.
constexpr double amp_10 = 1.59152;
constexpr double amp_5 = 0.82080;
constexpr double amp_10_3 = 0.56420;
constexpr double amp_2_5 = 0.43610;

}  // namespace

TEST(ClassicalAnalytic, ResonantAmplitude) {
    // the k = +1 and k = -1 terms contribute equally, so the resonant
    // amplitude is twice (1/tau)/(b w0)
    const double one_sided = (10.0 / (2 * std::numbers::pi)) / (0.2 * 10.0);
    EXPECT_NEAR(classical_amplitude_analytic(at(10.0)), 2 * one_sided, 0.02 * 2 * one_sided);
    EXPECT_NEAR(classical_amplitude_analytic(at(10.0)), amp_10, 1e-4);
}

TEST(ClassicalAnalytic, FrozenSubharmonics) {
    EXPECT_NEAR(classical_amplitude_analytic(at(5.0)), amp_5, 1e-4);
    EXPECT_NEAR(classical_amplitude_analytic(at(10.0 / 3)), amp_10_3, 1e-4);
    EXPECT_NEAR(classical_amplitude_analytic(at(2.5)), amp_2_5, 1e-4);
}

TEST(ClassicalAnalytic, CombDecreases) {
    const double a1 = classical_amplitude_analytic(at(10.0));
    const double a2 = classical_amplitude_analytic(at(5.0));
    const double a3 = classical_amplitude_analytic(at(10.0 / 3));
    EXPECT_GT(a1, a2);
    EXPECT_GT(a2, a3);
}

TEST(ClassicalAnalytic, OffCombIsSmall) {
    const double ratio = classical_amplitude_analytic(at(7.3)) / classical_amplitude_analytic(at(10.0));
    EXPECT_LT(ratio, 0.1);
    EXPECT_NEAR(ratio, 0.0347, 5e-4);
}

TEST(ClassicalAnalytic, HeavyDampingWashesOutComb) {
    const double r = classical_amplitude_analytic(at(10.0, 10.0, 19.0)) /
                     classical_amplitude_analytic(at(7.3, 10.0, 19.0));
    EXPECT_LT(r, 1.5);
    EXPECT_NEAR(r, 0.987, 2e-3);
}

TEST(ClassicalAnalytic, RejectsOverdamped) {
    EXPECT_THROW(classical_amplitude_analytic(at(10.0, 10.0, 20.0)), ConfigError);
    EXPECT_THROW(classical_amplitude_analytic(at(10.0, 10.0, 0.0)), ConfigError);
    EXPECT_THROW(classical_amplitude_analytic(OscillatorParams{-1.0, 0.2, 1.0}), ConfigError);
}

// the series against the closed form at a few instants
TEST(FourierSteadyState, MatchesClosedForm) {
    for (double omega : {10.0, 7.3, 3.0}) {
        const OscillatorParams p = at(omega, 10.0, 0.2);
        const FourierSteadyState x(p);
        const double wd = std::sqrt(100.0 - 0.01);
        const std::complex<double> l{-0.1, wd};
        for (double frac : {0.05, 0.3, 0.61, 0.97}) {
            const double t = frac * p.rep_period;
            const double ref = std::imag(std::exp(l * t) / (1.0 - std::exp(l * p.rep_period))) / wd;
            EXPECT_NEAR(x(t), ref, 1e-9) << omega << " " << frac;
        }
    }
}

// A Gaussian of width s multiplies the resonant Fourier coefficient by
// exp(-(w0 s)^2 / 2); at tau/50 that is 0.3%, 3%, 7% for n = 1, 2, 3.
TEST(ClassicalTimeDomain, GaussianFormFactor) {
    for (double omega : {10.0, 5.0, 10.0 / 3}) {
        const OscillatorParams p = at(omega);
        const double s = p.rep_period / 50;
        const double a = classical_amplitude_analytic(p);
        const double t = classical_amplitude_timedomain(p, s);
        const double ff = std::exp(-0.5 * 10.0 * s * 10.0 * s);
        EXPECT_NEAR(t / a, ff, 5e-3) << "omega=" << omega;
    }
}

TEST(ClassicalTimeDomain, AgreesWithAnalytic) {
    for (double omega : {10.0, 5.0, 10.0 / 3, 2.5}) {
        const OscillatorParams p = at(omega);
        const double a = classical_amplitude_analytic(p);
        const double t = classical_amplitude_timedomain(p, p.rep_period / 500);
        EXPECT_NEAR(t, a, 0.02 * a) << "omega=" << omega;
    }
}

TEST(ClassicalTimeDomain, ZeroForcing) {
    const OscillatorParams p = at(10.0);
    EXPECT_EQ(classical_amplitude_timedomain(p, p.rep_period / 50, 0.0), 0.0);
}

TEST(ClassicalTimeDomain, WidthGuard) {
    const OscillatorParams p = at(10.0);
    EXPECT_THROW(classical_amplitude_timedomain(p, p.rep_period / 10), ConfigError);
    EXPECT_THROW(classical_amplitude_timedomain(p, 0.0), ConfigError);
}

TEST(ClassicalSweep, SameLayoutAsQuantum) {
    const ResonanceSpectrum s = classical_sweep(10.0, 0.2, 4.0, 6.0, 5, 2);
    ASSERT_EQ(s.size(), 5u);
    EXPECT_TRUE(s.failures.empty());
    for (const auto& o : s.observables) ASSERT_TRUE(o.has_value());
    EXPECT_GT(s.observables[2]->osc_amplitude_bc, s.observables[0]->osc_amplitude_bc);
}

#pragma once

// Three-level Lambda atom: lower states |a>, |b> split by omega_ab, upper state
// |c>. Two fields E_ac (envelope f1) and E_bc (envelope f2) drive both optical
// transitions; each field reaches the "other" transition detuned by omega_ab.
//
// Convention (hbar = 1, interaction picture):
//   H_ac = -A(t),  A(t) = rabi_ac f1 + rabi_bca f2 exp(+i omega_ab t)
//   H_bc = -B(t),  B(t) = rabi_bc f2 + rabi_acb f1 exp(-i omega_ab t)
// so a cw rabi_ac alone gives rho_aa(t) = cos^2(rabi_ac t).

#include <cmath>
#include <complex>
#include <string_view>

#include "fracres/drive.hpp"
#include "fracres/error.hpp"

namespace fracres {

using complex = std::complex<double>;

/// Which form of the population equations to use.
///   hamiltonian: every term derived from the coupling above (default).
///   printed:     the historical literal form, in which the cross term of
///                d rho_aa/dt pairs rho_ca with rabi_acb and the cross term of
///                d rho_bb/dt carries the opposite sign. Kept for sensitivity
///                studies; it does not preserve positivity in general.
enum class EquationForm { hamiltonian, printed };

inline std::string_view to_string(EquationForm f) {
    return f == EquationForm::hamiltonian ? "hamiltonian" : "printed";
}

inline EquationForm equation_form_from_string(std::string_view s) {
    if (s == "hamiltonian") return EquationForm::hamiltonian;
    if (s == "printed") return EquationForm::printed;
    throw ConfigError("equation_form", "expected 'hamiltonian' or 'printed'");
}

struct SystemParams {
    double omega_ab = 11.0;
    double gamma_ab = 0.01;
    double gamma_ac = 1.0;
    double gamma_bc = 1.0;
    double rabi_ac = 1.0;
    double rabi_bc = 0.0;
    double rabi_acb = 1.0;  // E_ac acting on b-c
    double rabi_bca = 0.0;  // E_bc acting on a-c

    /// The b-c coherence decays at (gamma_ac + gamma_bc + gamma_ab)/2 and the
    /// a-c coherence at (gamma_ac + gamma_bc)/2. Setting this adds gamma_ab/2
    /// to the a-c rate as well.
    bool symmetric_coherence_decay = false;
    EquationForm form = EquationForm::hamiltonian;

    /// Cross amplitudes follow the field that produces them: E_ac on b-c has
    /// the amplitude of E_ac on a-c, and likewise for E_bc.
    void set_cross_from_direct() noexcept {
        rabi_acb = rabi_ac;
        rabi_bca = rabi_bc;
    }

    double coherence_decay_bc() const noexcept { return 0.5 * (gamma_ac + gamma_bc + gamma_ab); }
    double coherence_decay_ac() const noexcept {
        return 0.5 * (gamma_ac + gamma_bc + (symmetric_coherence_decay ? gamma_ab : 0.0));
    }
    double coherence_decay_ab() const noexcept { return 0.5 * gamma_ab; }

    void validate() const {
        auto non_negative = [](double v, const char* name) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(name, "must be finite and >= 0");
        };
        auto finite = [](double v, const char* name) {
            if (!std::isfinite(v)) throw ConfigError(name, "must be finite");
        };
        non_negative(omega_ab, "omega_ab");
        non_negative(gamma_ab, "gamma_ab");
        non_negative(gamma_ac, "gamma_ac");
        non_negative(gamma_bc, "gamma_bc");
        finite(rabi_ac, "rabi_ac");
        finite(rabi_bc, "rabi_bc");
        finite(rabi_acb, "rabi_acb");
        finite(rabi_bca, "rabi_bca");
    }
};

/// The independent density-matrix elements. rho_cc follows from the trace and
/// rho_ca, rho_cb, rho_ba are conjugates; none of them is stored.
struct DensityState {
    double rho_aa = 1.0;
    double rho_bb = 0.0;
    complex rho_ac{};
    complex rho_bc{};
    complex rho_ab{};

    static DensityState ground_a() { return {}; }
    static DensityState pure_b() { return {0.0, 1.0, {}, {}, {}}; }
    static DensityState pure_c() { return {0.0, 0.0, {}, {}, {}}; }

    DensityState& operator+=(const DensityState& o) noexcept {
        rho_aa += o.rho_aa;
        rho_bb += o.rho_bb;
        rho_ac += o.rho_ac;
        rho_bc += o.rho_bc;
        rho_ab += o.rho_ab;
        return *this;
    }
    DensityState& operator*=(double s) noexcept {
        rho_aa *= s;
        rho_bb *= s;
        rho_ac *= s;
        rho_bc *= s;
        rho_ab *= s;
        return *this;
    }
    friend DensityState operator+(DensityState l, const DensityState& r) noexcept { return l += r; }
    friend DensityState operator*(double s, DensityState x) noexcept { return x *= s; }

    friend bool operator==(const DensityState&, const DensityState&) = default;
};

/// Tolerance below which a negative upper population is treated as roundoff.
inline constexpr double rho_cc_clamp_tolerance = 1e-9;

/// 1 - rho_aa - rho_bb; values in (-1e-9, 0) are clamped to 0. A larger
/// violation means the state has left the physical manifold and is returned
/// as is so that callers can detect it.
inline double rho_cc(const DensityState& s) noexcept {
    const double v = 1.0 - s.rho_aa - s.rho_bb;
    if (v < 0.0 && v > -rho_cc_clamp_tolerance) return 0.0;
    return v;
}

/// Unclamped trace closure, for use inside the right-hand side where clamping
/// would break linearity.
inline double rho_cc_raw(const DensityState& s) noexcept { return 1.0 - s.rho_aa - s.rho_bb; }

/// Complex couplings A(t) (a-c) and B(t) (b-c) at one instant.
struct Couplings {
    complex a_c;
    complex b_c;
    double f1;
    double f2;
    complex phase;  // exp(+i omega_ab t)
};

inline Couplings couplings_at(double t, const SystemParams& p, double f1, double f2) noexcept {
    const complex phase{std::cos(p.omega_ab * t), std::sin(p.omega_ab * t)};
    return Couplings{p.rabi_ac * f1 + p.rabi_bca * f2 * phase,
                     p.rabi_bc * f2 + p.rabi_acb * f1 * std::conj(phase), f1, f2, phase};
}

inline Couplings couplings_at(double t, const SystemParams& p, const DriveEnvelope& f1,
                              const DriveEnvelope& f2) noexcept {
    return couplings_at(t, p, evaluate(f1, t), evaluate(f2, t));
}

namespace detail {

inline constexpr complex I{0.0, 1.0};

// Derivative of the affine system for a given trace closure value. `cc` is
// rho_cc for the physical state; the linearity tests pass the homogeneous
// value separately.
inline DensityState rhs_core(const DensityState& s, double cc, const SystemParams& p,
                             const Couplings& c) noexcept {
    const complex A = c.a_c;
    const complex B = c.b_c;
    const complex rho_ba = std::conj(s.rho_ab);
    const complex rho_cb = std::conj(s.rho_bc);

    DensityState d;
    if (p.form == EquationForm::hamiltonian) {
        d.rho_aa = p.gamma_ab * s.rho_bb + p.gamma_ac * cc + 2.0 * std::imag(std::conj(A) * s.rho_ac);
        d.rho_bb = -p.gamma_ab * s.rho_bb + p.gamma_bc * cc + 2.0 * std::imag(std::conj(B) * s.rho_bc);
    } else {
        const complex rho_ca = std::conj(s.rho_ac);
        const complex phase = c.phase;
        const complex daa =
            p.gamma_ab * s.rho_bb + p.gamma_ac * cc - I * p.rabi_ac * c.f1 * (s.rho_ac - rho_ca) -
            I * c.f2 * (p.rabi_bca * std::conj(phase) * s.rho_ac - p.rabi_acb * phase * rho_ca);
        const complex dbb =
            -p.gamma_ab * s.rho_bb + p.gamma_bc * cc - I * p.rabi_bc * c.f2 * (s.rho_bc - rho_cb) +
            I * p.rabi_acb * c.f1 * (phase * s.rho_bc - std::conj(phase) * rho_cb);
        d.rho_aa = daa.real();
        d.rho_bb = dbb.real();
    }
    d.rho_bc = -p.coherence_decay_bc() * s.rho_bc - I * A * rho_ba + I * B * (cc - s.rho_bb);
    d.rho_ac = -p.coherence_decay_ac() * s.rho_ac - I * B * s.rho_ab + I * A * (cc - s.rho_aa);
    d.rho_ab = -p.coherence_decay_ab() * s.rho_ab - I * std::conj(B) * s.rho_ac + I * A * rho_cb;
    return d;
}

}  // namespace detail

/// Time derivative of the independent elements at time t.
inline DensityState master_rhs(double t, const DensityState& s, const SystemParams& p,
                               const DriveEnvelope& f1, const DriveEnvelope& f2) noexcept {
    return detail::rhs_core(s, rho_cc_raw(s), p, couplings_at(t, p, f1, f2));
}

inline DensityState master_rhs(const DensityState& s, const SystemParams& p,
                               const Couplings& c) noexcept {
    return detail::rhs_core(s, rho_cc_raw(s), p, c);
}

/// d rho_cc/dt from its own equation of motion (not from the trace). Used by
/// the integrator to carry a redundant upper population for trace checks.
inline double upper_population_rate(const DensityState& s, double cc, const SystemParams& p,
                                    const Couplings& c) noexcept {
    return -(p.gamma_ac + p.gamma_bc) * cc - 2.0 * std::imag(std::conj(c.a_c) * s.rho_ac) -
           2.0 * std::imag(std::conj(c.b_c) * s.rho_bc);
}

/// Imaginary parts discarded by the printed population equations. Both vanish
/// for the hamiltonian form and, in the printed form, whenever the state has no
/// coherences or the cross amplitudes coincide.
inline complex printed_population_rate_imag(double t, const DensityState& s, const SystemParams& p,
                                            const DriveEnvelope& f1, const DriveEnvelope& f2) {
    const Couplings c = couplings_at(t, p, f1, f2);
    const complex rho_ca = std::conj(s.rho_ac);
    const complex rho_cb = std::conj(s.rho_bc);
    using detail::I;
    const complex daa = -I * p.rabi_ac * c.f1 * (s.rho_ac - rho_ca) -
                        I * c.f2 * (p.rabi_bca * std::conj(c.phase) * s.rho_ac - p.rabi_acb * c.phase * rho_ca);
    const complex dbb = -I * p.rabi_bc * c.f2 * (s.rho_bc - rho_cb) +
                        I * p.rabi_acb * c.f1 * (c.phase * s.rho_bc - std::conj(c.phase) * rho_cb);
    return {daa.imag(), dbb.imag()};
}

}  // namespace fracres

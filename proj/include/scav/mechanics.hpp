// Closed-form model of a velocity-damped resonant generator (proof mass on a
// spring, base-excited, with an electrical damper).
#pragma once

#include "scav/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace scav::mechanics {

/// Proof-mass resonator driven by sinusoidal frame motion. SI units.
///
/// The generator is assumed tuned to the source: omega_n() == omega().
struct MechanicalSpec {
    double Y0 = 25e-6;    ///< source displacement amplitude [m]
    double f = 322.0;     ///< source frequency [Hz]
    double m = 0.5e-3;    ///< proof mass [kg]
    double Z_l = 1e-3;    ///< internal displacement limit [m]
    double zeta = 0.0;    ///< damping factor [-]

    [[nodiscard]] double omega() const noexcept { return 2.0 * std::numbers::pi * f; }
    [[nodiscard]] double omega_n() const noexcept { return omega(); }
    /// Peak proof-mass velocity when the mass swings to its limit [m/s].
    [[nodiscard]] double limit_velocity() const noexcept { return omega() * Z_l; }
    /// Damping coefficient D = 2 m omega_n zeta [N s/m].
    [[nodiscard]] double damping_coefficient() const noexcept {
        return 2.0 * m * omega_n() * zeta;
    }

    void validate() const {
        if (!(Y0 >= 0.0)) throw DomainError("MechanicalSpec: Y0 must be >= 0");
        if (!(f > 0.0)) throw DomainError("MechanicalSpec: f must be > 0");
        if (!(m > 0.0)) throw DomainError("MechanicalSpec: m must be > 0");
        if (!(Z_l > 0.0)) throw DomainError("MechanicalSpec: Z_l must be > 0");
        if (!(zeta >= 0.0)) throw DomainError("MechanicalSpec: zeta must be >= 0");
    }
};

/// Moving-coil transducer: N turns of active length l_a cutting a field B,
/// plus the coil's lumped parasitics.
struct EmCoilSpec {
    int N = 4;           ///< turns
    double B = 1.2;      ///< flux density [T]
    double l_a = 20e-3;  ///< active length per turn [m]
    double L_g = 370e-9; ///< self inductance [H]
    double R_g = 7e-3;   ///< winding resistance [ohm]
    double C_g = 7e-12;  ///< inter-turn capacitance [F]

    /// Transduction constant N B l_a [V s/m].
    [[nodiscard]] double transduction() const noexcept { return N * B * l_a; }

    void validate() const {
        if (N < 0) throw DomainError("EmCoilSpec: N must be >= 0");
        if (!(B > 0.0)) throw DomainError("EmCoilSpec: B must be > 0");
        if (!(l_a > 0.0)) throw DomainError("EmCoilSpec: l_a must be > 0");
        if (!(L_g >= 0.0 && R_g >= 0.0 && C_g >= 0.0))
            throw DomainError("EmCoilSpec: parasitics must be >= 0");
    }
};

/// Damping factor that lets the mass just reach its displacement limit at
/// resonance: zeta = Y0 / (2 Z_l).
[[nodiscard]] inline double optimal_damping_factor(double Y0, double Z_l) {
    if (!(Z_l > 0.0)) throw DomainError("optimal_damping_factor: Z_l must be > 0");
    if (!(Y0 >= 0.0)) throw DomainError("optimal_damping_factor: Y0 must be >= 0");
    return 0.5 * Y0 / Z_l;
}

/// Average power absorbed by the damper with the mass swinging to Z_l:
/// P = 1/2 (omega Z_l)^2 (2 m omega_n zeta).
[[nodiscard]] inline double optimal_damper_power(const MechanicalSpec& spec) {
    spec.validate();
    const double v = spec.limit_velocity();
    return 0.5 * v * v * spec.damping_coefficient();
}

/// Peak open-circuit EMF for a given peak proof-mass velocity.
[[nodiscard]] inline double induced_emf_amplitude(const EmCoilSpec& coil, double v_pk) {
    coil.validate();
    if (!(v_pk >= 0.0)) throw DomainError("induced_emf_amplitude: v_pk must be >= 0");
    return static_cast<double>(coil.N) * coil.B * coil.l_a * v_pk;
}

/// Relative displacement amplitude of the base-excited resonator at
/// frequency ratio r = omega/omega_n:
///   Z = Y0 r^2 / sqrt((1 - r^2)^2 + (2 zeta r)^2)
[[nodiscard]] inline double resonant_response(const MechanicalSpec& spec, double r) {
    spec.validate();
    if (!(r >= 0.0)) throw DomainError("resonant_response: r must be >= 0");
    const double a = 1.0 - r * r;
    const double b = 2.0 * spec.zeta * r;
    const double den = std::sqrt(a * a + b * b);
    if (den == 0.0) throw DomainError("resonant_response: undamped resonance is singular");
    return spec.Y0 * r * r / den;
}

/// Damping coefficient a load presents, from the average power it absorbs at
/// a sinusoidal velocity of amplitude v_pk: D = 2 P / v_pk^2.
[[nodiscard]] inline double effective_damping_from_power(double P_avg, double v_pk) {
    if (!(v_pk > 0.0)) throw DomainError("effective_damping_from_power: v_pk must be > 0");
    return 2.0 * P_avg / (v_pk * v_pk);
}

/// Peak current that carries average power P from a sinusoidal source of
/// amplitude V_pk into a resistive sink: I = 2 P / V_pk.
[[nodiscard]] inline double peak_current_for_power(double P_avg, double V_pk) {
    if (!(V_pk > 0.0)) throw DomainError("peak_current_for_power: V_pk must be > 0");
    return 2.0 * P_avg / V_pk;
}

/// Steady-state relative amplitude at resonance when the total damping
/// coefficient is D, clipped at the end stops: Z = min(Z_l, m omega Y0 / D).
[[nodiscard]] inline double amplitude_at_resonance(const MechanicalSpec& spec, double D) {
    spec.validate();
    if (!(D >= 0.0)) throw DomainError("amplitude_at_resonance: D must be >= 0");
    if (D == 0.0) return spec.Z_l;
    return std::min(spec.Z_l, spec.m * spec.omega() * spec.Y0 / D);
}

/// The worked example generator: 25 um at 322 Hz, 1 mm travel, 0.5 g, with
/// zeta set to its optimum.
[[nodiscard]] inline MechanicalSpec reference_generator() {
    MechanicalSpec s;
    s.zeta = optimal_damping_factor(s.Y0, s.Z_l);
    return s;
}

}  // namespace scav::mechanics

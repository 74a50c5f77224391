// Electromagnetic generator driving a dual-polarity boost converter.
//
// Each polarity has its own boost stage (inductor, low-side switch, output
// diode, reservoir). Only the stage matching the sign of the EMF is gated;
// the other one is held off.
#pragma once

#include "scav/circuit/energy.hpp"
#include "scav/circuit/engine.hpp"
#include "scav/circuit/gate_schedule.hpp"
#include "scav/circuit/netlist.hpp"
#include "scav/error.hpp"
#include "scav/mechanics.hpp"
#include "scav/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace scav::em {

using circuit::EnergyReport;
using circuit::GateSchedule;
using circuit::Netlist;
using circuit::RoleMap;
using circuit::Trace;

// Device defaults are the calibrated set also shipped in configs/devices.cfg.
struct SwitchModel {
    double R_on = 0.11;
    double C_off = 800e-12;
};

struct DiodeModel {
    double V_f = 0.3;
    double R_on = 50e-3;
    double C_j = 100e-12;
};

struct BoostParams {
    double f_sw = 50e3;
    double t_on = 18e-6;
    double L_boost = 1.5e-6;
    double R_Lboost = 28e-3;
    double C_Lboost = 31e-12;
    SwitchModel sw;
    DiodeModel diode;
    double V_rail = 1.65;
    double C_res = 2e-3;

    [[nodiscard]] double period() const { return 1.0 / f_sw; }

    void validate() const {
        if (!(f_sw > 0.0)) throw DomainError("boost: f_sw must be > 0");
        if (!(t_on > 0.0 && t_on < period())) throw DomainError("boost: need 0 < t_on < 1/f_sw");
        if (!(L_boost > 0.0)) throw DomainError("boost: L_boost must be > 0");
        if (R_Lboost < 0.0 || C_Lboost < 0.0) throw DomainError("boost: negative inductor parasitic");
        if (!(sw.R_on > 0.0) || sw.C_off < 0.0) throw DomainError("boost: bad switch model");
        if (!(diode.R_on > 0.0) || diode.C_j < 0.0 || diode.V_f < 0.0)
            throw DomainError("boost: bad diode model");
        if (!(V_rail > 0.0)) throw DomainError("boost: V_rail must be > 0");
        if (!(C_res > 0.0)) throw DomainError("boost: C_res must be > 0");
    }
};

enum class Polarity { Positive, Negative, Both };

[[nodiscard]] inline const char* to_string(Polarity p) {
    switch (p) {
    case Polarity::Positive: return "positive";
    case Polarity::Negative: return "negative";
    case Polarity::Both: return "both";
    }
    return "";
}

[[nodiscard]] inline Polarity parse_polarity(const std::string& s) {
    if (s == "positive") return Polarity::Positive;
    if (s == "negative") return Polarity::Negative;
    if (s == "both") return Polarity::Both;
    throw DomainError("unknown polarity '" + s + "'");
}

struct EmScenario {
    mechanics::EmCoilSpec coil;
    mechanics::MechanicalSpec mech = mechanics::reference_generator();
    BoostParams boost;
    Polarity polarity = Polarity::Positive;
    double dt = 20e-9;
    /// Replaces the sinusoidal EMF by a constant of this value.
    std::optional<double> fixed_emf;
    /// Overrides the default window (half a mechanical cycle, or a whole one
    /// for Polarity::Both).
    std::optional<double> t_stop;
    /// Multiplies the EMF amplitude; 1 is the open-loop limit amplitude.
    double emf_scale = 1.0;

    [[nodiscard]] double emf_amplitude() const {
        return emf_scale * mechanics::induced_emf_amplitude(coil, mech.limit_velocity());
    }
    [[nodiscard]] double mech_period() const { return 1.0 / mech.f; }
    [[nodiscard]] double window() const {
        if (t_stop) return *t_stop;
        return polarity == Polarity::Both ? mech_period() : 0.5 * mech_period();
    }

    void validate() const {
        coil.validate();
        mech.validate();
        boost.validate();
        if (!(dt > 0.0)) throw DomainError("scenario: dt must be > 0");
        if (t_stop && !(*t_stop > 0.0)) throw DomainError("scenario: t_stop must be > 0");
        if (!(emf_scale >= 0.0)) throw DomainError("scenario: emf_scale must be >= 0");
    }
};

/// Netlist, gates and energy roles of one scenario.
struct BoostCircuit {
    Netlist netlist;
    GateSchedule schedule;
    RoleMap roles;
};

inline constexpr const char* kPosInductor = "L1";
inline constexpr const char* kNegInductor = "L2";

[[nodiscard]] inline BoostCircuit build_dual_boost(const EmScenario& scn) {
    scn.validate();
    const auto& b = scn.boost;
    const auto& c = scn.coil;
    const double T = scn.mech_period();
    const double window = scn.window();
    if (scn.polarity == Polarity::Both && !scn.fixed_emf && window < T * (1.0 - 1e-9))
        throw DomainError("polarity 'both' needs a window of a whole mechanical cycle");

    BoostCircuit out;
    auto& nl = out.netlist;
    nl.name = "dual_boost";
    const double sign = scn.polarity == Polarity::Negative ? -1.0 : 1.0;
    if (scn.fixed_emf)
        nl.waveforms["emf"] = circuit::Waveform::dc(sign * *scn.fixed_emf);
    else
        nl.waveforms["emf"] = circuit::Waveform::sine(sign * scn.emf_amplitude(), scn.mech.f);

    auto& roles = out.roles;
    using circuit::Role;
    nl.voltage_source("VG", "e", "0", "emf");
    roles["VG"] = Role::source();
    // coil: series L_g with its winding resistance, C_g across the terminals
    nl.inductor("Lg", "e", "a", c.L_g, c.R_g);
    roles["Lg"] = c.R_g > 0.0 ? Role::loss("resistive") : Role::storage();
    if (c.C_g > 0.0) {
        nl.capacitor("Cg", "a", "0", c.C_g);
        roles["Cg"] = Role::storage();
    }

    auto stage = [&](const std::string& k, const std::string& sw_node, const std::string& rail,
                     bool positive) {
        const std::string L = "L" + k;
        nl.inductor(L, "a", sw_node, b.L_boost, b.R_Lboost);
        roles[L] = b.R_Lboost > 0.0 ? Role::loss("resistive") : Role::storage();
        if (b.C_Lboost > 0.0) {
            nl.capacitor("CL" + k, "a", sw_node, b.C_Lboost);
            roles["CL" + k] = Role::storage();
        }
        nl.add("S" + k, {sw_node, "0"},
               circuit::Switch{b.sw.R_on, b.sw.C_off, "g" + k, circuit::kInf, 0.0});
        roles["S" + k] = Role::loss("switch");
        const circuit::Diode d{b.diode.V_f, b.diode.R_on, b.diode.C_j, circuit::kInf,
                               -b.V_rail};
        if (positive)
            nl.add("D" + k, {sw_node, rail}, d);
        else
            nl.add("D" + k, {rail, sw_node}, d);
        roles["D" + k] = Role::loss("diode");
        if (positive)
            nl.capacitor("C" + k, rail, "0", b.C_res, b.V_rail);
        else
            nl.capacitor("C" + k, rail, "0", b.C_res, -b.V_rail);
        roles["C" + k] = Role::output();
    };
    stage("1", "s1", "p", true);
    stage("2", "s2", "n", false);

    circuit::PeriodicGate pulse{b.period(), b.t_on, 0.0, 0.0, window};
    switch (scn.polarity) {
    case Polarity::Positive:
        out.schedule.set("g1", circuit::GateDrive::from_periodic(pulse));
        out.schedule.set("g2", circuit::GateDrive::always_off());
        break;
    case Polarity::Negative:
        out.schedule.set("g1", circuit::GateDrive::always_off());
        out.schedule.set("g2", circuit::GateDrive::from_periodic(pulse));
        break;
    case Polarity::Both: {
        auto pos = pulse;
        auto neg = pulse;
        pos.t_end = 0.5 * T;
        neg.t_start = 0.5 * T;
        neg.phase = 0.5 * T;
        neg.t_end = window;
        out.schedule.set("g1", circuit::GateDrive::from_periodic(pos));
        out.schedule.set("g2", circuit::GateDrive::from_periodic(neg));
        break;
    }
    }
    return out;
}

struct HalfCycleResult {
    Trace trace;
    EnergyReport report;
    double t_stop = 0.0;
    double P_in = 0.0;   ///< average power taken from the EMF
    double P_out = 0.0;  ///< average power into the reservoirs
    double rail_ripple = 0.0;  ///< largest relative rail excursion
};

/// Runs a scenario over its window and books the energies.
[[nodiscard]] inline HalfCycleResult run_scenario(const EmScenario& scn) {
    auto bc = build_dual_boost(scn);
    circuit::SimOptions opt;
    opt.dt = scn.dt;
    opt.t_stop = scn.window();
    HalfCycleResult r;
    r.trace = circuit::simulate(bc.netlist, bc.schedule, opt);
    r.report = circuit::energy_report(r.trace, bc.roles);
    r.t_stop = opt.t_stop;
    r.P_in = r.report.total_in / r.t_stop;
    r.P_out = r.report.total_out / r.t_stop;
    for (const char* rail : {"p", "n"}) {
        const auto v = r.trace.voltage(rail);
        for (double x : v)
            r.rail_ripple = std::max(r.rail_ripple, std::abs(std::abs(x) - scn.boost.V_rail) /
                                                        scn.boost.V_rail);
    }
    if (r.rail_ripple > 0.01) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "reservoir voltage moved %.2f%% from V_rail",
                      100.0 * r.rail_ripple);
        r.trace.warnings.emplace_back(buf);
    }
    return r;
}

/// One half-cycle of a single polarity.
[[nodiscard]] inline HalfCycleResult run_half_cycle(const EmScenario& scn) {
    if (scn.polarity == Polarity::Both)
        throw DomainError("run_half_cycle: pick a single polarity");
    return run_scenario(scn);
}

struct DcmReport {
    std::vector<double> period_start;
    std::vector<double> period_min;   ///< min |i_L| per full switching period
    std::vector<double> period_peak;  ///< max |i_L| per full switching period
    double i_eps = 1e-3;
    double fraction = 1.0;  ///< share of periods with min |i_L| <= i_eps
};

/// Per switching period minimum and peak of an inductor current. Only whole
/// periods inside the trace count.
[[nodiscard]] inline DcmReport dcm_verify(const Trace& trace, const std::string& inductor,
                                          double period, double i_eps = 1e-3, double t0 = 0.0) {
    DcmReport rep;
    rep.i_eps = i_eps;
    const auto& t = trace.t;
    const auto& i = trace.current(inductor);
    const double t_end = t.empty() ? 0.0 : t.back();
    std::size_t k = 0;
    int ok = 0;
    for (long long p = 0;; ++p) {
        const double a = t0 + static_cast<double>(p) * period;
        const double e = a + period;
        if (e > t_end * (1.0 + 1e-12)) break;
        while (k < t.size() && t[k] < a) ++k;
        double lo = circuit::kInf, hi = 0.0;
        std::size_t j = k;
        for (; j < t.size() && t[j] <= e; ++j) {
            lo = std::min(lo, std::abs(i[j]));
            hi = std::max(hi, std::abs(i[j]));
            // the post-conduction ringing crosses zero between samples
            if (j > k && (i[j] > 0.0) != (i[j - 1] > 0.0)) lo = 0.0;
        }
        rep.period_start.push_back(a);
        rep.period_min.push_back(lo);
        rep.period_peak.push_back(hi);
        if (lo <= i_eps) ++ok;
    }
    if (!rep.period_min.empty())
        rep.fraction = static_cast<double>(ok) / static_cast<double>(rep.period_min.size());
    return rep;
}

[[nodiscard]] inline DcmReport dcm_verify(const HalfCycleResult& r, const EmScenario& scn,
                                          double i_eps = 1e-3) {
    const char* L = scn.polarity == Polarity::Negative ? kNegInductor : kPosInductor;
    return dcm_verify(r.trace, L, scn.boost.period(), i_eps);
}

/// Pearson correlation of per-period current peaks with |sin(w t)| at the
/// middle of each period.
[[nodiscard]] inline double envelope_correlation(const DcmReport& d, double f_mech,
                                                 double period) {
    const std::size_t n = d.period_peak.size();
    if (n < 3) throw DomainError("envelope_correlation: fewer than three periods");
    std::vector<double> env(n);
    for (std::size_t k = 0; k < n; ++k)
        env[k] = std::abs(std::sin(2.0 * std::numbers::pi * f_mech * (d.period_start[k] + 0.5 * period)));
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    const double mx = mean(d.period_peak), my = mean(env);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = d.period_peak[k] - mx, b = env[k] - my;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

/// Effective mechanical damping presented by the converter at the limit
/// velocity.
[[nodiscard]] inline double effective_damping(const EmScenario& scn, const HalfCycleResult& r) {
    return mechanics::effective_damping_from_power(r.P_in / (scn.emf_scale * scn.emf_scale),
                                                   scn.mech.limit_velocity());
}

struct DutyCalibration {
    double t_on = 0.0;
    double D_eff = 0.0;
    int evaluations = 0;
};

/// Bisection on the on-time so that the converter presents D_target.
[[nodiscard]] inline DutyCalibration calibrate_duty(const EmScenario& scn, double D_target) {
    if (!(D_target > 0.0)) throw DomainError("calibrate_duty: D_target must be > 0");
    auto f = [&](double t_on) {
        EmScenario s = scn;
        s.boost.t_on = t_on;
        return effective_damping(s, run_half_cycle(s));
    };
    const double T = scn.boost.period();
    const double lo = 0.02 * T, hi = 0.99 * T;
    try {
        const auto r = sweep::bisect_scalar(f, D_target, lo, hi, 0.02, 1e-4);
        return {r.x, r.fx, r.evaluations};
    } catch (const DomainError& e) {
        throw DomainError(std::string("calibrate_duty: target unreachable; ") + e.what());
    }
}

/// Average power extracted at the EMF when the mechanics are allowed to
/// respond: a load that draws P_sim at the limit amplitude presents the
/// damping D = 2 P_sim / v_l^2; if that exceeds what the source can drive at
/// the limit, the amplitude drops to m w Y0 / D and power scales with the
/// amplitude squared.
[[nodiscard]] inline double mechanically_limited_power(const mechanics::MechanicalSpec& mech,
                                                       double P_sim) {
    if (P_sim <= 0.0) return 0.0;
    const double v = mech.limit_velocity();
    const double D = mechanics::effective_damping_from_power(P_sim, v);
    const double Z = mechanics::amplitude_at_resonance(mech, D);
    const double s = Z / mech.Z_l;
    return P_sim * s * s;
}

struct LoadRow {
    std::string load;
    double parameter = 0.0;  ///< R_L for the resistor, t_on for the boost, C for the bridge
    double P_extracted = 0.0;
    double P_delivered = 0.0;
};

/// Resistive load across the coil, simulated over a half-cycle at the limit
/// amplitude.
[[nodiscard]] inline std::pair<double, double> resistive_load_power(const EmScenario& scn,
                                                                    double R_L) {
    Netlist nl;
    nl.name = "resistive_load";
    nl.waveforms["emf"] = circuit::Waveform::sine(scn.emf_amplitude(), scn.mech.f);
    nl.voltage_source("VG", "e", "0", "emf");
    nl.inductor("Lg", "e", "a", scn.coil.L_g, scn.coil.R_g);
    RoleMap roles{{"VG", circuit::Role::source()},
                  {"Lg", scn.coil.R_g > 0.0 ? circuit::Role::loss("resistive")
                                            : circuit::Role::storage()},
                  {"RL", circuit::Role::output()}};
    if (scn.coil.C_g > 0.0) {
        nl.capacitor("Cg", "a", "0", scn.coil.C_g);
        roles["Cg"] = circuit::Role::storage();
    }
    nl.resistor("RL", "a", "0", R_L);
    const double T2 = 0.5 * scn.mech_period();
    const double tau = scn.coil.L_g / (scn.coil.R_g + R_L);
    const auto tr = circuit::simulate(nl, {}, T2, std::min(scn.dt * 10.0, tau / 20.0));
    const auto rep = circuit::energy_report(tr, roles);
    return {rep.total_in / T2, rep.total_out / T2};
}

/// Full-bridge rectifier into a smoothing capacitor at V_rail that feeds a
/// resistive load, over one whole mechanical cycle.
[[nodiscard]] inline std::pair<double, double> bridge_load_power(const EmScenario& scn,
                                                                 double R_load) {
    const auto& dm = scn.boost.diode;
    Netlist nl;
    nl.name = "bridge_rectifier";
    nl.waveforms["emf"] = circuit::Waveform::sine(scn.emf_amplitude(), scn.mech.f);
    nl.voltage_source("VG", "e", "0", "emf");
    nl.inductor("Lg", "e", "a", scn.coil.L_g, scn.coil.R_g);
    RoleMap roles{{"VG", circuit::Role::source()},
                  {"Lg", scn.coil.R_g > 0.0 ? circuit::Role::loss("resistive")
                                            : circuit::Role::storage()}};
    if (scn.coil.C_g > 0.0) {
        nl.capacitor("Cg", "a", "0", scn.coil.C_g);
        roles["Cg"] = circuit::Role::storage();
    }
    const circuit::Diode d{dm.V_f, dm.R_on, dm.C_j, circuit::kInf, 0.0};
    // coil between a and 0; DC side between p and m
    nl.add("DB1", {"a", "p"}, d);
    nl.add("DB2", {"0", "p"}, d);
    nl.add("DB3", {"m", "a"}, d);
    nl.add("DB4", {"m", "0"}, d);
    for (const char* n : {"DB1", "DB2", "DB3", "DB4"}) roles[n] = circuit::Role::loss("diode");
    nl.capacitor("Cs", "p", "m", scn.boost.C_res, scn.boost.V_rail);
    nl.resistor("RS", "p", "m", R_load);
    nl.resistor("RM", "m", "0", 1e6);  // references the floating DC side
    roles["Cs"] = circuit::Role::output();
    roles["RS"] = circuit::Role::output();
    roles["RM"] = circuit::Role::loss("reference");
    const double T = scn.mech_period();
    const auto tr = circuit::simulate(nl, {}, T, scn.dt * 10.0);
    const auto rep = circuit::energy_report(tr, roles);
    return {rep.total_in / T, rep.E_out.at("RS") / T};
}

/// Compares a resistive load at its optimum, a bridge rectifier with a
/// smoothing capacitor, and the dual boost calibrated to the same optimum
/// damping. Extracted power is taken at the EMF, including the mechanical
/// amplitude limit.
[[nodiscard]] inline std::vector<LoadRow> compare_loads(const EmScenario& scn) {
    scn.validate();
    const auto& mech = scn.mech;
    const double k = scn.coil.transduction();
    const double D_opt = mechanics::effective_damping_from_power(
        mechanics::optimal_damper_power(mech), mech.limit_velocity());
    std::vector<LoadRow> rows;

    // resistor: the damping k^2/(R_g + R_L) matches the optimum near this
    // value; probe around it and keep the best
    const double R_star = std::max(k * k / D_opt - scn.coil.R_g, 1e-3);
    LoadRow best{"resistor", 0.0, -1.0, 0.0};
    for (double f : {0.5, 0.8, 0.9, 1.0, 1.1, 1.25, 2.0}) {
        const auto [P_in, P_out] = resistive_load_power(scn, R_star * f);
        const double P_ext = mechanically_limited_power(mech, P_in);
        if (P_ext > best.P_extracted) {
            const double s = P_ext / P_in;
            best = {"resistor", R_star * f, P_ext, P_out * s};
        }
    }
    rows.push_back(best);

    {
        const double P_ref = mechanics::optimal_damper_power(mech);
        const double R_load = 4.0 * scn.boost.V_rail * scn.boost.V_rail / P_ref;
        const auto [P_in, P_out] = bridge_load_power(scn, R_load);
        const double P_ext = mechanically_limited_power(mech, P_in);
        const double s = P_in > 0.0 ? P_ext / P_in : 0.0;
        rows.push_back({"bridge_rectifier", scn.boost.C_res, P_ext, P_out * s});
    }

    {
        EmScenario s = scn;
        s.polarity = Polarity::Positive;
        const auto cal = calibrate_duty(s, D_opt);
        s.boost.t_on = cal.t_on;
        const auto r = run_half_cycle(s);
        const double P_ext = mechanically_limited_power(mech, r.P_in);
        const double sc = r.P_in > 0.0 ? P_ext / r.P_in : 0.0;
        rows.push_back({"dual_boost", cal.t_on, P_ext, r.P_out * sc});
    }
    return rows;
}

}  // namespace scav::em

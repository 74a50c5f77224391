// Electrostatic generator: constant-charge energy bookkeeping and the
// single-shot down-conversion of the open-state charge through a modified
// buck or flyback converter built from cell-scaled devices.
#pragma once

#include "scav/circuit/energy.hpp"
#include "scav/circuit/engine.hpp"
#include "scav/circuit/gate_schedule.hpp"
#include "scav/circuit/netlist.hpp"
#include "scav/error.hpp"
#include "scav/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace scav::es {

using circuit::GateSchedule;
using circuit::Netlist;
using circuit::RoleMap;

struct EsGeneratorSpec {
    double C_closed = 3.3e-9;
    double C_open = 33e-12;
    double C_par = 0.0;
    double V_prime = 2.5;

    void validate() const {
        if (!(C_open > 0.0)) throw DomainError("generator: C_open must be > 0");
        if (!(C_closed > C_open)) throw DomainError("generator: need C_closed > C_open");
        if (!(C_par >= 0.0)) throw DomainError("generator: C_par must be >= 0");
        if (!(V_prime > 0.0)) throw DomainError("generator: V_prime must be > 0");
    }
    /// Priming charge with extra capacitance C_dev hanging on the node.
    [[nodiscard]] double Q0(double C_dev = 0.0) const { return V_prime * (C_closed + C_par + C_dev); }
};

/// Devices built from n identical cells: resistances scale as 1/n,
/// capacitances as n. The switch and the diode use the same cell count.
struct CellDeviceModel {
    int n_cells = 10;
    double cell_area = 0.015;  ///< mm^2
    double R_on_cell = 100.0;  ///< switch, ohm for one cell
    double C_off_cell = 0.5e-12;
    double V_f = 0.5;
    double R_on_cell_diode = 100.0;
    double C_j_cell = 0.05e-12;
    double V_block = 250.0;

    void validate() const {
        if (n_cells < 1) throw DomainError("devices: n_cells must be >= 1");
        if (!(R_on_cell > 0.0) || !(R_on_cell_diode > 0.0))
            throw DomainError("devices: cell on-resistances must be > 0");
        if (C_off_cell < 0.0 || C_j_cell < 0.0) throw DomainError("devices: negative capacitance");
        if (V_f < 0.0) throw DomainError("devices: V_f must be >= 0");
        if (!(cell_area > 0.0) || !(V_block > 0.0)) throw DomainError("devices: bad cell rating");
    }
    [[nodiscard]] double n() const { return static_cast<double>(n_cells); }
    [[nodiscard]] double R_on() const { return R_on_cell / n(); }
    [[nodiscard]] double C_off() const { return C_off_cell * n(); }
    [[nodiscard]] double R_on_diode() const { return R_on_cell_diode / n(); }
    [[nodiscard]] double C_j() const { return C_j_cell * n(); }
    [[nodiscard]] double area() const { return cell_area * n(); }
};

struct EfficiencyBreakdown {
    double E_closed = 0.0;
    double E_open = 0.0;
    double W_field = 0.0;
    double E_out = 0.0;
    double n_gen = 0.0;
    double n_conv = 0.0;
    double effectiveness = 0.0;
    bool converted = false;  ///< E_out, n_conv and effectiveness are filled
};

/// E = 1/2 Q^2 (1/C_open - 1/C_closed); negative when C_open > C_closed.
[[nodiscard]] inline double constant_charge_energy(double Q, double C_open, double C_closed) {
    if (!(C_open > 0.0) || !(C_closed > 0.0))
        throw DomainError("constant_charge_energy: capacitances must be > 0");
    return 0.5 * Q * Q * (1.0 / C_open - 1.0 / C_closed);
}

/// Plates primed at C_closed, then separated at constant charge with C_par
/// and the converter's device capacitance C_dev sharing the charge.
///
/// E_open is the energy left on the generator's own capacitance (C_open plus
/// C_par); charge pushed onto device capacitance is not counted as
/// generated. W_field is the ideal field work at the same charge with no
/// parallel capacitance at all.
[[nodiscard]] inline EfficiencyBreakdown generation_cycle(const EsGeneratorSpec& gen,
                                                          double C_dev = 0.0) {
    gen.validate();
    if (!(C_dev >= 0.0)) throw DomainError("generation_cycle: C_dev must be >= 0");
    const double Q = gen.Q0(C_dev);
    const double C_gen = gen.C_open + gen.C_par;
    const double V_open = Q / (C_gen + C_dev);
    EfficiencyBreakdown b;
    b.E_closed = 0.5 * Q * Q / (gen.C_closed + gen.C_par + C_dev);
    b.E_open = 0.5 * C_gen * V_open * V_open;
    b.W_field = constant_charge_energy(Q, gen.C_open, gen.C_closed);
    b.n_gen = b.E_open / (b.W_field + b.E_closed);
    return b;
}

/// Open-state node voltage after charge sharing.
[[nodiscard]] inline double open_voltage(const EsGeneratorSpec& gen, double C_dev) {
    return gen.Q0(C_dev) / (gen.C_open + gen.C_par + C_dev);
}

enum class Topology { Buck, Flyback };

[[nodiscard]] inline const char* to_string(Topology t) {
    return t == Topology::Buck ? "buck" : "flyback";
}

/// Device capacitance the topology hangs on the generator node. In the buck
/// only the high-side switch does; in the flyback the switch (through the
/// primary) and the clamp diode both do.
[[nodiscard]] inline double device_capacitance(Topology t, const CellDeviceModel& dev) {
    return t == Topology::Buck ? dev.C_off() : dev.C_off() + dev.C_j();
}

/// Passive parts of the converters.
struct ConverterParams {
    double L = 10e-6;       ///< buck inductor, or each flyback winding
    double R_L = 1.0;       ///< series resistance of the inductor or each winding
    double C_load = 1e-6;   ///< output reservoir
    double dt = 0.1e-9;
    double t_max = 20e-6;   ///< discharge timeout

    void validate() const {
        if (!(L > 0.0) || !(R_L > 0.0)) throw DomainError("converter: L and R_L must be > 0");
        if (!(C_load > 0.0)) throw DomainError("converter: C_load must be > 0");
        if (!(dt > 0.0) || !(t_max > dt)) throw DomainError("converter: bad dt or t_max");
    }
};

struct EsCircuit {
    Netlist netlist;
    GateSchedule schedule;
    RoleMap roles;
    Topology topology = Topology::Buck;
    double V0 = 0.0;      ///< generator node voltage at the start
    double C_dev = 0.0;
    double V_load = 0.0;
    ConverterParams conv;
    std::vector<std::string> inductive;  ///< current columns that must come to rest
};

inline constexpr const char* kGenNode = "g";
inline constexpr const char* kGate = "gs";

namespace detail {

inline EsCircuit prepare(const EsGeneratorSpec& gen, const CellDeviceModel& dev, double V_load,
                         const ConverterParams& conv, Topology topo) {
    gen.validate();
    dev.validate();
    conv.validate();
    EsCircuit c;
    c.topology = topo;
    c.C_dev = device_capacitance(topo, dev);
    c.V0 = open_voltage(gen, c.C_dev);
    c.V_load = V_load;
    c.conv = conv;
    if (!(V_load > 0.0 && V_load < c.V0))
        throw DomainError("V_load must lie between 0 and the open-state voltage");
    c.netlist.name = std::string("es_") + to_string(topo);
    c.netlist.capacitor("CG", kGenNode, "0", gen.C_open + gen.C_par, c.V0);
    c.roles["CG"] = circuit::Role::source();
    c.schedule.set(kGate, circuit::GateDrive::always_on());
    return c;
}

}  // namespace detail

/// High-side switch from the generator to the switch node, freewheel diode
/// from ground, inductor into the output reservoir.
[[nodiscard]] inline EsCircuit build_buck(const EsGeneratorSpec& gen, const CellDeviceModel& dev,
                                          double V_load, const ConverterParams& conv = {}) {
    auto c = detail::prepare(gen, dev, V_load, conv, Topology::Buck);
    auto& nl = c.netlist;
    using circuit::Role;
    nl.add("S1", {kGenNode, "x"}, circuit::Switch{dev.R_on(), dev.C_off(), kGate, circuit::kInf, c.V0});
    nl.add("D1", {"0", "x"}, circuit::Diode{dev.V_f, dev.R_on_diode(), dev.C_j(), circuit::kInf, 0.0});
    nl.inductor("L1", "x", "o", conv.L, conv.R_L);
    nl.capacitor("CO", "o", "0", conv.C_load, V_load);
    c.roles["S1"] = Role::loss("switch");
    c.roles["D1"] = Role::loss("diode");
    c.roles["L1"] = Role::loss("resistive");
    c.roles["CO"] = Role::output();
    c.inductive = {"L1"};
    return c;
}

/// 1:1 coupled inductor: primary from the generator to a low-side switch,
/// secondary from ground through the output diode into the reservoir, clamp
/// diode from ground to the generator node.
[[nodiscard]] inline EsCircuit build_flyback(const EsGeneratorSpec& gen, const CellDeviceModel& dev,
                                             double V_load, const ConverterParams& conv = {}) {
    auto c = detail::prepare(gen, dev, V_load, conv, Topology::Flyback);
    auto& nl = c.netlist;
    using circuit::Role;
    nl.add("K1", {kGenNode, "d", "0", "s"},
           circuit::CoupledInductor{conv.L, conv.L, 1.0, conv.R_L, conv.R_L, 0.0, 0.0});
    nl.add("S1", {"d", "0"}, circuit::Switch{dev.R_on(), dev.C_off(), kGate, circuit::kInf, c.V0});
    nl.add("DC", {"0", kGenNode},
           circuit::Diode{dev.V_f, dev.R_on_diode(), dev.C_j(), circuit::kInf, -c.V0});
    nl.add("DO", {"s", "o"},
           circuit::Diode{dev.V_f, dev.R_on_diode(), dev.C_j(), circuit::kInf, -V_load});
    nl.capacitor("CO", "o", "0", conv.C_load, V_load);
    c.roles["K1"] = Role::loss("resistive");
    c.roles["S1"] = Role::loss("switch");
    c.roles["DC"] = Role::loss("diode");
    c.roles["DO"] = Role::loss("diode");
    c.roles["CO"] = Role::output();
    c.inductive = {"K1", "K1.s"};
    return c;
}

[[nodiscard]] inline EsCircuit build_converter(Topology t, const EsGeneratorSpec& gen,
                                               const CellDeviceModel& dev, double V_load,
                                               const ConverterParams& conv = {}) {
    return t == Topology::Buck ? build_buck(gen, dev, V_load, conv)
                               : build_flyback(gen, dev, V_load, conv);
}

struct DischargeResult {
    EfficiencyBreakdown breakdown;
    circuit::EnergyReport report;
    circuit::Trace trace;
    double t_off = 0.0;  ///< switch turn-off instant
};

/// Two passes: the first holds the switch on and finds when the generator
/// node has fallen to 1% of its start value (or stops falling); the second
/// turns the switch off there and runs until the converter is at rest.
[[nodiscard]] inline DischargeResult run_discharge(const EsCircuit& c, const EsGeneratorSpec& gen) {
    const double V0 = c.V0;
    const double v_done = 0.01 * V0;
    circuit::SimOptions opt;
    opt.dt = c.conv.dt;
    opt.t_stop = c.conv.t_max;

    std::size_t gi = 0;
    {
        const auto nodes = c.netlist.node_names();
        gi = static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), kGenNode) - nodes.begin());
    }

    double t_off = -1.0;
    {
        double v_min = circuit::kInf, t_min = 0.0;
        opt.stop_when = [&](const circuit::Trace& tr) {
            const double v = tr.v[gi].back();
            if (v < v_min) {
                v_min = v;
                t_min = tr.t.back();
            }
            if (v <= v_done) {
                t_off = tr.t.back();
                return true;
            }
            if (v > v_min + v_done) {
                t_off = t_min;
                return true;
            }
            return false;
        };
        (void)circuit::simulate(c.netlist, c.schedule, opt);
        if (t_off <= 0.0) {
            throw SolverError("generator did not discharge before the timeout",
                              "node " + std::string(kGenNode));
        }
    }

    GateSchedule gs = c.schedule;
    gs.set(kGate, circuit::GateDrive::from_intervals({{0.0, t_off}}));
    double i_peak = 0.0;
    std::vector<std::size_t> cols;
    opt.stop_when = [&](const circuit::Trace& tr) {
        if (cols.empty())
            for (const auto& name : c.inductive)
                cols.push_back(static_cast<std::size_t>(
                    std::find(tr.current_names.begin(), tr.current_names.end(), name) -
                    tr.current_names.begin()));
        double i_now = 0.0;
        for (auto k : cols) i_now = std::max(i_now, std::abs(tr.i[k].back()));
        i_peak = std::max(i_peak, i_now);
        if (tr.t.back() <= t_off) return false;
        for (const auto& st : tr.state)
            if (st.back()) return false;
        return i_now <= 1e-3 * i_peak;
    };
    DischargeResult r;
    r.trace = circuit::simulate(c.netlist, gs, opt);
    if (r.trace.t.back() >= c.conv.t_max * (1.0 - 1e-12))
        throw SolverError("converter did not come to rest before the timeout", "t_max");
    r.t_off = t_off;
    r.report = circuit::energy_report(r.trace, c.roles);
    r.breakdown = generation_cycle(gen, c.C_dev);
    r.breakdown.E_out = r.report.total_out;
    r.breakdown.n_conv = r.breakdown.E_out / r.breakdown.E_open;
    r.breakdown.effectiveness = r.breakdown.n_gen * r.breakdown.n_conv;
    r.breakdown.converted = true;
    return r;
}

[[nodiscard]] inline EfficiencyBreakdown simulate_discharge(const EsCircuit& c,
                                                            const EsGeneratorSpec& gen) {
    return run_discharge(c, gen).breakdown;
}

/// n_gen, n_conv and effectiveness for each cell count, with the argmax of
/// effectiveness.
[[nodiscard]] inline sweep::ResultTable cell_sweep(const EsGeneratorSpec& gen,
                                                   const CellDeviceModel& tmpl, Topology topo,
                                                   const std::vector<int>& n_range, double V_load,
                                                   const ConverterParams& conv = {},
                                                   unsigned threads = 1) {
    if (n_range.empty()) throw DomainError("cell_sweep: empty cell range");
    sweep::SweepSpec spec;
    spec.parameter = "n_cells";
    spec.objective = "effectiveness";
    for (int n : n_range) spec.values.push_back(static_cast<double>(n));
    auto table = sweep::run_sweep(
        spec,
        [&](double n) {
            CellDeviceModel dev = tmpl;
            dev.n_cells = static_cast<int>(n);
            const auto b = simulate_discharge(build_converter(topo, gen, dev, V_load, conv), gen);
            return std::map<std::string, double>{{"n_gen", b.n_gen},
                                                 {"n_conv", b.n_conv},
                                                 {"effectiveness", b.effectiveness},
                                                 {"E_open", b.E_open},
                                                 {"E_out", b.E_out}};
        },
        threads);
    table.provenance.emplace_back("topology", to_string(topo));
    return table;
}

}  // namespace scav::es

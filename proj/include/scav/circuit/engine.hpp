// Fixed-step piecewise-linear transient engine.
//
// Each step solves the modified-nodal system with companion models of the
// reactive elements. Steps are trapezoidal except for the first few after a
// topology change (gate transition, diode flip, t = 0), which use backward
// Euler to damp the stiff modes a fresh topology excites. Diode transitions
// are located by bisection on the step length; gate transitions are hit
// exactly by shortening the step.
//
// Energy is booked per component with the quadrature that matches the
// integration rule of the step (midpoint products for trapezoidal steps,
// end-point products for backward Euler), so terminal energies sum to zero
// over the whole network to rounding error.
#pragma once

#include "scav/circuit/dense_lu.hpp"
#include "scav/circuit/gate_schedule.hpp"
#include "scav/circuit/netlist.hpp"
#include "scav/circuit/trace.hpp"
#include "scav/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace scav::circuit {

struct SimOptions {
    double dt = 1e-9;
    double t_stop = 0.0;
    /// Conductance from every node to ground, keeps momentarily isolated
    /// nodes solvable. Its dissipation is reported separately.
    double gmin = 1e-12;
    int be_steps_after_event = 2;
    /// Length of those backward-Euler steps as a fraction of dt; short
    /// steps keep their first-order error small.
    double be_step_fraction = 1.0 / 16.0;
    int event_tol_divisor = 1024;
    int max_alternations = 64;
    /// Checked after every committed step; returning true ends the run.
    std::function<bool(const Trace&)> stop_when;
};

namespace detail {

enum class Rule { Trapezoidal, BackwardEuler };

class Engine {
public:
    Engine(const Netlist& nl, const GateSchedule& gs, const SimOptions& opt)
        : nl_(nl), opt_(opt) {
        nl_.validate();
        if (!(opt_.dt > 0.0)) throw DomainError("simulate: dt must be > 0");
        if (!(opt_.t_stop >= 0.0)) throw DomainError("simulate: t_stop must be >= 0");
        if (!(opt_.be_step_fraction > 0.0 && opt_.be_step_fraction <= 1.0))
            throw DomainError("simulate: be_step_fraction must lie in (0, 1]");
        if (opt_.event_tol_divisor < 1 || opt_.max_alternations < 1 || opt_.be_steps_after_event < 0)
            throw DomainError("simulate: bad event settings");
        h_tol_ = opt_.dt / opt_.event_tol_divisor;
        build(gs);
    }

    Trace run() {
        init_states();
        record_initial();
        int alternations = 0;
        double window_start = t_;
        while (opt_.t_stop - t_ > 1e-9 * opt_.dt) {
            double t_gate = next_gate_time();
            if (t_gate - t_ <= 1e-9 * opt_.dt) {
                t_ = t_gate;
                apply_gates();
                continue;
            }
            const Rule rule = be_left_ > 0 ? Rule::BackwardEuler : Rule::Trapezoidal;
            const double h_base =
                rule == Rule::BackwardEuler ? opt_.dt * opt_.be_step_fraction : opt_.dt;
            const double h_max = std::min({h_base, opt_.t_stop - t_, t_gate - t_});

            Solution full = solve(h_max, rule);
            auto bad = inconsistent(full);
            double h = h_max;
            Solution* take = &full;
            Solution lo_sol;
            if (!bad.empty()) {
                const double h_probe = std::min(h_tol_, h_max);
                Solution probe = solve(h_probe, rule);
                auto bad0 = inconsistent(probe);
                if (!bad0.empty()) {
                    flip(bad0, alternations);
                    continue;
                }
                double lo = h_probe, hi = h_max;
                lo_sol = std::move(probe);
                while (hi - lo > h_tol_) {
                    const double mid = 0.5 * (lo + hi);
                    Solution s = solve(mid, rule);
                    auto b = inconsistent(s);
                    if (b.empty()) {
                        lo = mid;
                        lo_sol = std::move(s);
                    } else {
                        hi = mid;
                        bad = std::move(b);
                    }
                }
                h = lo;
                take = &lo_sol;
            }
            commit(*take, h, rule);
            if (h == t_gate - t_)
                t_ = t_gate;
            else if (h == opt_.t_stop - t_)
                t_ = opt_.t_stop;
            else
                t_ += h;
            if (rule == Rule::BackwardEuler && be_left_ > 0) --be_left_;
            if (t_ - window_start >= opt_.dt) {
                alternations = 0;
                window_start = t_;
            }
            if (take != &full) flip(bad, alternations);
            if (t_ == t_gate) apply_gates();
            record(*take);
            if (opt_.stop_when && opt_.stop_when(trace_)) break;
        }
        return std::move(trace_);
    }

private:
    enum class Kind { R, L, C, CVar, V, Sw, D, K };

    struct Rt {
        Kind kind;
        std::string name;
        int a = -1, b = -1, c = -1, d = -1;  // node unknowns, -1 = ground
        int br = -1, br2 = -1;               // branch unknowns
        int cur = -1;                        // first current column
        int dev = -1;                        // device column
        double R = 0.0, L = 0.0, L2 = 0.0, M = 0.0, R2 = 0.0;
        double cap = 0.0;                    // shunt capacitance (C, C_off, C_j)
        double g_leak = 0.0;
        double Vf = 0.0;
        const Waveform* wf = nullptr;        // source or capacitance profile
        int gate = -1;
        bool on = false;
        // history at t_n
        double v = 0.0, i = 0.0;             // port 1 voltage and total current
        double v2 = 0.0, i2 = 0.0;           // port 2 (coupled inductor)
        double icap = 0.0;                   // shunt-capacitor current
        double q = 0.0;                      // CVar charge
        double absorbed = 0.0;
    };

    struct CompState {
        double v = 0, i = 0, v2 = 0, i2 = 0, icap = 0, icond = 0, q = 0;
    };

    struct Solution {
        double h = 0.0;
        double t = 0.0;
        std::vector<double> x;
        std::vector<CompState> cs;
    };

    Netlist nl_;
    SimOptions opt_;
    double h_tol_ = 0.0;
    std::vector<std::string> node_names_;
    std::map<std::string, int> node_index_;
    std::vector<Rt> rt_;
    std::vector<std::string> gate_names_;
    std::vector<GateTimeline> gates_;
    int n_nodes_ = 0;
    int n_unknowns_ = 0;
    double t_ = 0.0;
    int be_left_ = 0;
    double shunt_absorbed_ = 0.0;
    Trace trace_;
    DenseMatrix A_;
    std::vector<double> rhs_;

    int node(const std::string& n) const {
        return Netlist::is_ground(n) ? -1 : node_index_.at(n);
    }

    void build(const GateSchedule& gs) {
        node_names_ = nl_.node_names();
        for (std::size_t k = 0; k < node_names_.size(); ++k)
            node_index_[node_names_[k]] = static_cast<int>(k);
        n_nodes_ = static_cast<int>(node_names_.size());
        int next_branch = n_nodes_;

        trace_.netlist_name = nl_.name;
        trace_.dt = opt_.dt;
        trace_.nodes = node_names_;

        std::map<std::string, int> gate_idx;
        for (const auto& comp : nl_.components()) {
            Rt r;
            r.name = comp.name;
            r.a = node(comp.nodes[0]);
            r.b = node(comp.nodes[1]);
            r.cur = static_cast<int>(trace_.current_names.size());
            trace_.current_names.push_back(comp.name);
            std::visit(
                [&](const auto& e) {
                    using T = std::decay_t<decltype(e)>;
                    if constexpr (std::is_same_v<T, Resistor>) {
                        r.kind = Kind::R;
                        r.R = e.R;
                    } else if constexpr (std::is_same_v<T, Inductor>) {
                        r.kind = Kind::L;
                        r.L = e.L;
                        r.R = e.R_series;
                        r.i = e.i0;
                        r.br = next_branch++;
                    } else if constexpr (std::is_same_v<T, Capacitor>) {
                        r.kind = Kind::C;
                        r.cap = e.C;
                        r.v = e.v0;
                    } else if constexpr (std::is_same_v<T, VarCapacitor>) {
                        r.kind = Kind::CVar;
                        r.wf = &nl_.waveforms.at(e.profile);
                        r.q = e.q0;
                        const double cmin = r.wf->min_over(0.0, opt_.t_stop);
                        if (!(cmin > 0.0))
                            throw NetlistError("capacitance profile of '" + comp.name +
                                               "' is not positive over the run");
                        r.v = e.q0 / (*r.wf)(0.0);
                    } else if constexpr (std::is_same_v<T, VoltageSource>) {
                        r.kind = Kind::V;
                        r.wf = &nl_.waveforms.at(e.waveform);
                        r.R = e.R_series;
                        r.br = next_branch++;
                    } else if constexpr (std::is_same_v<T, Switch>) {
                        r.kind = Kind::Sw;
                        r.R = e.R_on;
                        r.cap = e.C_off;
                        r.g_leak = std::isfinite(e.R_leak) ? 1.0 / e.R_leak : 0.0;
                        r.v = e.v0;
                        auto [it, fresh] =
                            gate_idx.emplace(e.gate, static_cast<int>(gate_names_.size()));
                        if (fresh) {
                            gate_names_.push_back(e.gate);
                            gates_.emplace_back(gs.has(e.gate) ? gs.at(e.gate) : GateDrive{},
                                                opt_.t_stop);
                        }
                        r.gate = it->second;
                    } else if constexpr (std::is_same_v<T, Diode>) {
                        r.kind = Kind::D;
                        r.R = e.R_on;
                        r.cap = e.C_j;
                        r.Vf = e.V_f;
                        r.g_leak = std::isfinite(e.R_leak) ? 1.0 / e.R_leak : 0.0;
                        r.v = e.v0;
                    } else if constexpr (std::is_same_v<T, CoupledInductor>) {
                        r.kind = Kind::K;
                        r.c = node(comp.nodes[2]);
                        r.d = node(comp.nodes[3]);
                        r.L = e.L1;
                        r.L2 = e.L2;
                        r.M = e.M();
                        r.R = e.R1;
                        r.R2 = e.R2;
                        r.i = e.i1_0;
                        r.i2 = e.i2_0;
                        r.br = next_branch++;
                        r.br2 = next_branch++;
                        trace_.current_names.push_back(comp.name + ".s");
                    }
                },
                comp.element);
            if (r.kind == Kind::Sw || r.kind == Kind::D) {
                r.dev = static_cast<int>(trace_.devices.size());
                trace_.devices.push_back(comp.name);
            }
            trace_.components.push_back(comp.name);
            rt_.push_back(std::move(r));
        }
        n_unknowns_ = next_branch;
        A_ = DenseMatrix(static_cast<std::size_t>(n_unknowns_));
        rhs_.assign(static_cast<std::size_t>(n_unknowns_), 0.0);

        trace_.v.assign(node_names_.size(), {});
        trace_.i.assign(trace_.current_names.size(), {});
        trace_.absorbed.assign(rt_.size(), {});
        trace_.stored.assign(rt_.size(), {});
        trace_.state.assign(trace_.devices.size(), {});
        check_timestep(gs);
    }

    void check_timestep(const GateSchedule& gs) {
        const double dt = opt_.dt;
        const double period = gs.min_period();
        if (std::isfinite(period) && dt > period / 50.0) {
            std::ostringstream os;
            os << "dt " << dt << " exceeds 1/50 of the shortest switching period " << period;
            trace_.warnings.push_back(os.str());
        }
        // Switch and diode R*C constants are not checked: those modes die out
        // during the backward-Euler steps that follow every event.
        for (const auto& r : rt_) {
            if (r.kind != Kind::L || !(r.R > 0.0)) continue;
            const double tau = r.L / r.R;
            if (tau >= h_tol_ && dt > tau / 20.0) {
                std::ostringstream os;
                os << "dt " << dt << " exceeds 1/20 of time constant " << tau << " of '" << r.name
                   << "'";
                trace_.warnings.push_back(os.str());
            }
        }
    }

    void init_states() {
        for (auto& r : rt_)
            if (r.kind == Kind::Sw) r.on = gates_[static_cast<std::size_t>(r.gate)].on(0.0);
        be_left_ = opt_.be_steps_after_event;
    }

    [[nodiscard]] double stored_energy(const Rt& r, double t, const CompState& s) const {
        switch (r.kind) {
        case Kind::C:
        case Kind::Sw:
        case Kind::D:
            return 0.5 * r.cap * s.v * s.v;
        case Kind::CVar:
            return 0.5 * s.q * s.q / (*r.wf)(t);
        case Kind::L:
            return 0.5 * r.L * s.i * s.i;
        case Kind::K:
            return 0.5 * (r.L * s.i * s.i + 2.0 * r.M * s.i * s.i2 + r.L2 * s.i2 * s.i2);
        default:
            return 0.0;
        }
    }

    [[nodiscard]] CompState history(const Rt& r) const {
        CompState s;
        s.v = r.v;
        s.i = r.i;
        s.v2 = r.v2;
        s.i2 = r.i2;
        s.icap = r.icap;
        s.q = r.q;
        return s;
    }

    // --- assembly -----------------------------------------------------------

    void stamp_g(int a, int b, double g) {
        if (a >= 0) A_(a, a) += g;
        if (b >= 0) A_(b, b) += g;
        if (a >= 0 && b >= 0) {
            A_(a, b) -= g;
            A_(b, a) -= g;
        }
    }
    // Companion source: element current a->b equals g*v - ieq.
    void stamp_i(int a, int b, double ieq) {
        if (a >= 0) rhs_[a] += ieq;
        if (b >= 0) rhs_[b] -= ieq;
    }
    void stamp_branch(int a, int b, int br) {
        if (a >= 0) {
            A_(a, br) += 1.0;
            A_(br, a) += 1.0;
        }
        if (b >= 0) {
            A_(b, br) -= 1.0;
            A_(br, b) -= 1.0;
        }
    }

    struct Companion {
        double g = 0.0;
        double ieq = 0.0;
    };

    [[nodiscard]] static Companion cap_companion(double C, double v_n, double i_n, double h, Rule rule) {
        if (C <= 0.0) return {};
        if (rule == Rule::Trapezoidal) {
            const double g = 2.0 * C / h;
            return {g, g * v_n + i_n};
        }
        const double g = C / h;
        return {g, g * v_n};
    }

    [[nodiscard]] Companion cvar_companion(const Rt& r, double t1, double h, Rule rule) const {
        const double C1 = (*r.wf)(t1);
        if (rule == Rule::Trapezoidal) return {2.0 * C1 / h, 2.0 * r.q / h + r.icap};
        return {C1 / h, r.q / h};
    }

    /// One companion-model solve over a step of length h. `t_eval`
    /// overrides the time at which sources and C(t) are evaluated.
    Solution solve(double h, Rule rule, std::optional<double> t_eval = std::nullopt) {
        const double t1 = t_eval ? *t_eval : t_ + h;
        A_.zero();
        std::fill(rhs_.begin(), rhs_.end(), 0.0);
        const bool trap = rule == Rule::Trapezoidal;

        for (int k = 0; k < n_nodes_; ++k) A_(k, k) += opt_.gmin;

        for (const auto& r : rt_) {
            switch (r.kind) {
            case Kind::R:
                stamp_g(r.a, r.b, 1.0 / r.R);
                break;
            case Kind::C:
            case Kind::Sw:
            case Kind::D: {
                const auto cc = cap_companion(r.cap, r.v, r.icap, h, rule);
                double g = cc.g + r.g_leak;
                double ieq = cc.ieq;
                if (r.kind == Kind::Sw && r.on) g += 1.0 / r.R;
                if (r.kind == Kind::D && r.on) {
                    g += 1.0 / r.R;
                    ieq += r.Vf / r.R;
                }
                stamp_g(r.a, r.b, g);
                stamp_i(r.a, r.b, ieq);
                break;
            }
            case Kind::CVar: {
                const auto cc = cvar_companion(r, t1, h, rule);
                stamp_g(r.a, r.b, cc.g);
                stamp_i(r.a, r.b, cc.ieq);
                break;
            }
            case Kind::V:
                stamp_branch(r.a, r.b, r.br);
                A_(r.br, r.br) -= r.R;
                rhs_[r.br] = (*r.wf)(t1);
                break;
            case Kind::L:
                stamp_branch(r.a, r.b, r.br);
                if (trap) {
                    A_(r.br, r.br) -= r.R + 2.0 * r.L / h;
                    rhs_[r.br] = -r.v + (r.R - 2.0 * r.L / h) * r.i;
                } else {
                    A_(r.br, r.br) -= r.R + r.L / h;
                    rhs_[r.br] = -(r.L / h) * r.i;
                }
                break;
            case Kind::K: {
                stamp_branch(r.a, r.b, r.br);
                stamp_branch(r.c, r.d, r.br2);
                const double f = trap ? 2.0 / h : 1.0 / h;
                A_(r.br, r.br) -= r.R + f * r.L;
                A_(r.br, r.br2) -= f * r.M;
                A_(r.br2, r.br2) -= r.R2 + f * r.L2;
                A_(r.br2, r.br) -= f * r.M;
                if (trap) {
                    rhs_[r.br] = -r.v + r.R * r.i - f * (r.L * r.i + r.M * r.i2);
                    rhs_[r.br2] = -r.v2 + r.R2 * r.i2 - f * (r.L2 * r.i2 + r.M * r.i);
                } else {
                    rhs_[r.br] = -f * (r.L * r.i + r.M * r.i2);
                    rhs_[r.br2] = -f * (r.L2 * r.i2 + r.M * r.i);
                }
                break;
            }
            }
        }

        if (auto bad = lu_solve(A_, rhs_)) throw SolverError("singular circuit matrix", describe_unknown(*bad));

        Solution s;
        s.h = h;
        s.t = t1;
        s.x = rhs_;
        s.cs.resize(rt_.size());
        auto vx = [&](int n) { return n >= 0 ? s.x[n] : 0.0; };
        for (std::size_t k = 0; k < rt_.size(); ++k) {
            const auto& r = rt_[k];
            auto& c = s.cs[k];
            c.v = vx(r.a) - vx(r.b);
            switch (r.kind) {
            case Kind::R:
                c.i = c.v / r.R;
                break;
            case Kind::C:
            case Kind::Sw:
            case Kind::D: {
                const auto cc = cap_companion(r.cap, r.v, r.icap, h, rule);
                c.icap = cc.g * c.v - cc.ieq;
                if (r.kind == Kind::Sw && r.on) c.icond = c.v / r.R;
                if (r.kind == Kind::D && r.on) c.icond = (c.v - r.Vf) / r.R;
                c.i = c.icap + c.icond + r.g_leak * c.v;
                break;
            }
            case Kind::CVar: {
                const auto cc = cvar_companion(r, t1, h, rule);
                c.icap = cc.g * c.v - cc.ieq;
                c.i = c.icap;
                c.q = trap ? r.q + 0.5 * h * (r.icap + c.icap) : r.q + h * c.icap;
                break;
            }
            case Kind::V:
            case Kind::L:
                c.i = s.x[r.br];
                break;
            case Kind::K:
                c.i = s.x[r.br];
                c.i2 = s.x[r.br2];
                c.v2 = vx(r.c) - vx(r.d);
                break;
            }
        }
        return s;
    }

    [[nodiscard]] std::string describe_unknown(std::size_t k) const {
        if (static_cast<int>(k) < n_nodes_) return "node " + node_names_[k];
        for (const auto& r : rt_)
            if (r.br == static_cast<int>(k) || r.br2 == static_cast<int>(k))
                return "loop through branch of " + r.name;
        return "unknown " + std::to_string(k);
    }

    // Diodes whose assumed state contradicts the trial solution.
    [[nodiscard]] std::vector<std::size_t> inconsistent(const Solution& s) const {
        constexpr double vtol = 1e-9;
        constexpr double itol = 1e-9;
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < rt_.size(); ++k) {
            const auto& r = rt_[k];
            if (r.kind != Kind::D) continue;
            if (!r.on && s.cs[k].v > r.Vf + vtol) out.push_back(k);
            if (r.on && s.cs[k].icond < -itol) out.push_back(k);
        }
        return out;
    }

    void flip(const std::vector<std::size_t>& which, int& alternations) {
        if (++alternations > opt_.max_alternations) {
            std::string names;
            for (auto k : which) names += (names.empty() ? "" : ", ") + rt_[k].name;
            throw SolverError("diode state did not settle after " +
                                  std::to_string(opt_.max_alternations) + " alternations",
                              names);
        }
        for (auto k : which) rt_[k].on = !rt_[k].on;
        be_left_ = opt_.be_steps_after_event;
    }

    [[nodiscard]] double next_gate_time() const {
        double t = kInf;
        for (const auto& g : gates_) t = std::min(t, g.next_transition(t_));
        return t;
    }

    void apply_gates() {
        bool changed = false;
        for (auto& r : rt_) {
            if (r.kind != Kind::Sw) continue;
            const bool on = gates_[static_cast<std::size_t>(r.gate)].on(t_);
            changed = changed || on != r.on;
            r.on = on;
        }
        if (changed) be_left_ = opt_.be_steps_after_event;
    }

    void commit(const Solution& s, double h, Rule rule) {
        const bool trap = rule == Rule::Trapezoidal;
        for (std::size_t k = 0; k < rt_.size(); ++k) {
            auto& r = rt_[k];
            const auto& c = s.cs[k];
            double e = trap ? h * 0.25 * (r.v + c.v) * (r.i + c.i) : h * c.v * c.i;
            if (r.kind == Kind::K)
                e += trap ? h * 0.25 * (r.v2 + c.v2) * (r.i2 + c.i2) : h * c.v2 * c.i2;
            r.absorbed += e;
            r.v = c.v;
            r.i = c.i;
            r.v2 = c.v2;
            r.i2 = c.i2;
            r.icap = c.icap;
            if (r.kind == Kind::CVar) r.q = c.q;
        }
        double p = 0.0;
        for (int n = 0; n < n_nodes_; ++n) {
            if (trap) {
                const double vm = 0.5 * (s.x[n] + last_x_[n]);
                p += vm * vm;
            } else {
                p += s.x[n] * s.x[n];
            }
        }
        shunt_absorbed_ += h * opt_.gmin * p;
        last_x_ = s.x;
    }

    std::vector<double> last_x_;

    void record_initial() {
        // Consistent node voltages at t = 0: a very short backward-Euler
        // solve holds capacitor voltages and inductor currents at their
        // initial values. Diode states are settled here too.
        int alternations = 0;
        Solution s;
        for (;;) {
            s = solve(h_tol_, Rule::BackwardEuler, 0.0);
            auto bad = inconsistent(s);
            if (bad.empty()) break;
            flip(bad, alternations);
        }
        // Port currents of the short solve are the instantaneous ones; keep
        // the initial storage state exactly as specified.
        for (std::size_t k = 0; k < rt_.size(); ++k) {
            auto& r = rt_[k];
            auto c = s.cs[k];
            if (r.kind == Kind::C || r.kind == Kind::Sw || r.kind == Kind::D || r.kind == Kind::CVar)
                c.v = r.v;
            if (r.kind == Kind::L || r.kind == Kind::K) {
                c.i = r.i;
                c.i2 = r.i2;
                r.v = c.v;
                r.v2 = c.v2;
            } else {
                r.i = c.i;
            }
            r.icap = c.icap;
            s.cs[k] = c;
        }
        last_x_ = s.x;
        s.t = 0.0;
        push_sample(s);
        be_left_ = opt_.be_steps_after_event;
    }

    void record(const Solution& s) { push_sample(s); }

    void push_sample(const Solution& s) {
        trace_.t.push_back(t_);
        for (int n = 0; n < n_nodes_; ++n) trace_.v[n].push_back(s.x[n]);
        for (std::size_t k = 0; k < rt_.size(); ++k) {
            const auto& r = rt_[k];
            trace_.i[r.cur].push_back(r.i);
            if (r.kind == Kind::K) trace_.i[r.cur + 1].push_back(r.i2);
            trace_.absorbed[k].push_back(r.absorbed);
            trace_.stored[k].push_back(stored_energy(r, t_, history(r)));
            if (r.dev >= 0) trace_.state[r.dev].push_back(r.on ? 1 : 0);
        }
        trace_.shunt_absorbed.push_back(shunt_absorbed_);
    }
};

}  // namespace detail

/// Runs a transient simulation over [0, opt.t_stop].
[[nodiscard]] inline Trace simulate(const Netlist& netlist, const GateSchedule& schedule,
                                    const SimOptions& opt) {
    detail::Engine engine(netlist, schedule, opt);
    return engine.run();
}

[[nodiscard]] inline Trace simulate(const Netlist& netlist, const GateSchedule& schedule,
                                    double t_stop, double dt) {
    SimOptions opt;
    opt.t_stop = t_stop;
    opt.dt = dt;
    return simulate(netlist, schedule, opt);
}

}  // namespace scav::circuit

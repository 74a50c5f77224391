// Typed circuit graph for the piecewise-linear transient engine.
#pragma once

#include "scav/circuit/waveform.hpp"
#include "scav/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace scav::circuit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Resistor {
    double R = 0.0;
    friend bool operator==(const Resistor&, const Resistor&) = default;
};

struct Inductor {
    double L = 0.0;
    double R_series = 0.0;
    double i0 = 0.0;
    friend bool operator==(const Inductor&, const Inductor&) = default;
};

struct Capacitor {
    double C = 0.0;
    double v0 = 0.0;
    friend bool operator==(const Capacitor&, const Capacitor&) = default;
};

/// Capacitor with a prescribed C(t); integrated on its charge so that an
/// isolated plate pair keeps its charge exactly.
struct VarCapacitor {
    std::string profile;  ///< name of a Waveform in Netlist::waveforms, in farads
    double q0 = 0.0;
    friend bool operator==(const VarCapacitor&, const VarCapacitor&) = default;
};

/// v(n1) - v(n2) = e(t) + R_series * i, with i flowing n1 -> n2 inside.
struct VoltageSource {
    std::string waveform;
    double R_series = 0.0;
    friend bool operator==(const VoltageSource&, const VoltageSource&) = default;
};

/// Gated two-state switch: R_on when the gate is high, always shunted by the
/// blocking capacitance C_off (and an optional leakage resistance).
struct Switch {
    double R_on = 0.0;
    double C_off = 0.0;
    std::string gate;
    double R_leak = kInf;
    double v0 = 0.0;  ///< initial voltage on C_off
    friend bool operator==(const Switch&, const Switch&) = default;
};

/// Two-state PWL diode (anode n1, cathode n2): V_f + R_on when conducting,
/// junction capacitance C_j in parallel at all times.
struct Diode {
    double V_f = 0.0;
    double R_on = 0.0;
    double C_j = 0.0;
    double R_leak = kInf;
    double v0 = 0.0;  ///< initial voltage on C_j (anode minus cathode)
    friend bool operator==(const Diode&, const Diode&) = default;
};

/// Two-winding coupled inductor. Nodes: p1 p2 s1 s2, dots on p1 and s1.
/// M = k sqrt(L1 L2).
struct CoupledInductor {
    double L1 = 0.0;
    double L2 = 0.0;
    double k = 1.0;
    double R1 = 0.0;
    double R2 = 0.0;
    double i1_0 = 0.0;
    double i2_0 = 0.0;
    [[nodiscard]] double M() const { return k * std::sqrt(L1 * L2); }
    friend bool operator==(const CoupledInductor&, const CoupledInductor&) = default;
};

using Element = std::variant<Resistor, Inductor, Capacitor, VarCapacitor, VoltageSource, Switch,
                             Diode, CoupledInductor>;

struct Component {
    std::string name;
    std::vector<std::string> nodes;
    Element element;
    friend bool operator==(const Component&, const Component&) = default;
};

[[nodiscard]] inline std::size_t terminal_count(const Element& e) {
    return std::holds_alternative<CoupledInductor>(e) ? 4 : 2;
}

/// A named netlist. Ground is the node called "0" (alias "gnd").
class Netlist {
public:
    std::string name = "circuit";
    std::map<std::string, Waveform> waveforms;

    static bool is_ground(const std::string& node) { return node == "0" || node == "gnd"; }

    Netlist& add(std::string comp_name, std::vector<std::string> nodes, Element e) {
        components_.push_back(Component{std::move(comp_name), std::move(nodes), std::move(e)});
        return *this;
    }
    Netlist& resistor(std::string n, std::string a, std::string b, double R) {
        return add(std::move(n), {std::move(a), std::move(b)}, Resistor{R});
    }
    Netlist& inductor(std::string n, std::string a, std::string b, double L, double Rs = 0.0,
                      double i0 = 0.0) {
        return add(std::move(n), {std::move(a), std::move(b)}, Inductor{L, Rs, i0});
    }
    Netlist& capacitor(std::string n, std::string a, std::string b, double C, double v0 = 0.0) {
        return add(std::move(n), {std::move(a), std::move(b)}, Capacitor{C, v0});
    }
    Netlist& voltage_source(std::string n, std::string a, std::string b, std::string wf,
                            double Rs = 0.0) {
        return add(std::move(n), {std::move(a), std::move(b)}, VoltageSource{std::move(wf), Rs});
    }

    [[nodiscard]] const std::vector<Component>& components() const noexcept { return components_; }
    [[nodiscard]] std::vector<Component>& components() noexcept { return components_; }

    [[nodiscard]] const Component* find(const std::string& comp_name) const {
        for (const auto& c : components_)
            if (c.name == comp_name) return &c;
        return nullptr;
    }
    [[nodiscard]] Component* find(const std::string& comp_name) {
        for (auto& c : components_)
            if (c.name == comp_name) return &c;
        return nullptr;
    }

    /// Non-ground node names in first-appearance order.
    [[nodiscard]] std::vector<std::string> node_names() const {
        std::vector<std::string> out;
        std::set<std::string> seen;
        for (const auto& c : components_)
            for (const auto& n : c.nodes)
                if (!is_ground(n) && seen.insert(n).second) out.push_back(n);
        return out;
    }

    /// Structural checks: arity, parameter ranges, unique names, references,
    /// and connectivity of every node to ground.
    void validate() const {
        std::set<std::string> names;
        bool has_ground = false;
        for (const auto& c : components_) {
            if (c.name.empty()) throw NetlistError("component with empty name");
            if (!names.insert(c.name).second)
                throw NetlistError("duplicate component name '" + c.name + "'");
            if (c.nodes.size() != terminal_count(c.element))
                throw NetlistError("component '" + c.name + "' has wrong terminal count");
            for (const auto& n : c.nodes) {
                if (n.empty()) throw NetlistError("component '" + c.name + "' has empty node");
                has_ground = has_ground || is_ground(n);
            }
            std::visit([&](const auto& e) { check_params(c.name, e); }, c.element);
        }
        if (!components_.empty() && !has_ground) throw NetlistError("netlist has no ground node '0'");
        check_connectivity();
    }

    friend bool operator==(const Netlist&, const Netlist&) = default;

private:
    std::vector<Component> components_;

    static void require(bool ok, const std::string& comp, const char* what) {
        if (!ok) throw NetlistError("component '" + comp + "': " + what);
    }

    void check_params(const std::string& n, const Resistor& r) const {
        require(r.R > 0.0 && std::isfinite(r.R), n, "R must be finite and > 0");
    }
    void check_params(const std::string& n, const Inductor& l) const {
        require(l.L > 0.0, n, "L must be > 0");
        require(l.R_series >= 0.0, n, "R_series must be >= 0");
    }
    void check_params(const std::string& n, const Capacitor& c) const {
        require(c.C > 0.0, n, "C must be > 0");
    }
    void check_params(const std::string& n, const VarCapacitor& c) const {
        require(waveforms.contains(c.profile), n, "unknown capacitance profile");
    }
    void check_params(const std::string& n, const VoltageSource& v) const {
        require(waveforms.contains(v.waveform), n, "unknown source waveform");
        require(v.R_series >= 0.0, n, "R_series must be >= 0");
    }
    void check_params(const std::string& n, const Switch& s) const {
        require(s.R_on > 0.0, n, "R_on must be > 0");
        require(s.C_off >= 0.0, n, "C_off must be >= 0");
        require(s.R_leak > 0.0, n, "R_leak must be > 0");
        require(!s.gate.empty(), n, "switch needs a gate reference");
    }
    void check_params(const std::string& n, const Diode& d) const {
        require(d.V_f >= 0.0, n, "V_f must be >= 0");
        require(d.R_on > 0.0, n, "R_on must be > 0");
        require(d.C_j >= 0.0, n, "C_j must be >= 0");
        require(d.R_leak > 0.0, n, "R_leak must be > 0");
    }
    void check_params(const std::string& n, const CoupledInductor& k) const {
        require(k.L1 > 0.0 && k.L2 > 0.0, n, "winding inductances must be > 0");
        require(k.k >= 0.0 && k.k <= 1.0, n, "coupling must lie in [0, 1]");
        require(k.R1 >= 0.0 && k.R2 >= 0.0, n, "winding resistances must be >= 0");
        require(k.k < 1.0 || (k.R1 > 0.0 && k.R2 > 0.0), n,
                "unit coupling needs nonzero winding resistances");
    }

    void check_connectivity() const {
        const auto nodes = node_names();
        std::map<std::string, std::size_t> idx;
        idx["0"] = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) idx[nodes[i]] = i + 1;
        auto id = [&](const std::string& n) { return is_ground(n) ? 0 : idx.at(n); };
        std::vector<std::size_t> parent(nodes.size() + 1);
        std::iota(parent.begin(), parent.end(), std::size_t{0});
        auto root = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        auto join = [&](std::size_t a, std::size_t b) { parent[root(a)] = root(b); };
        for (const auto& c : components_) {
            join(id(c.nodes[0]), id(c.nodes[1]));
            if (c.nodes.size() == 4) join(id(c.nodes[2]), id(c.nodes[3]));
        }
        std::vector<std::string> floating;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (root(i + 1) != root(0)) floating.push_back(nodes[i]);
        if (!floating.empty()) {
            std::string list;
            for (const auto& f : floating) list += (list.empty() ? "" : ", ") + f;
            throw NetlistError("nodes not connected to ground: " + list);
        }
    }
};

}  // namespace scav::circuit

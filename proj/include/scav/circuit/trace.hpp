#pragma once

#include "scav/circuit/netlist.hpp"
#include "scav/error.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace scav::circuit {

/// Sampled result of a transient run. Every committed solver step is one
/// sample. Columns are stored per signal.
struct Trace {
    std::string netlist_name;
    double dt = 0.0;

    std::vector<std::string> nodes;          ///< non-ground nodes
    std::vector<std::string> components;     ///< netlist order
    std::vector<std::string> current_names;  ///< one per port ("K1", "K1.s")
    std::vector<std::string> devices;        ///< switches and diodes

    std::vector<double> t;
    std::vector<std::vector<double>> v;         ///< [node][sample]
    std::vector<std::vector<double>> i;         ///< [current column][sample]
    std::vector<std::vector<double>> absorbed;  ///< [component][sample], cumulative J
    std::vector<std::vector<double>> stored;    ///< [component][sample], J
    std::vector<std::vector<std::uint8_t>> state;  ///< [device][sample], 1 = conducting
    std::vector<double> shunt_absorbed;         ///< cumulative J in the gmin shunts

    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t samples() const noexcept { return t.size(); }

    [[nodiscard]] std::vector<double> voltage(const std::string& node) const {
        if (Netlist::is_ground(node)) return std::vector<double>(t.size(), 0.0);
        return v[index_of(nodes, node, "node")];
    }
    /// Voltage between two nodes, a minus b.
    [[nodiscard]] std::vector<double> voltage(const std::string& a, const std::string& b) const {
        auto va = voltage(a);
        const auto vb = voltage(b);
        for (std::size_t k = 0; k < va.size(); ++k) va[k] -= vb[k];
        return va;
    }
    [[nodiscard]] const std::vector<double>& current(const std::string& name) const {
        return i[index_of(current_names, name, "current")];
    }
    [[nodiscard]] const std::vector<double>& absorbed_energy(const std::string& comp) const {
        return absorbed[index_of(components, comp, "component")];
    }
    [[nodiscard]] const std::vector<double>& stored_energy(const std::string& comp) const {
        return stored[index_of(components, comp, "component")];
    }
    /// Cumulative energy turned into heat by a component: absorbed minus the
    /// growth of its own stored energy.
    [[nodiscard]] std::vector<double> dissipated_energy(const std::string& comp) const {
        const auto& w = absorbed_energy(comp);
        const auto& s = stored_energy(comp);
        std::vector<double> d(w.size());
        for (std::size_t k = 0; k < w.size(); ++k) d[k] = w[k] - (s[k] - s[0]);
        return d;
    }
    [[nodiscard]] const std::vector<std::uint8_t>& device_state(const std::string& dev) const {
        return state[index_of(devices, dev, "device")];
    }

private:
    static std::size_t index_of(const std::vector<std::string>& v, const std::string& name,
                                const char* what) {
        for (std::size_t k = 0; k < v.size(); ++k)
            if (v[k] == name) return k;
        throw NetlistError(std::string("trace has no ") + what + " '" + name + "'");
    }
};

}  // namespace scav::circuit

// Energy bookkeeping and periodicity checks on finished traces.
#pragma once

#include "scav/circuit/trace.hpp"
#include "scav/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scav::circuit {

/// How a component's energy is booked.
struct Role {
    enum class Kind { Source, Output, Loss, Storage };
    Kind kind = Kind::Storage;
    std::string mechanism;  ///< loss mechanism name for Kind::Loss

    static Role source() { return {Kind::Source, {}}; }
    static Role output() { return {Kind::Output, {}}; }
    static Role storage() { return {Kind::Storage, {}}; }
    static Role loss(std::string m) { return {Kind::Loss, std::move(m)}; }

    /// "source", "output", "storage" or "loss:<name>".
    static Role parse(const std::string& s) {
        if (s == "source") return source();
        if (s == "output") return output();
        if (s == "storage") return storage();
        if (s.rfind("loss:", 0) == 0 && s.size() > 5) return loss(s.substr(5));
        throw DomainError("unknown energy role '" + s + "'");
    }
    [[nodiscard]] std::string str() const {
        switch (kind) {
        case Kind::Source: return "source";
        case Kind::Output: return "output";
        case Kind::Storage: return "storage";
        case Kind::Loss: return "loss:" + mechanism;
        }
        return {};
    }
};

using RoleMap = std::map<std::string, Role>;

/// Energy totals over a trace.
///
/// Sources book the energy they deliver at their terminals, outputs the
/// energy they absorb (their initial charge is not counted), loss
/// components their dissipation, and storage components only the change of
/// their stored energy. Whatever the quadrature does not close shows up in
/// `residual`.
struct EnergyReport {
    std::map<std::string, double> E_in;
    std::map<std::string, double> E_out;
    std::map<std::string, double> E_loss;
    double dE_stored = 0.0;
    double total_in = 0.0;
    double total_out = 0.0;
    double total_loss = 0.0;
    std::optional<double> efficiency;
    double residual = 0.0;

    [[nodiscard]] double loss(const std::string& mechanism) const {
        auto it = E_loss.find(mechanism);
        return it == E_loss.end() ? 0.0 : it->second;
    }
    [[nodiscard]] double relative_residual() const {
        return total_in != 0.0 ? std::abs(residual) / std::abs(total_in) : std::abs(residual);
    }
};

/// Books energies between samples `from` and `to` (defaults: whole trace).
[[nodiscard]] inline EnergyReport energy_report(const Trace& trace, const RoleMap& roles,
                                                std::size_t from = 0,
                                                std::size_t to = static_cast<std::size_t>(-1)) {
    if (trace.samples() == 0) throw DomainError("energy_report: empty trace");
    to = std::min(to, trace.samples() - 1);
    if (from > to) throw DomainError("energy_report: empty sample range");

    std::vector<std::string> missing;
    for (const auto& c : trace.components)
        if (!roles.contains(c)) missing.push_back(c);
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw DomainError("energy_report: components without a role: " + list);
    }

    EnergyReport rep;
    bool has_output = false;
    for (std::size_t k = 0; k < trace.components.size(); ++k) {
        const auto& name = trace.components[k];
        const auto& role = roles.at(name);
        const double W = trace.absorbed[k][to] - trace.absorbed[k][from];
        const double dS = trace.stored[k][to] - trace.stored[k][from];
        switch (role.kind) {
        case Role::Kind::Source:
            rep.E_in[name] += -W;
            rep.total_in += -W;
            break;
        case Role::Kind::Output:
            rep.E_out[name] += W;
            rep.total_out += W;
            has_output = true;
            break;
        case Role::Kind::Loss:
            rep.E_loss[role.mechanism] += W - dS;
            rep.total_loss += W - dS;
            rep.dE_stored += dS;
            break;
        case Role::Kind::Storage:
            rep.dE_stored += dS;
            break;
        }
    }
    const double shunt = trace.shunt_absorbed[to] - trace.shunt_absorbed[from];
    if (shunt != 0.0) {
        rep.E_loss["shunt"] += shunt;
        rep.total_loss += shunt;
    }
    if (has_output && rep.total_in > 0.0) rep.efficiency = rep.total_out / rep.total_in;
    rep.residual = rep.total_in - rep.total_out - rep.total_loss - rep.dE_stored;
    return rep;
}

/// Cumulative booked energies at every sample, same rules as energy_report.
struct EnergySeries {
    std::vector<double> t;
    std::vector<double> E_in;
    std::vector<double> E_out;
    std::map<std::string, std::vector<double>> E_loss;
    std::vector<double> dE_stored;
};

[[nodiscard]] inline EnergySeries energy_series(const Trace& trace, const RoleMap& roles) {
    (void)energy_report(trace, roles);  // role coverage check
    EnergySeries s;
    s.t = trace.t;
    const std::size_t n = trace.samples();
    s.E_in.assign(n, 0.0);
    s.E_out.assign(n, 0.0);
    s.dE_stored.assign(n, 0.0);
    for (std::size_t c = 0; c < trace.components.size(); ++c) {
        const auto& role = roles.at(trace.components[c]);
        const auto& W = trace.absorbed[c];
        const auto& S = trace.stored[c];
        std::vector<double>* loss = nullptr;
        if (role.kind == Role::Kind::Loss) {
            auto& v = s.E_loss[role.mechanism];
            v.resize(n, 0.0);
            loss = &v;
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double w = W[k] - W[0];
            const double ds = S[k] - S[0];
            switch (role.kind) {
            case Role::Kind::Source: s.E_in[k] -= w; break;
            case Role::Kind::Output: s.E_out[k] += w; break;
            case Role::Kind::Loss:
                (*loss)[k] += w - ds;
                s.dE_stored[k] += ds;
                break;
            case Role::Kind::Storage: s.dE_stored[k] += ds; break;
            }
        }
    }
    bool any_shunt = false;
    for (double x : trace.shunt_absorbed) any_shunt = any_shunt || x != 0.0;
    if (any_shunt) {
        auto& v = s.E_loss["shunt"];
        v.resize(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) v[k] += trace.shunt_absorbed[k] - trace.shunt_absorbed[0];
    }
    return s;
}

/// Linear interpolation of a sampled signal at time t.
[[nodiscard]] inline double sample_at(const std::vector<double>& t, const std::vector<double>& y,
                                      double at) {
    if (at <= t.front()) return y.front();
    if (at >= t.back()) return y.back();
    auto it = std::lower_bound(t.begin(), t.end(), at);
    const auto k = static_cast<std::size_t>(it - t.begin());
    if (t[k] == at) return y[k];
    const double w = (at - t[k - 1]) / (t[k] - t[k - 1]);
    return y[k - 1] + w * (y[k] - y[k - 1]);
}

struct PeriodicityReport {
    double period = 0.0;
    std::vector<double> boundaries;       ///< period start times examined
    std::vector<double> window_deviation; ///< max |x(t_k+1) - x(t_k)| per consecutive pair
    double max_deviation = 0.0;
    std::string worst_signal;

    /// Largest deviation within consecutive groups of `n` windows.
    [[nodiscard]] std::vector<double> grouped(std::size_t n) const {
        std::vector<double> out;
        for (std::size_t k = 0; k + n <= window_deviation.size(); k += n)
            out.push_back(*std::max_element(window_deviation.begin() + static_cast<long>(k),
                                            window_deviation.begin() + static_cast<long>(k + n)));
        return out;
    }
};

/// Compares state at consecutive period boundaries t0, t0 + P, ... over the
/// trace. `signals` are current column names or node names; empty means every
/// current column plus every node voltage.
[[nodiscard]] inline PeriodicityReport steady_state_check(const Trace& trace, double period,
                                                          std::vector<std::string> signals = {},
                                                          double t0 = 0.0) {
    if (!(period > 0.0)) throw DomainError("steady_state_check: period must be > 0");
    if (trace.samples() < 2) throw DomainError("steady_state_check: trace too short");
    const double span = trace.t.back() - t0;
    const auto n_periods = static_cast<long long>(std::floor(span / period * (1.0 + 1e-12)));
    if (n_periods < 3)
        throw DomainError("steady_state_check: window shorter than three periods");

    std::vector<std::pair<std::string, std::vector<double>>> series;
    auto add = [&](const std::string& name) {
        for (const auto& c : trace.current_names)
            if (c == name) {
                series.emplace_back(name, trace.current(name));
                return;
            }
        series.emplace_back(name, trace.voltage(name));
    };
    if (signals.empty()) {
        for (const auto& c : trace.current_names) add(c);
        for (const auto& n : trace.nodes) add(n);
    } else {
        for (const auto& s : signals) add(s);
    }

    PeriodicityReport rep;
    rep.period = period;
    for (long long k = 0; k <= n_periods; ++k)
        rep.boundaries.push_back(t0 + static_cast<double>(k) * period);
    for (std::size_t k = 0; k + 1 < rep.boundaries.size(); ++k) {
        double worst = 0.0;
        for (const auto& [name, y] : series) {
            const double d = std::abs(sample_at(trace.t, y, rep.boundaries[k + 1]) -
                                      sample_at(trace.t, y, rep.boundaries[k]));
            if (d > worst) worst = d;
            if (d > rep.max_deviation) {
                rep.max_deviation = d;
                rep.worst_signal = name;
            }
        }
        rep.window_deviation.push_back(worst);
    }
    return rep;
}

}  // namespace scav::circuit

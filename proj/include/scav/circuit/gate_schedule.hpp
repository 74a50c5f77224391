#pragma once

#include "scav/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace scav::circuit {

/// Periodic pulse train gated by an enable window:
/// pulses start at phase + k * period and last on_time, clipped to
/// [t_start, t_end).
struct PeriodicGate {
    double period = 0.0;
    double on_time = 0.0;
    double phase = 0.0;
    double t_start = 0.0;
    double t_end = std::numeric_limits<double>::infinity();

    friend bool operator==(const PeriodicGate&, const PeriodicGate&) = default;
};

/// Drive for one gate: either explicit sorted (t_on, t_off) intervals or a
/// periodic definition.
struct GateDrive {
    std::vector<std::pair<double, double>> intervals;
    bool periodic = false;
    PeriodicGate pulse;

    static GateDrive always_off() { return {}; }
    static GateDrive always_on() {
        GateDrive g;
        g.intervals.emplace_back(-std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<double>::infinity());
        return g;
    }
    static GateDrive from_intervals(std::vector<std::pair<double, double>> iv) {
        GateDrive g;
        g.intervals = std::move(iv);
        g.validate();
        return g;
    }
    static GateDrive from_periodic(PeriodicGate p) {
        GateDrive g;
        g.periodic = true;
        g.pulse = p;
        g.validate();
        return g;
    }

    void validate() const {
        if (periodic) {
            if (!(pulse.period > 0.0)) throw DomainError("gate: period must be > 0");
            if (!(pulse.on_time >= 0.0 && pulse.on_time < pulse.period))
                throw DomainError("gate: on_time must satisfy 0 <= on_time < period");
            if (!(pulse.t_end >= pulse.t_start)) throw DomainError("gate: empty enable window");
            return;
        }
        for (std::size_t i = 0; i < intervals.size(); ++i) {
            if (!(intervals[i].second > intervals[i].first))
                throw DomainError("gate: interval with t_off <= t_on");
            if (i > 0 && !(intervals[i].first >= intervals[i - 1].second))
                throw DomainError("gate: intervals overlap or are unsorted");
        }
    }

    /// Concrete on-intervals intersecting [0, horizon].
    [[nodiscard]] std::vector<std::pair<double, double>> expand(double horizon) const {
        if (!periodic) return intervals;
        std::vector<std::pair<double, double>> out;
        const auto& p = pulse;
        if (p.on_time <= 0.0) return out;
        const double lo = std::max(p.t_start, 0.0);
        const double hi = std::min(p.t_end, horizon);
        if (hi <= lo) return out;
        auto k = static_cast<long long>(std::floor((lo - p.phase) / p.period));
        for (;; ++k) {
            const double a = p.phase + static_cast<double>(k) * p.period;
            if (a >= hi) break;
            const double s = std::max(a, lo);
            const double e = std::min(a + p.on_time, hi);
            if (e > s) out.emplace_back(s, e);
        }
        return out;
    }

    friend bool operator==(const GateDrive&, const GateDrive&) = default;
};

/// Named gate drives referenced by Switch components. Gates not listed are
/// held off.
class GateSchedule {
public:
    void set(const std::string& gate, GateDrive drive) {
        drive.validate();
        drives_[gate] = std::move(drive);
    }

    [[nodiscard]] bool has(const std::string& gate) const { return drives_.contains(gate); }
    [[nodiscard]] const GateDrive& at(const std::string& gate) const { return drives_.at(gate); }
    [[nodiscard]] const std::map<std::string, GateDrive>& drives() const noexcept { return drives_; }

    /// Smallest switching period among periodic gates (infinity if none).
    [[nodiscard]] double min_period() const {
        double p = std::numeric_limits<double>::infinity();
        for (const auto& [_, d] : drives_)
            if (d.periodic) p = std::min(p, d.pulse.period);
        return p;
    }

    friend bool operator==(const GateSchedule&, const GateSchedule&) = default;

private:
    std::map<std::string, GateDrive> drives_;
};

/// Expanded, cursor-free view of one gate used by the engine: state at t is
/// looked up against the same doubles that define transition times, so
/// landing exactly on a transition is unambiguous.
class GateTimeline {
public:
    GateTimeline() = default;
    GateTimeline(const GateDrive& drive, double horizon) : iv_(drive.expand(horizon)) {}

    [[nodiscard]] bool on(double t) const {
        auto it = std::upper_bound(iv_.begin(), iv_.end(), t,
                                   [](double x, const auto& p) { return x < p.first; });
        if (it == iv_.begin()) return false;
        --it;
        return t >= it->first && t < it->second;
    }

    /// First transition strictly after t, or infinity.
    [[nodiscard]] double next_transition(double t) const {
        auto it = std::upper_bound(iv_.begin(), iv_.end(), t,
                                   [](double x, const auto& p) { return x < p.first; });
        double best = std::numeric_limits<double>::infinity();
        if (it != iv_.end()) best = it->first;
        if (it != iv_.begin()) {
            const auto& prev = *(it - 1);
            if (prev.second > t) best = std::min(best, prev.second);
        }
        return best;
    }

    [[nodiscard]] const std::vector<std::pair<double, double>>& intervals() const noexcept {
        return iv_;
    }

private:
    std::vector<std::pair<double, double>> iv_;
};

}  // namespace scav::circuit

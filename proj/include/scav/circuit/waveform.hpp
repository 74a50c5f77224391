#pragma once

#include "scav/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace scav::circuit {

/// Scalar function of time used for source voltages and capacitance
/// profiles. Value type so netlists stay copyable and serializable.
class Waveform {
public:
    enum class Kind { Dc, Sine, Pwl };

    Waveform() = default;

    static Waveform dc(double value) {
        Waveform w;
        w.kind_ = Kind::Dc;
        w.offset_ = value;
        return w;
    }

    /// offset + amplitude * sin(2 pi freq t + phase)
    static Waveform sine(double amplitude, double freq, double phase = 0.0, double offset = 0.0) {
        if (!(freq >= 0.0)) throw DomainError("Waveform::sine: freq must be >= 0");
        Waveform w;
        w.kind_ = Kind::Sine;
        w.amplitude_ = amplitude;
        w.freq_ = freq;
        w.phase_ = phase;
        w.offset_ = offset;
        return w;
    }

    /// Piecewise-linear through (t, value) points; held constant outside.
    static Waveform pwl(std::vector<std::pair<double, double>> points) {
        if (points.empty()) throw DomainError("Waveform::pwl: no points");
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (!(points[i].first > points[i - 1].first))
                throw DomainError("Waveform::pwl: times must be strictly increasing");
        }
        Waveform w;
        w.kind_ = Kind::Pwl;
        w.points_ = std::move(points);
        return w;
    }

    [[nodiscard]] double operator()(double t) const {
        switch (kind_) {
        case Kind::Dc:
            return offset_;
        case Kind::Sine:
            return offset_ + amplitude_ * std::sin(2.0 * std::numbers::pi * freq_ * t + phase_);
        case Kind::Pwl: {
            if (t <= points_.front().first) return points_.front().second;
            if (t >= points_.back().first) return points_.back().second;
            auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                       [](double x, const auto& p) { return x < p.first; });
            const auto& [t1, v1] = *it;
            const auto& [t0, v0] = *(it - 1);
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        }
        }
        return 0.0;
    }

    /// Smallest value over [t0, t1], sampled at the breakpoints plus a fine
    /// grid for sines. Used to check capacitance positivity.
    [[nodiscard]] double min_over(double t0, double t1) const {
        switch (kind_) {
        case Kind::Dc:
            return offset_;
        case Kind::Sine: {
            if (freq_ * (t1 - t0) >= 1.0) return offset_ - std::abs(amplitude_);
            double lo = std::min((*this)(t0), (*this)(t1));
            constexpr int n = 256;
            for (int k = 1; k < n; ++k) lo = std::min(lo, (*this)(t0 + (t1 - t0) * k / n));
            return lo;
        }
        case Kind::Pwl: {
            double lo = std::min((*this)(t0), (*this)(t1));
            for (const auto& [t, v] : points_)
                if (t > t0 && t < t1) lo = std::min(lo, v);
            return lo;
        }
        }
        return 0.0;
    }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double amplitude() const noexcept { return amplitude_; }
    [[nodiscard]] double freq() const noexcept { return freq_; }
    [[nodiscard]] double phase() const noexcept { return phase_; }
    [[nodiscard]] double offset() const noexcept { return offset_; }
    [[nodiscard]] const std::vector<std::pair<double, double>>& points() const noexcept {
        return points_;
    }

    friend bool operator==(const Waveform&, const Waveform&) = default;

private:
    Kind kind_ = Kind::Dc;
    double amplitude_ = 0.0;
    double freq_ = 0.0;
    double phase_ = 0.0;
    double offset_ = 0.0;
    std::vector<std::pair<double, double>> points_;
};

}  // namespace scav::circuit

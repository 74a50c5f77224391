// Grid sweeps over one scalar parameter and monotone bisection.
#pragma once

#include "scav/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace scav::sweep {

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;  ///< strictly ascending, finite
    std::string objective;       ///< metric maximised by the argmax row

    void validate() const {
        if (parameter.empty()) throw DomainError("sweep: parameter name is empty");
        if (values.empty()) throw DomainError("sweep: values list is empty");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(values[i])) throw DomainError("sweep: non-finite value");
            if (i > 0 && !(values[i] > values[i - 1]))
                throw DomainError("sweep: values must be strictly ascending");
        }
    }
};

struct SweepRow {
    double value = 0.0;
    std::map<std::string, double> metrics;
    bool failed = false;
    std::string error;
};

/// Rows in parameter order plus `#` provenance lines for the CSV header.
class ResultTable {
public:
    std::string parameter;
    std::string objective;
    std::vector<std::pair<std::string, std::string>> provenance;
    std::vector<SweepRow> rows;

    /// Metric names in first-appearance order over successful rows.
    [[nodiscard]] std::vector<std::string> columns() const {
        std::vector<std::string> out;
        for (const auto& r : rows)
            for (const auto& [k, _] : r.metrics)
                if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
        return out;
    }

    /// Index of the row maximising the objective among successful rows; ties
    /// go to the smaller parameter value.
    [[nodiscard]] std::optional<std::size_t> argmax() const {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (r.failed) continue;
            auto it = r.metrics.find(objective);
            if (it == r.metrics.end() || !std::isfinite(it->second)) continue;
            if (!best || it->second > rows[*best].metrics.at(objective)) best = i;
        }
        return best;
    }

    [[nodiscard]] std::vector<double> column(const std::string& metric) const {
        std::vector<double> out;
        for (const auto& r : rows) {
            auto it = r.metrics.find(metric);
            out.push_back(r.failed || it == r.metrics.end() ? std::nan("") : it->second);
        }
        return out;
    }

    [[nodiscard]] std::size_t failures() const {
        return static_cast<std::size_t>(
            std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.failed; }));
    }

    void write_csv(std::ostream& os) const {
        for (const auto& [k, v] : provenance) os << "# " << k << ": " << v << '\n';
        if (auto a = argmax()) os << "# argmax: " << fmt(rows[*a].value) << '\n';
        const auto cols = columns();
        os << parameter;
        for (const auto& c : cols) os << ',' << c;
        os << ",status\n";
        for (const auto& r : rows) {
            os << fmt(r.value);
            for (const auto& c : cols) {
                os << ',';
                auto it = r.metrics.find(c);
                if (!r.failed && it != r.metrics.end()) os << fmt(it->second);
            }
            os << ',' << (r.failed ? "failed" : "ok") << '\n';
        }
    }

    static std::string fmt(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", x);
        return buf;
    }
};

using Evaluator = std::function<std::map<std::string, double>(double)>;

/// One evaluation per value. A throwing evaluation marks its row failed and
/// the sweep goes on. With threads > 1 rows run concurrently; the table is
/// assembled in value order, so the result does not depend on scheduling.
[[nodiscard]] inline ResultTable run_sweep(const SweepSpec& spec, const Evaluator& eval,
                                           unsigned threads = 1) {
    spec.validate();
    ResultTable table;
    table.parameter = spec.parameter;
    table.objective = spec.objective;
    table.rows.resize(spec.values.size());

    auto do_row = [&](std::size_t i) {
        auto& row = table.rows[i];
        row.value = spec.values[i];
        try {
            row.metrics = eval(row.value);
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
            row.metrics.clear();
        }
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(spec.values.size())));
    if (threads == 1) {
        for (std::size_t i = 0; i < spec.values.size(); ++i) do_row(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < spec.values.size(); i += threads) do_row(i);
            });
        for (auto& t : pool) t.join();
    }

    if (table.failures() == table.rows.size()) {
        throw DomainError("sweep: every row failed; first error: " + table.rows.front().error);
    }
    return table;
}

struct BisectResult {
    double x = 0.0;
    double fx = 0.0;
    int evaluations = 0;
};

/// Finds x in [lo, hi] with |f(x) - target| <= rel_tol * |target|, or stops
/// once the bracket has shrunk below width_tol of its initial width. f must
/// be monotone (either direction) and straddle the target at the ends.
[[nodiscard]] inline BisectResult bisect_scalar(const std::function<double(double)>& f,
                                                double target, double lo, double hi,
                                                double rel_tol = 0.02, double width_tol = 1e-4) {
    if (!(hi > lo)) throw DomainError("bisect: bracket must satisfy lo < hi");
    BisectResult r;
    const double tol = rel_tol * std::abs(target);
    double f_lo = f(lo);
    double f_hi = f(hi);
    r.evaluations = 2;
    if (std::abs(f_lo - target) <= tol) return {lo, f_lo, r.evaluations};
    if (std::abs(f_hi - target) <= tol) return {hi, f_hi, r.evaluations};
    if ((f_lo - target) * (f_hi - target) > 0.0) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "bisect: no straddle, f(%.6g) = %.6g, f(%.6g) = %.6g, target %.6g",
                      lo, f_lo, hi, f_hi, target);
        throw DomainError(buf);
    }
    const double width0 = hi - lo;
    const bool rising = f_hi > f_lo;
    double x = 0.5 * (lo + hi);
    double fx = 0.0;
    for (;;) {
        x = 0.5 * (lo + hi);
        fx = f(x);
        ++r.evaluations;
        if (std::abs(fx - target) <= tol || hi - lo < width_tol * width0) break;
        if ((fx < target) == rising)
            lo = x;
        else
            hi = x;
    }
    r.x = x;
    r.fx = fx;
    return r;
}

}  // namespace scav::sweep

// simulate, sweep and report commands. Each returns a process exit status:
// 0 success, 1 runtime failure, 2 usage or configuration error.
#pragma once

#include "scav/app/run_config.hpp"
#include "scav/io/csv.hpp"
#include "scav/io/svg.hpp"
#include "scav/sweep.hpp"
#include "scav/version.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace scav::app {

struct CliOptions {
    std::optional<std::string> out;
    std::optional<double> dt;
    bool quiet = false;
};

inline constexpr const char* kOutRootEnv = "SCAV_OUT_ROOT";
inline constexpr const char* kGateDriveNote =
    "gate-drive energy is not modelled; E_in counts only the scenario's sources";

/// One named scalar for report.csv.
struct Quantity {
    std::string name;
    double value = 0.0;
    std::string unit;
};

/// Everything a single simulation produces.
struct Outcome {
    circuit::Trace trace;
    circuit::RoleMap roles;
    circuit::EnergyReport report;
    std::vector<Quantity> quantities;
    std::vector<std::string> probes;  ///< "i(X)" or "v(node)" columns for energy.csv
    std::string netlist_text;
};

namespace detail {

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

inline void add_dcm(Outcome& o, const em::EmScenario& s, const em::HalfCycleResult& r) {
    if (s.polarity == em::Polarity::Both) return;
    const auto d = em::dcm_verify(r, s);
    if (d.period_peak.empty()) return;
    double peak = 0.0;
    for (double p : d.period_peak) peak = std::max(peak, p);
    o.quantities.push_back({"dcm_fraction", d.fraction, ""});
    o.quantities.push_back({"peak_current", peak, "A"});
    if (!s.fixed_emf && d.period_peak.size() >= 3)
        o.quantities.push_back(
            {"envelope_correlation", em::envelope_correlation(d, s.mech.f, s.boost.period()), ""});
}

}  // namespace detail

/// Runs the configured scenario once.
[[nodiscard]] inline Outcome run_simulation(const RunConfig& rc) {
    Outcome o;
    switch (rc.kind) {
    case Kind::EmBoost: {
        const auto& s = rc.em;
        const auto bc = em::build_dual_boost(s);
        auto r = em::run_scenario(s);
        o.roles = bc.roles;
        o.netlist_text = circuit::to_text(bc.netlist, bc.schedule);
        o.quantities = {{"emf_amplitude", s.fixed_emf ? *s.fixed_emf : s.emf_amplitude(), "V"},
                        {"t_stop", r.t_stop, "s"},
                        {"dt", s.dt, "s"},
                        {"P_in", r.P_in, "W"},
                        {"P_out", r.P_out, "W"},
                        {"D_eff", em::effective_damping(s, r), "N s/m"},
                        {"rail_ripple", r.rail_ripple, ""}};
        detail::add_dcm(o, s, r);
        if (s.polarity != em::Polarity::Negative) o.probes.push_back("i(" + std::string(em::kPosInductor) + ")");
        if (s.polarity != em::Polarity::Positive) o.probes.push_back("i(" + std::string(em::kNegInductor) + ")");
        o.report = r.report;
        o.trace = std::move(r.trace);
        break;
    }
    case Kind::EsBuck:
    case Kind::EsFlyback: {
        const auto c = es::build_converter(rc.topology(), rc.gen, rc.cells, rc.V_load, rc.conv);
        auto r = es::run_discharge(c, rc.gen);
        const auto& b = r.breakdown;
        o.roles = c.roles;
        o.netlist_text = circuit::to_text(c.netlist, c.schedule);
        o.quantities = {{"n_cells", static_cast<double>(rc.cells.n_cells), ""},
                        {"V0", c.V0, "V"},
                        {"C_dev", c.C_dev, "F"},
                        {"E_closed", b.E_closed, "J"},
                        {"E_open", b.E_open, "J"},
                        {"W_field", b.W_field, "J"},
                        {"n_gen", b.n_gen, ""},
                        {"n_conv", b.n_conv, ""},
                        {"effectiveness", b.effectiveness, ""},
                        {"t_off", r.t_off, "s"},
                        {"dt", rc.conv.dt, "s"}};
        o.probes.push_back("v(" + std::string(es::kGenNode) + ")");
        for (const auto& n : c.inductive) o.probes.push_back("i(" + n + ")");
        o.report = r.report;
        o.trace = std::move(r.trace);
        break;
    }
    case Kind::Netlist: {
        circuit::SimOptions opt;
        opt.dt = rc.dt;
        opt.t_stop = rc.t_stop;
        o.trace = circuit::simulate(rc.netlist.netlist, rc.netlist.schedule, opt);
        o.roles = rc.roles;
        o.report = circuit::energy_report(o.trace, o.roles);
        o.netlist_text = circuit::to_text(rc.netlist.netlist, rc.netlist.schedule);
        o.quantities = {{"t_stop", rc.t_stop, "s"}, {"dt", rc.dt, "s"}};
        for (const auto& n : o.trace.nodes) o.probes.push_back("v(" + n + ")");
        break;
    }
    }
    return o;
}

/// Provenance lines shared by every CSV the commands write.
[[nodiscard]] inline std::vector<std::pair<std::string, std::string>> provenance(const RunConfig& rc) {
    std::vector<std::pair<std::string, std::string>> p = {
        {"scav", kVersion},
        {"kind", to_string(rc.kind)},
        {"config", std::filesystem::path(rc.path).filename().string()},
        {"config_hash", rc.hash}};
    if (!rc.devices_version.empty()) p.emplace_back("devices_version", rc.devices_version);
    return p;
}

inline void write_report_csv(std::ostream& os, const RunConfig& rc, const Outcome& o) {
    for (const auto& [k, v] : provenance(rc)) os << "# " << k << ": " << v << '\n';
    os << "# note: " << kGateDriveNote << '\n';
    for (const auto& w : o.trace.warnings) os << "# warning: " << w << '\n';
    const auto& r = o.report;
    os << "quantity,value,unit\n";
    os << "E_in," << detail::fmt(r.total_in) << ",J\n";
    os << "E_out," << detail::fmt(r.total_out) << ",J\n";
    os << "efficiency," << (r.efficiency ? detail::fmt(*r.efficiency) : "") << ",\n";
    for (const auto& [m, e] : r.E_loss) os << "loss:" << m << ',' << detail::fmt(e) << ",J\n";
    os << "dE_stored," << detail::fmt(r.dE_stored) << ",J\n";
    os << "residual," << detail::fmt(r.residual) << ",J\n";
    os << "relative_residual," << detail::fmt(r.relative_residual()) << ",\n";
    for (const auto& q : o.quantities) os << q.name << ',' << detail::fmt(q.value) << ',' << q.unit << '\n';
}

inline void write_energy_csv(std::ostream& os, const RunConfig& rc, const Outcome& o,
                             std::size_t stride) {
    for (const auto& [k, v] : provenance(rc)) os << "# " << k << ": " << v << '\n';
    const auto es = circuit::energy_series(o.trace, o.roles);
    std::vector<const std::vector<double>*> cols = {&es.E_in, &es.E_out};
    os << "t,E_in,E_out";
    for (const auto& [m, v] : es.E_loss) {
        os << ",loss:" << m;
        cols.push_back(&v);
    }
    os << ",dE_stored";
    cols.push_back(&es.dE_stored);
    std::vector<std::vector<double>> probe_data;
    for (const auto& p : o.probes) {
        const std::string inner = p.substr(2, p.size() - 3);
        probe_data.push_back(p[0] == 'i' ? o.trace.current(inner) : o.trace.voltage(inner));
        os << ',' << p;
    }
    for (const auto& v : probe_data) cols.push_back(&v);
    os << '\n';
    char buf[32];
    const std::size_t n = o.trace.samples();
    for (std::size_t k = 0; k < n; ++k) {
        if (k % stride != 0 && k + 1 != n) continue;
        std::snprintf(buf, sizeof buf, "%.12g", es.t[k]);
        os << buf;
        for (const auto* c : cols) {
            std::snprintf(buf, sizeof buf, ",%.9g", (*c)[k]);
            os << buf;
        }
        os << '\n';
    }
}

// ---------------------------------------------------------------- plotting

namespace detail {

/// Display prefix so axis numbers stay readable.
inline std::pair<double, std::string> scale_for(double maxabs) {
    if (!(maxabs > 0.0) || !std::isfinite(maxabs)) return {1.0, ""};
    if (maxabs >= 1e3) return {1e-3, "k"};
    if (maxabs >= 1.0) return {1.0, ""};
    if (maxabs >= 1e-3) return {1e3, "m"};
    if (maxabs >= 1e-6) return {1e6, "u"};
    if (maxabs >= 1e-9) return {1e9, "n"};
    return {1e12, "p"};
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v)
        if (std::isfinite(x)) m = std::max(m, std::abs(x));
    return m;
}

inline std::vector<double> scaled(const std::vector<double>& v, double f) {
    std::vector<double> out(v);
    for (double& x : out) x *= f;
    return out;
}

inline bool file_exists(const std::filesystem::path& p) {
    std::error_code ec;
    return std::filesystem::is_regular_file(p, ec);
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DomainError("cannot write '" + p.string() + "'");
    out << text;
    if (!out) throw DomainError("write failed for '" + p.string() + "'");
}

}  // namespace detail

/// Cumulative energies over time plus the probe signals, from energy.csv.
[[nodiscard]] inline std::vector<io::Panel> energy_panels(const io::CsvTable& t) {
    if (!t.has("t") || !t.has("E_in") || !t.has("E_out"))
        throw DomainError("energy.csv lacks the t, E_in or E_out column");
    const auto& time = t.col("t");
    const auto [tf, tp] = detail::scale_for(detail::max_abs(time));
    const auto xs = detail::scaled(time, tf);
    const std::string xlabel = "time (" + tp + "s)";

    std::vector<std::string> energy_cols = {"E_in", "E_out"};
    for (const auto& h : t.header)
        if (h.rfind("loss:", 0) == 0) energy_cols.push_back(h);
    double emax = 0.0;
    for (const auto& c : energy_cols) emax = std::max(emax, detail::max_abs(t.col(c)));
    const auto [ef, ep] = detail::scale_for(emax);
    io::Panel energy{"Cumulative energy", xlabel, "energy (" + ep + "J)", {}};
    for (const auto& c : energy_cols) {
        std::string name = c == "E_in" ? "input" : c == "E_out" ? "output" : c.substr(5) + " loss";
        energy.series.push_back(io::decimate({name, xs, detail::scaled(t.col(c), ef)}, 2000));
    }
    std::vector<io::Panel> panels = {energy};

    for (const char kind : {'i', 'v'}) {
        std::vector<std::string> cols;
        for (const auto& h : t.header)
            if (h.size() > 3 && h[0] == kind && h[1] == '(') cols.push_back(h);
        if (cols.empty()) continue;
        double m = 0.0;
        for (const auto& c : cols) m = std::max(m, detail::max_abs(t.col(c)));
        const auto [f, p] = detail::scale_for(m);
        const std::string unit = kind == 'i' ? "A" : "V";
        io::Panel pn{kind == 'i' ? "Inductor current" : "Node voltage", xlabel,
                     (kind == 'i' ? "current (" : "voltage (") + p + unit + ")", {}};
        for (const auto& c : cols)
            pn.series.push_back(io::minmax_decimate({c, xs, detail::scaled(t.col(c), f)}, 1500));
        panels.push_back(std::move(pn));
    }
    return panels;
}

/// Objective (and the three efficiencies for electrostatic sweeps) against
/// the swept parameter, from table.csv.
[[nodiscard]] inline std::vector<io::Panel> sweep_panels(const io::CsvTable& t) {
    if (t.header.size() < 2) throw DomainError("table.csv has no metric columns");
    const std::string param = t.header.front();
    const auto& x = t.col(param);
    const std::string kind = t.meta.count("kind") ? t.meta.at("kind") : "";
    const std::string objective = t.meta.count("objective") ? t.meta.at("objective") : "";
    std::vector<io::Panel> panels;
    if (kind.rfind("es-", 0) == 0 && t.has("n_gen") && t.has("n_conv") && t.has("effectiveness")) {
        io::Panel p{"Efficiencies (" + kind + ")", param, "efficiency", {}};
        for (const char* c : {"n_gen", "n_conv", "effectiveness"})
            p.series.push_back({c, x, t.col(c), true});
        panels.push_back(std::move(p));
    } else if (!objective.empty() && t.has(objective)) {
        panels.push_back({objective + " vs " + param, param, objective, {{objective, x, t.col(objective), true}}});
    }
    if (t.has("emf_amplitude"))
        panels.push_back({"EMF amplitude vs " + param, param, "EMF (V)",
                          {{"emf_amplitude", x, t.col("emf_amplitude"), true}}});
    if (panels.empty()) {
        const std::string& c = t.header[1];
        panels.push_back({c + " vs " + param, param, c, {{c, x, t.col(c), true}}});
    }
    return panels;
}

/// Human-readable digest of report.csv.
[[nodiscard]] inline std::string report_summary(const io::CsvTable& t) {
    if (!t.has("quantity") || !t.has("value"))
        throw DomainError("report.csv lacks the quantity or value column");
    std::ostringstream os;
    for (const char* k : {"kind", "config", "config_hash"})
        if (t.meta.count(k)) os << k << ": " << t.meta.at(k) << '\n';
    const auto& q = t.col_text("quantity");
    const auto& v = t.col_text("value");
    const auto* u = t.has("unit") ? &t.col_text("unit") : nullptr;
    for (std::size_t k = 0; k < q.size(); ++k) {
        os << q[k] << " = " << (v[k].empty() ? "(undefined)" : v[k]);
        if (u && !(*u)[k].empty() && !v[k].empty()) os << ' ' << (*u)[k];
        os << '\n';
    }
    os << "note: " << kGateDriveNote << '\n';
    return os.str();
}

[[nodiscard]] inline std::string sweep_summary(const io::CsvTable& t) {
    std::ostringstream os;
    for (const char* k : {"kind", "config", "config_hash", "objective", "argmax"})
        if (t.meta.count(k)) os << k << ": " << t.meta.at(k) << '\n';
    std::size_t failed = 0;
    if (t.has("status"))
        for (const auto& s : t.col_text("status")) failed += s == "failed";
    os << "rows: " << t.rows() << ", failed: " << failed << '\n';
    return os.str();
}

/// Regenerates summary.txt and the plots of a run directory from its CSVs.
/// Returns the summary text. Throws when there is nothing to report on.
inline std::string render_run_dir(const std::filesystem::path& dir, bool svg = true) {
    const auto report = dir / "report.csv", energy = dir / "energy.csv", table = dir / "table.csv";
    const bool have_report = detail::file_exists(report), have_table = detail::file_exists(table);
    if (!have_report && !have_table)
        throw DomainError("no report.csv or table.csv in '" + dir.string() + "'");
    std::string summary;
    if (have_report) {
        summary += report_summary(io::read_csv(report.string()));
        if (svg && detail::file_exists(energy))
            io::write_svg((dir / "energy.svg").string(), energy_panels(io::read_csv(energy.string())));
    }
    if (have_table) {
        const auto t = io::read_csv(table.string());
        summary += sweep_summary(t);
        if (svg) io::write_svg((dir / "sweep.svg").string(), sweep_panels(t));
    }
    detail::write_text(dir / "summary.txt", summary);
    return summary;
}

// ---------------------------------------------------------------- sweeps

/// Metrics of one sweep row with `param` set to `value`.
[[nodiscard]] inline std::map<std::string, double> sweep_point(const RunConfig& base,
                                                               const std::string& param,
                                                               double value) {
    RunConfig rc = base;
    std::map<std::string, double> m;
    auto book = [&](const circuit::EnergyReport& r) {
        m["E_in"] = r.total_in;
        m["E_out"] = r.total_out;
        if (r.efficiency) m["efficiency"] = *r.efficiency;
        m["residual"] = r.residual;
        m["relative_residual"] = r.relative_residual();
        for (const auto& [k, e] : r.E_loss) m["loss_" + k] = e;
    };
    if (param == "dt") rc.set_step(value);
    switch (rc.kind) {
    case Kind::EmBoost: {
        auto& s = rc.em;
        if (param == "turns") {
            const double ratio = value / static_cast<double>(base.em.coil.N);
            s.coil.N = static_cast<int>(value);
            s.coil.L_g = base.em.coil.L_g * ratio * ratio;
            s.coil.R_g = base.em.coil.R_g * ratio;
        } else if (param == "t_on") s.boost.t_on = value;
        else if (param == "f_sw") s.boost.f_sw = value;
        else if (param == "L_boost") s.boost.L_boost = value;
        else if (param == "sw_R_on") s.boost.sw.R_on = value;
        else if (param == "emf_scale") s.emf_scale = value;
        else if (param == "C_res") s.boost.C_res = value;
        s.validate();
        const auto r = em::run_scenario(s);
        book(r.report);
        m["emf_amplitude"] = s.fixed_emf ? *s.fixed_emf : s.emf_amplitude();
        m["P_in"] = r.P_in;
        m["P_out"] = r.P_out;
        m["D_eff"] = em::effective_damping(s, r);
        if (s.polarity != em::Polarity::Both) {
            const auto d = em::dcm_verify(r, s);
            m["dcm_fraction"] = d.fraction;
            double peak = 0.0;
            for (double p : d.period_peak) peak = std::max(peak, p);
            m["peak_current"] = peak;
        }
        break;
    }
    case Kind::EsBuck:
    case Kind::EsFlyback: {
        if (param == "n_cells") rc.cells.n_cells = static_cast<int>(value);
        else if (param == "C_par") rc.gen.C_par = value;
        else if (param == "V_load") rc.V_load = value;
        else if (param == "V_prime") rc.gen.V_prime = value;
        else if (param == "L") rc.conv.L = value;
        const auto c = es::build_converter(rc.topology(), rc.gen, rc.cells, rc.V_load, rc.conv);
        const auto r = es::run_discharge(c, rc.gen);
        const auto& b = r.breakdown;
        m = {{"n_gen", b.n_gen}, {"n_conv", b.n_conv}, {"effectiveness", b.effectiveness},
             {"E_open", b.E_open}, {"E_out", b.E_out},
             {"relative_residual", r.report.relative_residual()}};
        break;
    }
    case Kind::Netlist: {
        circuit::SimOptions opt;
        opt.dt = rc.dt;
        opt.t_stop = rc.t_stop;
        book(circuit::energy_report(circuit::simulate(rc.netlist.netlist, rc.netlist.schedule, opt),
                                    rc.roles));
        break;
    }
    }
    return m;
}

[[nodiscard]] inline sweep::ResultTable run_config_sweep(const RunConfig& rc) {
    if (!rc.sweep) throw DomainError("config has no [sweep] section");
    const auto& sb = *rc.sweep;
    auto table = sweep::run_sweep({sb.parameter, sb.values, sb.objective},
                                  [&](double v) { return sweep_point(rc, sb.parameter, v); },
                                  sb.threads);
    table.provenance = provenance(rc);
    table.provenance.emplace_back("objective", sb.objective);
    return table;
}

// ---------------------------------------------------------------- commands

/// Output directory: --out, then [run] out, then $SCAV_OUT_ROOT/<config
/// stem>, then scav-out/<config stem>.
[[nodiscard]] inline std::filesystem::path output_dir(const RunConfig& rc, const CliOptions& o) {
    if (o.out) return *o.out;
    if (rc.out) return *rc.out;
    const char* root = std::getenv(kOutRootEnv);
    const std::filesystem::path base = root && *root ? root : "scav-out";
    return base / std::filesystem::path(rc.path).stem();
}

namespace detail {

/// Loads the config and applies command-line overrides; 0 on success,
/// otherwise the exit status after printing the problem.
inline int load_for_command(const std::string& path, const CliOptions& o, RunConfig& rc,
                            std::ostream& err) {
    try {
        rc = load_config(path);
        if (o.dt) rc.set_step(*o.dt);
    } catch (const ParseError& e) {
        err << "scav: " << path << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "scav: " << path << ": " << e.what() << '\n';
        return 2;
    }
    return 0;
}

inline void print_runtime_error(std::ostream& err, const std::exception& e) {
    err << "scav: error: " << e.what();
    if (const auto* se = dynamic_cast<const SolverError*>(&e); se && !se->where().empty())
        err << " (at " << se->where() << ')';
    err << '\n';
}

}  // namespace detail

[[nodiscard]] inline std::string summary_line(Kind k, const circuit::EnergyReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: E_in=%.6g J E_out=%.6g J efficiency=", to_string(k),
                  r.total_in, r.total_out);
    std::string s = buf;
    if (r.efficiency) {
        std::snprintf(buf, sizeof buf, "%.4f", *r.efficiency);
        s += buf;
    }
    return s;
}

inline int cmd_simulate(const std::string& path, const CliOptions& o = {},
                        std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    RunConfig rc;
    if (int code = detail::load_for_command(path, o, rc, err)) return code;
    try {
        const auto dir = output_dir(rc, o);
        const auto res = run_simulation(rc);
        std::filesystem::create_directories(dir);
        const std::size_t stride = rc.emit.trace_stride;
        if (rc.emit.trace) {
            std::ostringstream ts;
            circuit::write_trace_csv(ts, res.trace, stride);
            detail::write_text(dir / "trace.csv", ts.str());
            detail::write_text(dir / "circuit.net", res.netlist_text);
        }
        if (rc.emit.report) {
            std::ostringstream rs, es;
            write_report_csv(rs, rc, res);
            write_energy_csv(es, rc, res, stride);
            detail::write_text(dir / "report.csv", rs.str());
            detail::write_text(dir / "energy.csv", es.str());
            (void)render_run_dir(dir, rc.emit.svg);
        }
        for (const auto& w : res.trace.warnings) err << "scav: warning: " << w << '\n';
        if (!o.quiet) out << summary_line(rc.kind, res.report) << '\n';
    } catch (const std::exception& e) {
        detail::print_runtime_error(err, e);
        return 1;
    }
    return 0;
}

inline int cmd_sweep(const std::string& path, const CliOptions& o = {}, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr) {
    RunConfig rc;
    if (int code = detail::load_for_command(path, o, rc, err)) return code;
    if (!rc.sweep) {
        err << "scav: " << path << ": config has no [sweep] section\n";
        return 2;
    }
    try {
        const auto dir = output_dir(rc, o);
        const auto table = run_config_sweep(rc);
        std::filesystem::create_directories(dir);
        std::ostringstream ts;
        table.write_csv(ts);
        detail::write_text(dir / "table.csv", ts.str());
        (void)render_run_dir(dir, rc.emit.svg);
        for (const auto& r : table.rows)
            if (r.failed)
                err << "scav: warning: " << table.parameter << '=' << detail::fmt(r.value)
                    << " failed: " << r.error << '\n';
        if (!o.quiet) {
            out << to_string(rc.kind) << " sweep over " << table.parameter << ": " << table.rows.size()
                << " rows, " << table.failures() << " failed";
            if (auto a = table.argmax())
                out << ", argmax " << table.objective << " at " << detail::fmt(table.rows[*a].value);
            out << '\n';
        }
    } catch (const std::exception& e) {
        detail::print_runtime_error(err, e);
        return 1;
    }
    return 0;
}

inline int cmd_report(const std::string& dir, const CliOptions& o = {}, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    try {
        const auto summary = render_run_dir(dir, true);
        if (!o.quiet) out << summary;
    } catch (const std::exception& e) {
        err << "scav: report: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace scav::app

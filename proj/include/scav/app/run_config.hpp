// Scenario configuration for the command-line front end.
//
// A config names one scenario kind in [run] and sets parameters in sections
// named after the modules. Device parameters come from a separate versioned
// file referenced by [run] devices; keys in the scenario file override it.
#pragma once

#include "scav/circuit/energy.hpp"
#include "scav/circuit/netlist_io.hpp"
#include "scav/config.hpp"
#include "scav/em_boost.hpp"
#include "scav/error.hpp"
#include "scav/es_converters.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace scav::app {

enum class Kind { EmBoost, EsBuck, EsFlyback, Netlist };

[[nodiscard]] inline const char* to_string(Kind k) {
    switch (k) {
    case Kind::EmBoost: return "em-boost";
    case Kind::EsBuck: return "es-buck";
    case Kind::EsFlyback: return "es-flyback";
    case Kind::Netlist: return "netlist";
    }
    return "?";
}

struct EmitFlags {
    bool trace = true;
    bool report = true;
    bool svg = true;
    std::size_t trace_stride = 1;  ///< also applies to energy.csv
};

struct SweepBlock {
    std::string parameter;
    std::vector<double> values;
    std::string objective;
    unsigned threads = 1;
};

struct RunConfig {
    Kind kind = Kind::Netlist;
    std::string path;         ///< config file as given
    std::string hash;         ///< over the config and every file it pulls in
    std::string devices_version;
    std::optional<std::string> out;
    EmitFlags emit;
    std::optional<SweepBlock> sweep;

    em::EmScenario em;

    es::EsGeneratorSpec gen;
    es::CellDeviceModel cells;
    es::ConverterParams conv;
    double V_load = 10.0;

    circuit::NetlistFile netlist;
    circuit::RoleMap roles;
    double dt = 0.0;      ///< netlist kind only
    double t_stop = 0.0;  ///< netlist kind only

    [[nodiscard]] bool is_es() const { return kind == Kind::EsBuck || kind == Kind::EsFlyback; }
    [[nodiscard]] es::Topology topology() const {
        return kind == Kind::EsFlyback ? es::Topology::Flyback : es::Topology::Buck;
    }
    /// Time step of whichever scenario is selected.
    [[nodiscard]] double step() const {
        if (kind == Kind::EmBoost) return em.dt;
        if (is_es()) return conv.dt;
        return dt;
    }
    void set_step(double h) {
        if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("dt must be a positive number");
        if (kind == Kind::EmBoost) em.dt = h;
        else if (is_es()) conv.dt = h;
        else dt = h;
    }
};

/// Sweepable parameters per kind.
[[nodiscard]] inline std::vector<std::string> sweep_parameters(Kind k) {
    switch (k) {
    case Kind::EmBoost:
        return {"turns", "t_on", "f_sw", "L_boost", "sw_R_on", "emf_scale", "C_res", "dt"};
    case Kind::EsBuck:
    case Kind::EsFlyback:
        return {"n_cells", "C_par", "V_load", "V_prime", "L", "dt"};
    case Kind::Netlist: return {"dt"};
    }
    return {};
}

/// Metrics a sweep row reports; loss_<mechanism> columns come on top.
[[nodiscard]] inline std::vector<std::string> sweep_metrics(Kind k) {
    switch (k) {
    case Kind::EmBoost:
        return {"emf_amplitude", "E_in", "E_out", "efficiency", "P_in", "P_out", "D_eff",
                "dcm_fraction", "peak_current", "residual", "relative_residual"};
    case Kind::EsBuck:
    case Kind::EsFlyback: return {"n_gen", "n_conv", "effectiveness", "E_open", "E_out"};
    case Kind::Netlist:
        return {"E_in", "E_out", "efficiency", "residual", "relative_residual"};
    }
    return {};
}

namespace detail {

inline std::string slurp(const std::filesystem::path& p, const std::string& what) {
    std::ifstream in(p);
    if (!in) throw ParseError("cannot open " + what + " '" + p.string() + "'", 0, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ParseError at(const config::Reader& r, const std::string& key, const std::string& msg) {
    const auto [line, col] = r.where(key);
    return ParseError(msg, line, col);
}

inline void read_em_devices(const config::IniFile& f, em::SwitchModel& sw, em::DiodeModel& d,
                            const std::string& sw_sec, const std::string& d_sec,
                            const std::string& prefix_sw, const std::string& prefix_d) {
    config::Reader s(f, sw_sec);
    s.num_into(prefix_sw + "R_on", sw.R_on);
    s.num_into(prefix_sw + "C_off", sw.C_off);
    config::Reader dr(f, d_sec);
    dr.num_into(prefix_d + "V_f", d.V_f);
    dr.num_into(prefix_d + "R_on", d.R_on);
    dr.num_into(prefix_d + "C_j", d.C_j);
}

inline void read_cells(const config::Reader& c, es::CellDeviceModel& m) {
    if (auto n = c.integer("n_cells")) {
        if (*n < 1) throw at(c, "n_cells", "n_cells must be >= 1");
        m.n_cells = static_cast<int>(*n);
    }
    c.num_into("cell_area", m.cell_area);
    c.num_into("R_on_cell", m.R_on_cell);
    c.num_into("C_off_cell", m.C_off_cell);
    c.num_into("V_f", m.V_f);
    c.num_into("R_on_cell_diode", m.R_on_cell_diode);
    c.num_into("C_j_cell", m.C_j_cell);
    c.num_into("V_block", m.V_block);
}

/// Runs a validate() call and reports its message at the section header.
template <class F>
void checked(const config::IniFile& f, const std::string& section, F&& fn) {
    try {
        fn();
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        const auto* s = f.section(section);
        throw ParseError(e.what(), s ? s->line : 0, 1);
    }
}

}  // namespace detail

/// Parses config text. `path` locates files named inside it. Every problem,
/// including out-of-range values, is reported as a ParseError.
[[nodiscard]] inline RunConfig parse_config(const std::string& text, const std::string& path) {
    namespace fs = std::filesystem;
    using config::Reader;
    std::istringstream in(text);
    const auto f = config::IniFile::parse(in, path);
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& name) {
        const fs::path p(name);
        return p.is_absolute() ? p : base / p;
    };

    RunConfig rc;
    rc.path = path;
    std::string hashed = text;

    Reader run(f, "run");
    if (!run.present()) throw ParseError("missing [run] section", 1, 1);
    const auto kind = run.str("kind");
    if (!kind) throw detail::at(run, "kind", "[run] needs kind = em-boost | es-buck | es-flyback | netlist");
    if (*kind == "em-boost") rc.kind = Kind::EmBoost;
    else if (*kind == "es-buck") rc.kind = Kind::EsBuck;
    else if (*kind == "es-flyback") rc.kind = Kind::EsFlyback;
    else if (*kind == "netlist") rc.kind = Kind::Netlist;
    else throw detail::at(run, "kind", "unknown scenario kind '" + *kind + "'");
    rc.out = run.str("out");

    // Device library first so the scenario file can override single values.
    if (auto dev = run.str("devices")) {
        const auto p = resolve(*dev);
        std::string dtext;
        try {
            dtext = detail::slurp(p, "device file");
        } catch (const ParseError& e) {
            throw detail::at(run, "devices", e.message());
        }
        hashed += dtext;
        std::istringstream din(dtext);
        config::IniFile df;
        try {
            df = config::IniFile::parse(din, p.string());
            Reader hdr(df, "devices");
            const auto ver = hdr.integer("version");
            if (!ver) throw ParseError("device file needs [devices] version", 1, 1);
            if (*ver != 1)
                throw detail::at(hdr, "version", "unsupported device file version " + std::to_string(*ver));
            rc.devices_version = std::to_string(*ver);
            detail::read_em_devices(df, rc.em.boost.sw, rc.em.boost.diode, "em_switch", "em_diode", "", "");
            Reader cells(df, "es_cell");
            detail::read_cells(cells, rc.cells);
            df.check_all_used({"devices", "em_switch", "em_diode", "es_cell"});
        } catch (const ParseError& e) {
            throw ParseError(p.filename().string() + ": " + e.message(), e.line(), e.column());
        }
    }

    if (auto dt = run.num("dt")) {
        if (!(*dt > 0.0)) throw detail::at(run, "dt", "dt must be > 0");
        rc.em.dt = *dt;
        rc.conv.dt = *dt;
        rc.dt = *dt;
    }
    const auto t_stop = run.num("t_stop");
    if (t_stop && !(*t_stop > 0.0)) throw detail::at(run, "t_stop", "t_stop must be > 0");

    Reader emit(f, "emit");
    if (auto b = emit.boolean("trace")) rc.emit.trace = *b;
    if (auto b = emit.boolean("report")) rc.emit.report = *b;
    if (auto b = emit.boolean("svg")) rc.emit.svg = *b;
    if (auto s = emit.integer("trace_stride")) {
        if (*s < 1) throw detail::at(emit, "trace_stride", "trace_stride must be >= 1");
        rc.emit.trace_stride = static_cast<std::size_t>(*s);
    }

    std::set<std::string> allowed = {"run", "emit", "sweep"};
    switch (rc.kind) {
    case Kind::EmBoost: {
        allowed.insert({"mechanics", "coil", "boost"});
        auto& s = rc.em;
        Reader m(f, "mechanics");
        m.num_into("Y0", s.mech.Y0);
        m.num_into("f", s.mech.f);
        m.num_into("m", s.mech.m);
        m.num_into("Z_l", s.mech.Z_l);
        s.mech.zeta = mechanics::optimal_damping_factor(s.mech.Y0, s.mech.Z_l);
        m.num_into("zeta", s.mech.zeta);
        Reader c(f, "coil");
        if (auto n = c.integer("N")) s.coil.N = static_cast<int>(*n);
        c.num_into("B", s.coil.B);
        c.num_into("l_a", s.coil.l_a);
        c.num_into("L_g", s.coil.L_g);
        c.num_into("R_g", s.coil.R_g);
        c.num_into("C_g", s.coil.C_g);
        Reader b(f, "boost");
        b.num_into("f_sw", s.boost.f_sw);
        b.num_into("t_on", s.boost.t_on);
        b.num_into("L_boost", s.boost.L_boost);
        b.num_into("R_Lboost", s.boost.R_Lboost);
        b.num_into("C_Lboost", s.boost.C_Lboost);
        b.num_into("V_rail", s.boost.V_rail);
        b.num_into("C_res", s.boost.C_res);
        detail::read_em_devices(f, s.boost.sw, s.boost.diode, "boost", "boost", "sw_", "d_");
        if (auto p = b.str("polarity")) {
            try {
                s.polarity = em::parse_polarity(*p);
            } catch (const std::exception& e) {
                throw detail::at(b, "polarity", e.what());
            }
        }
        if (auto v = b.num("fixed_emf")) s.fixed_emf = *v;
        b.num_into("emf_scale", s.emf_scale);
        if (t_stop) s.t_stop = *t_stop;
        detail::checked(f, "mechanics", [&] { s.mech.validate(); });
        detail::checked(f, "coil", [&] { s.coil.validate(); });
        detail::checked(f, "boost", [&] { s.validate(); });
        break;
    }
    case Kind::EsBuck:
    case Kind::EsFlyback: {
        allowed.insert({"generator", "cells", "converter"});
        Reader g(f, "generator");
        g.num_into("C_closed", rc.gen.C_closed);
        g.num_into("C_open", rc.gen.C_open);
        g.num_into("C_par", rc.gen.C_par);
        g.num_into("V_prime", rc.gen.V_prime);
        Reader cells(f, "cells");
        detail::read_cells(cells, rc.cells);
        Reader cv(f, "converter");
        cv.num_into("L", rc.conv.L);
        cv.num_into("R_L", rc.conv.R_L);
        cv.num_into("C_load", rc.conv.C_load);
        cv.num_into("V_load", rc.V_load);
        cv.num_into("t_max", rc.conv.t_max);
        if (t_stop) rc.conv.t_max = *t_stop;
        detail::checked(f, "generator", [&] { rc.gen.validate(); });
        // Building once validates devices, converter values and the load.
        detail::checked(f, "converter", [&] {
            (void)es::build_converter(rc.topology(), rc.gen, rc.cells, rc.V_load, rc.conv);
        });
        break;
    }
    case Kind::Netlist: {
        allowed.insert({"netlist", "roles"});
        Reader nl(f, "netlist");
        const auto file = nl.str("file");
        if (!file) throw ParseError("[netlist] needs file = <path>", 1, 1);
        const auto p = resolve(*file);
        std::string ntext;
        try {
            ntext = detail::slurp(p, "netlist");
        } catch (const ParseError& e) {
            throw detail::at(nl, "file", e.message());
        }
        hashed += ntext;
        try {
            rc.netlist = circuit::parse_netlist(ntext);
        } catch (const ParseError& e) {
            throw ParseError(p.filename().string() + ": " + e.message(), e.line(), e.column());
        }
        if (!t_stop) throw detail::at(run, "kind", "netlist scenarios need [run] t_stop");
        if (!(rc.dt > 0.0)) throw detail::at(run, "kind", "netlist scenarios need [run] dt");
        rc.t_stop = *t_stop;
        Reader roles(f, "roles");
        for (const auto& [name, val] : roles.all()) {
            if (!rc.netlist.netlist.find(name))
                throw detail::at(roles, name, "no component '" + name + "' in the netlist");
            try {
                rc.roles[name] = circuit::Role::parse(val);
            } catch (const std::exception& e) {
                throw detail::at(roles, name, e.what());
            }
        }
        std::string missing;
        for (const auto& c : rc.netlist.netlist.components())
            if (!rc.roles.contains(c.name)) missing += (missing.empty() ? "" : ", ") + c.name;
        if (!missing.empty()) {
            const auto* s = f.section("roles");
            throw ParseError("components without an energy role: " + missing, s ? s->line : 1, 1);
        }
        break;
    }
    }

    Reader sw(f, "sweep");
    if (sw.present()) {
        SweepBlock sb;
        sb.parameter = sw.str("parameter", "");
        const auto allowed_p = sweep_parameters(rc.kind);
        if (std::find(allowed_p.begin(), allowed_p.end(), sb.parameter) == allowed_p.end()) {
            std::string list;
            for (const auto& a : allowed_p) list += (list.empty() ? "" : ", ") + a;
            throw detail::at(sw, "parameter", "sweep parameter '" + sb.parameter + "' is not one of: " + list);
        }
        sb.values = sw.list("values").value_or(std::vector<double>{});
        if (sb.values.empty()) throw detail::at(sw, "values", "sweep values list is empty");
        if (sb.parameter == "n_cells" || sb.parameter == "turns")
            for (double v : sb.values)
                if (v < 1.0 || v != std::floor(v))
                    throw detail::at(sw, "values", sb.parameter + " values must be whole numbers >= 1");
        sb.objective = sw.str("objective", rc.is_es() ? "effectiveness" : "efficiency");
        const auto metrics = sweep_metrics(rc.kind);
        if (std::find(metrics.begin(), metrics.end(), sb.objective) == metrics.end() &&
            sb.objective.rfind("loss_", 0) != 0)
            throw detail::at(sw, "objective", "unknown objective '" + sb.objective + "'");
        const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        sb.threads = hw;
        if (auto t = sw.integer("threads")) {
            if (*t < 1) throw detail::at(sw, "threads", "threads must be >= 1");
            sb.threads = static_cast<unsigned>(*t);
        }
        try {
            sweep::SweepSpec{sb.parameter, sb.values, sb.objective}.validate();
        } catch (const std::exception& e) {
            throw detail::at(sw, "values", e.what());
        }
        rc.sweep = sb;
    }

    f.check_all_used(allowed);
    rc.hash = config::content_hash(hashed);
    return rc;
}

[[nodiscard]] inline RunConfig load_config(const std::string& path) {
    return parse_config(detail::slurp(path, "config"), path);
}

}  // namespace scav::app

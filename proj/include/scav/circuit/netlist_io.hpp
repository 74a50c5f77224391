// Line-oriented netlist text format.
//
//   # comment
//   .name <label>
//   .source <id> dc <v> | sine <amp> <freq> [phase [offset]] | pwl <t> <v> ...
//   .profile <id> ...           same forms, used by CVAR
//   .gate <id> off | on | periodic <period> <on> [phase [t_start [t_end]]]
//   .gate <id> intervals <t_on> <t_off> ...
//   R name n1 n2 R
//   L name n1 n2 L [Rs [i0]]
//   C name n1 n2 C [v0]
//   CVAR name n1 n2 profile q0
//   V name n1 n2 source [Rs]
//   SW name n1 n2 Ron Coff gate [Rleak [v0]]
//   D name anode cathode Vf Ron Cj [Rleak [v0]]
//   K name p1 p2 s1 s2 L1 L2 k R1 R2 [i1 [i2]]
//
// Numbers accept SI suffixes p n u m k meg (any case) and "inf".
#pragma once

#include "scav/circuit/gate_schedule.hpp"
#include "scav/circuit/netlist.hpp"
#include "scav/circuit/trace.hpp"
#include "scav/error.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace scav::circuit {

struct NetlistFile {
    Netlist netlist;
    GateSchedule schedule;
    friend bool operator==(const NetlistFile&, const NetlistFile&) = default;
};

namespace io_detail {

struct Token {
    std::string text;
    int column = 1;
};

inline std::vector<Token> split(const std::string& line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size() || line[i] == '#') break;
        const std::size_t s = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#')
            ++i;
        out.push_back({line.substr(s, i - s), static_cast<int>(s) + 1});
    }
    return out;
}

inline std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace io_detail

/// Parses a number with an optional SI suffix. Throws DomainError on junk.
[[nodiscard]] inline double parse_si(const std::string& text) {
    const std::string s = io_detail::lower(text);
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s.empty()) throw DomainError("empty number");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw DomainError("not a number: '" + text + "'");
    const std::string suf(end);
    int exp10 = 0;
    if (suf.empty())
        exp10 = 0;
    else if (suf == "meg")
        exp10 = 6;
    else if (suf == "k")
        exp10 = 3;
    else if (suf == "m")
        exp10 = -3;
    else if (suf == "u")
        exp10 = -6;
    else if (suf == "n")
        exp10 = -9;
    else if (suf == "p")
        exp10 = -12;
    else
        throw DomainError("unknown suffix in '" + text + "'");
    if (!std::isfinite(v)) throw DomainError("not a finite number: '" + text + "'");
    if (exp10 == 0) return v;
    // "20u" -> "20e-6" so the result is correctly rounded; a mantissa that
    // already has an exponent is scaled instead
    const std::string mant = s.substr(0, static_cast<std::size_t>(end - s.c_str()));
    if (mant.find('e') != std::string::npos) return v * std::pow(10.0, exp10);
    return std::strtod((mant + "e" + std::to_string(exp10)).c_str(), nullptr);
}

/// Shortest text that reads back to exactly the same double.
[[nodiscard]] inline std::string format_exact(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace io_detail {

class Parser {
public:
    explicit Parser(std::istream& in) : in_(in) {}

    NetlistFile run() {
        std::string line;
        while (std::getline(in_, line)) {
            ++lineno_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            toks_ = split(line);
            if (toks_.empty()) continue;
            const std::string kw = lower(toks_[0].text);
            if (kw[0] == '.')
                directive(kw);
            else
                component(kw);
        }
        for (const auto& [gate, col] : gate_refs_)
            if (!out_.schedule.has(gate)) out_.schedule.set(gate, GateDrive::always_off());
        try {
            out_.netlist.validate();
        } catch (const NetlistError& e) {
            throw ParseError(e.what(), lineno_, 1);
        }
        return std::move(out_);
    }

private:
    std::istream& in_;
    int lineno_ = 0;
    std::vector<Token> toks_;
    NetlistFile out_;
    std::vector<std::pair<std::string, int>> gate_refs_;

    [[noreturn]] void fail(const std::string& msg, std::size_t tok) const {
        const int col = tok < toks_.size() ? toks_[tok].column
                                           : (toks_.empty() ? 1 : toks_.back().column +
                                                                      static_cast<int>(toks_.back().text.size()));
        throw ParseError(msg, lineno_, col);
    }

    double num(std::size_t k) const {
        if (k >= toks_.size()) fail("missing value", k);
        try {
            return parse_si(toks_[k].text);
        } catch (const DomainError& e) {
            fail(e.what(), k);
        }
    }
    double opt_num(std::size_t k, double dflt) const { return k < toks_.size() ? num(k) : dflt; }
    const std::string& word(std::size_t k) const {
        if (k >= toks_.size()) fail("missing field", k);
        return toks_[k].text;
    }
    void arity(std::size_t lo, std::size_t hi) const {
        if (toks_.size() < lo) fail("too few fields", toks_.size());
        if (toks_.size() > hi) fail("too many fields", hi);
    }

    Waveform waveform() {
        const std::string kind = lower(word(2));
        if (kind == "dc") {
            arity(4, 4);
            return Waveform::dc(num(3));
        }
        if (kind == "sine") {
            arity(5, 7);
            return Waveform::sine(num(3), num(4), opt_num(5, 0.0), opt_num(6, 0.0));
        }
        if (kind == "pwl") {
            if (toks_.size() < 5 || (toks_.size() - 3) % 2 != 0) fail("pwl needs time/value pairs", 3);
            std::vector<std::pair<double, double>> pts;
            for (std::size_t k = 3; k + 1 < toks_.size(); k += 2) pts.emplace_back(num(k), num(k + 1));
            try {
                return Waveform::pwl(std::move(pts));
            } catch (const DomainError& e) {
                fail(e.what(), 3);
            }
        }
        fail("unknown waveform kind '" + kind + "'", 2);
    }

    void directive(const std::string& kw) {
        if (kw == ".name") {
            arity(2, 2);
            out_.netlist.name = toks_[1].text;
        } else if (kw == ".source" || kw == ".profile") {
            const std::string id = word(1);
            if (out_.netlist.waveforms.contains(id)) fail("duplicate waveform '" + id + "'", 1);
            out_.netlist.waveforms[id] = waveform();
        } else if (kw == ".gate") {
            const std::string id = word(1);
            if (out_.schedule.has(id)) fail("duplicate gate '" + id + "'", 1);
            const std::string kind = lower(word(2));
            try {
                if (kind == "off") {
                    arity(3, 3);
                    out_.schedule.set(id, GateDrive::always_off());
                } else if (kind == "on") {
                    arity(3, 3);
                    out_.schedule.set(id, GateDrive::always_on());
                } else if (kind == "periodic") {
                    arity(5, 8);
                    PeriodicGate p{num(3), num(4), opt_num(5, 0.0), opt_num(6, 0.0),
                                   opt_num(7, std::numeric_limits<double>::infinity())};
                    out_.schedule.set(id, GateDrive::from_periodic(p));
                } else if (kind == "intervals") {
                    if (toks_.size() < 5 || (toks_.size() - 3) % 2 != 0)
                        fail("intervals need on/off pairs", 3);
                    std::vector<std::pair<double, double>> iv;
                    for (std::size_t k = 3; k + 1 < toks_.size(); k += 2)
                        iv.emplace_back(num(k), num(k + 1));
                    out_.schedule.set(id, GateDrive::from_intervals(std::move(iv)));
                } else {
                    fail("unknown gate kind '" + kind + "'", 2);
                }
            } catch (const DomainError& e) {
                fail(e.what(), 2);
            }
        } else {
            fail("unknown directive '" + toks_[0].text + "'", 0);
        }
    }

    void component(const std::string& kw) {
        auto& nl = out_.netlist;
        const std::string name = word(1);
        if (nl.find(name)) fail("duplicate component name '" + name + "'", 1);
        if (kw == "r") {
            arity(5, 5);
            nl.add(name, {word(2), word(3)}, Resistor{num(4)});
        } else if (kw == "l") {
            arity(5, 7);
            nl.add(name, {word(2), word(3)}, Inductor{num(4), opt_num(5, 0.0), opt_num(6, 0.0)});
        } else if (kw == "c") {
            arity(5, 6);
            nl.add(name, {word(2), word(3)}, Capacitor{num(4), opt_num(5, 0.0)});
        } else if (kw == "cvar") {
            arity(6, 6);
            if (!nl.waveforms.contains(word(4))) fail("unknown profile '" + word(4) + "'", 4);
            nl.add(name, {word(2), word(3)}, VarCapacitor{word(4), num(5)});
        } else if (kw == "v") {
            arity(5, 6);
            if (!nl.waveforms.contains(word(4))) fail("unknown source '" + word(4) + "'", 4);
            nl.add(name, {word(2), word(3)}, VoltageSource{word(4), opt_num(5, 0.0)});
        } else if (kw == "sw") {
            arity(7, 9);
            gate_refs_.emplace_back(word(6), toks_[6].column);
            nl.add(name, {word(2), word(3)},
                   Switch{num(4), num(5), word(6), opt_num(7, kInf), opt_num(8, 0.0)});
        } else if (kw == "d") {
            arity(7, 9);
            nl.add(name, {word(2), word(3)},
                   Diode{num(4), num(5), num(6), opt_num(7, kInf), opt_num(8, 0.0)});
        } else if (kw == "k") {
            arity(11, 13);
            nl.add(name, {word(2), word(3), word(4), word(5)},
                   CoupledInductor{num(6), num(7), num(8), num(9), num(10), opt_num(11, 0.0),
                                   opt_num(12, 0.0)});
        } else {
            fail("unknown component type '" + toks_[0].text + "'", 0);
        }
    }
};

inline void write_waveform(std::ostream& os, const char* dir, const std::string& id,
                           const Waveform& w) {
    os << dir << ' ' << id;
    switch (w.kind()) {
    case Waveform::Kind::Dc:
        os << " dc " << format_exact(w.offset());
        break;
    case Waveform::Kind::Sine:
        os << " sine " << format_exact(w.amplitude()) << ' ' << format_exact(w.freq()) << ' '
           << format_exact(w.phase()) << ' ' << format_exact(w.offset());
        break;
    case Waveform::Kind::Pwl:
        os << " pwl";
        for (const auto& [t, v] : w.points()) os << ' ' << format_exact(t) << ' ' << format_exact(v);
        break;
    }
    os << '\n';
}

}  // namespace io_detail

/// Reads a netlist file. Errors carry the line and column.
[[nodiscard]] inline NetlistFile parse_netlist(std::istream& in) {
    return io_detail::Parser(in).run();
}

[[nodiscard]] inline NetlistFile parse_netlist(const std::string& text) {
    std::istringstream is(text);
    return parse_netlist(is);
}

/// Writes a netlist so that parse_netlist gives back an equal object.
inline void write_netlist(std::ostream& os, const Netlist& nl, const GateSchedule& gs) {
    using io_detail::write_waveform;
    auto f = format_exact;
    os << ".name " << nl.name << '\n';
    std::set<std::string> profiles;
    for (const auto& c : nl.components())
        if (const auto* cv = std::get_if<VarCapacitor>(&c.element)) profiles.insert(cv->profile);
    for (const auto& [id, w] : nl.waveforms)
        write_waveform(os, profiles.contains(id) ? ".profile" : ".source", id, w);
    for (const auto& [id, d] : gs.drives()) {
        os << ".gate " << id;
        if (d.periodic) {
            const auto& p = d.pulse;
            os << " periodic " << f(p.period) << ' ' << f(p.on_time) << ' ' << f(p.phase) << ' '
               << f(p.t_start) << ' ' << f(p.t_end);
        } else if (d.intervals.empty()) {
            os << " off";
        } else if (d == GateDrive::always_on()) {
            os << " on";
        } else {
            os << " intervals";
            for (const auto& [a, b] : d.intervals) os << ' ' << f(a) << ' ' << f(b);
        }
        os << '\n';
    }
    for (const auto& c : nl.components()) {
        const auto& n = c.nodes;
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, Resistor>)
                    os << "R " << c.name << ' ' << n[0] << ' ' << n[1] << ' ' << f(e.R);
                else if constexpr (std::is_same_v<T, Inductor>)
                    os << "L " << c.name << ' ' << n[0] << ' ' << n[1] << ' ' << f(e.L) << ' '
                       << f(e.R_series) << ' ' << f(e.i0);
                else if constexpr (std::is_same_v<T, Capacitor>)
                    os << "C " << c.name << ' ' << n[0] << ' ' << n[1] << ' ' << f(e.C) << ' '
                       << f(e.v0);
                else if constexpr (std::is_same_v<T, VarCapacitor>)
                    os << "CVAR " << c.name << ' ' << n[0] << ' ' << n[1] << ' ' << e.profile << ' '
                       << f(e.q0);
                else if constexpr (std::is_same_v<T, VoltageSource>)
                    os << "V " << c.name << ' ' << n[0] << ' ' << n[1] << ' ' << e.waveform << ' '
                       << f(e.R_series);
                else if constexpr (std::is_same_v<T, Switch>)
                    os << "SW " << c.name << ' ' << n[0] << ' ' << n[1] << ' ' << f(e.R_on) << ' '
                       << f(e.C_off) << ' ' << e.gate << ' ' << f(e.R_leak) << ' ' << f(e.v0);
                else if constexpr (std::is_same_v<T, Diode>)
                    os << "D " << c.name << ' ' << n[0] << ' ' << n[1] << ' ' << f(e.V_f) << ' '
                       << f(e.R_on) << ' ' << f(e.C_j) << ' ' << f(e.R_leak) << ' ' << f(e.v0);
                else if constexpr (std::is_same_v<T, CoupledInductor>)
                    os << "K " << c.name << ' ' << n[0] << ' ' << n[1] << ' ' << n[2] << ' ' << n[3]
                       << ' ' << f(e.L1) << ' ' << f(e.L2) << ' ' << f(e.k) << ' ' << f(e.R1) << ' '
                       << f(e.R2) << ' ' << f(e.i1_0) << ' ' << f(e.i2_0);
            },
            c.element);
        os << '\n';
    }
}

[[nodiscard]] inline std::string to_text(const Netlist& nl, const GateSchedule& gs) {
    std::ostringstream os;
    write_netlist(os, nl, gs);
    return os.str();
}

/// Trace as CSV: time, node voltages, port currents, device states and the
/// cumulative absorbed energy of every component. Every `stride`-th sample is
/// written, plus the last one.
inline void write_trace_csv(std::ostream& os, const Trace& tr, std::size_t stride = 1) {
    if (stride == 0) throw DomainError("trace stride must be >= 1");
    os << "t";
    for (const auto& n : tr.nodes) os << ",v(" << n << ')';
    for (const auto& c : tr.current_names) os << ",i(" << c << ')';
    for (const auto& d : tr.devices) os << ",on(" << d << ')';
    for (const auto& c : tr.components) os << ",w(" << c << ')';
    os << '\n';
    char buf[32];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof buf, ",%.9g", x);
        os << buf;
    };
    const std::size_t n = tr.samples();
    for (std::size_t k = 0; k < n; ++k) {
        if (k % stride != 0 && k + 1 != n) continue;
        std::snprintf(buf, sizeof buf, "%.12g", tr.t[k]);
        os << buf;
        for (const auto& v : tr.v) put(v[k]);
        for (const auto& i : tr.i) put(i[k]);
        for (const auto& s : tr.state) os << ',' << static_cast<int>(s[k]);
        for (const auto& w : tr.absorbed) put(w[k]);
        os << '\n';
    }
}

}  // namespace scav::circuit

// Strict INI-style configuration: [section] headers, key = value lines,
// '#' or ';' comments. Every key that is read is marked; leftover keys are
// reported with their position so typos in parameters never pass silently.
#pragma once

#include "scav/circuit/netlist_io.hpp"
#include "scav/error.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace scav::config {

struct Entry {
    std::string value;
    int line = 0;
    int column = 0;      ///< column of the value
    int key_column = 0;
    mutable bool used = false;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<std::pair<std::string, Entry>> entries;

    [[nodiscard]] const Entry* find(const std::string& key) const {
        for (const auto& [k, e] : entries)
            if (k == key) return &e;
        return nullptr;
    }
};

namespace detail {

inline std::string trim(const std::string& s, std::size_t& lead) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    lead = a;
    return s.substr(a, b - a);
}

}  // namespace detail

class IniFile {
public:
    std::string source;  ///< file name for messages
    std::vector<Section> sections;

    static IniFile parse(std::istream& in, std::string source_name = "<config>") {
        IniFile f;
        f.source = std::move(source_name);
        std::string raw;
        int lineno = 0;
        Section* cur = nullptr;
        while (std::getline(in, raw)) {
            ++lineno;
            // strip comments that start a token
            std::string line = raw;
            for (std::size_t i = 0; i < line.size(); ++i) {
                if ((line[i] == '#' || line[i] == ';') && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
                    line.resize(i);
                    break;
                }
            }
            std::size_t lead = 0;
            const std::string t = detail::trim(line, lead);
            if (t.empty()) continue;
            if (t.front() == '[') {
                if (t.back() != ']' || t.size() < 3)
                    throw ParseError("malformed section header", lineno, static_cast<int>(lead) + 1);
                std::size_t l2 = 0;
                const std::string name = detail::trim(t.substr(1, t.size() - 2), l2);
                for (const auto& s : f.sections)
                    if (s.name == name)
                        throw ParseError("duplicate section [" + name + "]", lineno,
                                         static_cast<int>(lead) + 1);
                f.sections.push_back({name, lineno, {}});
                cur = &f.sections.back();
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ParseError("expected 'key = value'", lineno, static_cast<int>(lead) + 1);
            if (!cur) throw ParseError("key outside of any section", lineno, static_cast<int>(lead) + 1);
            std::size_t kl = 0, vl = 0;
            const std::string key = detail::trim(t.substr(0, eq), kl);
            const std::string val = detail::trim(t.substr(eq + 1), vl);
            if (key.empty()) throw ParseError("empty key", lineno, static_cast<int>(lead) + 1);
            if (cur->find(key))
                throw ParseError("duplicate key '" + key + "'", lineno, static_cast<int>(lead) + 1);
            Entry e;
            e.value = val;
            e.line = lineno;
            e.key_column = static_cast<int>(lead + kl) + 1;
            e.column = static_cast<int>(lead + eq + 1 + vl) + 1;
            cur->entries.emplace_back(key, e);
        }
        return f;
    }

    static IniFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open config '" + path + "'", 0, 0);
        return parse(in, path);
    }

    [[nodiscard]] const Section* section(const std::string& name) const {
        for (const auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }

    /// Throws on the first section outside `allowed` or key never read.
    void check_all_used(const std::set<std::string>& allowed) const {
        for (const auto& s : sections) {
            if (!allowed.contains(s.name))
                throw ParseError("unknown section [" + s.name + "]", s.line, 1);
            for (const auto& [k, e] : s.entries)
                if (!e.used)
                    throw ParseError("unknown key '" + k + "' in [" + s.name + "]", e.line,
                                     e.key_column);
        }
    }
};

/// Typed accessors over one section; absent sections read as empty.
class Reader {
public:
    Reader(const IniFile& f, const std::string& section) : sec_(f.section(section)), name_(section) {}

    [[nodiscard]] bool present() const { return sec_ != nullptr; }
    [[nodiscard]] bool has(const std::string& key) const { return sec_ && sec_->find(key); }

    [[nodiscard]] std::optional<std::string> str(const std::string& key) const {
        const Entry* e = entry(key);
        if (!e) return std::nullopt;
        return e->value;
    }
    [[nodiscard]] std::string str(const std::string& key, const std::string& dflt) const {
        return str(key).value_or(dflt);
    }

    [[nodiscard]] std::optional<double> num(const std::string& key) const {
        const Entry* e = entry(key);
        if (!e) return std::nullopt;
        try {
            return circuit::parse_si(e->value);
        } catch (const DomainError& ex) {
            throw ParseError(std::string(ex.what()) + " for '" + key + "'", e->line, e->column);
        }
    }
    [[nodiscard]] double num(const std::string& key, double dflt) const { return num(key).value_or(dflt); }
    void num_into(const std::string& key, double& target) const {
        if (auto v = num(key)) target = *v;
    }

    [[nodiscard]] std::optional<long> integer(const std::string& key) const {
        const Entry* e = entry(key);
        if (!e) return std::nullopt;
        std::size_t pos = 0;
        long v = 0;
        try {
            v = std::stol(e->value, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != e->value.size())
            throw ParseError("expected an integer for '" + key + "'", e->line, e->column);
        return v;
    }

    [[nodiscard]] std::optional<bool> boolean(const std::string& key) const {
        const Entry* e = entry(key);
        if (!e) return std::nullopt;
        if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
        if (e->value == "false" || e->value == "no" || e->value == "0") return false;
        throw ParseError("expected true or false for '" + key + "'", e->line, e->column);
    }

    /// Comma or whitespace separated numbers.
    [[nodiscard]] std::optional<std::vector<double>> list(const std::string& key) const {
        const Entry* e = entry(key);
        if (!e) return std::nullopt;
        std::vector<double> out;
        std::string tok;
        int col = e->column;
        int tok_col = col;
        auto flush = [&] {
            if (tok.empty()) return;
            try {
                out.push_back(circuit::parse_si(tok));
            } catch (const DomainError& ex) {
                throw ParseError(std::string(ex.what()) + " in list '" + key + "'", e->line, tok_col);
            }
            tok.clear();
        };
        for (char c : e->value) {
            if (c == ',' || c == ' ' || c == '\t') {
                flush();
            } else {
                if (tok.empty()) tok_col = col;
                tok += c;
            }
            ++col;
        }
        flush();
        return out;
    }

    /// Position of a key for error messages (line 0 if absent).
    [[nodiscard]] std::pair<int, int> where(const std::string& key) const {
        const Entry* e = sec_ ? sec_->find(key) : nullptr;
        if (!e) return {sec_ ? sec_->line : 0, 1};
        return {e->line, e->column};
    }

    /// Every key in the section, marking them all read.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> all() const {
        std::vector<std::pair<std::string, std::string>> out;
        if (!sec_) return out;
        for (const auto& [k, e] : sec_->entries) {
            e.used = true;
            out.emplace_back(k, e.value);
        }
        return out;
    }

private:
    const Section* sec_;
    std::string name_;

    const Entry* entry(const std::string& key) const {
        if (!sec_) return nullptr;
        const Entry* e = sec_->find(key);
        if (e) e->used = true;
        return e;
    }
};

/// FNV-1a, used as a stable content hash in provenance lines.
[[nodiscard]] inline std::string content_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace scav::config

// Minimal numeric CSV reading for regenerating plots from run outputs.
#pragma once

#include "scav/error.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace scav::io {

/// Header plus numeric columns; `#` lines are kept as "key: value" pairs.
struct CsvTable {
    std::map<std::string, std::string> meta;
    std::vector<std::string> header;
    std::vector<std::vector<double>> cols;       ///< numeric view, NaN for empty or text cells
    std::vector<std::vector<std::string>> text;  ///< raw cells [column][row]

    [[nodiscard]] std::size_t rows() const { return cols.empty() ? 0 : cols.front().size(); }
    [[nodiscard]] bool has(const std::string& name) const {
        for (const auto& h : header)
            if (h == name) return true;
        return false;
    }
    [[nodiscard]] const std::vector<double>& col(const std::string& name) const {
        for (std::size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return cols[k];
        throw DomainError("csv: no column '" + name + "'");
    }
    [[nodiscard]] const std::vector<std::string>& col_text(const std::string& name) const {
        for (std::size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return text[k];
        throw DomainError("csv: no column '" + name + "'");
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

/// Parses CSV text. Throws ParseError on ragged rows or a missing header.
[[nodiscard]] inline CsvTable parse_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon != std::string::npos) {
                auto key = line.substr(1, colon - 1);
                while (!key.empty() && key.front() == ' ') key.erase(key.begin());
                auto val = line.substr(colon + 1);
                while (!val.empty() && val.front() == ' ') val.erase(val.begin());
                t.meta[key] = val;
            }
            continue;
        }
        auto cells = split_csv_line(line);
        if (!have_header) {
            t.header = cells;
            t.cols.assign(cells.size(), {});
            t.text.assign(cells.size(), {});
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size())
            throw ParseError("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                                 std::to_string(t.header.size()),
                             lineno, 1);
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const auto& c = cells[k];
            double v = std::nan("");
            if (!c.empty()) {
                char* end = nullptr;
                v = std::strtod(c.c_str(), &end);
                if (end == c.c_str() || *end != '\0') v = std::nan("");
            }
            t.cols[k].push_back(v);
            t.text[k].push_back(c);
        }
    }
    if (!have_header) throw ParseError("csv has no header row", lineno, 1);
    return t;
}

[[nodiscard]] inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path + "'");
    return parse_csv(in);
}

}  // namespace scav::io

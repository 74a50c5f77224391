#pragma once

#include <stdexcept>
#include <string>

namespace scav {

/// Argument outside the physical domain of a model (negative length, zero
/// capacitance, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Structural problem with a netlist or scenario detected before simulation.
class NetlistError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Failure inside the transient engine. `where` names the offending node,
/// branch or device when one can be identified.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::string where = {})
        : std::runtime_error(where.empty() ? what : what + " [" + where + "]"),
          where_(std::move(where)) {}

    [[nodiscard]] const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

/// Parse error in a config or netlist file, with 1-based position.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column = 1)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + msg),
          msg_(msg), line_(line), column_(column) {}

    /// The message without the position prefix.
    [[nodiscard]] const std::string& message() const noexcept { return msg_; }
    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }

private:
    std::string msg_;
    int line_;
    int column_;
};

}  // namespace scav

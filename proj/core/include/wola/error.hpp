#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wola {

/// Thrown when an argument violates an operation's preconditions.
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a malformed input file is encountered. Carries the 1-based
/// line number of the offending row (0 when not line-specific).
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& msg, std::size_t line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Thrown when an iterative solver exhausts its iteration budget.
/// Carries the last iterate so callers can inspect how far it got.
class convergence_failure : public std::runtime_error {
public:
    convergence_failure(const std::string& msg, std::vector<double> last_iterate)
        : std::runtime_error(msg), last_iterate_(std::move(last_iterate)) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

private:
    std::vector<double> last_iterate_;
};

}  // namespace wola

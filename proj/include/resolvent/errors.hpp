#pragma once

#include <stdexcept>
#include <string>

namespace resolvent {

/// Evaluation hit a real pole of a resolvent (or a vanishing pole function).
class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Closed-form lattice Green function evaluated on its branch cut.
class BranchError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Weak-coupling machinery requested outside a photonic gap.
class RegimeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed bath-spec or run-config document. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, int line, std::string source = {})
        : std::runtime_error(format(message, line, source)), line_(line), source_(std::move(source))
    {
    }

    int line() const noexcept { return line_; }
    const std::string& source() const noexcept { return source_; }

private:
    static std::string format(const std::string& message, int line, const std::string& source)
    {
        std::string where = source.empty() ? std::string("line ") : source + ":";
        if (line > 0) {
            return where + std::to_string(line) + ": " + message;
        }
        return source.empty() ? message : source + ": " + message;
    }

    int line_;
    std::string source_;
};

} // namespace resolvent

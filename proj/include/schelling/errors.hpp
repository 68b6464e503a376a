#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace schelling {

// Malformed input file (JSON or scheduler text).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structurally valid input with inconsistent contents; collects every
// violation so a config can be fixed in one pass.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid configuration:";
        for (const auto& s : v) out += "\n  - " + s;
        return out;
    }

    std::vector<std::string> violations_;
};

// Exhaustive analysis requested beyond the configured size cap.
class TooLargeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoConvergenceError : public std::runtime_error {
public:
    NoConvergenceError(long long iterations, double residual)
        : std::runtime_error("stationary solve did not converge after " +
                             std::to_string(iterations) +
                             " iterations (residual " + std::to_string(residual) + ")"),
          iterations(iterations),
          residual(residual) {}

    long long iterations;
    double residual;
};

// A node of the resistance graph cannot reach the requested root.
class UnreachableError : public std::runtime_error {
public:
    explicit UnreachableError(long long node)
        : std::runtime_error("node " + std::to_string(node) + " cannot reach the root"),
          node(node) {}

    long long node;
};

} // namespace schelling

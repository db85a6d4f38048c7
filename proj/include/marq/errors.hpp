#pragma once

#include <stdexcept>
#include <string>

namespace marq {

/// Argument outside the mathematical domain of an operation.
class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The requested equation has no root in the admissible range
/// (e.g. an inversion target below the value at the boundary).
class no_solution_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iteration failed to reach its tolerance. Carries the best iterate
/// so callers (and the CLI) can report it.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, double best_value, int iterations)
        : std::runtime_error(what), best(best_value), iterations(iterations) {}

    double best;
    int iterations;
};

} // namespace marq

#pragma once

#include <stdexcept>
#include <string>

namespace coremax {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// WCNF soft weights other than 1 or top are rejected outright.
struct UnsupportedWeightError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidCoreError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HardClausesUnsatError : std::runtime_error {
    HardClausesUnsatError() : std::runtime_error("hard clauses are unsatisfiable") {}
};

struct MemoryBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TimeoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace coremax

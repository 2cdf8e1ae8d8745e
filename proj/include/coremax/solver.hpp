#pragma once

#include <cstdint>
#include <vector>

#include "coremax/formula.hpp"

namespace coremax {

enum class SolveStatus { Sat, Unsat, Indeterminate };

struct SolveResult {
    SolveStatus status = SolveStatus::Indeterminate;
    Model model;            // present iff Sat
    std::vector<int> core;  // tracked clause ids, present iff Unsat
};

struct SolverConfig {
    double var_decay = 0.95;
    double clause_decay = 0.999;
    int restart_first = 100;      // geometric restart sequence
    double restart_inc = 1.5;
    uint64_t seed = 0;            // scrambles initial saved phases
    bool core_minimize = false;
    int64_t conflict_budget = -1; // <0: unlimited
    double deadline = -1.0;       // absolute monotonic seconds; <0: none
};

// Decides satisfiability of the active (non-removed) clauses of f. Tracked
// clauses get internal selector literals and are solved under assumptions;
// on Unsat the failed assumption set yields the core. Selectors never leak
// into the returned model.
SolveResult solve(const Formula& f, const std::vector<int>& tracked, const SolverConfig& cfg = {});

// Deletion-based shrinking of a core down to a minimal unsatisfiable subset.
// Clauses outside `tracked` are kept as context for every check.
std::vector<int> minimize_core(const Formula& f, const std::vector<int>& tracked,
                               const std::vector<int>& core, const SolverConfig& cfg = {});

double monotonic_seconds();

}  // namespace coremax

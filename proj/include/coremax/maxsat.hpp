#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "coremax/cardinality.hpp"
#include "coremax/formula.hpp"
#include "coremax/solver.hpp"

namespace coremax {

enum class Algorithm { Msu1, Msu2, Msu3, Linear, Brute };

Algorithm algorithm_from_name(const std::string& name);
const char* algorithm_name(Algorithm a);

struct MaxSatConfig {
    // Defaults are per algorithm: msu1 uses pairwise Equals-1 (the historical
    // formulation), msu2/msu3 use the BDD encoder in AtMost mode. Either can
    // be overridden explicitly.
    std::optional<EncodeStrategy> encoding;
    std::optional<bool> use_equals;
    uint64_t seed = 0;
    double timeout_s = -1.0;        // wall clock; <0: none
    size_t mem_limit_bytes = 0;     // clause-database budget; 0: none
    SolverConfig solver;
};

struct MaxSatStats {
    int iterations = 0;        // SAT calls made by the main loop
    int cores_found = 0;
    int total_blockers = 0;
    int max_blockers_per_clause = 0;
    int64_t encoded_clauses = 0;        // auxiliary clauses emitted
    int per_clause_atmost1 = 0;         // msu2 per-clause constraints
    int disjoint_cores = 0;             // msu3 phase 1
    int lower_bound = 0;                // msu3 final lambda
    int sat_calls = 0;
    double wall_time = 0.0;
};

struct MaxSatResult {
    int optimum = 0;  // satisfied original clauses
    int cost = 0;     // falsified original clauses
    Model model;      // over the original formula's variables
    MaxSatStats stats;
};

MaxSatResult solve_msu1(const Formula& f, const MaxSatConfig& cfg = {});
MaxSatResult solve_msu2(const Formula& f, const MaxSatConfig& cfg = {});
MaxSatResult solve_msu3(const Formula& f, const MaxSatConfig& cfg = {});
MaxSatResult solve_linear(const Formula& f, const MaxSatConfig& cfg = {});
MaxSatResult brute_force(const Formula& f);

MaxSatResult solve_maxsat(const Formula& f, Algorithm algo, const MaxSatConfig& cfg = {});

}  // namespace coremax

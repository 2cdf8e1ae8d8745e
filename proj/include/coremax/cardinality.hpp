#pragma once

#include <cstdint>
#include <vector>

#include "coremax/formula.hpp"

namespace coremax {

enum class Rel { AtMost, AtLeast, Equals };
enum class EncodeStrategy { Pairwise, Bdd, Auto };

struct CardConstraint {
    std::vector<Lit> lits;  // duplicate-free
    Rel rel = Rel::AtMost;
    int bound = 0;
};

struct EncodedConstraint {
    std::vector<std::vector<Lit>> clauses;  // to be added tagged auxiliary
    std::vector<Var> fresh_vars;
};

// AtMost-1 as all binary clauses (~b_i | ~b_j); r(r-1)/2 clauses, no fresh vars.
EncodedConstraint encode_pairwise_atmost1(const std::vector<Lit>& lits, VarPool& pool);

// Layered-counter BDD encoding of the threshold function, Tseitin-transformed
// with one-sided (Plaisted-Greenbaum) clauses; clause count <= 3*r*(k+1)+1.
// Equals is AtMost + AtLeast; AtLeast-k over b is AtMost-(r-k) over ~b.
EncodedConstraint encode_bdd(const CardConstraint& c, VarPool& pool);

// Dispatch: Auto picks pairwise for (AtMost,1) with r <= pairwise_threshold,
// else the BDD encoder.
EncodedConstraint encode(const CardConstraint& c, VarPool& pool, EncodeStrategy strategy,
                         int pairwise_threshold = 30);

uint64_t pairwise_atmost1_clause_count(uint64_t r);

struct CardSize {
    uint64_t clauses = 0;
    uint64_t fresh_vars = 0;
    bool materialized = false;  // false when computed arithmetically
};

// Clause/variable counts for a (strategy, relation, r, k) combination without
// building formulas past `cap` clauses.
CardSize encode_size(EncodeStrategy strategy, Rel rel, uint64_t r, uint64_t k, uint64_t cap);

}  // namespace coremax

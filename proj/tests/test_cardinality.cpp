#include <doctest.h>

#include <algorithm>
#include <bit>

#include "common.hpp"
#include "coremax/cardinality.hpp"
#include "coremax/solver.hpp"

using namespace coremax;
using namespace coremax::testutil;

namespace {

std::vector<Lit> positive_lits(int r) {
    std::vector<Lit> lits;
    for (int v = 1; v <= r; ++v) lits.push_back(Lit(v));
    return lits;
}

// True iff the assignment fixing base variables 1..r per `bits` extends to a
// model of the encoding's clauses.
bool extends(const EncodedConstraint& enc, int r, Var last_var, uint32_t bits) {
    Formula f;
    f.pool().ensure(last_var);
    for (int v = 1; v <= r; ++v)
        f.add_clause({Lit(v, ((bits >> (v - 1)) & 1u) != 0)}, Tag::Hard);
    for (const auto& c : enc.clauses) f.add_clause(c, Tag::Aux);
    f.mark_input_complete();
    return solve(f, {}).status == SolveStatus::Sat;
}

bool holds(Rel rel, int count, int bound) {
    switch (rel) {
        case Rel::AtMost: return count <= bound;
        case Rel::AtLeast: return count >= bound;
        default: return count == bound;
    }
}

}  // namespace

TEST_CASE("pairwise clause counts") {
    CHECK(pairwise_atmost1_clause_count(0) == 0);
    CHECK(pairwise_atmost1_clause_count(1) == 0);
    CHECK(pairwise_atmost1_clause_count(2) == 1);
    CHECK(pairwise_atmost1_clause_count(4) == 6);
    for (uint64_t r = 1; r <= 200; ++r)
        CHECK(pairwise_atmost1_clause_count(r) == r * (r - 1) / 2);
    CHECK(pairwise_atmost1_clause_count(10000) == 49995000);
}

TEST_CASE("pairwise encoding materializes the count with no fresh vars") {
    VarPool pool;
    pool.ensure(5);
    EncodedConstraint enc = encode_pairwise_atmost1(positive_lits(5), pool);
    CHECK(enc.clauses.size() == 10);
    CHECK(enc.fresh_vars.empty());
    CHECK(pool.last() == 5);
    for (const auto& c : enc.clauses) {
        REQUIRE(c.size() == 2);
        CHECK(!c[0].positive());
        CHECK(!c[1].positive());
    }
}

TEST_CASE("bdd atmost-0 emits unit clauses") {
    VarPool pool;
    pool.ensure(3);
    EncodedConstraint enc = encode_bdd({positive_lits(3), Rel::AtMost, 0}, pool);
    CHECK(enc.fresh_vars.empty());
    REQUIRE(enc.clauses.size() == 3);
    for (const auto& c : enc.clauses) {
        REQUIRE(c.size() == 1);
        CHECK(!c[0].positive());
    }
}

TEST_CASE("bdd atmost with bound >= r is vacuous") {
    VarPool pool;
    pool.ensure(4);
    CHECK(encode_bdd({positive_lits(4), Rel::AtMost, 4}, pool).clauses.empty());
    CHECK(encode_bdd({positive_lits(4), Rel::AtMost, 9}, pool).clauses.empty());
}

TEST_CASE("bdd with negative bound is contradictory") {
    VarPool pool;
    pool.ensure(2);
    EncodedConstraint enc = encode_bdd({positive_lits(2), Rel::AtMost, -1}, pool);
    REQUIRE(enc.clauses.size() == 1);
    CHECK(enc.clauses[0].empty());
}

TEST_CASE("constraints reject duplicates and empty literal lists") {
    VarPool pool;
    pool.ensure(2);
    CHECK_THROWS(encode_bdd({{}, Rel::AtMost, 1}, pool));
    CHECK_THROWS(encode_bdd({{Lit(1), Lit(1)}, Rel::AtMost, 1}, pool));
}

TEST_CASE("projection correctness, exhaustive to r=8") {
    for (int r = 1; r <= 8; ++r) {
        for (int k = 0; k <= r; ++k) {
            for (Rel rel : {Rel::AtMost, Rel::AtLeast, Rel::Equals}) {
                for (EncodeStrategy st : {EncodeStrategy::Pairwise, EncodeStrategy::Bdd}) {
                    if (st == EncodeStrategy::Pairwise && !(rel == Rel::AtMost && k == 1))
                        continue;
                    VarPool pool;
                    pool.ensure(r);
                    EncodedConstraint enc =
                        encode({positive_lits(r), rel, k}, pool, st);
                    for (uint32_t bits = 0; bits < (1u << r); ++bits) {
                        int count = static_cast<int>(std::popcount(bits));
                        bool expect = holds(rel, count, k);
                        REQUIRE_MESSAGE(extends(enc, r, pool.last(), bits) == expect,
                                        "r=", r, " k=", k, " rel=", static_cast<int>(rel),
                                        " strategy=", static_cast<int>(st), " bits=", bits);
                    }
                }
            }
        }
    }
}

TEST_CASE("projection correctness over mixed-polarity literals") {
    // AtMost-2 over {x1, ~x2, x3, ~x4, x5}.
    std::vector<Lit> lits = {Lit(1), Lit(-2), Lit(3), Lit(-4), Lit(5)};
    VarPool pool;
    pool.ensure(5);
    EncodedConstraint enc = encode_bdd({lits, Rel::AtMost, 2}, pool);
    for (uint32_t bits = 0; bits < 32; ++bits) {
        int count = 0;
        for (const Lit& l : lits)
            if ((((bits >> (l.var() - 1)) & 1u) != 0) == l.positive()) ++count;
        CHECK(extends(enc, 5, pool.last(), bits) == (count <= 2));
    }
}

TEST_CASE("bdd clause count stays within the linear bound") {
    for (uint64_t r : {8u, 16u, 64u, 200u}) {
        for (uint64_t k : {1u, 2u, 5u}) {
            VarPool pool;
            pool.ensure(static_cast<Var>(r));
            EncodedConstraint enc =
                encode_bdd({positive_lits(static_cast<int>(r)), Rel::AtMost, static_cast<int>(k)},
                           pool);
            CHECK(enc.clauses.size() <= 3 * r * (k + 1) + 1);
        }
    }
}

TEST_CASE("bdd atmost-1 growth is linear in r") {
    // count(2r) <= 2*count(r) + C for a constant-overhead linear recurrence.
    uint64_t prev = encode_size(EncodeStrategy::Bdd, Rel::AtMost, 8, 1, 1u << 30).clauses;
    for (uint64_t r = 16; r <= 1024; r *= 2) {
        uint64_t cur = encode_size(EncodeStrategy::Bdd, Rel::AtMost, r, 1, 1u << 30).clauses;
        CHECK(cur <= 2 * prev + 16);
        prev = cur;
    }
}

TEST_CASE("encode_size matches materialized encodings") {
    for (int r = 1; r <= 12; ++r) {
        for (int k = 0; k <= r; ++k) {
            for (Rel rel : {Rel::AtMost, Rel::AtLeast, Rel::Equals}) {
                VarPool pool;
                pool.ensure(r);
                EncodedConstraint enc = encode({positive_lits(r), rel, k}, pool, EncodeStrategy::Bdd);
                CardSize sz = encode_size(EncodeStrategy::Bdd, rel, static_cast<uint64_t>(r),
                                          static_cast<uint64_t>(k), 1u << 30);
                CHECK(sz.clauses == enc.clauses.size());
                CHECK(sz.fresh_vars == enc.fresh_vars.size());
            }
        }
    }
}

TEST_CASE("encode_size pairwise is arithmetic, never materialized") {
    CardSize sz = encode_size(EncodeStrategy::Pairwise, Rel::AtMost, 10000, 1, 100);
    CHECK(sz.clauses == 49995000);
    CHECK(sz.fresh_vars == 0);
    CHECK(!sz.materialized);
}

TEST_CASE("auto strategy prefers pairwise only for small atmost-1") {
    VarPool p1, p2, p3;
    p1.ensure(10);
    p2.ensure(100);
    p3.ensure(10);
    CHECK(encode({positive_lits(10), Rel::AtMost, 1}, p1, EncodeStrategy::Auto)
              .fresh_vars.empty());
    CHECK(!encode({positive_lits(100), Rel::AtMost, 1}, p2, EncodeStrategy::Auto)
               .fresh_vars.empty());
    CHECK(!encode({positive_lits(10), Rel::AtMost, 2}, p3, EncodeStrategy::Auto)
               .fresh_vars.empty());
}

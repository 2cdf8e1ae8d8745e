#include "coremax/cardinality.hpp"

#include <algorithm>
#include <set>

namespace coremax {

uint64_t pairwise_atmost1_clause_count(uint64_t r) { return r * (r - 1) / 2; }

EncodedConstraint encode_pairwise_atmost1(const std::vector<Lit>& lits, VarPool&) {
    EncodedConstraint out;
    out.clauses.reserve(lits.size() * (lits.size() - 1) / 2);
    for (size_t i = 0; i < lits.size(); ++i)
        for (size_t j = i + 1; j < lits.size(); ++j)
            out.clauses.push_back({~lits[i], ~lits[j]});
    return out;
}

namespace {

// Layered counter BDD for sum(lits) <= k. Node (i, c) stands for "c of the
// first i literals are true and the constraint can still be met"; children
// follow lits[i]. Terminal rules: c > k is false, k - c >= r - i is true.
struct BddBuilder {
    const std::vector<Lit>& lits;
    int k;
    VarPool* pool;           // null in counting mode
    EncodedConstraint* out;  // null in counting mode
    uint64_t clause_count = 0;
    uint64_t var_count = 0;

    // memo values: 0 unvisited, -1 FALSE, -2 TRUE, >0 node var (or counting id)
    std::vector<int64_t> memo;

    static constexpr int64_t kFalse = -1;
    static constexpr int64_t kTrue = -2;

    BddBuilder(const std::vector<Lit>& l, int bound, VarPool* p, EncodedConstraint* o)
        : lits(l), k(bound), pool(p), out(o) {
        memo.assign((lits.size() + 1) * static_cast<size_t>(k + 1), 0);
    }

    int64_t fresh() {
        ++var_count;
        if (pool) {
            Var v = pool->fresh();
            out->fresh_vars.push_back(v);
            return v;
        }
        return static_cast<int64_t>(var_count);
    }

    void emit_binary(int64_t v, Lit a) {
        ++clause_count;
        if (out) out->clauses.push_back({Lit(static_cast<Var>(v), false), a});
    }
    void emit_ternary(int64_t v, Lit a, int64_t child) {
        ++clause_count;
        if (out)
            out->clauses.push_back(
                {Lit(static_cast<Var>(v), false), a, Lit(static_cast<Var>(child), true)});
    }

    int64_t build(size_t i, int c) {
        const size_t r = lits.size();
        if (c > k) return kFalse;
        if (k - c >= static_cast<int>(r - i)) return kTrue;
        int64_t& slot = memo[i * static_cast<size_t>(k + 1) + static_cast<size_t>(c)];
        if (slot != 0) return slot;

        int64_t hi = build(i + 1, c + 1);
        int64_t lo = build(i + 1, c);
        int64_t node;
        if (hi == lo) {
            node = hi;
        } else {
            node = fresh();
            const Lit x = lits[i];
            // Only the "node true => children hold" direction is needed to
            // assert the root.
            if (hi == kFalse)
                emit_binary(node, ~x);
            else if (hi != kTrue)
                emit_ternary(node, ~x, hi);
            if (lo == kFalse)
                emit_binary(node, x);
            else if (lo != kTrue)
                emit_ternary(node, x, lo);
        }
        slot = node;
        return node;
    }

    // Returns root; caller asserts it.
    int64_t run() { return build(0, 0); }
};

void check_constraint(const CardConstraint& c) {
    if (c.lits.empty()) throw UnsupportedError("cardinality constraint over empty literal list");
    std::set<int> seen;
    for (const Lit& l : c.lits)
        if (!seen.insert(l.code).second)
            throw UnsupportedError("cardinality constraint has duplicate literals");
    if (c.bound < 0 && c.rel != Rel::AtMost)
        throw UnsupportedError("negative cardinality bound");
}

// Appends the encoding of sum(lits) <= k.
void bdd_atmost(const std::vector<Lit>& lits, int k, VarPool& pool, EncodedConstraint& out) {
    const int r = static_cast<int>(lits.size());
    if (k < 0) {
        out.clauses.push_back({});  // unsatisfiable constant
        return;
    }
    if (k >= r) return;  // tautology
    if (k == 0) {
        for (const Lit& l : lits) out.clauses.push_back({~l});
        return;
    }
    BddBuilder b(lits, k, &pool, &out);
    int64_t root = b.run();
    if (root == BddBuilder::kFalse)
        out.clauses.push_back({});
    else if (root != BddBuilder::kTrue)
        out.clauses.push_back({Lit(static_cast<Var>(root), true)});
}

std::vector<Lit> negate_all(const std::vector<Lit>& lits) {
    std::vector<Lit> out;
    out.reserve(lits.size());
    for (const Lit& l : lits) out.push_back(~l);
    return out;
}

uint64_t bdd_atmost_size(uint64_t r, int64_t k, uint64_t& vars) {
    vars = 0;
    if (k < 0) return 1;
    if (k >= static_cast<int64_t>(r)) return 0;
    if (k == 0) return r;
    std::vector<Lit> dummy;
    dummy.reserve(r);
    for (uint64_t v = 1; v <= r; ++v) dummy.push_back(Lit(static_cast<Var>(v), true));
    BddBuilder b(dummy, static_cast<int>(k), nullptr, nullptr);
    int64_t root = b.run();
    vars = b.var_count;
    uint64_t n = b.clause_count;
    if (root == BddBuilder::kFalse || root > 0) ++n;  // empty clause or root unit
    return n;
}

}  // namespace

EncodedConstraint encode_bdd(const CardConstraint& c, VarPool& pool) {
    check_constraint(c);
    const int r = static_cast<int>(c.lits.size());
    EncodedConstraint out;
    switch (c.rel) {
        case Rel::AtMost:
            bdd_atmost(c.lits, c.bound, pool, out);
            break;
        case Rel::AtLeast:
            // sum(b) >= k  <=>  sum(~b) <= r - k
            bdd_atmost(negate_all(c.lits), r - c.bound, pool, out);
            break;
        case Rel::Equals:
            bdd_atmost(c.lits, c.bound, pool, out);
            bdd_atmost(negate_all(c.lits), r - c.bound, pool, out);
            break;
    }
    return out;
}

EncodedConstraint encode(const CardConstraint& c, VarPool& pool, EncodeStrategy strategy,
                         int pairwise_threshold) {
    if (strategy == EncodeStrategy::Pairwise) {
        if (c.rel != Rel::AtMost || c.bound != 1)
            throw UnsupportedError("pairwise encoding only supports AtMost-1");
        check_constraint(c);
        return encode_pairwise_atmost1(c.lits, pool);
    }
    if (strategy == EncodeStrategy::Auto && c.rel == Rel::AtMost && c.bound == 1 &&
        static_cast<int>(c.lits.size()) <= pairwise_threshold) {
        check_constraint(c);
        return encode_pairwise_atmost1(c.lits, pool);
    }
    return encode_bdd(c, pool);
}

CardSize encode_size(EncodeStrategy strategy, Rel rel, uint64_t r, uint64_t k, uint64_t cap) {
    if (r == 0) throw UnsupportedError("r must be positive");
    CardSize out;
    bool pairwise = strategy == EncodeStrategy::Pairwise ||
                    (strategy == EncodeStrategy::Auto && rel == Rel::AtMost && k == 1 && r <= 30);
    if (pairwise) {
        if (rel != Rel::AtMost || k != 1)
            throw UnsupportedError("pairwise encoding only supports AtMost-1");
        out.clauses = pairwise_atmost1_clause_count(r);
        out.fresh_vars = 0;
        return out;
    }
    // The counting pass walks the same node recursion without materializing
    // clause literals; refuse only when the node table itself would be huge.
    auto guard = [cap](uint64_t nodes) {
        if (nodes > cap && nodes > (1ULL << 26))
            throw UnsupportedError("size computation exceeds cap");
    };
    uint64_t vars = 0;
    switch (rel) {
        case Rel::AtMost:
            guard((r + 1) * (k + 1));
            out.clauses = bdd_atmost_size(r, static_cast<int64_t>(k), vars);
            out.fresh_vars = vars;
            break;
        case Rel::AtLeast:
            guard((r + 1) * (r - std::min(r, k) + 1));
            out.clauses = bdd_atmost_size(r, static_cast<int64_t>(r) - static_cast<int64_t>(k), vars);
            out.fresh_vars = vars;
            break;
        case Rel::Equals: {
            guard((r + 1) * (k + 2) + (r + 1) * (r - std::min(r, k) + 1));
            out.clauses = bdd_atmost_size(r, static_cast<int64_t>(k), vars);
            out.fresh_vars = vars;
            out.clauses += bdd_atmost_size(r, static_cast<int64_t>(r) - static_cast<int64_t>(k), vars);
            out.fresh_vars += vars;
            break;
        }
    }
    return out;
}

}  // namespace coremax

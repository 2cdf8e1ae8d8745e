#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coremax/formula.hpp"

namespace coremax::testutil {

inline uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}
    uint64_t next() { return splitmix64(state); }
    // uniform in [0, n)
    uint64_t below(uint64_t n) { return next() % n; }
    bool chance(double p) { return static_cast<double>(next() >> 11) * 0x1.0p-53 < p; }
};

// The twelve-clause formula from the multi-blocker construction, over
// x1=1, y1=2, x2=3, y2=4, z1=5, z2=6. Optimum 9 (cost 3).
inline Formula twelve_clause_formula() {
    Formula f;
    auto L = [](int c) { return Lit(c); };
    f.add_clause({L(1)}, Tag::Soft);
    f.add_clause({L(-1), L(-2)}, Tag::Soft);
    f.add_clause({L(2)}, Tag::Soft);
    f.add_clause({L(-1), L(-5)}, Tag::Soft);
    f.add_clause({L(-2), L(-5)}, Tag::Soft);
    f.add_clause({L(3)}, Tag::Soft);
    f.add_clause({L(-3), L(-4)}, Tag::Soft);
    f.add_clause({L(4)}, Tag::Soft);
    f.add_clause({L(-3), L(-5)}, Tag::Soft);
    f.add_clause({L(-4), L(-5)}, Tag::Soft);
    f.add_clause({L(5), L(6)}, Tag::Soft);
    f.add_clause({L(5), L(-6)}, Tag::Soft);
    f.mark_input_complete();
    return f;
}

// Random formula: n in [1,12], m in [1,40], widths 1-3; with probability
// partial_prob roughly 30% of the clauses become hard.
inline Formula random_formula(uint64_t seed, bool allow_partial = true, int max_n = 12,
                              int max_m = 40) {
    Rng rng(seed);
    int n = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(max_n)));
    int m = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(max_m)));
    bool partial = allow_partial && rng.chance(0.3);
    Formula f;
    f.pool().ensure(n);
    for (int i = 0; i < m; ++i) {
        int width = 1 + static_cast<int>(rng.below(3));
        std::vector<Lit> lits;
        for (int j = 0; j < width; ++j) {
            int v = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(n)));
            lits.push_back(Lit(v, rng.chance(0.5)));
        }
        Tag tag = (partial && rng.chance(0.25)) ? Tag::Hard : Tag::Soft;
        f.add_clause(std::move(lits), tag);
    }
    f.mark_input_complete();
    return f;
}

// Bit-parallel truth table over n <= 14 variables: word w, bit b cover the
// assignment with index (w*64+b), variable v true iff bit (v-1) of the index.
struct TruthTable {
    int n;
    std::vector<uint64_t> words;

    static TruthTable constant(int n, bool value) {
        size_t nw = n <= 6 ? 1 : (static_cast<size_t>(1) << (n - 6));
        TruthTable t{n, std::vector<uint64_t>(nw, value ? ~0ULL : 0ULL)};
        if (n < 6 && value) t.words[0] = (1ULL << (1 << n)) - 1;
        return t;
    }

    static TruthTable of_lit(int n, Lit l) {
        TruthTable t = constant(n, false);
        int v = l.var() - 1;
        if (v < 6) {
            static const uint64_t pat[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL,
                                            0xF0F0F0F0F0F0F0F0ULL, 0xFF00FF00FF00FF00ULL,
                                            0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
            uint64_t p = l.positive() ? pat[v] : ~pat[v];
            for (auto& w : t.words) w = p;
        } else {
            for (size_t w = 0; w < t.words.size(); ++w)
                if ((((w >> (v - 6)) & 1) != 0) == l.positive()) t.words[w] = ~0ULL;
        }
        if (n < 6) t.words[0] &= (1ULL << (1 << n)) - 1;
        return t;
    }

    void or_with(const TruthTable& o) {
        for (size_t i = 0; i < words.size(); ++i) words[i] |= o.words[i];
    }
    void and_with(const TruthTable& o) {
        for (size_t i = 0; i < words.size(); ++i) words[i] &= o.words[i];
    }
    bool any() const {
        for (uint64_t w : words)
            if (w) return true;
        return false;
    }
};

// Enumeration-based satisfiability of the non-removed clauses of f.
inline bool truth_table_satisfiable(const Formula& f) {
    int n = f.num_vars();
    TruthTable acc = TruthTable::constant(n, true);
    for (const Clause& c : f.clauses()) {
        if (c.removed) continue;
        TruthTable ct = TruthTable::constant(n, false);
        for (const Lit& l : c.lits) ct.or_with(TruthTable::of_lit(n, l));
        acc.and_with(ct);
        if (!acc.any()) return false;
    }
    return acc.any();
}

// Enumeration-based MaxSAT optimum (satisfied original clauses); returns -1
// when the hard clauses cannot be satisfied.
inline int truth_table_optimum(const Formula& f) {
    int n = f.num_vars();
    int best = -1;
    Model m;
    m.values.assign(static_cast<size_t>(n) + 1, 0);
    for (uint32_t idx = 0; idx < (1u << n); ++idx) {
        for (int v = 1; v <= n; ++v) m.values[static_cast<size_t>(v)] = (idx >> (v - 1)) & 1u;
        bool hard_ok = true;
        int sat = 0;
        for (const Clause& c : f.clauses()) {
            if (c.tag == Tag::Aux || c.removed) continue;
            bool s = false;
            for (int i = 0; i < c.orig_size && !s; ++i) s = m.value(c.lits[static_cast<size_t>(i)]);
            if (s)
                ++sat;
            else if (c.tag == Tag::Hard) {
                hard_ok = false;
                break;
            }
        }
        if (hard_ok && sat > best) best = sat;
    }
    return best;
}

inline Formula make_formula(const std::vector<std::vector<int>>& clauses,
                            const std::vector<std::vector<int>>& hard = {}) {
    Formula f;
    for (const auto& c : clauses) {
        std::vector<Lit> lits;
        for (int x : c) lits.push_back(Lit(x));
        f.add_clause(std::move(lits), Tag::Soft);
    }
    for (const auto& c : hard) {
        std::vector<Lit> lits;
        for (int x : c) lits.push_back(Lit(x));
        f.add_clause(std::move(lits), Tag::Hard);
    }
    f.mark_input_complete();
    return f;
}

}  // namespace coremax::testutil

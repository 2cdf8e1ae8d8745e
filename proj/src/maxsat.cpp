#include "coremax/maxsat.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace coremax {

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "msu1") return Algorithm::Msu1;
    if (name == "msu2") return Algorithm::Msu2;
    if (name == "msu3") return Algorithm::Msu3;
    if (name == "linear") return Algorithm::Linear;
    if (name == "brute") return Algorithm::Brute;
    throw UnsupportedError("unknown algorithm '" + name + "'");
}

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Msu1: return "msu1";
        case Algorithm::Msu2: return "msu2";
        case Algorithm::Msu3: return "msu3";
        case Algorithm::Linear: return "linear";
        case Algorithm::Brute: return "brute";
    }
    return "?";
}

namespace {

struct Ctx {
    const Formula& original;
    const MaxSatConfig& cfg;
    Formula work;
    MaxSatStats stats;
    std::vector<int> tracked;  // all non-auxiliary clause ids
    double start_time;
    double deadline;  // <0: none

    Ctx(const Formula& f, const MaxSatConfig& c) : original(f), cfg(c), work(f) {
        for (int id = 0; id < f.size(); ++id)
            if (f.clause(id).tag != Tag::Aux) tracked.push_back(id);
        start_time = monotonic_seconds();
        deadline = cfg.timeout_s >= 0 ? start_time + cfg.timeout_s : -1.0;
    }

    void check_time() const {
        if (deadline >= 0 && monotonic_seconds() > deadline)
            throw TimeoutError("wall-clock timeout");
    }

    void check_mem(size_t extra = 0) const {
        if (cfg.mem_limit_bytes && work.bytes_estimate() + extra > cfg.mem_limit_bytes)
            throw MemoryBudgetError("clause database exceeds memory budget");
    }

    SolveResult sat_call(const std::vector<int>& track) {
        SolverConfig sc = cfg.solver;
        sc.seed = cfg.seed;
        if (deadline >= 0 && (sc.deadline < 0 || deadline < sc.deadline)) sc.deadline = deadline;
        SolveResult r = solve(work, track, sc);
        ++stats.sat_calls;
        if (r.status == SolveStatus::Indeterminate) {
            if (deadline >= 0 && monotonic_seconds() >= deadline)
                throw TimeoutError("wall-clock timeout");
            throw std::runtime_error("SAT engine budget exceeded");
        }
        return r;
    }

    Var add_blocker(int id) {
        Var b = work.pool().fresh();
        work.append_blocker(id, b);
        ++stats.total_blockers;
        int nb = static_cast<int>(work.clause(id).blockers.size());
        stats.max_blockers_per_clause = std::max(stats.max_blockers_per_clause, nb);
        return b;
    }

    std::vector<int> add_encoding(const EncodedConstraint& enc) {
        size_t extra = 0;
        for (const auto& cl : enc.clauses) extra += 24 + 4 * cl.size();
        check_mem(extra);
        std::vector<int> ids;
        ids.reserve(enc.clauses.size());
        for (const auto& cl : enc.clauses) ids.push_back(work.add_clause(cl, Tag::Aux));
        stats.encoded_clauses += static_cast<int64_t>(enc.clauses.size());
        return ids;
    }

    void precheck_hard() {
        if (!original.has_hard()) return;
        Formula hard;
        hard.pool().ensure(original.num_vars());
        for (const Clause& c : original.clauses())
            if (c.tag == Tag::Hard) hard.add_clause(c.lits, Tag::Hard);
        SolverConfig sc = cfg.solver;
        sc.seed = cfg.seed;
        if (deadline >= 0) sc.deadline = deadline;
        SolveResult r = solve(hard, {}, sc);
        ++stats.sat_calls;
        if (r.status == SolveStatus::Unsat) throw HardClausesUnsatError();
        if (r.status == SolveStatus::Indeterminate) throw TimeoutError("wall-clock timeout");
    }

    MaxSatResult finalize(const Model& full_model, int expected_cost) {
        Model m;
        m.values.assign(static_cast<size_t>(original.num_vars()) + 1, 0);
        for (Var v = 1; v <= original.num_vars(); ++v)
            m.values[static_cast<size_t>(v)] = full_model.values[static_cast<size_t>(v)];
        EvalCounts ev = evaluate(original, m);
        if (expected_cost >= 0 && ev.falsified != expected_cost)
            throw std::logic_error("model cost " + std::to_string(ev.falsified) +
                                   " disagrees with derived optimum " + std::to_string(expected_cost));
        MaxSatResult res;
        res.optimum = ev.satisfied;
        res.cost = ev.falsified;
        res.model = std::move(m);
        res.stats = stats;
        res.stats.wall_time = monotonic_seconds() - start_time;
        return res;
    }

    MaxSatResult trivial_empty() {
        Model m;
        m.values.assign(static_cast<size_t>(original.num_vars()) + 1, 0);
        MaxSatResult res;
        res.model = std::move(m);
        res.stats = stats;
        res.stats.wall_time = monotonic_seconds() - start_time;
        return res;
    }
};

// The pairwise encoder only covers AtMost-1; for any other shape an explicit
// pairwise request falls back to the BDD encoder.
EncodedConstraint encode_card(const CardConstraint& c, VarPool& pool, EncodeStrategy strat) {
    if (strat == EncodeStrategy::Pairwise && !(c.rel == Rel::AtMost && c.bound == 1))
        strat = EncodeStrategy::Bdd;
    return encode(c, pool, strat);
}

// Blocking-variable invariants checked on every satisfying model: at most one
// true blocker per clause, and the total count of true blockers matches (or is
// bounded by) the number of completed unsat iterations.
void verify_blocker_props(const Ctx& ctx, const Model& model, bool equals_mode, int iteration) {
    int total_true = 0;
    for (const Clause& c : ctx.work.clauses()) {
        int per_clause = 0;
        for (Var b : c.blockers)
            if (model.value(b)) ++per_clause;
        if (per_clause > 1)
            throw std::logic_error("more than one blocking variable true in a single clause");
        total_true += per_clause;
    }
    int bound = iteration - 1;
    if (equals_mode ? (total_true != bound) : (total_true > bound))
        throw std::logic_error("true blocking variable count violates the iteration bound");
}

MaxSatResult run_core_relax(const Formula& f, const MaxSatConfig& cfg, bool msu2) {
    Ctx ctx(f, cfg);
    if (f.num_original() == 0) return ctx.trivial_empty();
    ctx.precheck_hard();

    const EncodeStrategy strat =
        cfg.encoding.value_or(msu2 ? EncodeStrategy::Bdd : EncodeStrategy::Pairwise);
    const bool equals_mode = cfg.use_equals.value_or(!msu2);
    const int m = f.num_original();
    // The m/2+1 bound rests on the fact that every nonempty clause set has an
    // assignment satisfying at least half of it; empty clauses and hard
    // clauses both step outside that argument.
    bool johnson = !f.has_hard();
    for (const Clause& c : f.clauses())
        if (c.lits.empty()) johnson = false;
    const int iter_cap = johnson ? m / 2 + 1 : m + 1;

    while (true) {
        ctx.check_time();
        SolveResult r = ctx.sat_call(ctx.tracked);
        ++ctx.stats.iterations;
        if (r.status == SolveStatus::Sat) {
            verify_blocker_props(ctx, r.model, equals_mode, ctx.stats.iterations);
            if (ctx.stats.iterations > iter_cap)
                throw std::logic_error("iteration bound exceeded");
            return ctx.finalize(r.model, ctx.stats.cores_found);
        }
        ++ctx.stats.cores_found;
        if (ctx.stats.cores_found > m) throw std::logic_error("more cores than clauses");

        std::vector<Lit> new_blockers;
        for (int id : r.core) {
            if (ctx.work.clause(id).tag != Tag::Soft) continue;
            new_blockers.push_back(Lit(ctx.add_blocker(id), true));
        }
        if (new_blockers.empty()) throw HardClausesUnsatError();

        if (msu2) {
            // Re-state AtMost-1 over each grown per-clause blocker list.
            for (int id : r.core) {
                const Clause& c = ctx.work.clause(id);
                if (c.tag != Tag::Soft || c.blockers.size() < 2) continue;
                std::vector<Lit> bl;
                for (Var b : c.blockers) bl.push_back(Lit(b, true));
                ctx.add_encoding(encode({bl, Rel::AtMost, 1}, ctx.work.pool(), strat));
                ++ctx.stats.per_clause_atmost1;
            }
        }

        if (new_blockers.size() >= 2) {
            if (strat == EncodeStrategy::Pairwise && cfg.mem_limit_bytes) {
                uint64_t cnt = pairwise_atmost1_clause_count(new_blockers.size());
                ctx.check_mem(static_cast<size_t>(cnt) * 32);
            }
            ctx.add_encoding(encode({new_blockers, Rel::AtMost, 1}, ctx.work.pool(), strat));
        }
        if (equals_mode) {
            EncodedConstraint at_least;
            at_least.clauses.push_back(new_blockers);
            ctx.add_encoding(at_least);
        }
    }
}

MaxSatResult run_msu3(const Formula& f, const MaxSatConfig& cfg) {
    Ctx ctx(f, cfg);
    if (f.num_original() == 0) return ctx.trivial_empty();
    ctx.precheck_hard();

    const EncodeStrategy strat = cfg.encoding.value_or(EncodeStrategy::Bdd);
    const bool equals_mode = cfg.use_equals.value_or(false);
    const int m = f.num_original();

    // Phase 1: peel off disjoint cores (their soft clauses leave the formula).
    std::vector<std::vector<int>> cores;
    Model phase1_model;
    while (true) {
        ctx.check_time();
        SolveResult r = ctx.sat_call(ctx.tracked);
        ++ctx.stats.iterations;
        if (r.status == SolveStatus::Sat) {
            phase1_model = std::move(r.model);
            break;
        }
        ++ctx.stats.cores_found;
        std::vector<int> soft_ids;
        for (int id : r.core)
            if (ctx.work.clause(id).tag == Tag::Soft) soft_ids.push_back(id);
        if (soft_ids.empty()) throw HardClausesUnsatError();
        for (int id : soft_ids) ctx.work.remove_clause(id);
        cores.push_back(std::move(soft_ids));
    }
    ctx.stats.disjoint_cores = static_cast<int>(cores.size());

    int lambda = static_cast<int>(cores.size());
    if (lambda == 0) {
        ctx.stats.lower_bound = 0;
        return ctx.finalize(phase1_model, 0);
    }

    std::vector<Lit> all_blockers;
    for (const auto& core : cores) {
        for (int id : core) {
            ctx.work.restore_clause(id);
            all_blockers.push_back(Lit(ctx.add_blocker(id), true));
        }
    }

    std::vector<int> constraint_ids;
    auto reencode = [&]() {
        for (int id : constraint_ids) ctx.work.remove_clause(id);
        CardConstraint c{all_blockers, equals_mode ? Rel::Equals : Rel::AtMost, lambda};
        constraint_ids = ctx.add_encoding(encode_card(c, ctx.work.pool(), strat));
    };
    reencode();

    // Phase 2: raise the lower bound until satisfiable.
    while (true) {
        ctx.check_time();
        SolveResult r = ctx.sat_call(ctx.tracked);
        ++ctx.stats.iterations;
        if (r.status == SolveStatus::Sat) {
            ctx.stats.lower_bound = lambda;
            if (ctx.stats.total_blockers > m)
                throw std::logic_error("blocking variable count exceeds clause count");
            return ctx.finalize(r.model, lambda);
        }
        ++ctx.stats.cores_found;
        bool any_soft = false;
        for (int id : r.core) {
            const Clause& c = ctx.work.clause(id);
            if (c.tag != Tag::Soft) continue;
            any_soft = true;
            if (c.blockers.empty()) all_blockers.push_back(Lit(ctx.add_blocker(id), true));
        }
        if (!any_soft) throw HardClausesUnsatError();
        ++lambda;
        if (lambda > m) throw std::logic_error("lower bound exceeds clause count");
        reencode();
    }
}

MaxSatResult run_linear(const Formula& f, const MaxSatConfig& cfg) {
    Ctx ctx(f, cfg);
    if (f.num_original() == 0) return ctx.trivial_empty();

    const EncodeStrategy strat = cfg.encoding.value_or(EncodeStrategy::Bdd);
    std::vector<Lit> blockers;
    for (int id = 0; id < f.size(); ++id)
        if (ctx.work.clause(id).tag == Tag::Soft) blockers.push_back(Lit(ctx.add_blocker(id), true));

    std::vector<int> constraint_ids;
    Model best;
    int best_cost = -1;
    while (true) {
        ctx.check_time();
        SolveResult r = ctx.sat_call({});
        ++ctx.stats.iterations;
        if (r.status == SolveStatus::Unsat) {
            if (best_cost < 0) throw HardClausesUnsatError();
            break;
        }
        Model m;
        m.values.assign(static_cast<size_t>(f.num_vars()) + 1, 0);
        for (Var v = 1; v <= f.num_vars(); ++v)
            m.values[static_cast<size_t>(v)] = r.model.values[static_cast<size_t>(v)];
        int cost = evaluate(f, m).falsified;
        if (best_cost >= 0 && cost >= best_cost)
            throw std::logic_error("linear search failed to decrease cost");
        best = std::move(r.model);
        best_cost = cost;
        if (cost == 0) break;  // AtMost-(-1) is immediately unsatisfiable
        for (int id : constraint_ids) ctx.work.remove_clause(id);
        CardConstraint c{blockers, Rel::AtMost, cost - 1};
        constraint_ids = ctx.add_encoding(encode_card(c, ctx.work.pool(), strat));
    }
    return ctx.finalize(best, best_cost);
}

}  // namespace

MaxSatResult solve_msu1(const Formula& f, const MaxSatConfig& cfg) { return run_core_relax(f, cfg, false); }
MaxSatResult solve_msu2(const Formula& f, const MaxSatConfig& cfg) { return run_core_relax(f, cfg, true); }
MaxSatResult solve_msu3(const Formula& f, const MaxSatConfig& cfg) { return run_msu3(f, cfg); }
MaxSatResult solve_linear(const Formula& f, const MaxSatConfig& cfg) { return run_linear(f, cfg); }

MaxSatResult brute_force(const Formula& f) {
    const int n = f.num_vars();
    if (n > 24) throw UnsupportedError("brute force is limited to 24 variables");
    double start = monotonic_seconds();

    Model m;
    m.values.assign(static_cast<size_t>(n) + 1, 0);
    int best = -1;
    Model best_model;
    const uint32_t limit = n == 0 ? 1u : (1u << n);
    for (uint32_t idx = 0; idx < limit; ++idx) {
        // Bit n-v of idx is variable v, so ascending idx is lexicographic
        // order over (x1, ..., xn); strict improvement keeps the first hit.
        for (int v = 1; v <= n; ++v)
            m.values[static_cast<size_t>(v)] = (idx >> (n - v)) & 1u;
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
        if (!hard_ok) continue;
        if (sat > best) {
            best = sat;
            best_model = m;
        }
    }
    if (best < 0) throw HardClausesUnsatError();

    MaxSatResult res;
    res.optimum = best;
    res.cost = f.num_original() - best;
    res.model = std::move(best_model);
    res.stats.wall_time = monotonic_seconds() - start;
    return res;
}

MaxSatResult solve_maxsat(const Formula& f, Algorithm algo, const MaxSatConfig& cfg) {
    switch (algo) {
        case Algorithm::Msu1: return solve_msu1(f, cfg);
        case Algorithm::Msu2: return solve_msu2(f, cfg);
        case Algorithm::Msu3: return solve_msu3(f, cfg);
        case Algorithm::Linear: return solve_linear(f, cfg);
        case Algorithm::Brute: return brute_force(f);
    }
    throw UnsupportedError("unknown algorithm");
}

}  // namespace coremax

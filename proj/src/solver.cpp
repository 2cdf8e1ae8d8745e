#include "coremax/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace coremax {

double monotonic_seconds() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

namespace {

// Internal literal encoding: 2*var + sign, sign 1 = negated. Internal vars
// are 0-based; external formula vars map to v-1, selectors come after.
using ILit = int;
inline ILit mk_lit(int v, bool neg) { return 2 * v + (neg ? 1 : 0); }
inline int lit_var(ILit l) { return l >> 1; }
inline bool lit_neg(ILit l) { return (l & 1) != 0; }
inline ILit lit_not(ILit l) { return l ^ 1; }

constexpr int8_t KUndef = -1;

struct Cls {
    std::vector<ILit> lits;
    double act = 0.0;
    bool learnt = false;
    bool deleted = false;
};

// Max-heap on activity, ties broken by variable index for determinism.
class VarOrder {
public:
    explicit VarOrder(const std::vector<double>& act) : act_(act) {}

    void grow(int nvars) { pos_.resize(static_cast<size_t>(nvars), -1); }

    bool contains(int v) const { return pos_[static_cast<size_t>(v)] >= 0; }
    bool empty() const { return heap_.empty(); }

    void insert(int v) {
        if (contains(v)) return;
        pos_[static_cast<size_t>(v)] = static_cast<int>(heap_.size());
        heap_.push_back(v);
        up(static_cast<int>(heap_.size()) - 1);
    }

    int pop() {
        int v = heap_[0];
        heap_[0] = heap_.back();
        pos_[static_cast<size_t>(heap_[0])] = 0;
        heap_.pop_back();
        pos_[static_cast<size_t>(v)] = -1;
        if (!heap_.empty()) down(0);
        return v;
    }

    void update(int v) {
        if (contains(v)) up(pos_[static_cast<size_t>(v)]);
    }

private:
    bool lt(int x, int y) const {
        double ax = act_[static_cast<size_t>(x)], ay = act_[static_cast<size_t>(y)];
        return ax > ay || (ax == ay && x < y);
    }
    void up(int i) {
        int v = heap_[static_cast<size_t>(i)];
        while (i > 0) {
            int p = (i - 1) >> 1;
            if (!lt(v, heap_[static_cast<size_t>(p)])) break;
            heap_[static_cast<size_t>(i)] = heap_[static_cast<size_t>(p)];
            pos_[static_cast<size_t>(heap_[static_cast<size_t>(i)])] = i;
            i = p;
        }
        heap_[static_cast<size_t>(i)] = v;
        pos_[static_cast<size_t>(v)] = i;
    }
    void down(int i) {
        int v = heap_[static_cast<size_t>(i)];
        int n = static_cast<int>(heap_.size());
        while (true) {
            int c = 2 * i + 1;
            if (c >= n) break;
            if (c + 1 < n && lt(heap_[static_cast<size_t>(c + 1)], heap_[static_cast<size_t>(c)])) ++c;
            if (!lt(heap_[static_cast<size_t>(c)], v)) break;
            heap_[static_cast<size_t>(i)] = heap_[static_cast<size_t>(c)];
            pos_[static_cast<size_t>(heap_[static_cast<size_t>(i)])] = i;
            i = c;
        }
        heap_[static_cast<size_t>(i)] = v;
        pos_[static_cast<size_t>(v)] = i;
    }

    const std::vector<double>& act_;
    std::vector<int> heap_;
    std::vector<int> pos_;
};

inline uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Engine {
public:
    Engine(const Formula& f, const std::vector<int>& tracked, const SolverConfig& cfg)
        : cfg_(cfg), order_(activity_) {
        next_vars_ = f.num_vars();
        int nint = next_vars_ + static_cast<int>(tracked.size());
        init_vars(nint);

        std::vector<int> sel_index(static_cast<size_t>(f.size()), -1);
        for (size_t t = 0; t < tracked.size(); ++t) {
            sel_index[static_cast<size_t>(tracked[t])] = static_cast<int>(t);
            selector_clause_.push_back(tracked[t]);
        }

        // Tracked clauses become (lits | ~s), solved under assumption s.
        for (int id = 0; id < f.size() && ok_; ++id) {
            const Clause& c = f.clause(id);
            if (c.removed) continue;
            int t = sel_index[static_cast<size_t>(id)];
            if (t >= 0) {
                std::vector<ILit> lits = convert(c.lits);
                lits.push_back(mk_lit(next_vars_ + t, true));
                add_clause(std::move(lits));
                assumptions_.push_back(mk_lit(next_vars_ + t, false));
            } else {
                add_clause(convert(c.lits));
            }
        }

        if (cfg_.seed != 0) {
            uint64_t s = cfg_.seed;
            for (size_t v = 0; v < polarity_.size(); ++v) polarity_[v] = (splitmix64(s) & 1) != 0;
        }
    }

    SolveResult run(const Formula& f) {
        SolveResult res;
        if (!ok_ || propagate() != -1) {
            res.status = SolveStatus::Unsat;
            return res;  // contradiction without assumptions: empty core
        }
        int status = search();
        if (status == 0) {
            res.status = SolveStatus::Indeterminate;
        } else if (status > 0) {
            res.status = SolveStatus::Sat;
            res.model.values.assign(static_cast<size_t>(f.num_vars()) + 1, 0);
            for (int v = 1; v <= f.num_vars(); ++v)
                res.model.values[static_cast<size_t>(v)] = (assigns_[static_cast<size_t>(v - 1)] == 1);
        } else {
            res.status = SolveStatus::Unsat;
            for (ILit l : conflict_) {
                int v = lit_var(l);
                if (v >= next_vars_) res.core.push_back(selector_clause_[static_cast<size_t>(v - next_vars_)]);
            }
            std::sort(res.core.begin(), res.core.end());
        }
        return res;
    }

private:
    void init_vars(int n) {
        assigns_.assign(static_cast<size_t>(n), KUndef);
        level_.assign(static_cast<size_t>(n), 0);
        reason_.assign(static_cast<size_t>(n), -1);
        activity_.assign(static_cast<size_t>(n), 0.0);
        polarity_.assign(static_cast<size_t>(n), true);  // branch negative first
        seen_.assign(static_cast<size_t>(n), 0);
        watches_.assign(static_cast<size_t>(2 * n), {});
        order_.grow(n);
        for (int v = 0; v < n; ++v) order_.insert(v);
    }

    std::vector<ILit> convert(const std::vector<Lit>& lits) const {
        std::vector<ILit> out;
        out.reserve(lits.size());
        for (const Lit& l : lits) out.push_back(mk_lit(l.var() - 1, !l.positive()));
        return out;
    }

    int8_t lit_value(ILit l) const {
        int8_t a = assigns_[static_cast<size_t>(lit_var(l))];
        if (a == KUndef) return KUndef;
        return static_cast<int8_t>(a ^ static_cast<int8_t>(lit_neg(l) ? 1 : 0));
    }

    void add_clause(std::vector<ILit> lits) {
        std::sort(lits.begin(), lits.end());
        lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
        for (size_t i = 0; i + 1 < lits.size(); ++i)
            if (lits[i + 1] == lit_not(lits[i])) return;  // tautology
        if (lits.empty()) {
            ok_ = false;
            return;
        }
        if (lits.size() == 1) {
            if (lit_value(lits[0]) == 0)
                ok_ = false;
            else if (lit_value(lits[0]) == KUndef)
                enqueue(lits[0], -1);
            return;
        }
        attach(static_cast<int>(db_.size()), lits);
        db_.push_back(Cls{std::move(lits), 0.0, false, false});
    }

    void attach(int ci, const std::vector<ILit>& lits) {
        watches_[static_cast<size_t>(lit_not(lits[0]))].push_back(ci);
        watches_[static_cast<size_t>(lit_not(lits[1]))].push_back(ci);
    }

    void enqueue(ILit l, int from) {
        assigns_[static_cast<size_t>(lit_var(l))] = lit_neg(l) ? 0 : 1;
        level_[static_cast<size_t>(lit_var(l))] = decision_level();
        reason_[static_cast<size_t>(lit_var(l))] = from;
        trail_.push_back(l);
    }

    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    // Returns conflicting clause index, or -1.
    int propagate() {
        while (qhead_ < trail_.size()) {
            ILit p = trail_[qhead_++];
            std::vector<int>& ws = watches_[static_cast<size_t>(p)];
            size_t keep = 0;
            for (size_t i = 0; i < ws.size(); ++i) {
                int ci = ws[i];
                Cls& c = db_[static_cast<size_t>(ci)];
                std::vector<ILit>& cl = c.lits;
                // Make sure the false literal is cl[1].
                ILit false_lit = lit_not(p);
                if (cl[0] == false_lit) std::swap(cl[0], cl[1]);
                if (lit_value(cl[0]) == 1) {
                    ws[keep++] = ci;
                    continue;
                }
                bool moved = false;
                for (size_t k = 2; k < cl.size(); ++k) {
                    if (lit_value(cl[k]) != 0) {
                        std::swap(cl[1], cl[k]);
                        watches_[static_cast<size_t>(lit_not(cl[1]))].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                // Unit or conflicting.
                ws[keep++] = ci;
                if (lit_value(cl[0]) == 0) {
                    for (size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
                    ws.resize(keep);
                    qhead_ = trail_.size();
                    return ci;
                }
                enqueue(cl[0], ci);
            }
            ws.resize(keep);
        }
        return -1;
    }

    void bump_var(int v) {
        activity_[static_cast<size_t>(v)] += var_inc_;
        if (activity_[static_cast<size_t>(v)] > 1e100) {
            for (double& a : activity_) a *= 1e-100;
            var_inc_ *= 1e-100;
        }
        order_.update(v);
    }

    void bump_clause(Cls& c) {
        c.act += cla_inc_;
        if (c.act > 1e20) {
            for (Cls& d : db_)
                if (d.learnt) d.act *= 1e-20;
            cla_inc_ *= 1e-20;
        }
    }

    // First-UIP learning.
    void analyze(int confl, std::vector<ILit>& learnt, int& bt_level) {
        learnt.clear();
        learnt.push_back(0);  // placeholder for the asserting literal
        int counter = 0;
        ILit p = -1;
        size_t index = trail_.size();
        do {
            Cls& c = db_[static_cast<size_t>(confl)];
            if (c.learnt) bump_clause(c);
            for (size_t j = (p == -1 ? 0 : 1); j < c.lits.size(); ++j) {
                ILit q = c.lits[j];
                int v = lit_var(q);
                if (!seen_[static_cast<size_t>(v)] && level_[static_cast<size_t>(v)] > 0) {
                    seen_[static_cast<size_t>(v)] = 1;
                    bump_var(v);
                    if (level_[static_cast<size_t>(v)] >= decision_level())
                        ++counter;
                    else
                        learnt.push_back(q);
                }
            }
            while (!seen_[static_cast<size_t>(lit_var(trail_[index - 1]))]) --index;
            p = trail_[--index];
            confl = reason_[static_cast<size_t>(lit_var(p))];
            seen_[static_cast<size_t>(lit_var(p))] = 0;
            --counter;
        } while (counter > 0);
        learnt[0] = lit_not(p);

        // Backtrack level = max level among the other literals.
        bt_level = 0;
        size_t max_i = 1;
        for (size_t i = 1; i < learnt.size(); ++i) {
            int lv = level_[static_cast<size_t>(lit_var(learnt[i]))];
            if (lv > bt_level) {
                bt_level = lv;
                max_i = i;
            }
        }
        if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
        for (size_t i = 1; i < learnt.size(); ++i) seen_[static_cast<size_t>(lit_var(learnt[i]))] = 0;
    }

    // Failed-assumption analysis: p is an assumption literal that is false
    // (or conflicts); produces the subset of assumptions forcing it.
    void analyze_final(ILit p) {
        conflict_.clear();
        conflict_.push_back(p);
        if (decision_level() == 0) return;
        seen_[static_cast<size_t>(lit_var(p))] = 1;
        for (size_t i = trail_.size(); i-- > static_cast<size_t>(trail_lim_[0]);) {
            int v = lit_var(trail_[i]);
            if (!seen_[static_cast<size_t>(v)]) continue;
            int r = reason_[static_cast<size_t>(v)];
            if (r == -1) {
                conflict_.push_back(lit_not(trail_[i]));
            } else {
                const Cls& c = db_[static_cast<size_t>(r)];
                for (size_t j = 1; j < c.lits.size(); ++j)
                    if (level_[static_cast<size_t>(lit_var(c.lits[j]))] > 0)
                        seen_[static_cast<size_t>(lit_var(c.lits[j]))] = 1;
            }
            seen_[static_cast<size_t>(v)] = 0;
        }
        seen_[static_cast<size_t>(lit_var(p))] = 0;
    }

    void cancel_until(int lvl) {
        if (decision_level() <= lvl) return;
        for (size_t i = trail_.size(); i-- > static_cast<size_t>(trail_lim_[static_cast<size_t>(lvl)]);) {
            int v = lit_var(trail_[i]);
            polarity_[static_cast<size_t>(v)] = (assigns_[static_cast<size_t>(v)] == 0);
            assigns_[static_cast<size_t>(v)] = KUndef;
            reason_[static_cast<size_t>(v)] = -1;
            order_.insert(v);
        }
        trail_.resize(static_cast<size_t>(trail_lim_[static_cast<size_t>(lvl)]));
        trail_lim_.resize(static_cast<size_t>(lvl));
        qhead_ = trail_.size();
    }

    void reduce_db() {
        std::vector<int> learnts;
        for (int i = 0; i < static_cast<int>(db_.size()); ++i)
            if (db_[static_cast<size_t>(i)].learnt && !db_[static_cast<size_t>(i)].deleted)
                learnts.push_back(i);
        std::sort(learnts.begin(), learnts.end(), [&](int a, int b) {
            const Cls& ca = db_[static_cast<size_t>(a)];
            const Cls& cb = db_[static_cast<size_t>(b)];
            if (ca.act != cb.act) return ca.act < cb.act;
            return a < b;
        });
        std::vector<char> locked(db_.size(), 0);
        for (ILit l : trail_) {
            int r = reason_[static_cast<size_t>(lit_var(l))];
            if (r >= 0) locked[static_cast<size_t>(r)] = 1;
        }
        size_t target = learnts.size() / 2;
        size_t removed = 0;
        for (int ci : learnts) {
            if (removed >= target) break;
            Cls& c = db_[static_cast<size_t>(ci)];
            if (locked[static_cast<size_t>(ci)] || c.lits.size() <= 2) continue;
            c.deleted = true;
            c.lits.clear();
            c.lits.shrink_to_fit();
            ++removed;
        }
        rebuild_watches();
    }

    void rebuild_watches() {
        for (auto& w : watches_) w.clear();
        for (int ci = 0; ci < static_cast<int>(db_.size()); ++ci) {
            Cls& c = db_[static_cast<size_t>(ci)];
            if (c.deleted) continue;
            // Watched literals must not be false unless the clause is
            // satisfied earlier in the trail; at this point we are at a
            // consistent state right after backtracking to level 0 or mid
            // search with watches re-derivable from scratch.
            attach_repair(ci, c.lits);
        }
    }

    // Re-pick two watchable literals for a clause. Non-false literals are
    // always preferred; among false ones, higher assignment level wins so the
    // watch invariant (false watch outlives the satisfying watch) holds.
    void attach_repair(int ci, std::vector<ILit>& cl) {
        auto rank = [&](ILit l) {
            int8_t v = lit_value(l);
            if (v == KUndef) return std::numeric_limits<int>::max();
            if (v == 1) return std::numeric_limits<int>::max() - 1;
            return level_[static_cast<size_t>(lit_var(l))];
        };
        // Move two best-ranked literals to the front.
        for (int slot = 0; slot < 2; ++slot) {
            size_t best = static_cast<size_t>(slot);
            for (size_t k = static_cast<size_t>(slot); k < cl.size(); ++k)
                if (rank(cl[k]) > rank(cl[best]) ||
                    (rank(cl[k]) == rank(cl[best]) && cl[k] < cl[best]))
                    best = k;
            std::swap(cl[static_cast<size_t>(slot)], cl[best]);
        }
        attach(ci, cl);
    }

    ILit pick_branch() {
        while (!order_.empty()) {
            // Peek deterministically.
            int v = order_.pop();
            if (assigns_[static_cast<size_t>(v)] == KUndef)
                return mk_lit(v, polarity_[static_cast<size_t>(v)]);
        }
        return -1;
    }

    // 1 = SAT, -1 = UNSAT (conflict_ holds failed assumptions), 0 = budget.
    int search() {
        if (cfg_.deadline >= 0 && monotonic_seconds() > cfg_.deadline) return 0;
        int64_t conflicts = 0;
        double restart_limit = cfg_.restart_first;
        int64_t conflicts_since_restart = 0;
        double max_learnts = std::max<double>(1000.0, static_cast<double>(db_.size()) / 3.0);
        std::vector<ILit> learnt;

        while (true) {
            int confl = propagate();
            if (confl != -1) {
                ++conflicts;
                ++conflicts_since_restart;
                if (decision_level() == 0) {
                    conflict_.clear();
                    return -1;
                }
                int bt;
                analyze(confl, learnt, bt);
                cancel_until(bt);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], -1);
                } else {
                    int ci = static_cast<int>(db_.size());
                    db_.push_back(Cls{learnt, cla_inc_, true, false});
                    attach(ci, db_.back().lits);
                    enqueue(learnt[0], ci);
                    ++num_learnts_;
                }
                var_inc_ /= cfg_.var_decay;
                cla_inc_ /= cfg_.clause_decay;
                if (cfg_.conflict_budget >= 0 && conflicts > cfg_.conflict_budget) return 0;
                if (cfg_.deadline >= 0 && (conflicts & 255) == 0 && monotonic_seconds() > cfg_.deadline)
                    return 0;
            } else {
                if (conflicts_since_restart >= static_cast<int64_t>(restart_limit)) {
                    conflicts_since_restart = 0;
                    restart_limit *= cfg_.restart_inc;
                    cancel_until(0);
                    continue;
                }
                if (static_cast<double>(num_learnts_) >= max_learnts) {
                    reduce_db();
                    num_learnts_ /= 2;
                    max_learnts *= 1.3;
                }
                // Establish assumptions, then decide.
                ILit next = -1;
                while (decision_level() < static_cast<int>(assumptions_.size())) {
                    ILit p = assumptions_[static_cast<size_t>(decision_level())];
                    if (lit_value(p) == 1) {
                        trail_lim_.push_back(static_cast<int>(trail_.size()));
                    } else if (lit_value(p) == 0) {
                        analyze_final(lit_not(p));
                        return -1;
                    } else {
                        next = p;
                        break;
                    }
                }
                if (next == -1) {
                    next = pick_branch();
                    if (next == -1) return 1;  // all assigned
                }
                trail_lim_.push_back(static_cast<int>(trail_.size()));
                enqueue(next, -1);
            }
        }
    }

    const SolverConfig& cfg_;
    bool ok_ = true;
    int next_vars_ = 0;  // first selector's internal index

    std::vector<Cls> db_;
    std::vector<std::vector<int>> watches_;
    std::vector<int8_t> assigns_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<ILit> trail_;
    std::vector<int> trail_lim_;
    size_t qhead_ = 0;
    std::vector<char> seen_;
    std::vector<double> activity_;
    std::vector<char> polarity_;
    VarOrder order_;
    double var_inc_ = 1.0;
    double cla_inc_ = 1.0;
    int64_t num_learnts_ = 0;

    std::vector<ILit> assumptions_;
    std::vector<int> selector_clause_;  // selector offset -> tracked clause id
    std::vector<ILit> conflict_;
};

}  // namespace

SolveResult solve(const Formula& f, const std::vector<int>& tracked, const SolverConfig& cfg) {
    Engine e(f, tracked, cfg);
    return e.run(f);
}

std::vector<int> minimize_core(const Formula& f, const std::vector<int>& tracked,
                               const std::vector<int>& core, const SolverConfig& cfg) {
    std::vector<char> in_tracked(static_cast<size_t>(f.size()), 0);
    for (int id : tracked) in_tracked[static_cast<size_t>(id)] = 1;

    // Work on a copy where tracked clauses outside the current core are
    // dropped; the untracked context always stays.
    Formula work = f;
    std::vector<char> in_core(static_cast<size_t>(f.size()), 0);
    for (int id : core) in_core[static_cast<size_t>(id)] = 1;
    for (int id = 0; id < f.size(); ++id)
        if (in_tracked[static_cast<size_t>(id)] && !in_core[static_cast<size_t>(id)])
            work.remove_clause(id);

    std::vector<int> current = core;
    std::sort(current.begin(), current.end());
    {
        SolveResult r = solve(work, current, cfg);
        if (r.status != SolveStatus::Unsat)
            throw InvalidCoreError("minimize_core: input set is not an unsatisfiable core");
        current = r.core;
        for (int id : core)
            if (!std::binary_search(current.begin(), current.end(), id)) work.remove_clause(id);
    }

    for (size_t i = 0; i < current.size();) {
        int cand = current[i];
        work.remove_clause(cand);
        std::vector<int> rest;
        rest.reserve(current.size() - 1);
        for (int id : current)
            if (id != cand) rest.push_back(id);
        SolveResult r = solve(work, rest, cfg);
        if (r.status == SolveStatus::Unsat) {
            // cand is redundant; the returned core may drop more clauses.
            for (int id : rest)
                if (!std::binary_search(r.core.begin(), r.core.end(), id)) work.remove_clause(id);
            current = r.core;
            i = 0;
        } else {
            work.restore_clause(cand);
            ++i;
        }
    }
    return current;
}

}  // namespace coremax

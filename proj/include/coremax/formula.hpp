#pragma once

#include <cstdint>
#include <cstdlib>
#include <iosfwd>
#include <string>
#include <vector>

#include "coremax/errors.hpp"

namespace coremax {

// Variables are 1-based, matching DIMACS.
using Var = int;

// A literal is a nonzero signed variable index, DIMACS style.
struct Lit {
    int code = 0;

    Lit() = default;
    explicit Lit(int c) : code(c) {}
    Lit(Var v, bool positive) : code(positive ? v : -v) {}

    Var var() const { return std::abs(code); }
    bool positive() const { return code > 0; }
    Lit operator~() const { return Lit(-code); }
    bool operator==(const Lit& o) const { return code == o.code; }
    bool operator!=(const Lit& o) const { return code != o.code; }
    bool operator<(const Lit& o) const { return code < o.code; }
};

enum class Tag { Soft, Hard, Aux };

// Clause ids are indices into Formula::clauses() and stay stable for the
// whole run; blocking variables are appended in place under the same id.
struct Clause {
    std::vector<Lit> lits;
    Tag tag = Tag::Soft;
    int orig_size = 0;               // literals before any blocker was appended
    std::vector<Var> blockers;       // appended blocking variables, in order
    bool removed = false;            // soft-deleted (msu3 phase 1, retired encodings)
};

// Hands out dense 1-based variable indices.
class VarPool {
public:
    Var fresh() { return ++last_; }
    Var last() const { return last_; }
    void ensure(Var v) {
        if (v > last_) last_ = v;
    }

private:
    Var last_ = 0;
};

struct Model {
    // Indexed by variable; values[0] unused.
    std::vector<uint8_t> values;

    bool covers(Var v) const { return v >= 1 && v < static_cast<Var>(values.size()); }
    bool value(Var v) const { return values[static_cast<size_t>(v)] != 0; }
    bool value(Lit l) const { return value(l.var()) == l.positive(); }
};

class Formula {
public:
    int add_clause(std::vector<Lit> lits, Tag tag);
    void mark_input_complete() { num_original_ = static_cast<int>(clauses_.size()); }

    Clause& clause(int id) { return clauses_[static_cast<size_t>(id)]; }
    const Clause& clause(int id) const { return clauses_[static_cast<size_t>(id)]; }
    const std::vector<Clause>& clauses() const { return clauses_; }
    int size() const { return static_cast<int>(clauses_.size()); }

    int num_original() const { return num_original_; }
    int num_vars() const { return pool_.last(); }
    VarPool& pool() { return pool_; }
    const VarPool& pool() const { return pool_; }

    void append_blocker(int id, Var b);
    void remove_clause(int id) { clauses_[static_cast<size_t>(id)].removed = true; }
    void restore_clause(int id) { clauses_[static_cast<size_t>(id)].removed = false; }

    bool has_hard() const;

    // Rough clause-database footprint, used for memory budgeting.
    size_t bytes_estimate() const;

    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

private:
    std::vector<Clause> clauses_;
    VarPool pool_;
    int num_original_ = 0;
    std::vector<std::string> warnings_;
};

struct EvalCounts {
    int satisfied = 0;
    int falsified = 0;
};

// Counts over the original (non-auxiliary, non-removed) clauses only, using
// each clause's original literals; blockers are ignored.
EvalCounts evaluate(const Formula& f, const Model& m);

Formula parse_dimacs(std::istream& in);
Formula parse_dimacs(const std::string& text);
Formula parse_dimacs_file(const std::string& path);

// Emits the original (soft/hard) clauses; WCNF iff the formula has hard
// clauses. parse(write(f)) reproduces clause multiset, tags and n.
void write_dimacs(const Formula& f, std::ostream& out);
std::string write_dimacs(const Formula& f);

}  // namespace coremax

#include "coremax/formula.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace coremax {

int Formula::add_clause(std::vector<Lit> lits, Tag tag) {
    Clause c;
    c.orig_size = static_cast<int>(lits.size());
    c.lits = std::move(lits);
    c.tag = tag;
    for (const Lit& l : c.lits) pool_.ensure(l.var());
    clauses_.push_back(std::move(c));
    return static_cast<int>(clauses_.size()) - 1;
}

void Formula::append_blocker(int id, Var b) {
    Clause& c = clause(id);
    c.lits.push_back(Lit(b, true));
    c.blockers.push_back(b);
    pool_.ensure(b);
}

bool Formula::has_hard() const {
    for (const Clause& c : clauses_)
        if (c.tag == Tag::Hard) return true;
    return false;
}

size_t Formula::bytes_estimate() const {
    size_t total = 0;
    for (const Clause& c : clauses_) {
        if (c.removed) continue;
        total += 24 + 4 * c.lits.size();
    }
    return total;
}

EvalCounts evaluate(const Formula& f, const Model& m) {
    if (!m.covers(f.num_vars()) && f.num_vars() > 0)
        throw std::invalid_argument("evaluate: model does not cover all formula variables");
    EvalCounts out;
    for (const Clause& c : f.clauses()) {
        if (c.tag == Tag::Aux || c.removed) continue;
        bool sat = false;
        for (int i = 0; i < c.orig_size && !sat; ++i) sat = m.value(c.lits[static_cast<size_t>(i)]);
        if (sat)
            ++out.satisfied;
        else
            ++out.falsified;
    }
    return out;
}

namespace {

// Whitespace-delimited token scanner that drops 'c ...' comment lines.
class Scanner {
public:
    explicit Scanner(std::istream& in) : in_(in) {}

    bool next(std::string& tok) {
        while (in_ >> tok) {
            if (tok == "c") {
                std::string rest;
                std::getline(in_, rest);
                continue;
            }
            return true;
        }
        return false;
    }

private:
    std::istream& in_;
};

long to_long(const std::string& tok, const char* what) {
    size_t pos = 0;
    long v;
    try {
        v = std::stol(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError(std::string("malformed ") + what + " '" + tok + "'");
    }
    if (pos != tok.size()) throw ParseError(std::string("malformed ") + what + " '" + tok + "'");
    return v;
}

}  // namespace

Formula parse_dimacs(std::istream& in) {
    Formula f;

    // The header is line-structured: the optional WCNF top weight is only
    // distinguishable from a clause weight by being on the 'p' line.
    std::string line;
    bool seen_header = false;
    bool wcnf = false;
    long declared_vars = 0, declared_clauses = 0;
    long top = -1;  // WCNF hard-clause weight; -1 when the header omits it
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "c") continue;
        if (first != "p") throw ParseError("clause data before 'p cnf'/'p wcnf' header");
        std::string fmt;
        if (!(ls >> fmt) || (fmt != "cnf" && fmt != "wcnf"))
            throw ParseError("malformed header: unknown format");
        wcnf = (fmt == "wcnf");
        std::string tok;
        if (!(ls >> tok)) throw ParseError("malformed header: missing variable count");
        declared_vars = to_long(tok, "variable count");
        if (!(ls >> tok)) throw ParseError("malformed header: missing clause count");
        declared_clauses = to_long(tok, "clause count");
        if (declared_vars < 0 || declared_clauses < 0)
            throw ParseError("malformed header: negative counts");
        if (ls >> tok) {
            if (!wcnf) throw ParseError("malformed header: trailing tokens");
            top = to_long(tok, "top weight");
        }
        if (ls >> tok) throw ParseError("malformed header: trailing tokens");
        seen_header = true;
        break;
    }
    if (!seen_header) throw ParseError("missing 'p cnf'/'p wcnf' header");
    f.pool().ensure(static_cast<Var>(declared_vars));

    Scanner sc(in);
    std::string tok;
    bool have_tok = sc.next(tok);
    while (have_tok) {
        long weight = 1;
        if (wcnf) {
            weight = to_long(tok, "clause weight");
            if (weight < 0) throw ParseError("negative clause weight");
            if (!sc.next(tok)) throw ParseError("clause not terminated by 0");
        }
        std::vector<Lit> lits;
        while (true) {
            long lit = to_long(tok, "literal");
            if (lit == 0) break;
            long v = std::labs(lit);
            if (v > declared_vars) {
                f.add_warning("literal " + std::to_string(lit) + " exceeds declared variable count " +
                              std::to_string(declared_vars));
                f.pool().ensure(static_cast<Var>(v));
            }
            lits.push_back(Lit(static_cast<int>(lit)));
            if (!sc.next(tok)) throw ParseError("clause not terminated by 0");
        }
        Tag tag = Tag::Soft;
        if (wcnf) {
            if (top >= 0 && weight == top)
                tag = Tag::Hard;
            else if (weight == 1)
                tag = Tag::Soft;
            else
                throw UnsupportedWeightError("soft weight " + std::to_string(weight) +
                                             " unsupported (only 1 and top)");
        }
        f.add_clause(std::move(lits), tag);
        have_tok = sc.next(tok);
    }

    if (f.size() != declared_clauses)
        f.add_warning("declared " + std::to_string(declared_clauses) + " clauses, found " +
                      std::to_string(f.size()));
    f.mark_input_complete();
    return f;
}

Formula parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    return parse_dimacs(in);
}

Formula parse_dimacs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse_dimacs(in);
}

void write_dimacs(const Formula& f, std::ostream& out) {
    bool wcnf = f.has_hard();
    long m = 0;
    for (const Clause& c : f.clauses())
        if (c.tag != Tag::Aux && !c.removed) ++m;
    long top = m + 2;  // any value > 1 distinct from the soft weight
    if (wcnf)
        out << "p wcnf " << f.num_vars() << " " << m << " " << top << "\n";
    else
        out << "p cnf " << f.num_vars() << " " << m << "\n";
    for (const Clause& c : f.clauses()) {
        if (c.tag == Tag::Aux || c.removed) continue;
        if (wcnf) out << (c.tag == Tag::Hard ? top : 1) << " ";
        for (int i = 0; i < c.orig_size; ++i) out << c.lits[static_cast<size_t>(i)].code << " ";
        out << "0\n";
    }
}

std::string write_dimacs(const Formula& f) {
    std::ostringstream out;
    write_dimacs(f, out);
    return out.str();
}

}  // namespace coremax

#pragma once

// ATL / ATL* abstract syntax shared by the parser, the printer and the
// checkers. State and path layers use one node type; which trees are legal
// in which dialect is decided by the validation pass below.
//
//   state := atom | true | false | !state | state & state | state | state
//          | <<A>> path
//   path  := state | X path | G path | F path | path U path
//
// The ATL dialect restricts every coalition operand to exactly one of
// X s, G s, s U s with state operands, and F is parse-level sugar for
// true U s there.

#include "gamut/error.hpp"

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

namespace gamut {

enum class FOp { Atom, True, False, Not, And, Or, Coalition, X, G, F, U };

enum class Dialect { Atl, AtlStar };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    FOp op = FOp::Atom;
    std::string atom;                   // FOp::Atom
    std::vector<std::string> agents;    // FOp::Coalition, sorted unique
    FormulaPtr lhs;                     // unary child / left child
    FormulaPtr rhs;                     // And, Or, U
};

// ── Constructors ────────────────────────────────────────────────────────────

inline FormulaPtr f_atom(std::string name) {
    auto n = std::make_shared<Formula>();
    n->op = FOp::Atom;
    n->atom = std::move(name);
    return n;
}

inline FormulaPtr f_const(bool v) {
    auto n = std::make_shared<Formula>();
    n->op = v ? FOp::True : FOp::False;
    return n;
}

inline FormulaPtr f_unary(FOp op, FormulaPtr child) {
    auto n = std::make_shared<Formula>();
    n->op = op;
    n->lhs = std::move(child);
    return n;
}

inline FormulaPtr f_not(FormulaPtr c) { return f_unary(FOp::Not, std::move(c)); }
inline FormulaPtr f_x(FormulaPtr c) { return f_unary(FOp::X, std::move(c)); }
inline FormulaPtr f_g(FormulaPtr c) { return f_unary(FOp::G, std::move(c)); }
inline FormulaPtr f_f(FormulaPtr c) { return f_unary(FOp::F, std::move(c)); }

inline FormulaPtr f_binary(FOp op, FormulaPtr l, FormulaPtr r) {
    auto n = std::make_shared<Formula>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

inline FormulaPtr f_and(FormulaPtr l, FormulaPtr r) { return f_binary(FOp::And, std::move(l), std::move(r)); }
inline FormulaPtr f_or(FormulaPtr l, FormulaPtr r) { return f_binary(FOp::Or, std::move(l), std::move(r)); }
inline FormulaPtr f_u(FormulaPtr l, FormulaPtr r) { return f_binary(FOp::U, std::move(l), std::move(r)); }

inline FormulaPtr f_coalition(std::vector<std::string> agents, FormulaPtr path) {
    std::sort(agents.begin(), agents.end());
    agents.erase(std::unique(agents.begin(), agents.end()), agents.end());
    auto n = std::make_shared<Formula>();
    n->op = FOp::Coalition;
    n->agents = std::move(agents);
    n->lhs = std::move(path);
    return n;
}

// ── Structural equality ─────────────────────────────────────────────────────

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->op != b->op) return false;
    switch (a->op) {
    case FOp::Atom: return a->atom == b->atom;
    case FOp::True:
    case FOp::False: return true;
    case FOp::Coalition:
        return a->agents == b->agents && equal(a->lhs, b->lhs);
    case FOp::Not:
    case FOp::X:
    case FOp::G:
    case FOp::F:
        return equal(a->lhs, b->lhs);
    case FOp::And:
    case FOp::Or:
    case FOp::U:
        return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    }
    return false;
}

// ── Printing ────────────────────────────────────────────────────────────────
// Minimal parentheses. Binding, tightest first: unary (!, X, G, F, <<A>>),
// then U (right-associative), then &, then |. & and | associate left.

namespace detail {

inline int bind_level(FOp op) {
    switch (op) {
    case FOp::Or: return 0;
    case FOp::And: return 1;
    case FOp::U: return 2;
    default: return 3; // unary and leaves
    }
}

// True when the rightmost printed token of f sits inside a coalition's path
// operand, which would greedily absorb a following 'U'. Binary nodes are
// already parenthesized by level where it matters.
inline bool exposes_path_tail(const FormulaPtr& f) {
    switch (f->op) {
    case FOp::Coalition: return true;
    case FOp::Not:
    case FOp::X:
    case FOp::G:
    case FOp::F:
        return exposes_path_tail(f->lhs);
    default: return false;
    }
}

inline void print_rec(const FormulaPtr& f, int need, std::string& out) {
    const int lvl = bind_level(f->op);
    const bool parens = lvl < need;
    if (parens) out += '(';
    switch (f->op) {
    case FOp::Atom: out += f->atom; break;
    case FOp::True: out += "true"; break;
    case FOp::False: out += "false"; break;
    case FOp::Not:
        out += '!';
        print_rec(f->lhs, 3, out);
        break;
    case FOp::X:
    case FOp::G:
    case FOp::F:
        out += (f->op == FOp::X ? 'X' : f->op == FOp::G ? 'G' : 'F');
        out += ' ';
        print_rec(f->lhs, 3, out);
        break;
    case FOp::U: {
        // The left operand may not be a bare U, and must not end in an
        // unparenthesized coalition operand (it would capture our 'U').
        const bool force = exposes_path_tail(f->lhs);
        if (force) out += '(';
        print_rec(f->lhs, force ? 0 : 3, out);
        if (force) out += ')';
        out += " U ";
        print_rec(f->rhs, 2, out);
        break;
    }
    case FOp::And:
        print_rec(f->lhs, 1, out);
        out += " & ";
        print_rec(f->rhs, 2, out);
        break;
    case FOp::Or:
        print_rec(f->lhs, 0, out);
        out += " | ";
        print_rec(f->rhs, 1, out);
        break;
    case FOp::Coalition: {
        out += "<<";
        for (size_t i = 0; i < f->agents.size(); ++i) {
            if (i) out += ',';
            out += f->agents[i];
        }
        out += ">> ";
        print_rec(f->lhs, 2, out); // swallows U, not & or |
        break;
    }
    }
    if (parens) out += ')';
}

} // namespace detail

inline std::string print_formula(const FormulaPtr& f) {
    std::string out;
    detail::print_rec(f, 0, out);
    return out;
}

// ── Dialect validation ──────────────────────────────────────────────────────

inline bool is_path_op(FOp op) {
    return op == FOp::X || op == FOp::G || op == FOp::F || op == FOp::U;
}

namespace detail {

inline void require_state_atlstar(const FormulaPtr& f);

inline void require_path_atlstar(const FormulaPtr& f) {
    switch (f->op) {
    case FOp::X:
    case FOp::G:
    case FOp::F:
        require_path_atlstar(f->lhs);
        return;
    case FOp::U:
        require_path_atlstar(f->lhs);
        require_path_atlstar(f->rhs);
        return;
    default:
        require_state_atlstar(f);
    }
}

inline void require_state_atlstar(const FormulaPtr& f) {
    switch (f->op) {
    case FOp::Atom:
    case FOp::True:
    case FOp::False:
        return;
    case FOp::Not:
        require_state_atlstar(f->lhs);
        return;
    case FOp::And:
    case FOp::Or:
        require_state_atlstar(f->lhs);
        require_state_atlstar(f->rhs);
        return;
    case FOp::Coalition:
        require_path_atlstar(f->lhs);
        return;
    default:
        throw Error(ErrorKind::Dialect,
                    "path operator outside a coalition modality: " + print_formula(f));
    }
}

inline void require_state_atl(const FormulaPtr& f) {
    switch (f->op) {
    case FOp::Atom:
    case FOp::True:
    case FOp::False:
        return;
    case FOp::Not:
        require_state_atl(f->lhs);
        return;
    case FOp::And:
    case FOp::Or:
        require_state_atl(f->lhs);
        require_state_atl(f->rhs);
        return;
    case FOp::Coalition: {
        const FormulaPtr& p = f->lhs;
        if (p->op == FOp::X || p->op == FOp::G) {
            require_state_atl(p->lhs);
            return;
        }
        if (p->op == FOp::U) {
            require_state_atl(p->lhs);
            require_state_atl(p->rhs);
            return;
        }
        throw Error(ErrorKind::Dialect,
                    "coalition operand must be X, G or U in the ATL dialect: " +
                        print_formula(f));
    }
    default:
        throw Error(ErrorKind::Dialect,
                    "path operator outside a coalition modality: " + print_formula(f));
    }
}

} // namespace detail

// Throws Error(Dialect) when f is not a state formula of the given dialect.
inline void validate_dialect(const FormulaPtr& f, Dialect d) {
    if (d == Dialect::Atl)
        detail::require_state_atl(f);
    else
        detail::require_state_atlstar(f);
}

inline bool conforms(const FormulaPtr& f, Dialect d) {
    try {
        validate_dialect(f, d);
        return true;
    } catch (const Error&) {
        return false;
    }
}

// ── Subformula closure ──────────────────────────────────────────────────────
// All distinct subformulas, children before parents.

inline std::vector<FormulaPtr> subformula_closure(const FormulaPtr& f) {
    std::vector<FormulaPtr> out;
    std::vector<std::string> seen;
    auto visit = [&](auto&& self, const FormulaPtr& n) -> void {
        if (n->lhs) self(self, n->lhs);
        if (n->rhs) self(self, n->rhs);
        std::string key = print_formula(n);
        if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
            seen.push_back(std::move(key));
            out.push_back(n);
        }
    };
    visit(visit, f);
    return out;
}

// ── Node counting (used by the transform laws) ──────────────────────────────

inline size_t count_op(const FormulaPtr& f, FOp op) {
    size_t n = f->op == op ? 1 : 0;
    if (f->lhs) n += count_op(f->lhs, op);
    if (f->rhs) n += count_op(f->rhs, op);
    return n;
}

// Coalition nodes whose operand is an X.
inline size_t count_coalition_next(const FormulaPtr& f) {
    size_t n = (f->op == FOp::Coalition && f->lhs->op == FOp::X) ? 1 : 0;
    if (f->lhs) n += count_coalition_next(f->lhs);
    if (f->rhs) n += count_coalition_next(f->rhs);
    return n;
}

// Atoms referenced anywhere in f.
inline std::vector<std::string> referenced_atoms(const FormulaPtr& f) {
    std::vector<std::string> out;
    auto visit = [&](auto&& self, const FormulaPtr& n) -> void {
        if (n->op == FOp::Atom) out.push_back(n->atom);
        if (n->lhs) self(self, n->lhs);
        if (n->rhs) self(self, n->rhs);
    };
    visit(visit, f);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Coalitions referenced anywhere in f.
inline std::vector<std::vector<std::string>> referenced_coalitions(const FormulaPtr& f) {
    std::vector<std::vector<std::string>> out;
    auto visit = [&](auto&& self, const FormulaPtr& n) -> void {
        if (n->op == FOp::Coalition) out.push_back(n->agents);
        if (n->lhs) self(self, n->lhs);
        if (n->rhs) self(self, n->rhs);
    };
    visit(visit, f);
    return out;
}

} // namespace gamut

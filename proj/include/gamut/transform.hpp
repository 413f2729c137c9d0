#pragma once

// The formula side of the iCGS-to-vCGS reduction: the compiled system spends
// two ticks per source transition, so next operators double. In the ATL*
// dialect every X doubles; in the ATL dialect the coalition-next pattern
// <<A>> X s becomes <<A>> X <<A>> X s (same coalition on the inserted
// modality), and G / U pass through with rewritten operands.

#include "gamut/formula.hpp"

namespace gamut {

namespace detail {

inline FormulaPtr dup_atlstar(const FormulaPtr& f) {
    FormulaPtr l = f->lhs ? dup_atlstar(f->lhs) : nullptr;
    FormulaPtr r = f->rhs ? dup_atlstar(f->rhs) : nullptr;
    if (f->op == FOp::X) return f_x(f_x(l));
    if (l == f->lhs && r == f->rhs) return f;
    auto n = std::make_shared<Formula>(*f);
    n->lhs = l;
    n->rhs = r;
    return n;
}

inline FormulaPtr dup_atl_state(const FormulaPtr& f) {
    switch (f->op) {
    case FOp::Atom:
    case FOp::True:
    case FOp::False:
        return f;
    case FOp::Not:
        return f_not(dup_atl_state(f->lhs));
    case FOp::And:
        return f_and(dup_atl_state(f->lhs), dup_atl_state(f->rhs));
    case FOp::Or:
        return f_or(dup_atl_state(f->lhs), dup_atl_state(f->rhs));
    case FOp::Coalition: {
        const FormulaPtr& p = f->lhs;
        if (p->op == FOp::X) {
            FormulaPtr inner = f_coalition(f->agents, f_x(dup_atl_state(p->lhs)));
            return f_coalition(f->agents, f_x(inner));
        }
        if (p->op == FOp::G)
            return f_coalition(f->agents, f_g(dup_atl_state(p->lhs)));
        if (p->op == FOp::U)
            return f_coalition(f->agents,
                               f_u(dup_atl_state(p->lhs), dup_atl_state(p->rhs)));
        throw Error(ErrorKind::Dialect, "not an ATL formula: " + print_formula(f));
    }
    default:
        throw Error(ErrorKind::Dialect, "not an ATL formula: " + print_formula(f));
    }
}

} // namespace detail

inline FormulaPtr duplicate_next(const FormulaPtr& f, Dialect d) {
    if (d == Dialect::AtlStar) return detail::dup_atlstar(f);
    return detail::dup_atl_state(f);
}

} // namespace gamut

#pragma once

// Independent reference checker for small instances. It shares the model
// representation with the main checker but none of its algorithms:
// strategy profiles are enumerated by direct recursion, the pruned step
// relation is rebuilt inline, and path conditions are decided by explicit
// enumeration of ultimately-periodic paths (prefix + cycle walks up to a
// documented bound), evaluating the path formula directly on each lasso by
// fixpoint iteration around the cycle.
//
// Caps: at most 6 states, at most 256 profiles per coalition node, and a
// global evaluation budget; beyond them a Resource error is raised rather
// than a slow or unreliable answer.
//
// A third, perfect-information route (classic controllable-predecessor
// fixpoints) is exposed separately for identity-partition instances.

#include "gamut/formula.hpp"
#include "gamut/model.hpp"

#include <map>
#include <string>
#include <vector>

namespace gamut {

namespace oracle_detail {

// Path formulas over pre-evaluated literal sets.
struct OPath;
using OPathPtr = std::shared_ptr<const OPath>;
struct OPath {
    enum class Op { Lit, X, G, F, U };
    Op op = Op::Lit;
    int lit = -1;
    OPathPtr a, b;
};

inline OPathPtr opath_lit(int lit) {
    auto n = std::make_shared<OPath>();
    n->lit = lit;
    return n;
}
inline OPathPtr opath(OPath::Op op, OPathPtr a, OPathPtr b = nullptr) {
    auto n = std::make_shared<OPath>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

// Truth of a path formula at position 0 of the word u v^omega, where u and
// v are state sequences. Cycle positions are solved by fixpoint iteration
// (least for F/U, greatest for G), prefix positions by backward recurrence.
class LassoEval {
public:
    LassoEval(const std::vector<Idx>& prefix, const std::vector<Idx>& cycle,
              const std::vector<std::vector<char>>& lit_sets)
        : u_(prefix), v_(cycle), sets_(lit_sets), len_(prefix.size() + cycle.size()) {}

    bool value(const OPathPtr& f) { return eval(f)[0]; }

private:
    Idx state_at(size_t i) const { return i < u_.size() ? u_[i] : v_[i - u_.size()]; }
    size_t next(size_t i) const { return i + 1 < len_ ? i + 1 : u_.size(); }

    std::vector<char> eval(const OPathPtr& f) {
        auto it = memo_.find(f.get());
        if (it != memo_.end()) return it->second;
        std::vector<char> val(len_, 0);
        switch (f->op) {
        case OPath::Op::Lit:
            for (size_t i = 0; i < len_; ++i) val[i] = sets_[f->lit][state_at(i)];
            break;
        case OPath::Op::X: {
            auto a = eval(f->a);
            for (size_t i = 0; i < len_; ++i) val[i] = a[next(i)];
            break;
        }
        case OPath::Op::G: {
            auto a = eval(f->a);
            fixpoint(val, true, [&](size_t i) { return a[i] && val[next(i)]; });
            break;
        }
        case OPath::Op::F: {
            auto a = eval(f->a);
            fixpoint(val, false, [&](size_t i) { return a[i] || val[next(i)]; });
            break;
        }
        case OPath::Op::U: {
            auto a = eval(f->a);
            auto b = eval(f->b);
            fixpoint(val, false,
                     [&](size_t i) { return b[i] || (a[i] && val[next(i)]); });
            break;
        }
        }
        memo_.emplace(f.get(), val);
        return val;
    }

    template <class Step>
    void fixpoint(std::vector<char>& val, bool init, Step&& step) {
        for (size_t i = u_.size(); i < len_; ++i) val[i] = init;
        for (size_t round = 0; round <= v_.size(); ++round) {
            bool changed = false;
            for (size_t k = 0; k < v_.size(); ++k) {
                size_t i = len_ - 1 - k;
                char nv = step(i);
                if (nv != val[i]) { val[i] = nv; changed = true; }
            }
            if (!changed) break;
        }
        for (size_t k = u_.size(); k-- > 0;) val[k] = step(k);
    }

    const std::vector<Idx>& u_;
    const std::vector<Idx>& v_;
    const std::vector<std::vector<char>>& sets_;
    size_t len_;
    std::map<const OPath*, std::vector<char>> memo_;
};

} // namespace oracle_detail

class Oracle {
public:
    struct Caps {
        size_t max_states = 6;
        size_t max_profiles = 256;
        size_t budget = 8'000'000; // lasso evaluations + search steps
        size_t prefix_slack = 2;   // prefix walks up to 2n + slack
        size_t cycle_slack = 2;    // cycle walks up to n + slack
    };

    explicit Oracle(const Icgs& m) : Oracle(m, Caps{}) {}

    Oracle(const Icgs& m, Caps caps) : m_(m), caps_(caps), budget_(caps.budget) {
        if (m.states.size() > caps_.max_states)
            throw Error(ErrorKind::Resource,
                        "oracle instance too large: " + std::to_string(m.states.size()) +
                            " states");
        auto report = validate_icgs(m);
        if (!report.clean())
            throw Error(ErrorKind::Input,
                        "model does not validate: " + report.violations.front().message);
    }

    bool check(Idx state, const FormulaPtr& f, Dialect d) {
        validate_dialect(f, d);
        return eval(f, d)[state];
    }

    std::vector<char> eval(const FormulaPtr& f, Dialect d) {
        size_t n = m_.states.size();
        switch (f->op) {
        case FOp::Atom: {
            auto id = m_.atom_index(f->atom);
            if (!id) throw Error(ErrorKind::Input, "undeclared atom '" + f->atom + "'");
            std::vector<char> set(n, 0);
            for (Idx s = 0; s < n; ++s) set[s] = m_.labeled(s, *id);
            return set;
        }
        case FOp::True: return std::vector<char>(n, 1);
        case FOp::False: return std::vector<char>(n, 0);
        case FOp::Not: {
            auto set = eval(f->lhs, d);
            for (auto& b : set) b = !b;
            return set;
        }
        case FOp::And: {
            auto l = eval(f->lhs, d), r = eval(f->rhs, d);
            for (Idx s = 0; s < n; ++s) l[s] = l[s] && r[s];
            return l;
        }
        case FOp::Or: {
            auto l = eval(f->lhs, d), r = eval(f->rhs, d);
            for (Idx s = 0; s < n; ++s) l[s] = l[s] || r[s];
            return l;
        }
        case FOp::Coalition: return eval_coalition(f, d);
        default:
            throw Error(ErrorKind::Dialect, "path operator outside a coalition modality");
        }
    }

    // Classic alternating fixpoints under perfect information; only
    // meaningful when every partition is the identity. Coalition nodes are
    // evaluated compositionally, so formulas fed here should not contain
    // same-coalition next chains (whose committed-strategy semantics
    // differs).
    std::vector<char> eval_perfect_info(const FormulaPtr& f) {
        for (Idx a = 0; a < m_.agents.size(); ++a)
            for (const auto& cls : m_.classes[a])
                if (cls.size() != 1)
                    throw Error(ErrorKind::Input,
                                "perfect-information route requires identity partitions");
        return eval_pi(f);
    }

private:
    // ── Uniform-strategy route ──────────────────────────────────────────────

    std::vector<Idx> members_of(const FormulaPtr& f) {
        std::vector<Idx> members;
        for (const auto& name : f->agents) {
            auto a = m_.agent_index(name);
            if (!a) throw Error(ErrorKind::Input, "coalition names unknown agent '" + name + "'");
            members.push_back(*a);
        }
        return members;
    }

    std::vector<char> eval_coalition(const FormulaPtr& f, Dialect d) {
        using oracle_detail::OPath;
        using oracle_detail::OPathPtr;
        size_t n = m_.states.size();

        // Translate the operand into a path formula over literal sets;
        // same-coalition X chains fold into one committed sweep.
        std::vector<std::vector<char>> lits;
        std::map<std::string, int> keys;
        auto lit_of = [&](const FormulaPtr& sf) {
            std::string key = print_formula(sf);
            auto it = keys.find(key);
            if (it != keys.end()) return it->second;
            lits.push_back(eval(sf, d));
            int id = static_cast<int>(lits.size()) - 1;
            keys.emplace(std::move(key), id);
            return id;
        };
        OPathPtr psi;
        if (d == Dialect::Atl) {
            const FormulaPtr& path = f->lhs;
            if (path->op == FOp::X) {
                int k = 0;
                FormulaPtr cur = f;
                while (cur->op == FOp::Coalition && cur->agents == f->agents &&
                       cur->lhs->op == FOp::X) {
                    ++k;
                    cur = cur->lhs->lhs;
                }
                psi = oracle_detail::opath_lit(lit_of(cur));
                for (int i = 0; i < k; ++i) psi = oracle_detail::opath(OPath::Op::X, psi);
            } else if (path->op == FOp::G) {
                psi = oracle_detail::opath(OPath::Op::G,
                                           oracle_detail::opath_lit(lit_of(path->lhs)));
            } else if (path->op == FOp::U) {
                psi = oracle_detail::opath(OPath::Op::U,
                                           oracle_detail::opath_lit(lit_of(path->lhs)),
                                           oracle_detail::opath_lit(lit_of(path->rhs)));
            } else {
                throw Error(ErrorKind::Dialect, "not an ATL coalition operand");
            }
        } else {
            auto build = [&](auto&& self, const FormulaPtr& pf) -> OPathPtr {
                switch (pf->op) {
                case FOp::X: return oracle_detail::opath(OPath::Op::X, self(self, pf->lhs));
                case FOp::G: return oracle_detail::opath(OPath::Op::G, self(self, pf->lhs));
                case FOp::F: return oracle_detail::opath(OPath::Op::F, self(self, pf->lhs));
                case FOp::U:
                    return oracle_detail::opath(OPath::Op::U, self(self, pf->lhs),
                                                self(self, pf->rhs));
                default: return oracle_detail::opath_lit(lit_of(pf));
                }
            };
            psi = build(build, f->lhs);
        }

        auto members = members_of(f);
        std::vector<char> result(n, 0);
        size_t profile_count = 0;
        for_each_profile(members, [&](const std::map<std::pair<Idx, Idx>, Idx>& choice) {
            if (++profile_count > caps_.max_profiles)
                throw Error(ErrorKind::Resource, "oracle strategy space exceeds cap");
            auto succs = pruned_succs(members, choice);
            for (Idx s = 0; s < n; ++s)
                if (!result[s] && universal_on_lassos(succs, s, psi, lits)) result[s] = 1;
        });
        return result;
    }

    // Recursive enumeration of (member, class) -> action assignments.
    template <class Fn>
    void for_each_profile(const std::vector<Idx>& members, Fn&& fn) {
        std::map<std::pair<Idx, Idx>, Idx> choice;
        enumerate(members, 0, 0, choice, fn);
    }

    template <class Fn>
    void enumerate(const std::vector<Idx>& members, size_t mi, Idx cls,
                   std::map<std::pair<Idx, Idx>, Idx>& choice, Fn&& fn) {
        if (mi == members.size()) {
            fn(choice);
            return;
        }
        Idx a = members[mi];
        if (cls == m_.classes[a].size()) {
            enumerate(members, mi + 1, 0, choice, fn);
            return;
        }
        for (Idx act : m_.protocol[m_.classes[a][cls][0]][a]) {
            choice[{a, cls}] = act;
            enumerate(members, mi, cls + 1, choice, fn);
        }
        choice.erase({a, cls});
    }

    // Successor sets when the coalition commits to the given choice and
    // everyone else ranges over the protocol.
    std::vector<std::vector<Idx>>
    pruned_succs(const std::vector<Idx>& members,
                 const std::map<std::pair<Idx, Idx>, Idx>& choice) {
        size_t n = m_.states.size();
        std::vector<std::vector<Idx>> succs(n);
        for (Idx s = 0; s < n; ++s) {
            for (const auto& j : allowed_joints(m_, s)) {
                bool ok = true;
                for (Idx a : members)
                    if (j[a] != choice.at({a, m_.class_of[a][s]})) { ok = false; break; }
                if (!ok) continue;
                Idx t = m_.transition.at({s, j});
                if (std::find(succs[s].begin(), succs[s].end(), t) == succs[s].end())
                    succs[s].push_back(t);
            }
            std::sort(succs[s].begin(), succs[s].end());
        }
        return succs;
    }

    // True iff psi holds on every lasso (prefix up to 2n + slack, cycle up
    // to n + slack) from s; lassos close whenever the walk revisits any
    // stack position. Search stops at the first violating lasso.
    bool universal_on_lassos(const std::vector<std::vector<Idx>>& succs, Idx start,
                             const oracle_detail::OPathPtr& psi,
                             const std::vector<std::vector<char>>& lits) {
        size_t n = m_.states.size();
        size_t max_prefix = 2 * n + caps_.prefix_slack;
        size_t max_cycle = n + caps_.cycle_slack;
        std::vector<Idx> stack{start};
        bool violated = false;
        walk(succs, stack, max_prefix, max_cycle, psi, lits, violated);
        return !violated;
    }

    void walk(const std::vector<std::vector<Idx>>& succs, std::vector<Idx>& stack,
              size_t max_prefix, size_t max_cycle, const oracle_detail::OPathPtr& psi,
              const std::vector<std::vector<char>>& lits, bool& violated) {
        if (violated) return;
        if (budget_ == 0)
            throw Error(ErrorKind::Resource, "oracle search budget exhausted");
        --budget_;
        Idx cur = stack.back();
        for (Idx t : succs[cur]) {
            for (size_t i = 0; i < stack.size(); ++i) {
                if (stack[i] != t) continue;
                size_t cycle_len = stack.size() - i;
                if (i > max_prefix || cycle_len > max_cycle) continue;
                std::vector<Idx> prefix(stack.begin(), stack.begin() + i);
                std::vector<Idx> cycle(stack.begin() + i, stack.end());
                if (budget_ == 0)
                    throw Error(ErrorKind::Resource, "oracle search budget exhausted");
                --budget_;
                oracle_detail::LassoEval ev(prefix, cycle, lits);
                if (!ev.value(psi)) {
                    violated = true;
                    return;
                }
            }
            if (stack.size() < max_prefix + max_cycle) {
                stack.push_back(t);
                walk(succs, stack, max_prefix, max_cycle, psi, lits, violated);
                stack.pop_back();
                if (violated) return;
            }
        }
    }

    // ── Perfect-information route ───────────────────────────────────────────

    std::vector<char> eval_pi(const FormulaPtr& f) {
        size_t n = m_.states.size();
        switch (f->op) {
        case FOp::Atom: {
            auto id = m_.atom_index(f->atom);
            if (!id) throw Error(ErrorKind::Input, "undeclared atom '" + f->atom + "'");
            std::vector<char> set(n, 0);
            for (Idx s = 0; s < n; ++s) set[s] = m_.labeled(s, *id);
            return set;
        }
        case FOp::True: return std::vector<char>(n, 1);
        case FOp::False: return std::vector<char>(n, 0);
        case FOp::Not: {
            auto set = eval_pi(f->lhs);
            for (auto& b : set) b = !b;
            return set;
        }
        case FOp::And: {
            auto l = eval_pi(f->lhs), r = eval_pi(f->rhs);
            for (Idx s = 0; s < n; ++s) l[s] = l[s] && r[s];
            return l;
        }
        case FOp::Or: {
            auto l = eval_pi(f->lhs), r = eval_pi(f->rhs);
            for (Idx s = 0; s < n; ++s) l[s] = l[s] || r[s];
            return l;
        }
        case FOp::Coalition: {
            auto members = members_of(f);
            const FormulaPtr& path = f->lhs;
            if (path->op == FOp::X) return pre(members, eval_pi(path->lhs));
            if (path->op == FOp::G) {
                auto hold = eval_pi(path->lhs);
                auto z = hold;
                for (;;) {
                    auto nz = pre(members, z);
                    for (Idx s = 0; s < n; ++s) nz[s] = nz[s] && hold[s];
                    if (nz == z) return z;
                    z = std::move(nz);
                }
            }
            if (path->op == FOp::U) {
                auto lhs = eval_pi(path->lhs), rhs = eval_pi(path->rhs);
                auto z = rhs;
                for (;;) {
                    auto nz = pre(members, z);
                    for (Idx s = 0; s < n; ++s) nz[s] = rhs[s] || (lhs[s] && nz[s]);
                    if (nz == z) return z;
                    z = std::move(nz);
                }
            }
            throw Error(ErrorKind::Dialect, "not an ATL coalition operand");
        }
        default:
            throw Error(ErrorKind::Dialect, "path operator outside a coalition modality");
        }
    }

    // Controllable predecessors: the coalition has a joint choice forcing
    // the successor into Z whatever the others do.
    std::vector<char> pre(const std::vector<Idx>& members, const std::vector<char>& z) {
        size_t n = m_.states.size();
        std::vector<char> out(n, 0);
        for (Idx s = 0; s < n; ++s) {
            // Group allowed joints by the coalition's projection.
            std::map<std::vector<Idx>, bool> forced;
            for (const auto& j : allowed_joints(m_, s)) {
                std::vector<Idx> proj;
                for (Idx a : members) proj.push_back(j[a]);
                Idx t = m_.transition.at({s, j});
                auto [it, inserted] = forced.emplace(std::move(proj), true);
                it->second = it->second && z[t];
            }
            for (const auto& [proj, ok] : forced)
                if (ok) { out[s] = 1; break; }
        }
        return out;
    }

    const Icgs& m_;
    Caps caps_;
    size_t budget_;
};

inline bool oracle_check(const Icgs& m, Idx state, const FormulaPtr& f, Dialect d,
                         Oracle::Caps caps = {}) {
    Oracle o(m, caps);
    return o.check(state, f, d);
}

} // namespace gamut

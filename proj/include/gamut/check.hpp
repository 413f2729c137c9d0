#pragma once

// Decidable model checking under uniform memoryless strategies with
// imperfect information, objective semantics: a coalition formula holds at
// s when some uniform profile makes the path condition hold on all paths
// from s in the profile-restricted model. Evaluation is bottom-up over
// state subformulas; each coalition node sweeps the profile space and takes
// the union of the per-profile winning sets.
//
// Nested coalition-next with one coalition is a single commitment: a
// maximal chain <<A>>X <<A>>X ... <<A>>X s is decided by one uniform
// profile driving all of its steps. Re-quantifying per step would let the
// coalition act on information uniformity forbids (choose differently at
// indistinguishable intermediate states), which is exactly what the
// reduction's duplicated modalities must not introduce.
//
// Path conditions are graph analyses on the pruned model: X by one-step
// successors (iterated for chains), G by reachability of a violating
// state, U by the two violation patterns (a still-unfulfilled state that
// breaks the invariant, or a cycle that postpones fulfillment forever).
// The general path layer used by the ATL* dialect goes through the tableau.

#include "gamut/formula.hpp"
#include "gamut/model.hpp"
#include "gamut/strategies.hpp"
#include "gamut/tableau.hpp"

#include <atomic>
#include <functional>
#include <optional>
#include <thread>

namespace gamut {

struct CheckConfig {
    enum class Semantics { Objective, Subjective };
    Semantics semantics = Semantics::Objective;
    Dialect dialect = Dialect::Atl;
};

struct Verdict {
    bool value = false;
    // Least witnessing profile for a true top-level coalition formula.
    std::optional<std::string> witness;
};

using StateSet = std::vector<char>;

namespace detail {

class Evaluator {
public:
    Evaluator(const Icgs& m, const CheckConfig& cfg, int threads)
        : m_(m), cfg_(cfg), threads_(std::max(1, threads)) {
        if (cfg.semantics != CheckConfig::Semantics::Objective)
            throw Error(ErrorKind::Input, "subjective semantics is reserved and not implemented");
        auto report = validate_icgs(m);
        if (!report.clean())
            throw Error(ErrorKind::Input,
                        "model does not validate: " + report.violations.front().message);
    }

    StateSet eval(const FormulaPtr& f, bool root = false) {
        switch (f->op) {
        case FOp::Atom: {
            auto id = m_.atom_index(f->atom);
            if (!id) throw Error(ErrorKind::Input, "undeclared atom '" + f->atom + "'");
            StateSet set(n(), 0);
            for (Idx s = 0; s < n(); ++s) set[s] = m_.labeled(s, *id);
            return set;
        }
        case FOp::True: return StateSet(n(), 1);
        case FOp::False: return StateSet(n(), 0);
        case FOp::Not: {
            StateSet set = eval(f->lhs);
            for (auto& b : set) b = !b;
            return set;
        }
        case FOp::And: {
            StateSet l = eval(f->lhs), r = eval(f->rhs);
            for (Idx s = 0; s < n(); ++s) l[s] = l[s] && r[s];
            return l;
        }
        case FOp::Or: {
            StateSet l = eval(f->lhs), r = eval(f->rhs);
            for (Idx s = 0; s < n(); ++s) l[s] = l[s] || r[s];
            return l;
        }
        case FOp::Coalition:
            return cfg_.dialect == Dialect::Atl ? eval_coalition_atl(f, root)
                                                : eval_coalition_star(f, root);
        default:
            throw Error(ErrorKind::Dialect,
                        "path operator outside a coalition modality: " + print_formula(f));
        }
    }

    // Witness of the most recent root-level coalition sweep, per state.
    std::string witness_for(Idx state) const {
        if (!root_space_ || state >= root_witness_.size() ||
            root_witness_[state] == SIZE_MAX)
            return {};
        return root_space_->describe(root_space_->at(root_witness_[state]));
    }

private:
    Idx n() const { return static_cast<Idx>(m_.states.size()); }

    std::vector<Idx> coalition_members(const FormulaPtr& f) {
        std::vector<Idx> members;
        for (const auto& name : f->agents) {
            auto a = m_.agent_index(name);
            if (!a)
                throw Error(ErrorKind::Input, "coalition names unknown agent '" + name + "'");
            members.push_back(*a);
        }
        return members;
    }

    // Maximal same-coalition X chain: returns its length and the state
    // formula under the innermost X.
    static std::pair<int, FormulaPtr> collect_chain(const FormulaPtr& f) {
        int k = 0;
        FormulaPtr cur = f;
        while (cur->op == FOp::Coalition && cur->agents == f->agents &&
               cur->lhs->op == FOp::X) {
            ++k;
            cur = cur->lhs->lhs;
        }
        return {k, cur};
    }

    StateSet eval_coalition_atl(const FormulaPtr& f, bool root) {
        const FormulaPtr& path = f->lhs;
        if (path->op == FOp::X) {
            auto [k, operand] = collect_chain(f);
            StateSet target = eval(operand);
            return sweep(coalition_members(f), root, [&, k = k](const Pruned& p) {
                StateSet y = target;
                for (int step = 0; step < k; ++step) {
                    StateSet prev = std::move(y);
                    y.assign(n(), 0);
                    for (Idx s = 0; s < n(); ++s) {
                        bool all = true;
                        for (Idx t : p.succs[s])
                            if (!prev[t]) { all = false; break; }
                        y[s] = all;
                    }
                }
                return y;
            });
        }
        if (path->op == FOp::G) {
            StateSet hold = eval(path->lhs);
            return sweep(coalition_members(f), root, [&](const Pruned& p) {
                // Violating iff a state outside `hold` is reachable.
                StateSet bad_reach(n(), 0);
                std::vector<std::vector<Idx>> rev(n());
                for (Idx s = 0; s < n(); ++s)
                    for (Idx t : p.succs[s]) rev[t].push_back(s);
                std::vector<Idx> work;
                for (Idx s = 0; s < n(); ++s)
                    if (!hold[s]) { bad_reach[s] = 1; work.push_back(s); }
                while (!work.empty()) {
                    Idx t = work.back();
                    work.pop_back();
                    for (Idx s : rev[t])
                        if (!bad_reach[s]) { bad_reach[s] = 1; work.push_back(s); }
                }
                StateSet good(n(), 0);
                for (Idx s = 0; s < n(); ++s) good[s] = !bad_reach[s];
                return good;
            });
        }
        if (path->op == FOp::U) {
            StateSet lhs = eval(path->lhs), rhs = eval(path->rhs);
            return sweep(coalition_members(f), root, [&](const Pruned& p) {
                return until_holds(p, lhs, rhs);
            });
        }
        throw Error(ErrorKind::Dialect, "not an ATL coalition operand: " + print_formula(f));
    }

    // All paths satisfy lhs U rhs iff, inside the subgraph of not-yet-rhs
    // states, no violating state (breaking lhs before rhs) and no cycle
    // (postponing rhs forever) is reachable.
    StateSet until_holds(const Pruned& p, const StateSet& lhs, const StateSet& rhs) {
        std::vector<std::vector<int>> sub(n());
        for (Idx s = 0; s < n(); ++s) {
            if (rhs[s]) continue;
            for (Idx t : p.succs[s])
                if (!rhs[t]) sub[s].push_back(static_cast<int>(t));
        }
        int scc_count = 0;
        auto comp = tarjan_scc(n(), sub, scc_count);
        StateSet violating(n(), 0);
        std::vector<char> cyclic(scc_count, 0);
        std::vector<int> scc_size(scc_count, 0);
        for (Idx s = 0; s < n(); ++s)
            if (!rhs[s]) ++scc_size[comp[s]];
        for (Idx s = 0; s < n(); ++s) {
            if (rhs[s]) continue;
            for (int t : sub[s])
                if (comp[s] == comp[t] && (scc_size[comp[s]] > 1 || t == static_cast<int>(s)))
                    cyclic[comp[s]] = 1;
        }
        std::vector<Idx> work;
        for (Idx s = 0; s < n(); ++s) {
            if (rhs[s]) continue;
            if (!lhs[s] || cyclic[comp[s]]) { violating[s] = 1; work.push_back(s); }
        }
        std::vector<std::vector<Idx>> rev(n());
        for (Idx s = 0; s < n(); ++s)
            for (int t : sub[s]) rev[t].push_back(s);
        while (!work.empty()) {
            Idx t = work.back();
            work.pop_back();
            for (Idx s : rev[t])
                if (!violating[s]) { violating[s] = 1; work.push_back(s); }
        }
        StateSet good(n(), 0);
        for (Idx s = 0; s < n(); ++s) good[s] = rhs[s] || !violating[s];
        return good;
    }

    StateSet eval_coalition_star(const FormulaPtr& f, bool root) {
        // Pre-evaluate embedded state formulas into literal sets.
        std::vector<StateSet> lit_sets;
        std::map<std::string, int> lit_ids;
        auto lit_of = [&](const FormulaPtr& sf) {
            std::string key = print_formula(sf);
            auto it = lit_ids.find(key);
            if (it != lit_ids.end()) return it->second;
            lit_sets.push_back(eval(sf));
            int id = static_cast<int>(lit_sets.size()) - 1;
            lit_ids.emplace(std::move(key), id);
            return id;
        };
        // Negation-normal form of the complement of the path formula.
        auto build = [&](auto&& self, const FormulaPtr& pf, bool neg) -> detail::NnfPtr {
            switch (pf->op) {
            case FOp::X: return nnf_node(Nnf::Op::X, self(self, pf->lhs, neg));
            case FOp::G:
                return nnf_node(neg ? Nnf::Op::F : Nnf::Op::G, self(self, pf->lhs, neg));
            case FOp::F:
                return nnf_node(neg ? Nnf::Op::G : Nnf::Op::F, self(self, pf->lhs, neg));
            case FOp::U:
                return nnf_node(neg ? Nnf::Op::R : Nnf::Op::U, self(self, pf->lhs, neg),
                                self(self, pf->rhs, neg));
            default: return nnf_lit(lit_of(pf), !neg);
            }
        };
        detail::NnfPtr complement = build(build, f->lhs, true);
        Tableau tab(complement);
        return sweep(coalition_members(f), root, [&](const Pruned& p) {
            StateSet violating = states_with_satisfying_path(m_, p, tab, lit_sets);
            StateSet good(n(), 0);
            for (Idx s = 0; s < n(); ++s) good[s] = !violating[s];
            return good;
        });
    }

    // Existential sweep over the uniform profiles; the union of per-profile
    // winning sets, with the least witnessing profile per state retained
    // for root-level reporting. Chunked across threads; the merge is in
    // profile order, so results do not depend on the thread count.
    template <class PerProfile>
    StateSet sweep(std::vector<Idx> members, bool root, PerProfile&& per_profile) {
        auto space = std::make_shared<ProfileSpace>(m_, std::move(members));
        size_t count = space->count();
        size_t workers = std::min<size_t>(threads_, count);
        std::vector<StateSet> acc(workers, StateSet(n(), 0));
        std::vector<std::vector<size_t>> firsts(workers,
                                                std::vector<size_t>(n(), SIZE_MAX));
        auto run_range = [&](size_t w, size_t lo, size_t hi) {
            for (size_t k = lo; k < hi; ++k) {
                StrategyProfile profile = space->at(k);
                Pruned pruned = prune(m_, profile);
                StateSet good = per_profile(pruned);
                for (Idx s = 0; s < n(); ++s)
                    if (good[s]) {
                        if (!acc[w][s]) firsts[w][s] = k;
                        acc[w][s] = 1;
                    }
            }
        };
        if (workers <= 1) {
            run_range(0, 0, count);
        } else {
            std::vector<std::thread> pool;
            size_t chunk = (count + workers - 1) / workers;
            for (size_t w = 0; w < workers; ++w)
                pool.emplace_back(run_range, w, w * chunk,
                                  std::min(count, (w + 1) * chunk));
            for (auto& t : pool) t.join();
        }
        StateSet result(n(), 0);
        std::vector<size_t> first(n(), SIZE_MAX);
        for (size_t w = 0; w < workers; ++w)
            for (Idx s = 0; s < n(); ++s)
                if (acc[w][s]) {
                    result[s] = 1;
                    first[s] = std::min(first[s], firsts[w][s]);
                }
        if (root) {
            root_space_ = space;
            root_witness_ = std::move(first);
        }
        return result;
    }

    const Icgs& m_;
    CheckConfig cfg_;
    int threads_;
    std::shared_ptr<ProfileSpace> root_space_;
    std::vector<size_t> root_witness_;
};

} // namespace detail

// ── Public checking interface ───────────────────────────────────────────────

inline StateSet eval_state_set(const Icgs& m, const FormulaPtr& f, const CheckConfig& cfg,
                               int threads = 1) {
    validate_dialect(f, cfg.dialect);
    detail::Evaluator ev(m, cfg, threads);
    return ev.eval(f);
}

namespace detail {

inline Verdict check_common(const Icgs& m, Idx state, const FormulaPtr& f,
                            const CheckConfig& cfg, int threads) {
    if (state >= m.states.size()) throw Error(ErrorKind::Input, "unknown state index");
    validate_dialect(f, cfg.dialect);
    Evaluator ev(m, cfg, threads);
    StateSet set = ev.eval(f, /*root=*/true);
    Verdict v;
    v.value = set[state];
    if (v.value && f->op == FOp::Coalition) {
        std::string w = ev.witness_for(state);
        if (!w.empty()) v.witness = w;
    }
    return v;
}

} // namespace detail

inline Verdict check_atl(const Icgs& m, Idx state, const FormulaPtr& f, CheckConfig cfg = {},
                         int threads = 1) {
    cfg.dialect = Dialect::Atl;
    return detail::check_common(m, state, f, cfg, threads);
}

inline Verdict check_atlstar(const Icgs& m, Idx state, const FormulaPtr& f,
                             CheckConfig cfg = {}, int threads = 1) {
    cfg.dialect = Dialect::AtlStar;
    return detail::check_common(m, state, f, cfg, threads);
}

// Universality of a path formula over an already-pruned model: true iff
// every infinite path from s satisfies it. Embedded state formulas are
// evaluated through eval_state (they are "fresh atoms" here).
inline bool check_path_universal(
    const Icgs& m, const Pruned& pruned, Idx s, const FormulaPtr& path,
    const std::function<StateSet(const FormulaPtr&)>& eval_state) {
    std::vector<StateSet> lit_sets;
    std::map<std::string, int> lit_ids;
    auto lit_of = [&](const FormulaPtr& sf) {
        std::string key = print_formula(sf);
        auto it = lit_ids.find(key);
        if (it != lit_ids.end()) return it->second;
        lit_sets.push_back(eval_state(sf));
        int id = static_cast<int>(lit_sets.size()) - 1;
        lit_ids.emplace(std::move(key), id);
        return id;
    };
    auto build = [&](auto&& self, const FormulaPtr& pf, bool neg) -> detail::NnfPtr {
        switch (pf->op) {
        case FOp::X: return detail::nnf_node(detail::Nnf::Op::X, self(self, pf->lhs, neg));
        case FOp::G:
            return detail::nnf_node(neg ? detail::Nnf::Op::F : detail::Nnf::Op::G,
                                    self(self, pf->lhs, neg));
        case FOp::F:
            return detail::nnf_node(neg ? detail::Nnf::Op::G : detail::Nnf::Op::F,
                                    self(self, pf->lhs, neg));
        case FOp::U:
            return detail::nnf_node(neg ? detail::Nnf::Op::R : detail::Nnf::Op::U,
                                    self(self, pf->lhs, neg), self(self, pf->rhs, neg));
        default: return detail::nnf_lit(lit_of(pf), !neg);
        }
    };
    detail::NnfPtr complement = build(build, path, true);
    detail::Tableau tab(complement);
    StateSet violating = detail::states_with_satisfying_path(m, pruned, tab, lit_sets);
    return !violating[s];
}

} // namespace gamut

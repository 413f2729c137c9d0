#pragma once

// Guarded-command game structures with visibility control. Agents own
// boolean atoms; commands fire on a guard and assign owned atoms plus
// per-observer visibility flags. The last agent spec is the environment;
// it also owns the declared proposition atoms that carry state labelings.

#include "gamut/error.hpp"
#include "gamut/model.hpp" // Idx, Violation

#include <memory>
#include <string>
#include <vector>

namespace gamut {

// ── Guards ──────────────────────────────────────────────────────────────────

struct Guard;
using GuardPtr = std::shared_ptr<const Guard>;

struct Guard {
    enum class Op { Atom, Const, Not, And, Or };
    Op op = Op::Const;
    Idx atom = 0;
    bool value = false;
    GuardPtr lhs, rhs;
};

inline GuardPtr g_atom(Idx atom) {
    auto g = std::make_shared<Guard>();
    g->op = Guard::Op::Atom;
    g->atom = atom;
    return g;
}
inline GuardPtr g_const(bool v) {
    auto g = std::make_shared<Guard>();
    g->op = Guard::Op::Const;
    g->value = v;
    return g;
}
inline GuardPtr g_not(GuardPtr c) {
    auto g = std::make_shared<Guard>();
    g->op = Guard::Op::Not;
    g->lhs = std::move(c);
    return g;
}
inline GuardPtr g_and(GuardPtr l, GuardPtr r) {
    auto g = std::make_shared<Guard>();
    g->op = Guard::Op::And;
    g->lhs = std::move(l);
    g->rhs = std::move(r);
    return g;
}
inline GuardPtr g_or(GuardPtr l, GuardPtr r) {
    auto g = std::make_shared<Guard>();
    g->op = Guard::Op::Or;
    g->lhs = std::move(l);
    g->rhs = std::move(r);
    return g;
}

inline void guard_atoms(const GuardPtr& g, std::vector<Idx>& out) {
    if (!g) return;
    if (g->op == Guard::Op::Atom) out.push_back(g->atom);
    guard_atoms(g->lhs, out);
    guard_atoms(g->rhs, out);
}

// ── Commands and agent specifications ───────────────────────────────────────

enum class CommandKind { Init, Update };

struct Assign {
    Idx atom;
    bool value;
    bool operator==(const Assign&) const = default;
};

struct VisAssign {
    Idx atom;
    Idx observer; // agent index in the Vcgs agent list
    bool value;
    bool operator==(const VisAssign&) const = default;
};

struct Command {
    CommandKind kind = CommandKind::Update;
    GuardPtr guard;
    std::vector<Assign> sets;
    std::vector<VisAssign> vis;
};

struct AgentSpec {
    std::string name;
    std::vector<Idx> atoms; // owned, sorted
    std::vector<Command> commands;
};

struct Vcgs {
    std::vector<std::string> atom_names; // global sorted table
    std::vector<AgentSpec> agents;       // environment last
    std::vector<Idx> props;              // proposition atoms, sorted, env-owned

    Idx env() const { return static_cast<Idx>(agents.size()) - 1; }

    std::optional<Idx> atom_index(const std::string& name) const {
        for (Idx i = 0; i < atom_names.size(); ++i)
            if (atom_names[i] == name) return i;
        return std::nullopt;
    }
    std::optional<Idx> agent_index(const std::string& name) const {
        for (Idx i = 0; i < agents.size(); ++i)
            if (agents[i].name == name) return i;
        return std::nullopt;
    }

    // npos for atoms no spec declares.
    static constexpr Idx kNoOwner = static_cast<Idx>(-1);
    std::vector<Idx> owners() const {
        std::vector<Idx> owner(atom_names.size(), kNoOwner);
        for (Idx a = 0; a < agents.size(); ++a)
            for (Idx v : agents[a].atoms)
                if (owner[v] == kNoOwner) owner[v] = a;
        return owner;
    }
};

// ── Well-formedness ─────────────────────────────────────────────────────────

struct WfReport {
    std::vector<Violation> violations;
    std::vector<Violation> warnings; // observability lint
    bool clean() const { return violations.empty(); }
};

inline WfReport well_formedness(const Vcgs& v) {
    WfReport r;
    auto bad = [&](std::string code, std::string msg) {
        r.violations.push_back({std::move(code), std::move(msg)});
    };

    // Ownership: every atom declared by exactly one spec.
    std::vector<int> declared(v.atom_names.size(), 0);
    for (const auto& spec : v.agents)
        for (Idx a : spec.atoms) ++declared[a];
    for (Idx a = 0; a < v.atom_names.size(); ++a) {
        if (declared[a] > 1)
            bad("atom-multiply-owned", "atom '" + v.atom_names[a] + "' declared by " +
                                           std::to_string(declared[a]) + " agents");
        if (declared[a] == 0)
            bad("atom-undeclared", "atom '" + v.atom_names[a] + "' is referenced but not declared");
    }
    auto owner = v.owners();

    // Which (atom, observer) pairs some init command ever makes visible;
    // used by the observability lint below.
    std::vector<std::vector<bool>> granted(v.atom_names.size(),
                                           std::vector<bool>(v.agents.size(), false));
    for (const auto& spec : v.agents)
        for (const auto& cmd : spec.commands)
            if (cmd.kind == CommandKind::Init)
                for (const auto& va : cmd.vis)
                    if (va.value) granted[va.atom][va.observer] = true;

    for (Idx a = 0; a < v.agents.size(); ++a) {
        const auto& spec = v.agents[a];
        for (size_t c = 0; c < spec.commands.size(); ++c) {
            const auto& cmd = spec.commands[c];
            auto where = [&] {
                return "command #" + std::to_string(c) + " of agent '" + spec.name + "'";
            };
            std::vector<bool> set_once(v.atom_names.size(), false);
            for (const auto& as : cmd.sets) {
                if (owner[as.atom] != a)
                    bad("foreign-assignment",
                        where() + " assigns atom '" + v.atom_names[as.atom] + "' it does not own");
                if (set_once[as.atom])
                    bad("double-assignment",
                        where() + " assigns atom '" + v.atom_names[as.atom] + "' twice");
                set_once[as.atom] = true;
            }
            std::vector<std::vector<bool>> vis_once(
                v.atom_names.size(), std::vector<bool>(v.agents.size(), false));
            for (const auto& va : cmd.vis) {
                if (owner[va.atom] != a)
                    bad("foreign-assignment", where() + " sets visibility of atom '" +
                                                  v.atom_names[va.atom] + "' it does not own");
                if (va.observer == a)
                    bad("self-visibility", where() + " sets visibility of '" +
                                               v.atom_names[va.atom] + "' to its own owner");
                if (va.observer < v.agents.size() && vis_once[va.atom][va.observer])
                    bad("double-assignment", where() + " sets visibility of '" +
                                                 v.atom_names[va.atom] + "' twice for one observer");
                if (va.observer < v.agents.size()) vis_once[va.atom][va.observer] = true;
            }
            // Lint: a non-environment agent should only guard on atoms it can
            // observe once init has run (its own, plus granted ones).
            if (a != v.env()) {
                std::vector<Idx> refs;
                guard_atoms(cmd.guard, refs);
                for (Idx atom : refs)
                    if (owner[atom] != a && owner[atom] != Vcgs::kNoOwner &&
                        !granted[atom][a])
                        r.warnings.push_back(
                            {"guard-unobservable",
                             where() + " guards on atom '" + v.atom_names[atom] +
                                 "' it cannot observe after init"});
            }
        }
    }
    return r;
}

} // namespace gamut

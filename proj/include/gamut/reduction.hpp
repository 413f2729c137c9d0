#pragma once

// Compiles an explicit game structure M into a guarded-command structure
// with visibility control. Every agent owns one atom per action plus a turn
// atom; the environment owns one atom per state, one atom per
// indistinguishability class per agent, its own turn atom, and the
// proposition atoms.
//
// Command set, per agent a:
//   init            one per distinct class of initial states:
//                   cls ~> turn.a := F, invis of a's atoms to other agents
//   update (act)    per action i and class c: turn.a & cls ~> act_i := T,
//                   other act atoms := F, turn.a := F
//   update (fwd)    !turn.a ~> turn.a := T, all act atoms := F
//
// and for the environment:
//   init (vis)      T ~> initial state atoms invisible, every class atom
//                   visible to its observer
//   init (choice)   one per initial state: st := T, matching class atoms,
//                   everything else cleared (plus labels, configurable)
//   update (fwd)    !turn.env ~> turn.env := T
//   update (move)   per state s and joint action: turn.env & st.s & the
//                   chosen action atoms ~> advance state, class and label
//                   atoms, clear the rest
//
// The extra clearing of action atoms in fwd keeps an agent's observation at
// its decision points a function of its current class alone, and the
// explicit state-choice init commands give the structure an encoding of the
// initial state; both are required for the two-tick simulation to track the
// source structure exactly.

#include "gamut/model.hpp"
#include "gamut/vcgs.hpp"

#include <set>
#include <string>
#include <vector>

namespace gamut {

enum class LabelMode { Source, Target };
enum class InitialLabelMode { None, Initial };
enum class ProtocolMode { Full, Restrict };

struct ReductionConfig {
    LabelMode label_mode = LabelMode::Source;
    InitialLabelMode initial_label_mode = InitialLabelMode::None;
    ProtocolMode protocol_mode = ProtocolMode::Full;

    std::string describe() const {
        std::string s = "label-mode=";
        s += label_mode == LabelMode::Source ? "source" : "target";
        s += " initial-labels=";
        s += initial_label_mode == InitialLabelMode::None ? "none" : "initial";
        s += " protocol-mode=";
        s += protocol_mode == ProtocolMode::Full ? "full" : "restrict";
        return s;
    }
};

// ── Atom naming ─────────────────────────────────────────────────────────────

inline std::string act_atom(const Icgs& m, Idx agent, Idx action) {
    return "act." + m.agents[agent] + "." + m.actions[agent][action];
}
inline std::string turn_atom_name(const Icgs& m, Idx agent) {
    return "turn." + m.agents[agent];
}
inline std::string state_atom(const Icgs& m, Idx state) { return "st." + m.states[state]; }
inline std::string class_atom(const Icgs& m, Idx agent, Idx cls) {
    // Representative: the least state of the class (state tables are sorted,
    // so this is the lexicographically least name).
    return "cls." + m.agents[agent] + "." + m.states[m.classes[agent][cls][0]];
}
inline const char* env_name() { return "env"; }
inline const char* env_turn_atom() { return "turn.env"; }

struct AtomUniverse {
    std::vector<std::vector<std::string>> agent_atoms; // per agent: act atoms + turn
    std::vector<std::string> env_atoms;                // st + cls + turn.env
};

// The generated vocabulary; throws on capture of the model's propositions
// or an agent named like the environment.
inline AtomUniverse build_atom_universe(const Icgs& m) {
    AtomUniverse u;
    std::set<std::string> seen;
    auto add = [&](std::vector<std::string>& dst, std::string name) {
        if (!seen.insert(name).second)
            throw Error(ErrorKind::Compile, "generated atom name collides: '" + name + "'");
        dst.push_back(std::move(name));
    };
    for (Idx a = 0; a < m.agents.size(); ++a) {
        if (m.agents[a] == env_name())
            throw Error(ErrorKind::Compile,
                        "agent name 'env' is reserved for the environment");
        u.agent_atoms.emplace_back();
        for (Idx i = 0; i < m.actions[a].size(); ++i)
            add(u.agent_atoms.back(), act_atom(m, a, i));
        add(u.agent_atoms.back(), turn_atom_name(m, a));
    }
    for (Idx s = 0; s < m.states.size(); ++s) add(u.env_atoms, state_atom(m, s));
    for (Idx a = 0; a < m.agents.size(); ++a)
        for (Idx c = 0; c < m.classes[a].size(); ++c) add(u.env_atoms, class_atom(m, a, c));
    add(u.env_atoms, env_turn_atom());
    for (const auto& prop : m.atoms)
        if (seen.count(prop))
            throw Error(ErrorKind::Compile,
                        "proposition atom '" + prop + "' collides with a generated atom");
    return u;
}

// ── Compilation ─────────────────────────────────────────────────────────────

namespace detail {

struct ReductionBuilder {
    const Icgs& m;
    ReductionConfig cfg;
    Vcgs v;
    Idx env; // agent index of the environment in v

    ReductionBuilder(const Icgs& model, ReductionConfig config) : m(model), cfg(config) {
        auto report = validate_icgs(m);
        if (!report.clean())
            throw Error(ErrorKind::Compile,
                        "model does not validate: " + report.violations.front().message);
        if (cfg.protocol_mode == ProtocolMode::Full) {
            for (Idx s = 0; s < m.states.size(); ++s)
                for (Idx a = 0; a < m.agents.size(); ++a)
                    if (m.protocol[s][a].size() != m.actions[a].size())
                        throw Error(ErrorKind::Compile,
                                    "protocol-mode full requires a full protocol, but agent '" +
                                        m.agents[a] + "' is restricted at state '" +
                                        m.states[s] + "' (use protocol-mode restrict)");
        }

        AtomUniverse universe = build_atom_universe(m);
        std::vector<std::string> names;
        for (const auto& atoms : universe.agent_atoms)
            names.insert(names.end(), atoms.begin(), atoms.end());
        names.insert(names.end(), universe.env_atoms.begin(), universe.env_atoms.end());
        names.insert(names.end(), m.atoms.begin(), m.atoms.end());
        v.atom_names = sorted_unique(std::move(names));

        env = static_cast<Idx>(m.agents.size());
        for (Idx a = 0; a < m.agents.size(); ++a) {
            AgentSpec spec;
            spec.name = m.agents[a];
            for (const auto& n : universe.agent_atoms[a]) spec.atoms.push_back(atom(n));
            std::sort(spec.atoms.begin(), spec.atoms.end());
            v.agents.push_back(std::move(spec));
        }
        AgentSpec espec;
        espec.name = env_name();
        for (const auto& n : universe.env_atoms) espec.atoms.push_back(atom(n));
        for (const auto& n : m.atoms) {
            Idx id = atom(n);
            espec.atoms.push_back(id);
            v.props.push_back(id);
        }
        std::sort(espec.atoms.begin(), espec.atoms.end());
        std::sort(v.props.begin(), v.props.end());
        v.agents.push_back(std::move(espec));
    }

    Idx atom(const std::string& name) const { return *v.atom_index(name); }

    // Actions emitted for an agent at a class: the whole alphabet in the
    // paper-literal mode, the protocol of the class otherwise.
    std::vector<Idx> emitted_actions(Idx a, Idx cls) const {
        if (cfg.protocol_mode == ProtocolMode::Full) {
            std::vector<Idx> all(m.actions[a].size());
            for (Idx i = 0; i < all.size(); ++i) all[i] = i;
            return all;
        }
        return m.protocol[m.classes[a][cls][0]][a];
    }

    // Classes of agent a that contain an initial state, in class order.
    std::vector<Idx> initial_classes(Idx a) const {
        std::vector<Idx> out;
        for (Idx s0 : m.initial) {
            Idx c = m.class_of[a][s0];
            if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    void emit_agent_init(Idx a) {
        for (Idx c : initial_classes(a)) {
            Command cmd;
            cmd.kind = CommandKind::Init;
            cmd.guard = g_atom(atom(class_atom(m, a, c)));
            cmd.sets.push_back({atom(turn_atom_name(m, a)), false});
            // invis of the agent's atoms to every other model agent
            for (Idx b = 0; b < m.agents.size(); ++b) {
                if (b == a) continue;
                for (Idx i = 0; i < m.actions[a].size(); ++i)
                    cmd.vis.push_back({atom(act_atom(m, a, i)), b, false});
                cmd.vis.push_back({atom(turn_atom_name(m, a)), b, false});
            }
            v.agents[a].commands.push_back(std::move(cmd));
        }
    }

    void emit_agent_updates(Idx a) {
        for (Idx c = 0; c < m.classes[a].size(); ++c) {
            for (Idx i : emitted_actions(a, c)) {
                Command cmd;
                cmd.guard = g_and(g_atom(atom(turn_atom_name(m, a))),
                                  g_atom(atom(class_atom(m, a, c))));
                cmd.sets.push_back({atom(act_atom(m, a, i)), true});
                for (Idx j = 0; j < m.actions[a].size(); ++j)
                    if (j != i) cmd.sets.push_back({atom(act_atom(m, a, j)), false});
                cmd.sets.push_back({atom(turn_atom_name(m, a)), false});
                v.agents[a].commands.push_back(std::move(cmd));
            }
        }
        Command fwd;
        fwd.guard = g_not(g_atom(atom(turn_atom_name(m, a))));
        fwd.sets.push_back({atom(turn_atom_name(m, a)), true});
        for (Idx i = 0; i < m.actions[a].size(); ++i)
            fwd.sets.push_back({atom(act_atom(m, a, i)), false});
        v.agents[a].commands.push_back(std::move(fwd));
    }

    void emit_env_init() {
        if (m.initial.empty())
            throw Error(ErrorKind::Compile, "model has no initial states");
        // Visibility command: initial-state atoms are hidden from everyone,
        // every class atom is shared with the agent it belongs to.
        Command visc;
        visc.kind = CommandKind::Init;
        visc.guard = g_const(true);
        for (Idx s0 : m.initial)
            for (Idx b = 0; b < m.agents.size(); ++b)
                visc.vis.push_back({atom(state_atom(m, s0)), b, false});
        for (Idx b = 0; b < m.agents.size(); ++b)
            for (Idx c = 0; c < m.classes[b].size(); ++c)
                visc.vis.push_back({atom(class_atom(m, b, c)), b, true});
        v.agents[env].commands.push_back(std::move(visc));

        // One state-choice command per initial state.
        for (Idx s0 : m.initial) {
            Command cmd;
            cmd.kind = CommandKind::Init;
            cmd.guard = g_const(true);
            cmd.sets.push_back({atom(state_atom(m, s0)), true});
            for (Idx u = 0; u < m.states.size(); ++u)
                if (u != s0) cmd.sets.push_back({atom(state_atom(m, u)), false});
            for (Idx b = 0; b < m.agents.size(); ++b) {
                Idx c0 = m.class_of[b][s0];
                cmd.sets.push_back({atom(class_atom(m, b, c0)), true});
                for (Idx c = 0; c < m.classes[b].size(); ++c)
                    if (c != c0) cmd.sets.push_back({atom(class_atom(m, b, c)), false});
            }
            if (cfg.initial_label_mode == InitialLabelMode::Initial)
                for (Idx p = 0; p < m.atoms.size(); ++p)
                    cmd.sets.push_back({atom(m.atoms[p]), m.labeled(s0, p)});
            v.agents[env].commands.push_back(std::move(cmd));
        }
    }

    void emit_env_updates() {
        Command fwd;
        fwd.guard = g_not(g_atom(atom(env_turn_atom())));
        fwd.sets.push_back({atom(env_turn_atom()), true});
        v.agents[env].commands.push_back(std::move(fwd));

        for (Idx s = 0; s < m.states.size(); ++s) {
            // Full mode has already insisted the protocol is full, so this
            // is all action combinations there; otherwise the protocol
            // product, which is exactly the domain of the transition table.
            for (const auto& j : allowed_joints(m, s)) {
                Idx t = m.transition.at({s, j});
                Command cmd;
                GuardPtr g = g_and(g_atom(atom(env_turn_atom())), g_atom(atom(state_atom(m, s))));
                for (Idx a = 0; a < m.agents.size(); ++a)
                    g = g_and(g, g_atom(atom(act_atom(m, a, j[a]))));
                cmd.guard = std::move(g);
                cmd.sets.push_back({atom(env_turn_atom()), false});
                cmd.sets.push_back({atom(state_atom(m, t)), true});
                for (Idx b = 0; b < m.agents.size(); ++b)
                    cmd.sets.push_back({atom(class_atom(m, b, m.class_of[b][t])), true});
                Idx label_src = cfg.label_mode == LabelMode::Source ? s : t;
                for (Idx p = 0; p < m.atoms.size(); ++p)
                    cmd.sets.push_back({atom(m.atoms[p]), m.labeled(label_src, p)});
                for (Idx u = 0; u < m.states.size(); ++u)
                    if (u != t) cmd.sets.push_back({atom(state_atom(m, u)), false});
                for (Idx b = 0; b < m.agents.size(); ++b) {
                    Idx ct = m.class_of[b][t];
                    for (Idx c = 0; c < m.classes[b].size(); ++c)
                        if (c != ct) cmd.sets.push_back({atom(class_atom(m, b, c)), false});
                }
                v.agents[env].commands.push_back(std::move(cmd));
            }
        }
    }
};

} // namespace detail

inline Vcgs compile(const Icgs& m, const ReductionConfig& cfg = {}) {
    detail::ReductionBuilder b(m, cfg);
    for (Idx a = 0; a < m.agents.size(); ++a) {
        b.emit_agent_init(a);
        b.emit_agent_updates(a);
    }
    b.emit_env_init();
    b.emit_env_updates();
    return b.v;
}

// ── Size accounting ─────────────────────────────────────────────────────────

struct SizeReport {
    std::vector<std::string> owners;
    std::vector<size_t> atoms;   // generated atoms per owner (props excluded)
    std::vector<size_t> inits;   // init commands per owner
    std::vector<size_t> updates; // update commands per owner
    size_t props = 0;

    size_t total_atoms() const {
        size_t n = 0;
        for (auto a : atoms) n += a;
        return n;
    }
    size_t owner_index(const std::string& name) const {
        for (size_t i = 0; i < owners.size(); ++i)
            if (owners[i] == name) return i;
        throw Error(ErrorKind::Input, "unknown owner '" + name + "'");
    }
};

inline SizeReport size_report(const Vcgs& v) {
    SizeReport r;
    for (Idx a = 0; a < v.agents.size(); ++a) {
        const auto& spec = v.agents[a];
        r.owners.push_back(spec.name);
        size_t atoms = 0;
        for (Idx atom : spec.atoms)
            if (!std::binary_search(v.props.begin(), v.props.end(), atom)) ++atoms;
        r.atoms.push_back(atoms);
        size_t inits = 0, updates = 0;
        for (const auto& cmd : spec.commands)
            (cmd.kind == CommandKind::Init ? inits : updates)++;
        r.inits.push_back(inits);
        r.updates.push_back(updates);
    }
    r.props = v.props.size();
    return r;
}

} // namespace gamut

#pragma once

// Explicit concurrent game structures with imperfect information: agents,
// per-agent action alphabets, states, a protocol, a deterministic joint
// transition function, per-agent indistinguishability partitions and a
// propositional labeling. Values are immutable once built; every operation
// here is read-only.
//
// All name tables are sorted lexicographically and indices are positions in
// those tables, so iteration order is reproducible for identical inputs.

#include "gamut/error.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace gamut {

using Idx = std::uint32_t;
using Joint = std::vector<Idx>; // one action index per agent, in agent order

struct Icgs {
    std::vector<std::string> agents;
    std::vector<std::vector<std::string>> actions; // [agent] sorted
    std::vector<std::string> states;
    std::vector<std::string> atoms;
    std::vector<Idx> initial; // sorted
    std::vector<std::vector<std::vector<Idx>>> protocol; // [state][agent] sorted
    std::map<std::pair<Idx, Joint>, Idx> transition;
    std::vector<std::vector<Idx>> class_of;              // [agent][state] -> class
    std::vector<std::vector<std::vector<Idx>>> classes;  // [agent][class] sorted states
    std::vector<std::vector<Idx>> labels;                // [state] sorted atoms

    bool operator==(const Icgs&) const = default;

    std::optional<Idx> agent_index(const std::string& name) const { return find(agents, name); }
    std::optional<Idx> state_index(const std::string& name) const { return find(states, name); }
    std::optional<Idx> atom_index(const std::string& name) const { return find(atoms, name); }
    std::optional<Idx> action_index(Idx agent, const std::string& name) const {
        return find(actions[agent], name);
    }

    bool labeled(Idx state, Idx atom) const {
        const auto& l = labels[state];
        return std::find(l.begin(), l.end(), atom) != l.end();
    }

private:
    static std::optional<Idx> find(const std::vector<std::string>& v, const std::string& n) {
        for (Idx i = 0; i < v.size(); ++i)
            if (v[i] == n) return i;
        return std::nullopt;
    }
};

// ── Raw (name-based) form used by loaders and generators ───────────────────

struct RawIcgs {
    std::vector<std::string> agents;
    std::map<std::string, std::vector<std::string>> actions;
    std::vector<std::string> states;
    std::vector<std::string> atoms;
    std::vector<std::string> initial;
    std::map<std::string, std::vector<std::string>> labels;
    std::map<std::string, std::vector<std::vector<std::string>>> indist;
    // (state, joint action names, target)
    std::vector<std::tuple<std::string, std::vector<std::string>, std::string>> trans;
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> protocol;
};

namespace detail {

inline std::vector<std::string> sorted_unique(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

struct UnionFind {
    std::vector<Idx> parent;
    explicit UnionFind(size_t n) : parent(n) {
        for (Idx i = 0; i < n; ++i) parent[i] = i;
    }
    Idx find(Idx x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool merge(Idx a, Idx b) {
        a = find(a); b = find(b);
        if (a == b) return false;
        if (b < a) std::swap(a, b); // keep least index as root
        parent[b] = a;
        return true;
    }
};

} // namespace detail

// Builds an Icgs from raw data. Unknown names and representation-level
// defects throw Error(Input); semantic defects (holes, nonuniform protocol,
// empty initial set) are left for validate_icgs to report. Listed
// indistinguishability blocks are closed into a partition; a warning is
// appended when the closure merged overlapping blocks.
inline Icgs build_icgs(const RawIcgs& raw, std::vector<std::string>* warnings = nullptr) {
    Icgs m;
    m.agents = detail::sorted_unique(raw.agents);
    if (m.agents.empty()) throw Error(ErrorKind::Input, "model declares no agents");
    m.states = detail::sorted_unique(raw.states);
    if (m.states.empty()) throw Error(ErrorKind::Input, "model declares no states");

    m.actions.resize(m.agents.size());
    for (Idx a = 0; a < m.agents.size(); ++a) {
        auto it = raw.actions.find(m.agents[a]);
        if (it == raw.actions.end() || it->second.empty())
            throw Error(ErrorKind::Input, "agent '" + m.agents[a] + "' has no actions");
        m.actions[a] = detail::sorted_unique(it->second);
    }
    for (const auto& [name, _] : raw.actions)
        if (!m.agent_index(name))
            throw Error(ErrorKind::Input, "actions listed for unknown agent '" + name + "'");

    std::vector<std::string> atom_names = raw.atoms;
    for (const auto& [state, atoms] : raw.labels)
        atom_names.insert(atom_names.end(), atoms.begin(), atoms.end());
    m.atoms = detail::sorted_unique(atom_names);

    for (const auto& name : raw.initial) {
        auto s = m.state_index(name);
        if (!s) throw Error(ErrorKind::Input, "unknown initial state '" + name + "'");
        m.initial.push_back(*s);
    }
    std::sort(m.initial.begin(), m.initial.end());
    m.initial.erase(std::unique(m.initial.begin(), m.initial.end()), m.initial.end());

    m.labels.assign(m.states.size(), {});
    for (const auto& [state, atoms] : raw.labels) {
        auto s = m.state_index(state);
        if (!s) throw Error(ErrorKind::Input, "labels for unknown state '" + state + "'");
        for (const auto& atom : atoms) m.labels[*s].push_back(*m.atom_index(atom));
        m.labels[*s] = [](std::vector<Idx> v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            return v;
        }(m.labels[*s]);
    }

    // Indistinguishability: transitive closure of the listed blocks,
    // singletons for unlisted states.
    m.class_of.resize(m.agents.size());
    m.classes.resize(m.agents.size());
    for (const auto& [agent, _] : raw.indist)
        if (!m.agent_index(agent))
            throw Error(ErrorKind::Input, "indist listed for unknown agent '" + agent + "'");
    for (Idx a = 0; a < m.agents.size(); ++a) {
        detail::UnionFind uf(m.states.size());
        std::vector<bool> listed(m.states.size(), false);
        bool merged_across_blocks = false;
        auto it = raw.indist.find(m.agents[a]);
        if (it != raw.indist.end()) {
            for (const auto& block : it->second) {
                for (const auto& name : block) {
                    auto s = m.state_index(name);
                    if (!s)
                        throw Error(ErrorKind::Input,
                                    "indist block names unknown state '" + name + "'");
                    if (listed[*s]) merged_across_blocks = true;
                    listed[*s] = true;
                }
                for (size_t i = 1; i < block.size(); ++i)
                    uf.merge(*m.state_index(block[0]), *m.state_index(block[i]));
            }
        }
        if (merged_across_blocks && warnings)
            warnings->push_back("indist blocks for agent '" + m.agents[a] +
                                "' overlap; closed into a partition");
        std::map<Idx, Idx> root_to_class;
        m.class_of[a].resize(m.states.size());
        for (Idx s = 0; s < m.states.size(); ++s) {
            Idx root = uf.find(s);
            auto [pos, inserted] =
                root_to_class.emplace(root, static_cast<Idx>(m.classes[a].size()));
            if (inserted) m.classes[a].push_back({});
            m.class_of[a][s] = pos->second;
            m.classes[a][pos->second].push_back(s);
        }
    }

    // Protocol: full by default, explicit entries override.
    m.protocol.assign(m.states.size(), {});
    for (Idx s = 0; s < m.states.size(); ++s) {
        m.protocol[s].resize(m.agents.size());
        for (Idx a = 0; a < m.agents.size(); ++a) {
            m.protocol[s][a].resize(m.actions[a].size());
            for (Idx i = 0; i < m.actions[a].size(); ++i) m.protocol[s][a][i] = i;
        }
    }
    for (const auto& [key, acts] : raw.protocol) {
        auto s = m.state_index(key.first);
        if (!s) throw Error(ErrorKind::Input, "protocol for unknown state '" + key.first + "'");
        auto a = m.agent_index(key.second);
        if (!a) throw Error(ErrorKind::Input, "protocol for unknown agent '" + key.second + "'");
        std::vector<Idx> ids;
        for (const auto& act : acts) {
            auto i = m.action_index(*a, act);
            if (!i)
                throw Error(ErrorKind::Input, "protocol names unknown action '" + act +
                                                  "' of agent '" + key.second + "'");
            ids.push_back(*i);
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        m.protocol[*s][*a] = std::move(ids);
    }

    for (const auto& [state, joint, target] : raw.trans) {
        auto s = m.state_index(state);
        if (!s) throw Error(ErrorKind::Input, "transition from unknown state '" + state + "'");
        auto t = m.state_index(target);
        if (!t) throw Error(ErrorKind::Input, "transition to unknown state '" + target + "'");
        if (joint.size() != m.agents.size())
            throw Error(ErrorKind::Input, "joint action at state '" + state + "' lists " +
                                              std::to_string(joint.size()) + " actions for " +
                                              std::to_string(m.agents.size()) + " agents");
        Joint j;
        for (Idx a = 0; a < m.agents.size(); ++a) {
            auto i = m.action_index(a, joint[a]);
            if (!i)
                throw Error(ErrorKind::Input, "unknown action '" + joint[a] + "' of agent '" +
                                                  m.agents[a] + "' at state '" + state + "'");
            j.push_back(*i);
        }
        auto key = std::make_pair(*s, std::move(j));
        auto it = m.transition.find(key);
        if (it != m.transition.end() && it->second != *t)
            throw Error(ErrorKind::Input,
                        "conflicting transitions from state '" + state + "'");
        m.transition.emplace(std::move(key), *t);
    }
    return m;
}

// ── Validation ──────────────────────────────────────────────────────────────

struct Violation {
    std::string code;    // stable identifier, e.g. "transition-hole"
    std::string message; // names the offending location
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool clean() const { return violations.empty(); }
};

// Enumerates the protocol-allowed joint actions at s, lexicographically.
inline std::vector<Joint> allowed_joints(const Icgs& m, Idx s) {
    std::vector<Joint> out;
    for (Idx a = 0; a < m.agents.size(); ++a)
        if (m.protocol[s][a].empty()) return out;
    Joint picks(m.agents.size(), 0);
    for (;;) {
        Joint j(m.agents.size());
        for (Idx a = 0; a < m.agents.size(); ++a) j[a] = m.protocol[s][a][picks[a]];
        out.push_back(std::move(j));
        Idx a = static_cast<Idx>(m.agents.size());
        while (a > 0) {
            --a;
            if (++picks[a] < m.protocol[s][a].size()) break;
            picks[a] = 0;
            if (a == 0) return out;
        }
    }
}

inline std::string joint_to_string(const Icgs& m, const Joint& j) {
    std::string out = "(";
    for (Idx a = 0; a < j.size(); ++a) {
        if (a) out += ",";
        out += m.actions[a][j[a]];
    }
    return out + ")";
}

inline ValidationReport validate_icgs(const Icgs& m) {
    ValidationReport r;
    auto add = [&](std::string code, std::string msg) {
        r.violations.push_back({std::move(code), std::move(msg)});
    };

    if (m.initial.empty()) add("initial-empty", "no initial states declared");

    for (Idx s = 0; s < m.states.size(); ++s)
        for (Idx a = 0; a < m.agents.size(); ++a)
            if (m.protocol[s][a].empty())
                add("protocol-empty", "agent '" + m.agents[a] + "' has no allowed action at '" +
                                          m.states[s] + "'");

    // Totality exactly on protocol-allowed joints.
    for (Idx s = 0; s < m.states.size(); ++s)
        for (const auto& j : allowed_joints(m, s))
            if (!m.transition.count({s, j}))
                add("transition-hole",
                    "no transition from '" + m.states[s] + "' under " + joint_to_string(m, j));
    for (const auto& [key, target] : m.transition) {
        const auto& [s, j] = key;
        bool allowed = true;
        for (Idx a = 0; a < m.agents.size() && allowed; ++a) {
            const auto& p = m.protocol[s][a];
            allowed = std::find(p.begin(), p.end(), j[a]) != p.end();
        }
        if (!allowed)
            add("transition-extraneous", "transition from '" + m.states[s] + "' under " +
                                             joint_to_string(m, j) +
                                             " is outside the protocol");
        (void)target;
    }

    // Protocol uniformity across indistinguishability classes.
    for (Idx a = 0; a < m.agents.size(); ++a)
        for (const auto& cls : m.classes[a])
            for (size_t i = 1; i < cls.size(); ++i)
                if (m.protocol[cls[i]][a] != m.protocol[cls[0]][a])
                    add("protocol-nonuniform",
                        "agent '" + m.agents[a] + "' has different protocols at '" +
                            m.states[cls[0]] + "' and '" + m.states[cls[i]] +
                            "' in one indistinguishability class");

    return r;
}

// ── Elementary queries ──────────────────────────────────────────────────────

inline std::vector<Idx> equivalence_class(const Icgs& m, Idx agent, Idx state) {
    if (agent >= m.agents.size()) throw Error(ErrorKind::Input, "unknown agent index");
    if (state >= m.states.size()) throw Error(ErrorKind::Input, "unknown state index");
    return m.classes[agent][m.class_of[agent][state]];
}

inline Idx successor(const Icgs& m, Idx state, const Joint& joint) {
    if (state >= m.states.size()) throw Error(ErrorKind::Input, "unknown state index");
    if (joint.size() != m.agents.size())
        throw Error(ErrorKind::Input, "joint action arity mismatch");
    for (Idx a = 0; a < m.agents.size(); ++a) {
        const auto& p = m.protocol[state][a];
        if (std::find(p.begin(), p.end(), joint[a]) == p.end())
            throw Error(ErrorKind::Protocol,
                        "action '" + m.actions[a][joint[a]] + "' of agent '" + m.agents[a] +
                            "' is not allowed at state '" + m.states[state] + "'");
    }
    auto it = m.transition.find({state, joint});
    if (it == m.transition.end())
        throw Error(ErrorKind::Input, "transition undefined at state '" + m.states[state] +
                                          "' under " + joint_to_string(m, joint));
    return it->second;
}

} // namespace gamut

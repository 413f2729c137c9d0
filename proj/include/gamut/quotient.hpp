#pragma once

// Structural fidelity of a compiled structure: contracting each two-tick
// round of the unfolded reduction (forward tick, then action-and-move tick)
// must give back the reachable part of the source transition graph, and the
// observation classes at the decision states must reproduce the source
// indistinguishability partitions.
//
// Macro states are the reachable global states with every turn atom down
// (entry states and post-move states); decision states are those with every
// turn atom up. The state atoms name the source state; the action atom an
// agent's fired command raises names its source action.

#include "gamut/model.hpp"
#include "gamut/reduction.hpp"
#include "gamut/semantics.hpp"

#include <map>
#include <set>
#include <string>

namespace gamut {

struct QuotientCheck {
    bool isomorphic = false;
    bool observations_match = false;
    std::string detail; // first failure, empty when both hold
    bool ok() const { return isomorphic && observations_match; }
};

namespace detail {

// Reachable fragment of m: states and its transition entries.
inline void reachable_graph(const Icgs& m, std::set<Idx>& states,
                            std::map<std::pair<Idx, Joint>, Idx>& edges) {
    std::vector<Idx> work(m.initial.begin(), m.initial.end());
    states.insert(m.initial.begin(), m.initial.end());
    while (!work.empty()) {
        Idx s = work.back();
        work.pop_back();
        for (const auto& j : allowed_joints(m, s)) {
            Idx t = m.transition.at({s, j});
            edges[{s, j}] = t;
            if (states.insert(t).second) work.push_back(t);
        }
    }
}

} // namespace detail

inline QuotientCheck macro_quotient_check(const Icgs& m, const Vcgs& v, const Unfolded& u) {
    QuotientCheck qc;
    auto fail = [&](std::string why) {
        qc.detail = std::move(why);
        return qc;
    };

    // Atom roles by name.
    std::vector<Idx> turn_atoms;
    std::map<Idx, Idx> state_of_atom; // vcgs atom -> m state
    for (Idx atom = 0; atom < v.atom_names.size(); ++atom) {
        const std::string& n = v.atom_names[atom];
        if (n.rfind("turn.", 0) == 0) turn_atoms.push_back(atom);
        if (n.rfind("st.", 0) == 0) {
            auto s = m.state_index(n.substr(3));
            if (!s) return fail("state atom '" + n + "' names no source state");
            state_of_atom[atom] = *s;
        }
    }
    // Action atom -> (m agent, m action), resolved per agent prefix.
    std::map<Idx, std::pair<Idx, Idx>> action_of_atom;
    for (Idx atom = 0; atom < v.atom_names.size(); ++atom) {
        const std::string& n = v.atom_names[atom];
        if (n.rfind("act.", 0) != 0) continue;
        for (Idx a = 0; a < m.agents.size(); ++a) {
            std::string prefix = "act." + m.agents[a] + ".";
            if (n.rfind(prefix, 0) == 0) {
                auto act = m.action_index(a, n.substr(prefix.size()));
                if (act) action_of_atom[atom] = {a, *act};
            }
        }
    }

    auto phase = [&](const GlobalState& g) {
        int up = 0;
        for (Idx t : turn_atoms) up += atom_value(g, t) ? 1 : 0;
        return up == 0 ? 0 : up == static_cast<int>(turn_atoms.size()) ? 1 : 2;
    };
    auto source_state = [&](const GlobalState& g) -> std::optional<Idx> {
        std::optional<Idx> found;
        for (const auto& [atom, s] : state_of_atom)
            if (atom_value(g, atom)) {
                if (found) return std::nullopt; // two state atoms up
                found = s;
            }
        return found;
    };

    // Classify reachable global states.
    std::vector<int> kind(u.globals.size());
    for (Idx i = 0; i < u.globals.size(); ++i) {
        kind[i] = phase(u.globals[i]);
        if (kind[i] == 2)
            return fail("state " + u.icgs.states[i] + " has a mixed turn-atom phase");
        if (!source_state(u.globals[i]))
            return fail("state " + u.icgs.states[i] + " does not encode one source state");
    }

    // Macro edges: one forced forward tick, then one tick per joint action.
    std::map<std::pair<Idx, Joint>, Idx> macro_edges;
    std::map<Idx, Idx> decision_of; // decision unfolded state -> m state
    // Outgoing unfolded edges per state.
    std::vector<std::vector<std::pair<Joint, Idx>>> out(u.icgs.states.size());
    for (const auto& [key, to] : u.icgs.transition) out[key.first].emplace_back(key.second, to);

    for (Idx i = 0; i < u.globals.size(); ++i) {
        if (kind[i] != 0) continue;
        Idx src = *source_state(u.globals[i]);
        if (out[i].size() != 1)
            return fail("macro state " + u.icgs.states[i] + " is not forced forward");
        Idx mid = out[i][0].second;
        if (kind[mid] != 1)
            return fail("forward tick from " + u.icgs.states[i] + " misses the decision phase");
        if (*source_state(u.globals[mid]) != src)
            return fail("forward tick changed the encoded state");
        decision_of[mid] = src;
        for (const auto& [joint, target] : out[mid]) {
            if (kind[target] != 0)
                return fail("move tick from " + u.icgs.states[mid] + " misses the macro phase");
            // Decode the joint action from the fired commands' effects.
            Joint mj(m.agents.size(), 0);
            std::vector<bool> seen(m.agents.size(), false);
            for (Idx ia = 0; ia < u.icgs.agents.size(); ++ia) {
                Idx va = u.vcgs_agent_of[ia];
                if (va == v.env()) continue;
                Idx cmd = u.command_of_action[ia][joint[ia]];
                if (cmd == kSkip)
                    return fail("an agent skipped during the decision tick");
                for (const auto& as : v.agents[va].commands[cmd].sets) {
                    auto it = action_of_atom.find(as.atom);
                    if (it != action_of_atom.end() && as.value) {
                        mj[it->second.first] = it->second.second;
                        seen[it->second.first] = true;
                    }
                }
            }
            for (bool b : seen)
                if (!b) return fail("a decision command raised no action atom");
            auto [it, inserted] =
                macro_edges.emplace(std::make_pair(src, mj), *source_state(u.globals[target]));
            if (!inserted && it->second != *source_state(u.globals[target]))
                return fail("conflicting macro edges for one joint action");
        }
    }

    std::set<Idx> reach_states;
    std::map<std::pair<Idx, Joint>, Idx> reach_edges;
    detail::reachable_graph(m, reach_states, reach_edges);

    std::set<Idx> macro_states;
    for (Idx i = 0; i < u.globals.size(); ++i)
        if (kind[i] == 0) macro_states.insert(*source_state(u.globals[i]));
    // Initial correspondence.
    for (Idx i : u.icgs.initial)
        if (kind[i] != 0) return fail("an entry state is not in the macro phase");

    if (macro_states != reach_states) {
        qc.detail = "macro states do not match the reachable source states";
        return qc;
    }
    if (macro_edges != reach_edges) {
        qc.detail = "macro edges do not match the reachable source transitions";
        return qc;
    }
    qc.isomorphic = true;

    // Observation classes on decision states, projected to source states,
    // must be exactly the source partitions (restricted to reachable states).
    for (Idx a = 0; a < m.agents.size(); ++a) {
        auto ia = u.icgs.agent_index(m.agents[a]);
        if (!ia) return fail("agent missing from the unfolding");
        std::map<Idx, Idx> class_of_source; // m state -> unfolded class
        for (const auto& [mid, src] : decision_of) {
            Idx cls = u.icgs.class_of[*ia][mid];
            auto [it, inserted] = class_of_source.emplace(src, cls);
            if (!inserted && it->second != cls) {
                qc.detail = "two decision states of one source state are distinguishable";
                return qc;
            }
        }
        for (const auto& [s1, c1] : class_of_source)
            for (const auto& [s2, c2] : class_of_source) {
                bool same_obs = c1 == c2;
                bool same_src = m.class_of[a][s1] == m.class_of[a][s2];
                if (same_obs != same_src) {
                    qc.detail = "observation classes of agent '" + m.agents[a] +
                                "' do not match the source partition at '" + m.states[s1] +
                                "'/'" + m.states[s2] + "'";
                    return qc;
                }
            }
    }
    qc.observations_match = true;
    return qc;
}

} // namespace gamut

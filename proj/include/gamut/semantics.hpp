#pragma once

// Execution semantics for guarded-command structures and the unfolding into
// an explicit game structure.
//
// A tick has two passes: every non-environment agent fires one enabled
// update command (or skips when none is enabled) simultaneously against the
// pre-state; the environment then fires against the intermediate state, so
// it reads the action atoms the agents set in the same tick. Init runs the
// passes in the opposite order: the environment establishes state and class
// atoms first, then the agents' init guards are evaluated.
//
// Frame rule: atoms and visibility flags not assigned by a fired command
// keep their values.

#include "gamut/model.hpp"
#include "gamut/vcgs.hpp"

#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace gamut {

// ── Global states ───────────────────────────────────────────────────────────

struct GlobalState {
    std::vector<std::uint64_t> val; // atom bits
    std::vector<std::uint64_t> vis; // bit (atom * n_agents + agent)

    bool operator==(const GlobalState&) const = default;
    bool operator<(const GlobalState& o) const {
        if (val != o.val) return val < o.val;
        return vis < o.vis;
    }
};

struct GlobalStateHash {
    size_t operator()(const GlobalState& g) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (auto w : g.val) { h ^= w; h *= 1099511628211ull; }
        for (auto w : g.vis) { h ^= w; h *= 1099511628211ull; }
        return static_cast<size_t>(h);
    }
};

namespace detail {

inline bool get_bit(const std::vector<std::uint64_t>& bits, size_t i) {
    return (bits[i / 64] >> (i % 64)) & 1;
}
inline void set_bit(std::vector<std::uint64_t>& bits, size_t i, bool v) {
    if (v)
        bits[i / 64] |= (1ull << (i % 64));
    else
        bits[i / 64] &= ~(1ull << (i % 64));
}

} // namespace detail

inline bool atom_value(const GlobalState& g, Idx atom) { return detail::get_bit(g.val, atom); }

inline bool visible(const Vcgs& v, const GlobalState& g, Idx atom, Idx agent) {
    return detail::get_bit(g.vis, static_cast<size_t>(atom) * v.agents.size() + agent);
}

// All atoms false, all cross-visibility false, owners see their own atoms.
inline GlobalState base_state(const Vcgs& v) {
    GlobalState g;
    g.val.assign((v.atom_names.size() + 63) / 64, 0);
    g.vis.assign((v.atom_names.size() * v.agents.size() + 63) / 64, 0);
    auto owner = v.owners();
    for (Idx atom = 0; atom < v.atom_names.size(); ++atom)
        if (owner[atom] != Vcgs::kNoOwner)
            detail::set_bit(g.vis, static_cast<size_t>(atom) * v.agents.size() + owner[atom],
                            true);
    return g;
}

inline bool eval_guard(const GuardPtr& g, const GlobalState& s) {
    switch (g->op) {
    case Guard::Op::Atom: return atom_value(s, g->atom);
    case Guard::Op::Const: return g->value;
    case Guard::Op::Not: return !eval_guard(g->lhs, s);
    case Guard::Op::And: return eval_guard(g->lhs, s) && eval_guard(g->rhs, s);
    case Guard::Op::Or: return eval_guard(g->lhs, s) || eval_guard(g->rhs, s);
    }
    return false;
}

inline void apply_command(const Vcgs& v, const Command& cmd, GlobalState& g) {
    for (const auto& as : cmd.sets) detail::set_bit(g.val, as.atom, as.value);
    for (const auto& va : cmd.vis)
        detail::set_bit(g.vis, static_cast<size_t>(va.atom) * v.agents.size() + va.observer,
                        va.value);
}

// Update commands of `agent` whose guard holds at g, in declaration order.
inline std::vector<Idx> enabled_commands(const Vcgs& v, const GlobalState& g, Idx agent) {
    std::vector<Idx> out;
    const auto& cmds = v.agents[agent].commands;
    for (Idx c = 0; c < cmds.size(); ++c)
        if (cmds[c].kind == CommandKind::Update && eval_guard(cmds[c].guard, g))
            out.push_back(c);
    return out;
}

// ── Init phase ──────────────────────────────────────────────────────────────

namespace detail {

// Enabled init commands grouped into clusters of overlapping assignment
// targets: commands in one cluster are alternatives (choose one), distinct
// clusters fire together. The paper-style outputs put the visibility
// command and the per-initial-state choice commands in different clusters.
inline std::vector<std::vector<Idx>> init_clusters(const Vcgs& v, Idx agent,
                                                   const GlobalState& g) {
    const auto& cmds = v.agents[agent].commands;
    std::vector<Idx> enabled;
    for (Idx c = 0; c < cmds.size(); ++c)
        if (cmds[c].kind == CommandKind::Init && eval_guard(cmds[c].guard, g))
            enabled.push_back(c);
    // Union-find over enabled commands keyed by assigned targets.
    std::vector<Idx> parent(enabled.size());
    for (Idx i = 0; i < enabled.size(); ++i) parent[i] = i;
    auto find = [&](Idx x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto merge = [&](Idx a, Idx b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };
    std::map<std::uint64_t, Idx> target_first; // target key -> first command
    for (Idx i = 0; i < enabled.size(); ++i) {
        const auto& cmd = cmds[enabled[i]];
        auto touch = [&](std::uint64_t key) {
            auto [it, inserted] = target_first.emplace(key, i);
            if (!inserted) merge(it->second, i);
        };
        for (const auto& as : cmd.sets) touch(as.atom);
        for (const auto& va : cmd.vis)
            touch((1ull << 32) | (static_cast<std::uint64_t>(va.atom) << 8) | va.observer);
    }
    std::map<Idx, std::vector<Idx>> groups;
    for (Idx i = 0; i < enabled.size(); ++i) groups[find(i)].push_back(enabled[i]);
    std::vector<std::vector<Idx>> out;
    for (auto& [_, cluster] : groups) out.push_back(std::move(cluster));
    return out;
}

// All states reachable by firing one command per cluster.
inline std::vector<GlobalState> init_selections(const Vcgs& v, Idx agent,
                                                const GlobalState& g) {
    auto clusters = init_clusters(v, agent, g);
    std::vector<GlobalState> states{g};
    for (const auto& cluster : clusters) {
        std::vector<GlobalState> next;
        for (const auto& s : states)
            for (Idx c : cluster) {
                GlobalState n = s;
                apply_command(v, v.agents[agent].commands[c], n);
                next.push_back(std::move(n));
            }
        states = std::move(next);
    }
    return states;
}

} // namespace detail

// Environment first, then all other agents against the post-environment
// state. Deduplicated and sorted.
inline std::vector<GlobalState> initial_states(const Vcgs& v) {
    std::vector<GlobalState> pool = detail::init_selections(v, v.env(), base_state(v));
    for (Idx a = 0; a < v.env(); ++a) {
        std::vector<GlobalState> next;
        for (const auto& g : pool)
            for (auto& s : detail::init_selections(v, a, g)) next.push_back(std::move(s));
        pool = std::move(next);
    }
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    return pool;
}

// ── Update ticks ────────────────────────────────────────────────────────────

constexpr Idx kSkip = static_cast<Idx>(-1);

// One synchronous tick. choices[a] is an index into agent a's command list
// or kSkip; non-environment choices must be enabled at g, the environment
// choice must be enabled at the intermediate state after agent effects.
inline GlobalState step(const Vcgs& v, const GlobalState& g, const std::vector<Idx>& choices) {
    if (choices.size() != v.agents.size())
        throw Error(ErrorKind::Input, "choice vector arity mismatch");
    GlobalState mid = g;
    for (Idx a = 0; a < v.env(); ++a) {
        auto enabled = enabled_commands(v, g, a);
        if (choices[a] == kSkip) {
            if (!enabled.empty())
                throw Error(ErrorKind::Input, "agent '" + v.agents[a].name +
                                                  "' must fire an enabled command");
            continue;
        }
        if (std::find(enabled.begin(), enabled.end(), choices[a]) == enabled.end())
            throw Error(ErrorKind::Input, "agent '" + v.agents[a].name +
                                              "' chose a command that is not enabled");
        apply_command(v, v.agents[a].commands[choices[a]], mid);
    }
    auto env_enabled = enabled_commands(v, mid, v.env());
    Idx env_choice = choices[v.env()];
    if (env_choice == kSkip) {
        if (!env_enabled.empty())
            throw Error(ErrorKind::Input, "the environment must fire an enabled command");
        return mid;
    }
    if (std::find(env_enabled.begin(), env_enabled.end(), env_choice) == env_enabled.end())
        throw Error(ErrorKind::Input, "environment chose a command that is not enabled");
    apply_command(v, v.agents[v.env()].commands[env_choice], mid);
    return mid;
}

struct SuccEdge {
    std::vector<Idx> choices; // per agent, kSkip allowed; env entry filled in
    GlobalState next;
};

// Every successor of g: the product of the agents' enabled choices, each
// followed by the environment's response. The environment must be
// deterministic relative to the intermediate state.
inline std::vector<SuccEdge> successors(const Vcgs& v, const GlobalState& g) {
    std::vector<std::vector<Idx>> options(v.env());
    for (Idx a = 0; a < v.env(); ++a) {
        options[a] = enabled_commands(v, g, a);
        if (options[a].empty()) options[a] = {kSkip};
    }
    std::vector<SuccEdge> out;
    std::vector<Idx> picks(v.env(), 0);
    for (;;) {
        SuccEdge e;
        e.choices.resize(v.agents.size(), kSkip);
        GlobalState mid = g;
        for (Idx a = 0; a < v.env(); ++a) {
            Idx c = options[a][picks[a]];
            e.choices[a] = c;
            if (c != kSkip) apply_command(v, v.agents[a].commands[c], mid);
        }
        auto env_enabled = enabled_commands(v, mid, v.env());
        if (env_enabled.size() > 1)
            throw Error(ErrorKind::Input,
                        "nondeterministic environment: " + std::to_string(env_enabled.size()) +
                            " commands enabled in one tick");
        if (!env_enabled.empty()) {
            e.choices[v.env()] = env_enabled[0];
            apply_command(v, v.agents[v.env()].commands[env_enabled[0]], mid);
        }
        e.next = std::move(mid);
        out.push_back(std::move(e));

        Idx a = v.env();
        for (;;) {
            if (a == 0) return out;
            --a;
            if (++picks[a] < options[a].size()) break;
            picks[a] = 0;
        }
    }
}

// ── Observations ────────────────────────────────────────────────────────────

// What an agent can see: the set of visible atoms together with their
// values. Two states with different visible-atom sets are distinguishable
// even if the common visible values agree.
struct ObservationKey {
    std::vector<std::uint64_t> mask;
    std::vector<std::uint64_t> values;
    bool operator==(const ObservationKey&) const = default;
    bool operator<(const ObservationKey& o) const {
        if (mask != o.mask) return mask < o.mask;
        return values < o.values;
    }
};

inline ObservationKey observation(const Vcgs& v, const GlobalState& g, Idx agent) {
    ObservationKey key;
    key.mask.assign(g.val.size(), 0);
    for (Idx atom = 0; atom < v.atom_names.size(); ++atom)
        if (visible(v, g, atom, agent)) detail::set_bit(key.mask, atom, true);
    key.values.resize(g.val.size());
    for (size_t w = 0; w < g.val.size(); ++w) key.values[w] = g.val[w] & key.mask[w];
    return key;
}

// ── Unfolding ───────────────────────────────────────────────────────────────

struct Unfolded {
    Icgs icgs;
    std::vector<GlobalState> globals;       // per state index
    std::vector<Idx> vcgs_agent_of;         // icgs agent -> vcgs agent index
    std::vector<std::vector<Idx>> command_of_action; // [icgs agent][action] -> command or kSkip
};

// Breadth-first reachability from the initial states. States are named in
// visit order with zero-padded numerals so the explicit structure's sorted
// state table preserves it. Aborts past `bound` reachable states.
inline Unfolded unfold(const Vcgs& v, size_t bound = 100000) {
    std::vector<GlobalState> states = initial_states(v);
    size_t n_initial = states.size();
    std::unordered_map<GlobalState, Idx, GlobalStateHash> index;
    for (Idx i = 0; i < states.size(); ++i) index.emplace(states[i], i);
    if (states.size() > bound)
        throw Error(ErrorKind::Resource,
                    "unfold exceeded the state bound of " + std::to_string(bound));

    struct Edge {
        Idx from;
        std::vector<Idx> choices;
        Idx to;
    };
    std::vector<Edge> edges;
    std::deque<Idx> work;
    for (Idx i = 0; i < states.size(); ++i) work.push_back(i);
    while (!work.empty()) {
        Idx cur = work.front();
        work.pop_front();
        for (auto& e : successors(v, states[cur])) {
            auto [it, inserted] = index.emplace(e.next, static_cast<Idx>(states.size()));
            if (inserted) {
                states.push_back(e.next);
                if (states.size() > bound)
                    throw Error(ErrorKind::Resource,
                                "unfold exceeded the state bound of " + std::to_string(bound));
                work.push_back(it->second);
            }
            edges.push_back({cur, std::move(e.choices), it->second});
        }
    }

    // Names: zero padded so lexicographic order equals visit order.
    size_t width = std::to_string(states.size() == 0 ? 1 : states.size() - 1).size();
    auto state_name = [&](Idx i) {
        std::string num = std::to_string(i);
        return "g" + std::string(width - num.size(), '0') + num;
    };

    Unfolded u;
    Icgs& m = u.icgs;
    u.globals = states;

    // Agents sorted by name; remember the vcgs index of each.
    std::vector<std::pair<std::string, Idx>> order;
    for (Idx a = 0; a < v.agents.size(); ++a) order.emplace_back(v.agents[a].name, a);
    std::sort(order.begin(), order.end());
    for (auto& [name, va] : order) {
        m.agents.push_back(name);
        u.vcgs_agent_of.push_back(va);
    }

    // Action alphabets: command labels (zero-padded index) plus skip for
    // regular agents, a single response action for the environment.
    u.command_of_action.resize(m.agents.size());
    m.actions.resize(m.agents.size());
    for (Idx ia = 0; ia < m.agents.size(); ++ia) {
        Idx va = u.vcgs_agent_of[ia];
        if (va == v.env()) {
            m.actions[ia] = {"auto"};
            u.command_of_action[ia] = {kSkip};
            continue;
        }
        const auto& cmds = v.agents[va].commands;
        size_t cw = std::to_string(cmds.empty() ? 1 : cmds.size()).size();
        for (Idx c = 0; c < cmds.size(); ++c) {
            if (cmds[c].kind != CommandKind::Update) continue;
            std::string num = std::to_string(c);
            m.actions[ia].push_back("c" + std::string(cw - num.size(), '0') + num);
            u.command_of_action[ia].push_back(c);
        }
        m.actions[ia].push_back("skip");
        u.command_of_action[ia].push_back(kSkip);
    }

    for (Idx i = 0; i < states.size(); ++i) m.states.push_back(state_name(i));
    for (Idx i = 0; i < n_initial; ++i) m.initial.push_back(i);

    // Labels: proposition atoms true in the valuation.
    for (Idx p : v.props) m.atoms.push_back(v.atom_names[p]);
    std::sort(m.atoms.begin(), m.atoms.end());
    m.labels.resize(states.size());
    for (Idx i = 0; i < states.size(); ++i)
        for (Idx p : v.props)
            if (atom_value(states[i], p))
                m.labels[i].push_back(*m.atom_index(v.atom_names[p]));
    for (auto& l : m.labels) std::sort(l.begin(), l.end());

    // Protocol: enabled commands, or skip; the environment always responds.
    auto action_of_command = [&](Idx ia, Idx cmd) -> Idx {
        const auto& table = u.command_of_action[ia];
        for (Idx k = 0; k < table.size(); ++k)
            if (table[k] == cmd) return k;
        throw Error(ErrorKind::Input, "internal: untracked command");
    };
    m.protocol.assign(states.size(), {});
    for (Idx i = 0; i < states.size(); ++i) {
        m.protocol[i].resize(m.agents.size());
        for (Idx ia = 0; ia < m.agents.size(); ++ia) {
            Idx va = u.vcgs_agent_of[ia];
            if (va == v.env()) {
                m.protocol[i][ia] = {0};
                continue;
            }
            auto enabled = enabled_commands(v, states[i], va);
            std::vector<Idx> acts;
            if (enabled.empty())
                acts.push_back(action_of_command(ia, kSkip));
            else
                for (Idx c : enabled) acts.push_back(action_of_command(ia, c));
            std::sort(acts.begin(), acts.end());
            m.protocol[i][ia] = std::move(acts);
        }
    }

    for (const auto& e : edges) {
        Joint j(m.agents.size());
        for (Idx ia = 0; ia < m.agents.size(); ++ia) {
            Idx va = u.vcgs_agent_of[ia];
            j[ia] = va == v.env() ? 0 : action_of_command(ia, e.choices[va]);
        }
        m.transition[{e.from, j}] = e.to;
    }

    // Indistinguishability from observation equality.
    m.class_of.resize(m.agents.size());
    m.classes.resize(m.agents.size());
    for (Idx ia = 0; ia < m.agents.size(); ++ia) {
        Idx va = u.vcgs_agent_of[ia];
        std::map<ObservationKey, Idx> key_class;
        m.class_of[ia].resize(states.size());
        for (Idx i = 0; i < states.size(); ++i) {
            auto key = observation(v, states[i], va);
            auto it = key_class.find(key);
            if (it == key_class.end()) {
                it = key_class.emplace(std::move(key), static_cast<Idx>(m.classes[ia].size()))
                         .first;
                m.classes[ia].push_back({});
            }
            m.class_of[ia][i] = it->second;
            m.classes[ia][it->second].push_back(i);
        }
        // Renumber classes by least member so ordering is positional.
        std::vector<Idx> by_least(m.classes[ia].size());
        for (Idx c = 0; c < m.classes[ia].size(); ++c) by_least[c] = c;
        std::sort(by_least.begin(), by_least.end(),
                  [&](Idx x, Idx y) { return m.classes[ia][x][0] < m.classes[ia][y][0]; });
        std::vector<std::vector<Idx>> reordered;
        std::vector<Idx> new_of(m.classes[ia].size());
        for (Idx k = 0; k < by_least.size(); ++k) {
            new_of[by_least[k]] = k;
            reordered.push_back(std::move(m.classes[ia][by_least[k]]));
        }
        m.classes[ia] = std::move(reordered);
        for (auto& c : m.class_of[ia]) c = new_of[c];
    }

    return u;
}

} // namespace gamut

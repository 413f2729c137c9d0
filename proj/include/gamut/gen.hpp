#pragma once

// Seeded random instances: explicit game structures with full protocols,
// random total transition tables, random partitions and random labels over
// a two-atom vocabulary, plus a formula sampler aware of a model's agents.
// All draws come from raw mt19937_64 output so files are reproducible
// across platforms.

#include "gamut/formula.hpp"
#include "gamut/model.hpp"

#include <random>
#include <string>
#include <vector>

namespace gamut {

struct GenParams {
    std::uint64_t seed = 1;
    int states = 3;
    int agents = 1;
    int actions = 2;
    int max_classes = 2; // per-agent partition blocks; 0 means identity
};

inline Icgs gen_model(const GenParams& gp) {
    if (gp.states < 1 || gp.agents < 1 || gp.agents > 4 || gp.actions < 1)
        throw Error(ErrorKind::Input, "generator sizes out of range");
    std::mt19937_64 rng(gp.seed);
    auto pick = [&](size_t n) { return static_cast<size_t>(rng() % n); };

    RawIcgs raw;
    static const char* kAgents[] = {"a", "b", "c", "d"};
    for (int a = 0; a < gp.agents; ++a) raw.agents.push_back(kAgents[a]);
    for (int a = 0; a < gp.agents; ++a) {
        auto& acts = raw.actions[kAgents[a]];
        for (int i = 0; i < gp.actions; ++i) acts.push_back("x" + std::to_string(i));
    }
    for (int s = 0; s < gp.states; ++s) raw.states.push_back("s" + std::to_string(s));
    raw.atoms = {"p", "q"};
    raw.initial = {"s0"};

    // Random total transition table over the full protocol.
    std::vector<std::vector<std::string>> joints{{}};
    for (int a = 0; a < gp.agents; ++a) {
        std::vector<std::vector<std::string>> next;
        for (const auto& j : joints)
            for (int i = 0; i < gp.actions; ++i) {
                auto ext = j;
                ext.push_back("x" + std::to_string(i));
                next.push_back(std::move(ext));
            }
        joints = std::move(next);
    }
    for (const auto& s : raw.states)
        for (const auto& j : joints)
            raw.trans.emplace_back(s, j, raw.states[pick(raw.states.size())]);

    // Random partitions: assign each state one of at most max_classes blocks.
    for (int a = 0; a < gp.agents; ++a) {
        int blocks = gp.max_classes <= 0 ? gp.states : std::min(gp.states, gp.max_classes);
        std::vector<std::vector<std::string>> partition(blocks);
        for (size_t s = 0; s < raw.states.size(); ++s) {
            size_t block = gp.max_classes <= 0 ? s : pick(blocks);
            partition[block].push_back(raw.states[s]);
        }
        auto& out = raw.indist[kAgents[a]];
        for (auto& block : partition)
            if (!block.empty()) out.push_back(std::move(block));
    }

    for (const auto& s : raw.states) {
        std::vector<std::string> labels;
        if (pick(2)) labels.push_back("p");
        if (pick(2)) labels.push_back("q");
        if (!labels.empty()) raw.labels[s] = std::move(labels);
    }
    return build_icgs(raw);
}

// ── Formula sampling ────────────────────────────────────────────────────────

struct SamplerParams {
    std::uint64_t seed = 1;
    Dialect dialect = Dialect::Atl;
    int temporal_depth = 2;
    bool coalition_positive = false;  // restrict negation to atoms
    bool allow_nested_next = true;    // same-coalition X chains
    bool allow_empty_coalition = true;
};

class FormulaSampler {
public:
    FormulaSampler(const Icgs& m, const SamplerParams& sp)
        : rng_(sp.seed), sp_(sp), agents_(m.agents) {}
    FormulaSampler(std::vector<std::string> agents, const SamplerParams& sp)
        : rng_(sp.seed), sp_(sp), agents_(std::move(agents)) {}

    FormulaPtr sample() { return state(sp_.temporal_depth); }

    // A same-coalition double-next wrapped around a sampled operand.
    FormulaPtr sample_nested_next() {
        auto coal = coalition();
        FormulaPtr body = state(std::max(0, sp_.temporal_depth - 2));
        return f_coalition(coal, f_x(f_coalition(coal, f_x(body))));
    }

private:
    size_t pick(size_t n) { return static_cast<size_t>(rng_() % n); }

    std::vector<std::string> coalition() {
        std::vector<std::string> out;
        if (sp_.allow_empty_coalition && pick(5) == 0) return out;
        size_t count = 1 + pick(agents_.size());
        while (out.size() < count) {
            const auto& name = agents_[pick(agents_.size())];
            if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
        }
        return out;
    }

    FormulaPtr atom() { return f_atom(pick(2) ? "p" : "q"); }

    FormulaPtr state(int depth) {
        size_t r = pick(depth > 0 ? 10 : 5);
        switch (r) {
        case 0: return f_const(pick(2) == 0);
        case 1:
        case 2: return atom();
        case 3: return sp_.coalition_positive ? f_not(atom()) : f_not(state(depth));
        case 4:
            return pick(2) ? f_and(state(depth), state(depth))
                           : f_or(state(depth), state(depth));
        default: break;
        }
        if (sp_.dialect == Dialect::Atl) return coalition_atl(depth);
        return f_coalition(coalition(), path(depth - 1));
    }

    FormulaPtr coalition_atl(int depth) {
        auto coal = coalition();
        switch (pick(sp_.allow_nested_next && depth >= 2 ? 4 : 3)) {
        case 0: return f_coalition(coal, f_x(state(depth - 1)));
        case 1: return f_coalition(coal, f_g(state(depth - 1)));
        case 2: return f_coalition(coal, f_u(state(depth - 1), state(depth - 1)));
        default:
            return f_coalition(coal,
                               f_x(f_coalition(coal, f_x(state(depth - 2)))));
        }
    }

    // ATL* path layer; leaves are state formulas one level down.
    FormulaPtr path(int depth) {
        if (depth <= 0) return state(0);
        switch (pick(6)) {
        case 0: return f_x(path(depth - 1));
        case 1: return f_g(path(depth - 1));
        case 2: return f_f(path(depth - 1));
        case 3: return f_u(path(depth - 1), path(depth - 1));
        default: return state(depth - 1);
        }
    }

    std::mt19937_64 rng_;
    SamplerParams sp_;
    std::vector<std::string> agents_;
};

} // namespace gamut

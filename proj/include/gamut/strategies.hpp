#pragma once

// Uniform memoryless strategy profiles and strategy-restricted views of a
// game structure. A profile assigns one protocol-allowed action per
// indistinguishability class per coalition member, so uniformity is
// structural. Enumeration is a mixed-radix counter over (member, class)
// slots, deterministic and indexable.

#include "gamut/model.hpp"

#include <string>
#include <vector>

namespace gamut {

struct StrategyProfile {
    std::vector<Idx> members;             // coalition, sorted agent indices
    std::vector<std::vector<Idx>> choice; // [member position][class] -> action
};

class ProfileSpace {
public:
    ProfileSpace(const Icgs& m, std::vector<Idx> members, size_t cap = 1u << 20)
        : m_(&m), members_(std::move(members)) {
        std::sort(members_.begin(), members_.end());
        options_.resize(members_.size());
        count_ = 1;
        for (size_t i = 0; i < members_.size(); ++i) {
            Idx a = members_[i];
            if (a >= m.agents.size()) throw Error(ErrorKind::Input, "unknown coalition agent");
            options_[i].resize(m.classes[a].size());
            for (Idx c = 0; c < m.classes[a].size(); ++c) {
                // Protocol uniformity makes the representative's protocol
                // the class protocol.
                options_[i][c] = m.protocol[m.classes[a][c][0]][a];
                if (options_[i][c].empty())
                    throw Error(ErrorKind::Input, "empty protocol for agent '" + m.agents[a] +
                                                      "' at class of '" +
                                                      m.states[m.classes[a][c][0]] + "'");
                count_ *= options_[i][c].size();
                if (count_ > cap)
                    throw Error(ErrorKind::Resource,
                                "strategy space exceeds " + std::to_string(cap) + " profiles");
            }
        }
    }

    size_t count() const { return count_; }

    StrategyProfile at(size_t k) const {
        StrategyProfile p;
        p.members = members_;
        p.choice.resize(members_.size());
        for (size_t i = 0; i < members_.size(); ++i) {
            p.choice[i].resize(options_[i].size());
            for (size_t c = 0; c < options_[i].size(); ++c) {
                size_t n = options_[i][c].size();
                p.choice[i][c] = options_[i][c][k % n];
                k /= n;
            }
        }
        return p;
    }

    // Readable form used when reporting witnesses.
    std::string describe(const StrategyProfile& p) const {
        const Icgs& m = *m_;
        std::string out;
        for (size_t i = 0; i < p.members.size(); ++i) {
            Idx a = p.members[i];
            for (Idx c = 0; c < p.choice[i].size(); ++c) {
                if (!out.empty()) out += ", ";
                out += m.agents[a] + "[" + m.states[m.classes[a][c][0]] +
                       "]=" + m.actions[a][p.choice[i][c]];
            }
        }
        return out.empty() ? "(empty profile)" : out;
    }

private:
    const Icgs* m_;
    std::vector<Idx> members_;
    std::vector<std::vector<std::vector<Idx>>> options_; // [member][class] actions
    size_t count_;
};

// The submodel induced by committing the coalition to a profile: same
// states, joint actions filtered to those agreeing with the profile,
// opponents unrestricted.
struct Pruned {
    std::vector<std::vector<std::pair<Joint, Idx>>> edges; // per state
    std::vector<std::vector<Idx>> succs;                   // deduplicated targets
};

inline Pruned prune(const Icgs& m, const StrategyProfile& p) {
    Pruned out;
    out.edges.resize(m.states.size());
    out.succs.resize(m.states.size());
    for (Idx s = 0; s < m.states.size(); ++s) {
        for (const auto& j : allowed_joints(m, s)) {
            bool agrees = true;
            for (size_t i = 0; i < p.members.size() && agrees; ++i) {
                Idx a = p.members[i];
                agrees = j[a] == p.choice[i][m.class_of[a][s]];
            }
            if (!agrees) continue;
            Idx t = m.transition.at({s, j});
            out.edges[s].emplace_back(j, t);
            out.succs[s].push_back(t);
        }
        std::sort(out.succs[s].begin(), out.succs[s].end());
        out.succs[s].erase(std::unique(out.succs[s].begin(), out.succs[s].end()),
                           out.succs[s].end());
    }
    return out;
}

} // namespace gamut

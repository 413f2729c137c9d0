#pragma once

// Existence of an infinite path satisfying a linear-time property over a
// finite graph, via a closure tableau: the property is normalized so
// negation sits only on leaf state-sets, obligations are expanded with the
// usual unfolding laws (U, R, G, F), and deferred obligations become
// next-step obligations. The product of graph states with obligation sets
// is a generalized Buchi automaton whose acceptance demands every
// eventuality be resolved infinitely often (it must not sit in the deferred
// set forever); emptiness is a strongly-connected-component sweep.
//
// Leaf state formulas are pre-evaluated into state sets, so the path layer
// here is literals, X, G, F, U and the derived R.

#include "gamut/error.hpp"
#include "gamut/formula.hpp"
#include "gamut/strategies.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

namespace gamut {

namespace detail {

struct Nnf;
using NnfPtr = std::shared_ptr<const Nnf>;

struct Nnf {
    enum class Op { Lit, X, G, F, U, R };
    Op op = Op::Lit;
    int lit = -1;    // index into the literal set table
    bool pol = true; // literal polarity
    NnfPtr a, b;
};

inline NnfPtr nnf_lit(int lit, bool pol) {
    auto n = std::make_shared<Nnf>();
    n->lit = lit;
    n->pol = pol;
    return n;
}
inline NnfPtr nnf_node(Nnf::Op op, NnfPtr a, NnfPtr b = nullptr) {
    auto n = std::make_shared<Nnf>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

inline std::string nnf_key(const NnfPtr& n) {
    switch (n->op) {
    case Nnf::Op::Lit:
        return (n->pol ? "+" : "-") + std::to_string(n->lit);
    case Nnf::Op::X: return "(X " + nnf_key(n->a) + ")";
    case Nnf::Op::G: return "(G " + nnf_key(n->a) + ")";
    case Nnf::Op::F: return "(F " + nnf_key(n->a) + ")";
    case Nnf::Op::U: return "(U " + nnf_key(n->a) + " " + nnf_key(n->b) + ")";
    case Nnf::Op::R: return "(R " + nnf_key(n->a) + " " + nnf_key(n->b) + ")";
    }
    return "?";
}

class Tableau {
public:
    explicit Tableau(const NnfPtr& root) {
        root_id_ = intern(root);
        if (closure_.size() > 64)
            throw Error(ErrorKind::Resource, "path formula closure exceeds 64 entries");
        for (size_t i = 0; i < closure_.size(); ++i) {
            auto op = closure_[i]->op;
            if (op == Nnf::Op::U || op == Nnf::Op::F) eventuals_ |= bit(i);
        }
    }

    struct Branch {
        std::uint64_t lits = 0;      // literal obligations, hold now
        std::uint64_t next = 0;      // obligations deferred to the next step
        std::uint64_t fulfilled = 0; // eventualities not deferred this step
    };

    int root_id() const { return root_id_; }
    std::uint64_t root_mask() const { return bit(root_id_); }
    std::uint64_t eventuals() const { return eventuals_; }
    const std::vector<NnfPtr>& closure() const { return closure_; }

    const std::vector<Branch>& branches(std::uint64_t mask) {
        auto it = memo_.find(mask);
        if (it != memo_.end()) return it->second;
        std::vector<Branch> out;
        expand(mask, 0, 0, out);
        return memo_.emplace(mask, std::move(out)).first->second;
    }

    // Does state s satisfy every literal obligation of the branch?
    bool consistent(const Branch& b, Idx s,
                    const std::vector<std::vector<char>>& lit_sets) const {
        for (size_t i = 0; i < closure_.size(); ++i) {
            if (!(b.lits & bit(i))) continue;
            const Nnf& n = *closure_[i];
            if (static_cast<bool>(lit_sets[n.lit][s]) != n.pol) return false;
        }
        return true;
    }

private:
    static std::uint64_t bit(size_t i) { return 1ull << i; }

    int intern(const NnfPtr& n) {
        std::string key = nnf_key(n);
        auto it = ids_.find(key);
        if (it != ids_.end()) return it->second;
        if (n->a) intern(n->a);
        if (n->b) intern(n->b);
        int id = static_cast<int>(closure_.size());
        closure_.push_back(n);
        child_a_.push_back(n->a ? ids_.at(nnf_key(n->a)) : -1);
        child_b_.push_back(n->b ? ids_.at(nnf_key(n->b)) : -1);
        ids_.emplace(std::move(key), id);
        return id;
    }

    void expand(std::uint64_t pending, std::uint64_t lits, std::uint64_t next,
                std::vector<Branch>& out) {
        for (size_t i = 0; i < closure_.size(); ++i) {
            if (!(pending & bit(i))) continue;
            const Nnf& n = *closure_[i];
            std::uint64_t rest = pending & ~bit(i);
            switch (n.op) {
            case Nnf::Op::Lit:
                continue; // literals stay pending until the base case
            case Nnf::Op::X:
                expand(rest, lits, next | bit(child_a_[i]), out);
                return;
            case Nnf::Op::G: // a now, G again next
                expand(rest | bit(child_a_[i]), lits, next | bit(i), out);
                return;
            case Nnf::Op::F: // resolve now or defer
                expand(rest | bit(child_a_[i]), lits, next, out);
                expand(rest, lits, next | bit(i), out);
                return;
            case Nnf::Op::U: // b now, or a now and defer
                expand(rest | bit(child_b_[i]), lits, next, out);
                expand(rest | bit(child_a_[i]), lits, next | bit(i), out);
                return;
            case Nnf::Op::R: // a and b now (released), or b now and defer
                expand(rest | bit(child_a_[i]) | bit(child_b_[i]), lits, next, out);
                expand(rest | bit(child_b_[i]), lits, next | bit(i), out);
                return;
            }
        }
        out.push_back({pending | lits, next, eventuals_ & ~next});
    }

    std::map<std::string, int> ids_;
    std::vector<NnfPtr> closure_;
    std::vector<int> child_a_, child_b_;
    std::map<std::uint64_t, std::vector<Branch>> memo_;
    std::uint64_t eventuals_ = 0;
    int root_id_ = 0;
};

// Iterative Tarjan; SCCs are emitted successors-first, which the caller
// exploits as a topological order over the condensation.
inline std::vector<int> tarjan_scc(size_t n, const std::vector<std::vector<int>>& adj,
                                   int& scc_count) {
    std::vector<int> idx(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int counter = 0;
    scc_count = 0;

    struct Frame {
        int v;
        size_t child;
    };
    for (size_t root = 0; root < n; ++root) {
        if (idx[root] != -1) continue;
        std::vector<Frame> frames{{static_cast<int>(root), 0}};
        idx[root] = low[root] = counter++;
        stack.push_back(static_cast<int>(root));
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.child < adj[f.v].size()) {
                int w = adj[f.v][f.child++];
                if (idx[w] == -1) {
                    idx[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], idx[w]);
                }
            } else {
                if (low[f.v] == idx[f.v]) {
                    for (;;) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp[w] = scc_count;
                        if (w == f.v) break;
                    }
                    ++scc_count;
                }
                int v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    return comp;
}

// States from which some path of the pruned graph satisfies the property.
inline std::vector<char> states_with_satisfying_path(
    const Icgs& m, const Pruned& p, Tableau& tab,
    const std::vector<std::vector<char>>& lit_sets) {
    struct NodeKey {
        Idx state;
        std::uint64_t mask;
        bool operator<(const NodeKey& o) const {
            if (state != o.state) return state < o.state;
            return mask < o.mask;
        }
    };
    std::map<NodeKey, int> node_id;
    std::vector<NodeKey> nodes;
    std::vector<int> start_node(m.states.size(), -1);

    auto get_node = [&](Idx s, std::uint64_t mask) {
        auto [it, inserted] = node_id.emplace(NodeKey{s, mask}, static_cast<int>(nodes.size()));
        if (inserted) nodes.push_back({s, mask});
        return it->second;
    };
    for (Idx s = 0; s < m.states.size(); ++s) start_node[s] = get_node(s, tab.root_mask());

    struct Edge {
        int to;
        std::uint64_t fulfilled;
    };
    std::vector<std::vector<Edge>> out_edges;
    for (size_t v = 0; v < nodes.size(); ++v) {
        out_edges.emplace_back();
        NodeKey key = nodes[v];
        for (const auto& b : tab.branches(key.mask)) {
            if (!tab.consistent(b, key.state, lit_sets)) continue;
            for (Idx t : p.succs[key.state])
                out_edges[v].push_back({get_node(t, b.next), b.fulfilled});
        }
    }

    std::vector<std::vector<int>> adj(nodes.size());
    for (size_t v = 0; v < nodes.size(); ++v)
        for (const auto& e : out_edges[v]) adj[v].push_back(e.to);
    int scc_count = 0;
    auto comp = tarjan_scc(nodes.size(), adj, scc_count);

    // An SCC hosts an accepting run when it has an internal edge and its
    // internal edges jointly fulfill every eventuality.
    std::vector<std::uint64_t> cover(scc_count, 0);
    std::vector<char> has_edge(scc_count, 0);
    for (size_t v = 0; v < nodes.size(); ++v)
        for (const auto& e : out_edges[v])
            if (comp[v] == comp[e.to]) {
                cover[comp[v]] |= e.fulfilled;
                has_edge[comp[v]] = 1;
            }
    std::vector<char> good_scc(scc_count, 0);
    for (int c = 0; c < scc_count; ++c)
        good_scc[c] = has_edge[c] && (cover[c] & tab.eventuals()) == tab.eventuals();

    // A component can reach an accepting one if it is accepting or any
    // member edge leads to a component that can. Tarjan emission order is
    // successors-first: every edge target's component is emitted no later
    // than the source's, so one pass in component order suffices.
    std::vector<char> reach(scc_count, 0);
    for (int c = 0; c < scc_count; ++c) reach[c] = good_scc[c];
    std::vector<std::vector<int>> members(scc_count);
    for (size_t v = 0; v < nodes.size(); ++v) members[comp[v]].push_back(static_cast<int>(v));
    for (int c = 0; c < scc_count; ++c)
        for (int v : members[c])
            for (const auto& e : out_edges[v])
                if (reach[comp[e.to]]) reach[c] = 1;

    std::vector<char> result(m.states.size(), 0);
    for (Idx s = 0; s < m.states.size(); ++s) result[s] = reach[comp[start_node[s]]];
    return result;
}

} // namespace detail

} // namespace gamut

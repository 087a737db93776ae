#pragma once

#include <deque>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "arrival/model.hpp"

namespace arrival {

constexpr size_t kDefaultStateBudget = 2'000'000;

// Reachable fragment of the game over V x Q, explored forward from
// (start, all-zero positions). States are interned in discovery order, which
// makes indices deterministic and invertible.
struct ExpandedGame {
    const ArrivalInstance* inst = nullptr;
    std::vector<GameState> states;
    std::unordered_map<GameState, uint32_t, GameStateHash> index;
    std::vector<std::vector<uint32_t>> succ;   // successor state indices
    std::vector<std::vector<Rational>> prob;   // aligned, random states only
    uint32_t start_index = 0;

    size_t size() const { return states.size(); }
    NodeKind kind_of(uint32_t i) const { return inst->kind(states[i].vertex); }
    bool is_target(uint32_t i) const { return states[i].vertex == inst->target; }
    bool is_sink(uint32_t i) const {
        return succ[i].size() == 1 && succ[i][0] == i;
    }
};

inline ExpandedGame build_reachable_game(const ArrivalInstance& inst,
                                         size_t budget = kDefaultStateBudget) {
    for (NodeId v : inst.switch_nodes)
        if (inst.order[v].size() > 65535)
            throw CapacityError("switching order longer than 65535 entries");
    ExpandedGame g;
    g.inst = &inst;
    auto intern = [&](const GameState& s) -> uint32_t {
        auto it = g.index.find(s);
        if (it != g.index.end()) return it->second;
        if (g.states.size() >= budget)
            throw CapacityError("expanded state budget of " + std::to_string(budget) +
                                " states exceeded");
        uint32_t id = (uint32_t)g.states.size();
        g.index.emplace(s, id);
        g.states.push_back(s);
        g.succ.emplace_back();
        g.prob.emplace_back();
        return id;
    };
    g.start_index = intern(initial_state(inst));
    for (uint32_t i = 0; i < g.states.size(); ++i) {  // states grow as we go
        GameState s = g.states[i];
        for (auto& nxt : valid_successors(inst, s)) {
            uint32_t j = intern(nxt);  // may reallocate the tables
            g.succ[i].push_back(j);
        }
        if (inst.kind(s.vertex) == NodeKind::Random) g.prob[i] = inst.prob[s.vertex];
    }
    return g;
}

inline std::vector<GameState> reachable_states(const ArrivalInstance& inst,
                                               size_t budget = kDefaultStateBudget) {
    return build_reachable_game(inst, budget).states;
}

namespace expand_detail {

inline std::string state_name(const ArrivalInstance& inst, const GameState& s) {
    std::ostringstream os;
    os << inst.name(s.vertex) << "@";
    for (size_t i = 0; i < s.pos.size(); ++i) {
        if (i) os << ".";
        os << s.pos[i];
    }
    return os.str();
}

}  // namespace expand_detail

// Explicit Exp(G) over the full product V x Q plus a fresh target t'.
// Switch vertices unfold into out-degree-1 deterministic vertices, every
// (t,q) is wired to t', and the value of the result equals the value of G.
inline ArrivalInstance expand_game(const ArrivalInstance& inst,
                                   size_t budget = kDefaultStateBudget) {
    BigInt product = (long)inst.num_vertices();
    for (NodeId v : inst.switch_nodes) product *= (long)inst.order[v].size();
    if (product > (long)budget)
        throw CapacityError("full expansion needs " + product.get_str() +
                            " states, over the budget of " + std::to_string(budget));

    // Enumerate Q in mixed-radix order, least-significant slot first.
    std::vector<size_t> radix;
    for (NodeId v : inst.switch_nodes) radix.push_back(inst.order[v].size());
    std::vector<SwitchPositions> all_q;
    SwitchPositions q(radix.size(), 0);
    while (true) {
        all_q.push_back(q);
        size_t i = 0;
        for (; i < radix.size(); ++i) {
            if (++q[i] < radix[i]) break;
            q[i] = 0;
        }
        if (i == radix.size()) break;
    }

    InstanceBuilder b;
    auto node_name = [&](NodeId v, const SwitchPositions& qq) {
        return expand_detail::state_name(inst, GameState{v, qq});
    };
    for (const auto& qq : all_q) {
        for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v) {
            NodeKind k = inst.kind(v);
            NodeKind nk = k;
            if (k == NodeKind::Switch || k == NodeKind::Target || k == NodeKind::Dead)
                nk = NodeKind::Random;  // deterministic out-degree-1 states
            b.add_node(node_name(v, qq), nk);
        }
    }
    NodeId tprime = b.add_node("t'", NodeKind::Target);
    b.add_edge(tprime, tprime);
    for (const auto& qq : all_q) {
        for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v) {
            NodeId from = b.node(node_name(v, qq));
            if (v == inst.target) {
                b.add_edge(from, tprime, Rational(1));
                continue;
            }
            GameState s{v, qq};
            NodeKind k = inst.kind(v);
            if (k == NodeKind::Random) {
                for (size_t i = 0; i < inst.adj[v].size(); ++i)
                    b.add_edge(from, b.node(node_name(inst.adj[v][i], qq)), inst.prob[v][i]);
            } else if (k == NodeKind::Switch) {
                auto nxt = valid_successors(inst, s)[0];
                b.add_edge(from, b.node(node_name(nxt.vertex, nxt.pos)), Rational(1));
            } else if (k == NodeKind::Dead) {
                b.add_edge(from, from, Rational(1));
            } else {
                for (NodeId w : inst.adj[v]) b.add_edge(from, b.node(node_name(w, qq)));
            }
        }
    }
    b.set_start(b.node(node_name(inst.start, SwitchPositions(radix.size(), 0))));
    b.set_target(tprime);
    return b.build();
}

// Backward closure to the target class inside the reachable fragment: true
// iff some play from the state reaches t. Requires kinds within {R,S}.
inline std::vector<bool> potential_on_reachable(const ExpandedGame& g) {
    for (uint32_t i = 0; i < g.size(); ++i) {
        NodeKind k = g.kind_of(i);
        if (k == NodeKind::MaxPlayer || k == NodeKind::MinPlayer)
            throw ContractError("potential is defined for the {R,S} pipeline only");
    }
    std::vector<std::vector<uint32_t>> preds(g.size());
    for (uint32_t i = 0; i < g.size(); ++i)
        for (uint32_t j : g.succ[i]) preds[j].push_back(i);
    std::vector<bool> pot(g.size(), false);
    std::deque<uint32_t> work;
    for (uint32_t i = 0; i < g.size(); ++i)
        if (g.is_target(i)) {
            pot[i] = true;
            work.push_back(i);
        }
    while (!work.empty()) {
        uint32_t j = work.front();
        work.pop_front();
        for (uint32_t i : preds[j])
            if (!pot[i]) {
                pot[i] = true;
                work.push_back(i);
            }
    }
    return pot;
}

// Standalone Potential(G,(v,q)): forward search from the given state.
inline bool potential_state(const ArrivalInstance& inst, const GameState& from,
                            size_t budget = kDefaultStateBudget) {
    if (inst.has_kind(NodeKind::MaxPlayer) || inst.has_kind(NodeKind::MinPlayer))
        throw ContractError("potential is defined for the {R,S} pipeline only");
    std::unordered_map<GameState, bool, GameStateHash> seen;
    std::deque<GameState> work{from};
    seen.emplace(from, true);
    while (!work.empty()) {
        GameState s = work.front();
        work.pop_front();
        if (s.vertex == inst.target) return true;
        if (seen.size() > budget) throw CapacityError("potential search exceeded state budget");
        for (auto& nxt : valid_successors(inst, s))
            if (seen.emplace(nxt, true).second) work.push_back(nxt);
    }
    return false;
}

// The modified substochastic transition structure: rows indexed by retained
// states (reachable, potential, not in the target class), one extra column *
// aggregating all transitions into (t, q*). Rows of dropped states are absent
// rather than zeroed; mass into dropped states simply leaves the row sum
// short of 1.
struct ExpandedSystem {
    std::vector<GameState> states;  // retained, in reachable-discovery order
    std::vector<NodeKind> kinds;
    std::vector<std::vector<std::pair<uint32_t, Rational>>> rows;  // col == star() for *
    std::optional<uint32_t> start_row;
    bool start_is_target = false;
    size_t reachable_count = 0;

    uint32_t star() const { return (uint32_t)states.size(); }

    Rational row_sum(uint32_t i) const {
        Rational s(0);
        for (const auto& [c, p] : rows[i]) s += p;
        return s;
    }
};

inline ExpandedSystem modified_matrix(const ArrivalInstance& inst,
                                      size_t budget = kDefaultStateBudget) {
    ExpandedGame g = build_reachable_game(inst, budget);
    std::vector<bool> pot = potential_on_reachable(g);
    ExpandedSystem sys;
    sys.reachable_count = g.size();
    std::vector<uint32_t> retained_id(g.size(), UINT32_MAX);
    for (uint32_t i = 0; i < g.size(); ++i) {
        if (!pot[i] || g.is_target(i)) continue;
        retained_id[i] = (uint32_t)sys.states.size();
        sys.states.push_back(g.states[i]);
        sys.kinds.push_back(g.kind_of(i));
    }
    sys.rows.resize(sys.states.size());
    for (uint32_t i = 0; i < g.size(); ++i) {
        uint32_t r = retained_id[i];
        if (r == UINT32_MAX) continue;
        Rational star_mass(0);
        std::vector<std::pair<uint32_t, Rational>>& row = sys.rows[r];
        for (size_t a = 0; a < g.succ[i].size(); ++a) {
            uint32_t j = g.succ[i][a];
            Rational p = g.kind_of(i) == NodeKind::Random ? g.prob[i][a] : Rational(1);
            if (g.is_target(j))
                star_mass += p;  // at most one q* can receive mass from a row
            else if (retained_id[j] != UINT32_MAX)
                row.emplace_back(retained_id[j], p);
        }
        if (star_mass != 0) row.emplace_back(sys.star(), star_mass);
    }
    sys.start_is_target = inst.start == inst.target;
    if (retained_id[g.start_index] != UINT32_MAX) sys.start_row = retained_id[g.start_index];
    return sys;
}

// Sparse triplet dump: one "row col a/b" line per entry; the star column is
// states.size(). Comment lines carry the retained-state names.
inline std::string dump_system(const ExpandedSystem& sys, const ArrivalInstance& inst) {
    std::ostringstream out;
    out << "# rows " << sys.states.size() << " star " << sys.star() << "\n";
    for (size_t i = 0; i < sys.states.size(); ++i)
        out << "# state " << i << " " << expand_detail::state_name(inst, sys.states[i]) << "\n";
    for (size_t i = 0; i < sys.rows.size(); ++i)
        for (const auto& [c, p] : sys.rows[i])
            out << i << " " << c << " " << rational_str(p) << "\n";
    return out.str();
}

}  // namespace arrival

#pragma once

#include <optional>

#include "arrival/model.hpp"

namespace arrival {

// Gives the max player control of all random nodes. Zero-probability edges
// cannot exist in a valid instance (P(v,w) > 0 iff (v,w) is an edge), so the
// edge set carries over unchanged. Qual-0 of the input is equivalent to
// value 1 of the result viewed as a switching game.
inline ArrivalInstance random_to_player(const ArrivalInstance& inst) {
    ArrivalInstance out = inst;
    for (NodeId v = 0; v < (NodeId)out.num_vertices(); ++v) {
        if (out.kinds[v] == NodeKind::Random) {
            out.kinds[v] = NodeKind::MaxPlayer;
            out.prob[v].clear();
        }
    }
    out.rebuild_switch_index();
    out.validate();
    return out;
}

// Replaces the max player with a uniformly random choice: P(v,u) = 1/k over
// the k out-edges. Requires the min player to be absent (the underlying
// construction converts player 1 only).
inline ArrivalInstance player_to_random(const ArrivalInstance& inst) {
    if (inst.has_kind(NodeKind::MinPlayer))
        throw ContractError("player_to_random needs a min-player-free instance");
    ArrivalInstance out = inst;
    for (NodeId v = 0; v < (NodeId)out.num_vertices(); ++v) {
        if (out.kinds[v] == NodeKind::MaxPlayer) {
            out.kinds[v] = NodeKind::Random;
            size_t k = out.adj[v].size();
            out.prob[v].assign(k, make_rational(1, (long)k));
        }
    }
    out.rebuild_switch_index();
    out.validate();
    return out;
}

struct DualizeResult {
    ArrivalInstance instance;
    // val(dual) = 1 - val(input) is guaranteed only when every play almost
    // surely terminates; with player nodes the identity can degrade to an
    // inequality (a player may stall forever), which this flag reports.
    bool identity_guaranteed = false;
};

// Exchanges the players (max <-> min) and the target/dead roles. If the
// input has no dead end, a fresh unreachable one is added first so the
// target marker has somewhere to go.
inline DualizeResult dualize_players(const ArrivalInstance& inst) {
    ArrivalInstance out = inst;
    bool had_dead = out.dead.has_value();
    if (!out.dead) {
        NodeId d = (NodeId)out.num_vertices();
        std::string name = "dual_dead";
        while (out.id_of(name)) name += "'";
        out.names.push_back(name);
        out.kinds.push_back(NodeKind::Dead);
        out.adj.push_back({d});
        out.prob.emplace_back();
        out.order.emplace_back();
        out.dead = d;
    }
    for (NodeId v = 0; v < (NodeId)out.num_vertices(); ++v) {
        if (out.kinds[v] == NodeKind::MaxPlayer)
            out.kinds[v] = NodeKind::MinPlayer;
        else if (out.kinds[v] == NodeKind::MinPlayer)
            out.kinds[v] = NodeKind::MaxPlayer;
    }
    std::swap(out.target, *out.dead);
    out.kinds[out.target] = NodeKind::Target;
    out.kinds[*out.dead] = NodeKind::Dead;
    out.rebuild_switch_index();
    out.validate();
    DualizeResult res;
    res.identity_guaranteed = had_dead && !out.has_kind(NodeKind::MaxPlayer) &&
                              !out.has_kind(NodeKind::MinPlayer);
    res.instance = std::move(out);
    return res;
}

}  // namespace arrival

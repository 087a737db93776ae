#pragma once

#include <deque>
#include <optional>
#include <set>
#include <vector>

#include "arrival/model.hpp"

namespace arrival {

// Two-player reachability attractor on an explicit digraph. Returns the set
// of vertices from which the controller forces reaching `target`: the least
// fixpoint of {target} u {controlled v with a successor in the set} u
// {adversarial v with all successors in the set}.
//
// Worklist with per-vertex counters of remaining adversarial successors;
// vertices are processed in ascending discovery order, so the result and the
// recorded controller choice are deterministic.
inline std::vector<bool> attractor_reach(size_t n, const std::vector<std::vector<NodeId>>& adj,
                                         const std::vector<bool>& adversarial, NodeId target,
                                         std::vector<NodeId>* controller_choice = nullptr) {
    std::vector<std::vector<NodeId>> preds(n);
    std::vector<size_t> remaining(n, 0);
    for (NodeId v = 0; v < (NodeId)n; ++v) {
        remaining[v] = adj[v].size();
        for (NodeId w : adj[v]) preds[w].push_back(v);
    }
    std::vector<bool> in_set(n, false);
    if (controller_choice) controller_choice->assign(n, -1);
    std::deque<NodeId> work;
    in_set[target] = true;
    work.push_back(target);
    while (!work.empty()) {
        NodeId w = work.front();
        work.pop_front();
        for (NodeId v : preds[w]) {
            if (in_set[v]) continue;
            if (!adversarial[v]) {
                in_set[v] = true;
                if (controller_choice) (*controller_choice)[v] = w;
                work.push_back(v);
            } else if (--remaining[v] == 0) {
                in_set[v] = true;
                work.push_back(v);
            }
        }
    }
    return in_set;
}

struct HopeReport {
    std::vector<bool> hopeful;                      // per NodeId
    std::vector<std::optional<size_t>> desperation; // shortest distance to t, hopeful only

    bool is_hopeful(NodeId v) const { return hopeful[v]; }
    // An edge (v,w) is hopeful iff w is a hopeful vertex.
    bool edge_hopeful(NodeId /*v*/, NodeId w) const { return hopeful[w]; }
};

// Hopeful vertices: player 1 wins the reachability game to t when also
// controlling random and switch nodes; only min-player nodes are adversarial.
// Desperation is the shortest-path distance to t through hopeful vertices.
inline HopeReport hopeful_set(const ArrivalInstance& inst) {
    size_t n = inst.num_vertices();
    std::vector<bool> adversarial(n, false);
    for (NodeId v = 0; v < (NodeId)n; ++v)
        adversarial[v] = inst.kind(v) == NodeKind::MinPlayer;
    HopeReport rep;
    rep.hopeful = attractor_reach(n, inst.adj, adversarial, inst.target);
    rep.desperation.assign(n, std::nullopt);

    // BFS from t over reversed edges restricted to hopeful vertices.
    std::vector<std::vector<NodeId>> rpreds(n);
    for (NodeId v = 0; v < (NodeId)n; ++v) {
        if (!rep.hopeful[v]) continue;
        for (NodeId w : inst.adj[v])
            if (rep.hopeful[w]) rpreds[w].push_back(v);
    }
    std::deque<NodeId> work;
    rep.desperation[inst.target] = 0;
    work.push_back(inst.target);
    while (!work.empty()) {
        NodeId w = work.front();
        work.pop_front();
        for (NodeId v : rpreds[w]) {
            if (rep.desperation[v]) continue;
            if (v == inst.target) continue;
            rep.desperation[v] = *rep.desperation[w] + 1;
            work.push_back(v);
        }
    }
    return rep;
}

}  // namespace arrival

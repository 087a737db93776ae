#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "arrival/rational.hpp"

namespace arrival {

enum class NodeKind { Random, Switch, MaxPlayer, MinPlayer, Target, Dead };

inline const char* kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Random: return "random";
        case NodeKind::Switch: return "switch";
        case NodeKind::MaxPlayer: return "max";
        case NodeKind::MinPlayer: return "min";
        case NodeKind::Target: return "target";
        case NodeKind::Dead: return "dead";
    }
    return "?";
}

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using NodeId = int32_t;

// A generalized arrival instance: directed graph, node-kind partition,
// switching orders, exact edge probabilities, start/target/dead markers.
// Adjacency lists are kept sorted by successor id; `order` may repeat a
// successor (multiplicity lives in the order, never in parallel edges).
struct ArrivalInstance {
    std::vector<std::string> names;
    std::vector<NodeKind> kinds;
    std::vector<std::vector<NodeId>> adj;
    std::vector<std::vector<Rational>> prob;   // aligned with adj; random nodes only
    std::vector<std::vector<NodeId>> order;    // switch nodes only, non-empty
    NodeId start = -1;
    NodeId target = -1;
    std::optional<NodeId> dead;

    std::vector<NodeId> switch_nodes;          // ascending
    std::vector<int32_t> switch_slot;          // NodeId -> dense slot or -1

    size_t num_vertices() const { return names.size(); }

    NodeKind kind(NodeId v) const { return kinds[v]; }
    const std::string& name(NodeId v) const { return names[v]; }

    std::optional<NodeId> id_of(const std::string& n) const {
        for (NodeId v = 0; v < (NodeId)names.size(); ++v)
            if (names[v] == n) return v;
        return std::nullopt;
    }

    bool has_edge(NodeId u, NodeId v) const {
        return std::binary_search(adj[u].begin(), adj[u].end(), v);
    }

    Rational edge_prob(NodeId u, NodeId v) const {
        const auto& a = adj[u];
        auto it = std::lower_bound(a.begin(), a.end(), v);
        if (it == a.end() || *it != v) return Rational(0);
        return prob[u][it - a.begin()];
    }

    bool has_kind(NodeKind k) const {
        return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
    }

    // Absorbing sink: the only out-edge is the self-loop.
    bool is_absorbing(NodeId v) const { return adj[v].size() == 1 && adj[v][0] == v; }

    void rebuild_switch_index() {
        switch_nodes.clear();
        switch_slot.assign(names.size(), -1);
        for (NodeId v = 0; v < (NodeId)names.size(); ++v) {
            if (kinds[v] == NodeKind::Switch) {
                switch_slot[v] = (int32_t)switch_nodes.size();
                switch_nodes.push_back(v);
            }
        }
    }

    // Checks every structural invariant of the model; throws ModelError.
    void validate() const {
        size_t n = names.size();
        if (kinds.size() != n || adj.size() != n || prob.size() != n || order.size() != n)
            throw ModelError("inconsistent table sizes");
        if (start < 0 || start >= (NodeId)n) throw ModelError("missing or bad start node");
        if (target < 0 || target >= (NodeId)n) throw ModelError("missing or bad target node");
        size_t targets = 0, deads = 0;
        for (NodeId v = 0; v < (NodeId)n; ++v) {
            if (kinds[v] == NodeKind::Target) ++targets;
            if (kinds[v] == NodeKind::Dead) ++deads;
        }
        if (targets != 1 || kinds[target] != NodeKind::Target)
            throw ModelError("exactly one target node required");
        if (deads > 1) throw ModelError("at most one dead node allowed");
        if (dead && kinds[*dead] != NodeKind::Dead) throw ModelError("dead marker kind mismatch");
        if (!dead && deads > 0) throw ModelError("dead node present but unmarked");

        for (NodeId v = 0; v < (NodeId)n; ++v) {
            const auto& a = adj[v];
            if (a.empty())
                throw ModelError("vertex '" + names[v] + "' has out-degree 0");
            if (!std::is_sorted(a.begin(), a.end()) ||
                std::adjacent_find(a.begin(), a.end()) != a.end())
                throw ModelError("adjacency of '" + names[v] + "' not sorted/unique");
            for (NodeId w : a)
                if (w < 0 || w >= (NodeId)n) throw ModelError("edge out of range");

            if (kinds[v] == NodeKind::Target || kinds[v] == NodeKind::Dead) {
                if (a.size() != 1 || a[0] != v)
                    throw ModelError("'" + names[v] + "': target/dead must have only a self-loop");
            }
            if (kinds[v] == NodeKind::Random) {
                if (prob[v].size() != a.size())
                    throw ModelError("'" + names[v] + "': probability row shape mismatch");
                Rational sum(0);
                for (const auto& p : prob[v]) {
                    if (p <= 0) throw ModelError("'" + names[v] + "': edge probability must be > 0");
                    sum += p;
                }
                if (sum != 1)
                    throw ModelError("'" + names[v] + "': probabilities sum to " + rational_str(sum) +
                                     ", expected 1");
            } else if (!prob[v].empty()) {
                throw ModelError("'" + names[v] + "': probabilities on a non-random node");
            }
            if (kinds[v] == NodeKind::Switch) {
                const auto& ord = order[v];
                if (ord.empty()) throw ModelError("'" + names[v] + "': empty switching order");
                for (NodeId w : ord)
                    if (!has_edge(v, w))
                        throw ModelError("'" + names[v] + "': order entry '" +
                                         (w >= 0 && w < (NodeId)n ? names[w] : "?") +
                                         "' is not an out-edge");
                for (NodeId w : a)
                    if (std::find(ord.begin(), ord.end(), w) == ord.end())
                        throw ModelError("'" + names[v] + "': out-edge to '" + names[w] +
                                         "' unused in order");
            } else if (!order[v].empty()) {
                throw ModelError("'" + names[v] + "': order on a non-switch node");
            }
        }
        if (switch_nodes.size() > 0) {
            for (NodeId v : switch_nodes)
                if (kinds[v] != NodeKind::Switch) throw ModelError("stale switch index");
        }
    }
};

// Name-keyed structural equality (edge sets, probabilities, orders, markers);
// node ids and adjacency storage order are representation details.
inline bool structurally_equal(const ArrivalInstance& a, const ArrivalInstance& b) {
    if (a.num_vertices() != b.num_vertices()) return false;
    std::map<std::string, NodeId> bid;
    for (NodeId v = 0; v < (NodeId)b.num_vertices(); ++v) bid[b.name(v)] = v;
    for (NodeId v = 0; v < (NodeId)a.num_vertices(); ++v) {
        auto it = bid.find(a.name(v));
        if (it == bid.end()) return false;
        NodeId w = it->second;
        if (a.kinds[v] != b.kinds[w]) return false;
        if (a.adj[v].size() != b.adj[w].size()) return false;
        for (size_t i = 0; i < a.adj[v].size(); ++i) {
            NodeId av = a.adj[v][i];
            auto jt = bid.find(a.name(av));
            if (jt == bid.end() || !b.has_edge(w, jt->second)) return false;
            if (a.kinds[v] == NodeKind::Random &&
                a.prob[v][i] != b.edge_prob(w, jt->second))
                return false;
        }
        if (a.order[v].size() != b.order[w].size()) return false;
        for (size_t i = 0; i < a.order[v].size(); ++i)
            if (a.name(a.order[v][i]) != b.name(b.order[w][i])) return false;
    }
    if (a.name(a.start) != b.name(b.start)) return false;
    if (a.name(a.target) != b.name(b.target)) return false;
    if (a.dead.has_value() != b.dead.has_value()) return false;
    if (a.dead && a.name(*a.dead) != b.name(*b.dead)) return false;
    return true;
}

// Incremental construction with validation at the end. Edge probabilities may
// be merged by add_edge (parallel edges collapse into one, masses add).
class InstanceBuilder {
  public:
    NodeId add_node(const std::string& name, NodeKind kind) {
        if (name_to_id_.count(name)) throw ModelError("duplicate node '" + name + "'");
        NodeId id = (NodeId)inst_.names.size();
        name_to_id_[name] = id;
        inst_.names.push_back(name);
        inst_.kinds.push_back(kind);
        inst_.adj.emplace_back();
        inst_.prob.emplace_back();
        inst_.order.emplace_back();
        return id;
    }

    NodeId node(const std::string& name) const {
        auto it = name_to_id_.find(name);
        if (it == name_to_id_.end()) throw ModelError("unknown node '" + name + "'");
        return it->second;
    }
    bool has_node(const std::string& name) const { return name_to_id_.count(name) > 0; }

    void add_edge(NodeId u, NodeId v) { edges_[u][v] = std::nullopt; }

    void add_edge(NodeId u, NodeId v, const Rational& p) {
        auto& cell = edges_[u][v];
        if (cell && *cell != 0)
            cell = *cell + p;
        else
            cell = p;
    }

    void set_order(NodeId v, std::vector<NodeId> ord) { orders_[v] = std::move(ord); }

    // 1/k on each of the k out-edges recorded so far.
    void set_uniform(NodeId v) { uniform_.push_back(v); }

    void set_start(NodeId v) { inst_.start = v; }
    void set_target(NodeId v) { inst_.target = v; }
    void set_dead(NodeId v) { inst_.dead = v; }

    ArrivalInstance build() {
        for (NodeId v : uniform_) {
            auto it = edges_.find(v);
            if (it == edges_.end() || it->second.empty())
                throw ModelError("uniform on node without edges");
            Rational p = make_rational(1, (long)it->second.size());
            for (auto& [w, cell] : it->second) cell = p;
        }
        for (auto& [u, row] : edges_) {
            for (auto& [v, p] : row) {
                inst_.adj[u].push_back(v);
                if (inst_.kinds[u] == NodeKind::Random) {
                    if (!p)
                        throw ModelError("missing probability on edge from random node '" +
                                         inst_.names[u] + "'");
                    inst_.prob[u].push_back(*p);
                }
            }
        }
        for (auto& [v, ord] : orders_) inst_.order[v] = ord;
        inst_.rebuild_switch_index();
        inst_.validate();
        return std::move(inst_);
    }

  private:
    ArrivalInstance inst_;
    std::unordered_map<std::string, NodeId> name_to_id_;
    std::map<NodeId, std::map<NodeId, std::optional<Rational>>> edges_;
    std::map<NodeId, std::vector<NodeId>> orders_;
    std::vector<NodeId> uniform_;
};

// Positions of all switching nodes, indexed by the instance's dense switch
// slots. Part of the game state; pos[slot] < |order(switch_nodes[slot])|.
using SwitchPositions = std::vector<uint16_t>;

struct GameState {
    NodeId vertex = -1;
    SwitchPositions pos;

    bool operator==(const GameState& o) const = default;
};

struct GameStateHash {
    size_t operator()(const GameState& s) const {
        size_t h = 1469598103934665603ull ^ (size_t)s.vertex;
        for (uint16_t p : s.pos) {
            h ^= p + 1;
            h *= 1099511628211ull;
        }
        return h;
    }
};

inline GameState initial_state(const ArrivalInstance& inst) {
    return GameState{inst.start, SwitchPositions(inst.switch_nodes.size(), 0)};
}

// Valid(s) per the transition semantics: switching nodes move deterministically
// to the current order entry and advance their counter (mod order length);
// player and random nodes fan out over out-edges with counters untouched.
inline std::vector<GameState> valid_successors(const ArrivalInstance& inst, const GameState& s) {
    if (s.vertex < 0 || s.vertex >= (NodeId)inst.num_vertices())
        throw ModelError("state references unknown vertex");
    std::vector<GameState> out;
    NodeKind k = inst.kind(s.vertex);
    if (k == NodeKind::Switch) {
        const auto& ord = inst.order[s.vertex];
        int32_t slot = inst.switch_slot[s.vertex];
        uint16_t q = s.pos[slot];
        GameState nxt = s;
        nxt.vertex = ord[q];
        nxt.pos[slot] = (uint16_t)((q + 1) % ord.size());
        out.push_back(std::move(nxt));
    } else {
        // Target/dead self-loops, player fans, random supports: counters fixed.
        for (NodeId w : inst.adj[s.vertex]) {
            GameState nxt = s;
            nxt.vertex = w;
            out.push_back(std::move(nxt));
        }
    }
    return out;
}

// Transition probability for non-player source states: P(v,u) for random
// nodes, 1 for the unique switch successor, 0 otherwise.
inline Rational step_probability(const ArrivalInstance& inst, const GameState& from,
                                 const GameState& to) {
    NodeKind k = inst.kind(from.vertex);
    if (k == NodeKind::MaxPlayer || k == NodeKind::MinPlayer)
        throw ContractError("step_probability on a player node");
    auto succs = valid_successors(inst, from);
    if (k == NodeKind::Random) {
        for (const auto& s : succs)
            if (s == to) return inst.edge_prob(from.vertex, to.vertex);
        return Rational(0);
    }
    return succs[0] == to ? Rational(1) : Rational(0);
}

// Deterministic strategy: chosen successor vertex per player state.
struct StrategyMap {
    std::unordered_map<GameState, NodeId, GameStateHash> choice;

    std::optional<NodeId> at(const GameState& s) const {
        auto it = choice.find(s);
        if (it == choice.end()) return std::nullopt;
        return it->second;
    }
};

enum class PlayOutcome { ReachedTarget, ReachedDead, Truncated };

struct PlayTrace {
    std::vector<GameState> states;
    PlayOutcome outcome = PlayOutcome::Truncated;
};

// Exact sampling from rational weights over a 64-bit uniform stream: draw
// bit-blocks of the weights' common denominator's width and reject draws in
// the residual interval, so every category gets exactly its weight.
class ExactSampler {
  public:
    explicit ExactSampler(uint64_t seed) : rng_(seed) {}

    uint64_t bits() { return rng_(); }

    // Picks an index with probability weight[i] / sum(weights).
    size_t pick(const std::vector<Rational>& weights) {
        if (weights.size() == 1) return 0;
        BigInt denom = 1;
        for (const auto& w : weights)
            mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), w.get_den().get_mpz_t());
        BigInt total = 0;
        std::vector<BigInt> scaled(weights.size());
        for (size_t i = 0; i < weights.size(); ++i) {
            scaled[i] = weights[i].get_num() * (denom / weights[i].get_den());
            total += scaled[i];
        }
        // Fast path: two equal weights = one fair bit.
        if (weights.size() == 2 && scaled[0] == scaled[1]) return rng_() & 1;
        BigInt r = draw_below(total);
        BigInt acc = 0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += scaled[i];
            if (r < acc) return i;
        }
        return weights.size() - 1;  // unreachable for valid weights
    }

  private:
    BigInt draw_below(const BigInt& bound) {
        size_t k = bit_length(bound - 1);
        if (k == 0) return 0;
        while (true) {
            BigInt r = 0;
            for (size_t got = 0; got < k; got += 64) {
                mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), 64);
                r += BigInt((unsigned long)rng_());
            }
            // Keep k bits and reject the residual interval [bound, 2^k).
            mpz_fdiv_r_2exp(r.get_mpz_t(), r.get_mpz_t(), k);
            if (r < bound) return r;
        }
    }

    std::mt19937_64 rng_;
};

inline uint64_t default_step_limit(const ArrivalInstance& inst) {
    // 64 * |V| * prod |order(v)|, saturating: covers the expanded state space
    // several times over. Truncation must stay explicit, a.s. termination only
    // holds for {R,S} instances.
    const uint64_t cap = uint64_t(1) << 62;
    BigInt prod = 64 * (long)inst.num_vertices();
    for (NodeId v : inst.switch_nodes) {
        prod *= (long)inst.order[v].size();
        if (bit_length(prod) > 62) return cap;
    }
    return (uint64_t)prod.get_ui();
}

// One bounded play from (start, all-zero positions). Random moves are drawn
// exactly from the edge distribution; player moves follow `strategy` with a
// first-out-edge default. Identical seed implies an identical trace.
inline PlayTrace run_play(const ArrivalInstance& inst, const StrategyMap& strategy, uint64_t seed,
                          uint64_t step_limit) {
    if (step_limit == 0) throw ContractError("step limit must be >= 1");
    ExactSampler sampler(seed);
    PlayTrace trace;
    GameState cur = initial_state(inst);
    trace.states.push_back(cur);
    auto settled = [&](NodeId v) -> std::optional<PlayOutcome> {
        if (v == inst.target) return PlayOutcome::ReachedTarget;
        if ((inst.dead && v == *inst.dead) || inst.is_absorbing(v))
            return PlayOutcome::ReachedDead;
        return std::nullopt;
    };
    for (uint64_t step = 0; step < step_limit; ++step) {
        if (auto done = settled(cur.vertex)) {
            trace.outcome = *done;
            return trace;
        }
        NodeId v = cur.vertex;
        NodeKind k = inst.kind(v);
        GameState nxt;
        if (k == NodeKind::Switch) {
            nxt = std::move(valid_successors(inst, cur)[0]);
        } else if (k == NodeKind::Random) {
            size_t i = sampler.pick(inst.prob[v]);
            nxt = cur;
            nxt.vertex = inst.adj[v][i];
        } else {
            nxt = cur;
            if (auto c = strategy.at(cur)) {
                if (!inst.has_edge(v, *c))
                    throw ContractError("strategy chooses a non-edge from '" + inst.name(v) + "'");
                nxt.vertex = *c;
            } else {
                nxt.vertex = inst.adj[v][0];
            }
        }
        trace.states.push_back(nxt);
        cur = std::move(nxt);
    }
    if (auto done = settled(cur.vertex))
        trace.outcome = *done;
    else
        trace.outcome = PlayOutcome::Truncated;
    return trace;
}

inline PlayTrace run_play(const ArrivalInstance& inst, const StrategyMap& strategy,
                          uint64_t seed) {
    return run_play(inst, strategy, seed, default_step_limit(inst));
}

}  // namespace arrival

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arrival/analysis.hpp"
#include "arrival/gadgets.hpp"
#include "arrival/model.hpp"

namespace arrival {

// Simple form: a distinguished dead end d; only t and d have out-degree 1
// (their self-loops); every other vertex has out-degree exactly 2, no
// self-loop, random splits of exactly 1/2, and switching orders of length 2
// with distinct successors.
inline bool is_simple_form(const ArrivalInstance& inst) {
    if (!inst.dead) return false;
    for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v) {
        NodeKind k = inst.kind(v);
        if (v == inst.target || v == *inst.dead) {
            if (inst.adj[v].size() != 1 || inst.adj[v][0] != v) return false;
            continue;
        }
        if (inst.adj[v].size() != 2) return false;
        if (inst.has_edge(v, v)) return false;
        if (k == NodeKind::Random) {
            if (inst.prob[v][0] != make_rational(1, 2) || inst.prob[v][1] != make_rational(1, 2))
                return false;
        }
        if (k == NodeKind::Switch) {
            if (inst.order[v].size() != 2 || inst.order[v][0] == inst.order[v][1]) return false;
        }
    }
    return true;
}

namespace normalize_detail {

// Mutable scratch representation; vertices are tombstoned rather than
// erased so ids stay stable until the final rebuild.
struct Mut {
    std::vector<std::string> names;
    std::vector<NodeKind> kinds;
    std::vector<std::vector<NodeId>> adj;         // unsorted, no duplicates
    std::vector<std::map<NodeId, Rational>> prob; // random vertices
    std::vector<std::vector<NodeId>> order;       // switch vertices
    std::vector<bool> alive;
    NodeId start = -1, target = -1;
    std::optional<NodeId> dead;

    static Mut from(const ArrivalInstance& inst) {
        Mut m;
        m.names = inst.names;
        m.kinds = inst.kinds;
        m.adj = inst.adj;
        m.order = inst.order;
        m.prob.resize(inst.num_vertices());
        for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v)
            for (size_t i = 0; i < inst.adj[v].size(); ++i)
                if (inst.kind(v) == NodeKind::Random) m.prob[v][inst.adj[v][i]] = inst.prob[v][i];
        m.alive.assign(inst.num_vertices(), true);
        m.start = inst.start;
        m.target = inst.target;
        m.dead = inst.dead;
        return m;
    }

    NodeId fresh(const std::string& base, NodeKind kind) {
        std::string name = base;
        auto taken = [&](const std::string& s) {
            for (size_t i = 0; i < names.size(); ++i)
                if (alive[i] && names[i] == s) return true;
            return false;
        };
        int suffix = 0;
        while (taken(name)) name = base + "~" + std::to_string(++suffix);
        names.push_back(name);
        kinds.push_back(kind);
        adj.emplace_back();
        prob.emplace_back();
        order.emplace_back();
        alive.push_back(true);
        return (NodeId)(names.size() - 1);
    }

    bool has_edge(NodeId u, NodeId v) const {
        return std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end();
    }

    void remove_edge(NodeId u, NodeId v) {
        adj[u].erase(std::remove(adj[u].begin(), adj[u].end(), v), adj[u].end());
        prob[u].erase(v);
    }

    void ensure_dead() {
        if (dead) return;
        NodeId d = fresh("d", NodeKind::Dead);
        adj[d] = {d};
        dead = d;
    }

    std::vector<NodeId> predecessors(NodeId x) const {
        std::vector<NodeId> out;
        for (NodeId v = 0; v < (NodeId)names.size(); ++v)
            if (alive[v] && v != x && has_edge(v, x)) out.push_back(v);
        return out;
    }

    // Every in-edge of x is redirected to w (mass-merging for random
    // predecessors, order substitution for switching ones).
    void redirect_into(NodeId x, NodeId w) {
        for (NodeId v : predecessors(x)) {
            bool had_w = has_edge(v, w);
            if (kinds[v] == NodeKind::Random) {
                Rational px = prob[v][x];
                remove_edge(v, x);
                if (had_w)
                    prob[v][w] += px;
                else {
                    adj[v].push_back(w);
                    prob[v][w] = px;
                }
            } else {
                remove_edge(v, x);
                if (!had_w) adj[v].push_back(w);
            }
            for (NodeId& o : order[v])
                if (o == x) o = w;
        }
    }

    ArrivalInstance rebuild() const {
        InstanceBuilder b;
        std::vector<NodeId> id(names.size(), -1);
        for (NodeId v = 0; v < (NodeId)names.size(); ++v)
            if (alive[v]) id[v] = b.add_node(names[v], kinds[v]);
        for (NodeId v = 0; v < (NodeId)names.size(); ++v) {
            if (!alive[v]) continue;
            for (NodeId w : adj[v]) {
                if (kinds[v] == NodeKind::Random)
                    b.add_edge(id[v], id[w], prob[v].at(w));
                else
                    b.add_edge(id[v], id[w]);
            }
            if (kinds[v] == NodeKind::Switch) {
                std::vector<NodeId> ord;
                for (NodeId o : order[v]) ord.push_back(id[o]);
                b.set_order(id[v], ord);
            }
        }
        b.set_start(id[start]);
        b.set_target(id[target]);
        if (dead) b.set_dead(id[*dead]);
        return b.build();
    }
};

// Contracts out-degree-1 vertices and removes self-loops until stable.
// A self-looping non-target absorber merges into d; a player's self-loop is
// a stall and is equivalent to moving to d; a random self-loop renormalizes
// away; switch self-entries are pure delays and drop out of the order.
inline void contract_and_deloop(Mut& m) {
    size_t contractions = 0;
    const size_t contraction_bound = m.names.size();  // one removal per vertex
    bool changed = true;
    while (changed) {
        changed = false;
        for (NodeId x = 0; x < (NodeId)m.names.size(); ++x) {
            if (!m.alive[x] || x == m.target || (m.dead && x == *m.dead)) continue;
            if (m.adj[x].size() == 1) {
                if (++contractions > contraction_bound)
                    throw std::logic_error("contraction exceeded the vertex-count bound");
                NodeId w = m.adj[x][0];
                if (w == x) {  // absorbing: everything into x belongs at d
                    m.ensure_dead();
                    m.redirect_into(x, *m.dead);
                    if (m.start == x) m.start = *m.dead;
                } else {
                    m.redirect_into(x, w);
                    if (m.start == x) m.start = w;
                }
                m.alive[x] = false;
                changed = true;
                break;
            }
            if (m.has_edge(x, x)) {
                NodeKind k = m.kinds[x];
                if (k == NodeKind::MaxPlayer || k == NodeKind::MinPlayer) {
                    // Stalling equals conceding: the self edge becomes (x,d)
                    // unless that edge already exists.
                    m.ensure_dead();
                    m.remove_edge(x, x);
                    if (!m.has_edge(x, *m.dead)) m.adj[x].push_back(*m.dead);
                } else if (k == NodeKind::Random) {
                    Rational p = m.prob[x].at(x);
                    m.remove_edge(x, x);
                    for (auto& [w, pw] : m.prob[x]) pw /= (Rational(1) - p);
                } else if (k == NodeKind::Switch) {
                    auto& ord = m.order[x];
                    ord.erase(std::remove(ord.begin(), ord.end(), x), ord.end());
                    m.remove_edge(x, x);
                }
                changed = true;
                break;
            }
        }
    }
}

// Most-significant-bit-first coin machine realizing an a/b split with fair
// coins: draw k = bits(b) coin flips as a number r, exit to `low` when
// r < a, to `high` when a <= r < b and restart at `entry` when r >= b,
// deciding as early as the prefix allows. At most two live comparison
// states per bit level.
inline void build_coin_machine(Mut& m, NodeId entry, const Rational& p, NodeId low, NodeId high) {
    const BigInt a = p.get_num();
    const BigInt b = p.get_den();
    enum class St { EqEq, EqLt, GtEq };
    // For a power-of-two denominator the draw can never reach b, so the
    // comparison against b is settled from the start and no restart exists.
    bool b_pow2 = mpz_popcount(b.get_mpz_t()) == 1;
    size_t k = b_pow2 ? bit_length(b) - 1 : bit_length(b);
    St init = b_pow2 ? St::EqLt : St::EqEq;
    auto bit_of = [&](const BigInt& v, size_t i) {  // msb-first over k bits
        return mpz_tstbit(v.get_mpz_t(), (mp_bitcnt_t)(k - 1 - i)) != 0;
    };
    std::map<std::pair<size_t, int>, NodeId> memo;
    struct Split {
        NodeId c0, c1;
    };
    std::function<NodeId(size_t, St)> build = [&](size_t level, St st) -> NodeId {
        if (level == k) {
            // All bits drawn: r == a falls in the high interval, r == b
            // restarts (only reachable for non-dyadic b).
            if (st == St::EqLt) return high;
            if (st == St::GtEq) return entry;
            throw std::logic_error("coin machine compared equal numerator and denominator");
        }
        auto key = std::make_pair(level, (int)st);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        bool ab = bit_of(a, level), bb = bit_of(b, level);
        Split c;
        switch (st) {
            case St::EqEq:
                if (ab && bb) c = {low, build(level + 1, St::EqEq)};
                else if (!ab && !bb) c = {build(level + 1, St::EqEq), entry};
                else c = {build(level + 1, St::EqLt), build(level + 1, St::GtEq)};
                break;
            case St::EqLt:
                if (ab) c = {low, build(level + 1, St::EqLt)};
                else c = {build(level + 1, St::EqLt), high};
                break;
            case St::GtEq:
            default:
                if (bb) c = {high, build(level + 1, St::GtEq)};
                else c = {build(level + 1, St::GtEq), entry};
                break;
        }
        if (c.c0 == c.c1) {  // pass-through, no vertex needed
            memo[key] = c.c0;
            return c.c0;
        }
        NodeId node = m.fresh("coin", NodeKind::Random);
        m.adj[node] = {c.c0, c.c1};
        m.prob[node][c.c0] = make_rational(1, 2);
        m.prob[node][c.c1] = make_rational(1, 2);
        memo[key] = node;
        return node;
    };
    // The entry vertex itself performs the first flip: build the two
    // subtrees of the initial comparison state directly under it. A child
    // equal to the entry is a restart self-loop and a coinciding pair is a
    // forced move; both are legal intermediates for the contraction pass.
    NodeId seed = build(0, init);
    Split c;
    if (seed == high || seed == entry || seed == low) {
        c = {seed, seed};
    } else {
        c = {m.adj[seed][0], m.adj[seed][1]};
        m.alive[seed] = false;  // fold the root state into the entry
    }
    m.kinds[entry] = NodeKind::Random;
    m.order[entry].clear();
    m.prob[entry].clear();
    if (c.c0 == c.c1) {
        m.adj[entry] = {c.c0};
        m.prob[entry][c.c0] = Rational(1);
    } else {
        m.adj[entry] = {c.c0, c.c1};
        m.prob[entry][c.c0] = make_rational(1, 2);
        m.prob[entry][c.c1] = make_rational(1, 2);
    }
}

// Replaces a switch with order longer than 2 by a binary toggle tree. The
// j-th distinct traversal of the tree exits through leaf slot j (visit order
// equals bit-reversed word order), so slot j is wired to Ord(x)_j and the
// surplus largest slots return to the root, which transparently re-enters.
inline void build_switch_tree(Mut& m, NodeId x) {
    std::vector<NodeId> ord = m.order[x];
    size_t len = ord.size();
    if (len <= 2) throw std::logic_error("switch tree on a short order");
    size_t k = 1;
    while ((size_t(1) << k) < len) ++k;
    // Internal levels 0..k-2 (level 0 is x), leaves at level k-1.
    std::vector<std::vector<NodeId>> level(k);
    level[0] = {x};
    for (size_t t = 1; t < k; ++t) {
        level[t].resize(size_t(1) << t);
        for (size_t i = 0; i < level[t].size(); ++i)
            level[t][i] = m.fresh(m.names[x] + "~t" + std::to_string(t) + "_" + std::to_string(i),
                                  NodeKind::Switch);
    }
    for (size_t t = 0; t + 1 < k; ++t) {
        for (size_t i = 0; i < level[t].size(); ++i) {
            NodeId node = level[t][i];
            NodeId c0 = level[t + 1][i];                      // choice bit 0
            NodeId c1 = level[t + 1][i + level[t].size()];    // choice bit 1
            m.adj[node] = {c0, c1};
            m.order[node] = {c0, c1};
            if (node == x) m.prob[node].clear();
        }
    }
    // Leaf with path index i (choice bits, root choice least significant)
    // exits at traversal j = i + 2^(k-1) * slot.
    for (size_t i = 0; i < level[k - 1].size(); ++i) {
        NodeId leaf = level[k - 1][i];
        auto dest = [&](size_t slot) -> NodeId {
            size_t j = i + (size_t(1) << (k - 1)) * slot;
            return j < len ? ord[j] : x;
        };
        NodeId d0 = dest(0), d1 = dest(1);
        if (d0 == d1) {
            // Degenerate leaf: both slots agree, leave an out-degree-1
            // relay for the contraction pass to fold away.
            m.adj[leaf] = {d0};
            m.order[leaf] = {d0};
        } else {
            m.adj[leaf] = {d0, d1};
            m.order[leaf] = {d0, d1};
        }
    }
}

// Player fan-out tree: same shape as the switch tree, successors assigned
// round-robin so no leaf duplicates a target and no slot returns to x
// (a min player could stall on a return edge).
inline void build_player_tree(Mut& m, NodeId x) {
    std::vector<NodeId> succs = m.adj[x];
    size_t len = succs.size();
    NodeKind pk = m.kinds[x];
    size_t k = 1;
    while ((size_t(1) << k) < len) ++k;
    std::vector<std::vector<NodeId>> level(k);
    level[0] = {x};
    for (size_t t = 1; t < k; ++t) {
        level[t].resize(size_t(1) << t);
        for (size_t i = 0; i < level[t].size(); ++i)
            level[t][i] =
                m.fresh(m.names[x] + "~p" + std::to_string(t) + "_" + std::to_string(i), pk);
    }
    for (size_t t = 0; t + 1 < k; ++t) {
        for (size_t i = 0; i < level[t].size(); ++i) {
            NodeId node = level[t][i];
            m.adj[node] = {level[t + 1][i], level[t + 1][i + level[t].size()]};
        }
    }
    for (size_t i = 0; i < level[k - 1].size(); ++i) {
        NodeId leaf = level[k - 1][i];
        NodeId d0 = succs[(2 * i) % len];
        NodeId d1 = succs[(2 * i + 1) % len];
        m.adj[leaf] = {d0, d1};
    }
}

}  // namespace normalize_detail

// Rewrites any valid instance into simple form without changing its value:
// out-degree-1 chains contract, self-loops resolve by node kind, wide
// players and switches become binary trees, and random nodes with
// probabilities other than 1/2 become most-significant-bit-first coin
// machines that retry on the residual interval.
inline ArrivalInstance to_simple_form(const ArrivalInstance& inst) {
    using namespace normalize_detail;
    Mut m = Mut::from(inst);
    m.ensure_dead();
    const Rational half = make_rational(1, 2);
    for (int round = 0; round < 1000; ++round) {
        contract_and_deloop(m);
        bool changed = false;
        for (NodeId x = 0; x < (NodeId)m.names.size() && !changed; ++x) {
            if (!m.alive[x] || x == m.target || (m.dead && x == *m.dead)) continue;
            NodeKind k = m.kinds[x];
            if (k == NodeKind::Switch && m.order[x].size() > 2) {
                build_switch_tree(m, x);
                changed = true;
            } else if ((k == NodeKind::MaxPlayer || k == NodeKind::MinPlayer) &&
                       m.adj[x].size() > 2) {
                build_player_tree(m, x);
                changed = true;
            } else if (k == NodeKind::Random && m.adj[x].size() > 2) {
                // Split the first successor off against a fresh aggregate
                // carrying the renormalized remainder.
                NodeId u0 = m.adj[x][0];
                Rational p0 = m.prob[x].at(u0);
                NodeId w = m.fresh(m.names[x] + "~rest", NodeKind::Random);
                for (size_t i = 1; i < m.adj[x].size(); ++i) {
                    NodeId u = m.adj[x][i];
                    m.adj[w].push_back(u);
                    m.prob[w][u] = m.prob[x].at(u) / (Rational(1) - p0);
                }
                if (p0 == half) {
                    m.adj[x] = {u0, w};
                    m.prob[x].clear();
                    m.prob[x][u0] = half;
                    m.prob[x][w] = half;
                } else {
                    build_coin_machine(m, x, p0, u0, w);
                }
                changed = true;
            } else if (k == NodeKind::Random && m.adj[x].size() == 2) {
                NodeId u0 = m.adj[x][0], u1 = m.adj[x][1];
                if (m.prob[x].at(u0) != half) {
                    Rational p0 = m.prob[x].at(u0);
                    build_coin_machine(m, x, p0, u0, u1);
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    ArrivalInstance out = m.rebuild();
    if (!is_simple_form(out)) throw std::logic_error("simple-form rewrite left a violation");
    return out;
}

// Redirects every edge into a non-hopeful vertex straight to the dead end;
// the value is unchanged because such edges could never contribute mass
// that reaches the target.
inline ArrivalInstance prune_dead_edges(const ArrivalInstance& inst) {
    using namespace normalize_detail;
    HopeReport hope = hopeful_set(inst);
    bool need = false;
    for (NodeId v = 0; v < (NodeId)inst.num_vertices() && !need; ++v) {
        if (v == inst.target) continue;
        for (NodeId w : inst.adj[v])
            if (!hope.hopeful[w] && (!inst.dead || w != *inst.dead)) need = true;
    }
    if (!need) return inst;  // fully hopeful (or already pruned): unchanged
    Mut m = Mut::from(inst);
    m.ensure_dead();
    NodeId d = *m.dead;
    for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v) {
        if (v == d) continue;
        std::vector<NodeId> dead_succs;
        for (NodeId w : m.adj[v])
            if (!hope.hopeful[w] && w != d) dead_succs.push_back(w);
        if (v == m.target) continue;
        for (NodeId w : dead_succs) {
            bool had_d = m.has_edge(v, d);
            if (m.kinds[v] == NodeKind::Random) {
                Rational pw = m.prob[v].at(w);
                m.remove_edge(v, w);
                if (had_d)
                    m.prob[v][d] += pw;
                else {
                    m.adj[v].push_back(d);
                    m.prob[v][d] = pw;
                }
            } else {
                m.remove_edge(v, w);
                if (!had_d) m.adj[v].push_back(d);
            }
            for (NodeId& o : m.order[v])
                if (o == w) o = d;
        }
    }
    // Unreachable non-hopeful vertices may keep their edges; they cannot
    // affect the value. The start keeps its vertex even when dead.
    return m.rebuild();
}

// Exchanges target and dead on a simple-form {R,S} instance. Dead edges are
// pruned first (re-simplifying if that shortens anything): almost-sure
// termination, and with it the exact identity val' = 1 - val, holds only
// once every play ends at t or d rather than cycling in a dead region.
inline ArrivalInstance swap_target_dead(const ArrivalInstance& inst) {
    if (inst.has_kind(NodeKind::MaxPlayer) || inst.has_kind(NodeKind::MinPlayer))
        throw ContractError("swap_target_dead requires an {R,S} instance");
    if (!inst.dead || !is_simple_form(inst))
        throw ContractError("swap_target_dead requires simple form");
    ArrivalInstance out = prune_dead_edges(inst);
    if (!is_simple_form(out)) out = to_simple_form(out);
    NodeId t = out.target, d = *out.dead;
    out.kinds[t] = NodeKind::Dead;
    out.kinds[d] = NodeKind::Target;
    out.target = d;
    out.dead = t;
    out.rebuild_switch_index();
    out.validate();
    return out;
}

namespace normalize_detail {

inline void copy_instance_into(InstanceBuilder& b, const ArrivalInstance& inst) {
    for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v) b.add_node(inst.name(v), inst.kind(v));
    for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v) {
        for (size_t i = 0; i < inst.adj[v].size(); ++i) {
            if (inst.kind(v) == NodeKind::Random)
                b.add_edge(b.node(inst.name(v)), b.node(inst.name(inst.adj[v][i])),
                           inst.prob[v][i]);
            else
                b.add_edge(b.node(inst.name(v)), b.node(inst.name(inst.adj[v][i])));
        }
        if (inst.kind(v) == NodeKind::Switch) {
            std::vector<NodeId> ord;
            for (NodeId o : inst.order[v]) ord.push_back(b.node(inst.name(o)));
            b.set_order(b.node(inst.name(v)), ord);
        }
    }
}

inline std::string fresh_name(const ArrivalInstance& inst, std::string base) {
    while (inst.id_of(base)) base += "'";
    return base;
}

}  // namespace normalize_detail

enum class CoinBranch { ToTarget, ToDead };

// New random start flipping a fair coin between the old start and the
// target (val' = (1+val)/2) or a dead end (val' = val/2).
inline ArrivalInstance prefix_coin(const ArrivalInstance& inst, CoinBranch branch) {
    using namespace normalize_detail;
    InstanceBuilder b;
    copy_instance_into(b, inst);
    NodeId old_start = b.node(inst.name(inst.start));
    NodeId s2 = b.add_node(fresh_name(inst, "s'"), NodeKind::Random);
    NodeId other;
    std::optional<NodeId> dead_id;
    if (inst.dead) dead_id = b.node(inst.name(*inst.dead));
    if (branch == CoinBranch::ToTarget) {
        other = b.node(inst.name(inst.target));
    } else {
        if (!dead_id) {
            dead_id = b.add_node(fresh_name(inst, "d"), NodeKind::Dead);
            b.add_edge(*dead_id, *dead_id);
        }
        other = *dead_id;
    }
    b.add_edge(s2, old_start);
    b.add_edge(s2, other);
    b.set_uniform(s2);
    b.set_start(s2);
    b.set_target(b.node(inst.name(inst.target)));
    if (dead_id) b.set_dead(*dead_id);
    return b.build();
}

// Default depth for geq_to_strict: l = 3Mn + 3n + 3 with M the longest
// switching order and n the canonical bit-encoding size.
inline BigInt geq_to_strict_default_depth(const ArrivalInstance& inst) {
    BigInt M = 1;
    for (NodeId v : inst.switch_nodes)
        if ((long)inst.order[v].size() > M) M = (long)inst.order[v].size();
    BigInt n((unsigned long)encoding_bits(inst));
    return 3 * M * n + 3 * n + 3;
}

// Prefixes a double-exponential chain of depth l: with probability
// eps = 2^-(2^l - 1) the play jumps straight to the target (ToTarget,
// val' = val + eps(1 - val)) or to a dead end (ToDead, val' = val - eps val);
// otherwise it enters the original instance at its start.
inline ArrivalInstance geq_to_strict(const ArrivalInstance& inst, CoinBranch branch,
                                     std::optional<BigInt> depth = std::nullopt) {
    using namespace normalize_detail;
    BigInt l_big = depth ? *depth : geq_to_strict_default_depth(inst);
    if (l_big < 1) throw ContractError("geq_to_strict depth must be >= 1");
    if (l_big > 1'000'000)
        throw CapacityError("geq_to_strict depth " + l_big.get_str() +
                            " exceeds the 1000000-node build cap");
    size_t l = (size_t)l_big.get_ui();
    InstanceBuilder b;
    copy_instance_into(b, inst);
    NodeId old_start = b.node(inst.name(inst.start));
    NodeId target = b.node(inst.name(inst.target));
    std::optional<NodeId> dead_id;
    if (inst.dead) dead_id = b.node(inst.name(*inst.dead));
    if (branch == CoinBranch::ToDead && !dead_id) {
        dead_id = b.add_node(fresh_name(inst, "d"), NodeKind::Dead);
        b.add_edge(*dead_id, *dead_id);
    }
    NodeId success = branch == CoinBranch::ToTarget ? target : *dead_id;

    NodeId gstart = b.add_node(fresh_name(inst, "g~start"), NodeKind::Switch);
    std::vector<NodeId> s(l);
    for (size_t i = 0; i < l; ++i)
        s[i] = b.add_node(fresh_name(inst, "g~s_" + std::to_string(i + 1)), NodeKind::Switch);
    NodeId x = b.add_node(fresh_name(inst, "g~x"), NodeKind::Random);
    b.add_edge(gstart, s[0]);
    b.set_order(gstart, {s[0]});
    for (size_t i = 0; i < l; ++i) {
        NodeId forward = i + 1 < l ? s[i + 1] : success;
        b.add_edge(s[i], x);
        b.add_edge(s[i], forward);
        b.set_order(s[i], {x, forward});
    }
    b.add_edge(x, gstart);
    b.add_edge(x, old_start);  // the 1 - eps branch enters the instance
    b.set_uniform(x);
    b.set_start(gstart);
    b.set_target(target);
    if (dead_id) b.set_dead(*dead_id);
    return b.build();
}

}  // namespace arrival

#pragma once

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "arrival/analysis.hpp"
#include "arrival/expand.hpp"
#include "arrival/model.hpp"
#include "arrival/normalize.hpp"

namespace arrival {

// ---------------------------------------------------------------------------
// Exact sparse linear algebra
// ---------------------------------------------------------------------------

struct SparseSystem {
    size_t n = 0;
    std::vector<std::map<uint32_t, Rational>> row;  // A, row-major
    std::vector<Rational> b;
};

// Gaussian elimination over the rationals. Pivots are chosen by sparsity
// (fewest-rows column, then fewest-entries row, ties by index), which finds
// the triangular order of DAG-shaped systems without fill-in. Throws on a
// singular system.
inline std::pair<std::vector<Rational>, size_t> gaussian_solve(SparseSystem sys) {
    size_t n = sys.n;
    std::vector<std::set<uint32_t>> col_rows(n);
    for (uint32_t r = 0; r < n; ++r)
        for (const auto& [c, v] : sys.row[r])
            if (v != 0) col_rows[c].insert(r);
    std::vector<bool> row_done(n, false), col_done(n, false);
    std::vector<std::pair<uint32_t, uint32_t>> pivots;  // (row, col) in order
    pivots.reserve(n);

    std::set<std::pair<size_t, uint32_t>> col_queue;  // (#rows, col), lazily stale
    for (uint32_t c = 0; c < n; ++c) col_queue.emplace(col_rows[c].size(), c);
    auto touch = [&](uint32_t c) {
        if (!col_done[c]) col_queue.emplace(col_rows[c].size(), c);
    };

    for (size_t step = 0; step < n; ++step) {
        // Cheapest active column; stale queue entries are discarded on pop.
        uint32_t pc = UINT32_MAX;
        while (!col_queue.empty()) {
            auto [sz, c] = *col_queue.begin();
            if (col_done[c] || sz != col_rows[c].size()) {
                col_queue.erase(col_queue.begin());
                touch(c);
                continue;
            }
            pc = c;
            break;
        }
        if (pc == UINT32_MAX || col_rows[pc].empty())
            throw std::logic_error("singular system: no pivot available");
        uint32_t pr = UINT32_MAX;
        size_t best = SIZE_MAX;
        for (uint32_t r : col_rows[pc]) {
            if (row_done[r]) continue;
            if (sys.row[r].size() < best) {
                best = sys.row[r].size();
                pr = r;
            }
        }
        if (pr == UINT32_MAX) throw std::logic_error("singular system: empty pivot column");

        const Rational pivot_val = sys.row[pr].at(pc);
        std::vector<uint32_t> victims(col_rows[pc].begin(), col_rows[pc].end());
        for (uint32_t r : victims) {
            if (r == pr || row_done[r]) continue;
            Rational factor = sys.row[r].at(pc) / pivot_val;
            for (const auto& [c, v] : sys.row[pr]) {
                if (col_done[c]) continue;
                auto it = sys.row[r].find(c);
                if (it == sys.row[r].end()) {
                    Rational nv = -factor * v;
                    if (nv != 0) {
                        sys.row[r].emplace(c, std::move(nv));
                        col_rows[c].insert(r);
                        touch(c);
                    }
                } else {
                    it->second -= factor * v;
                    if (it->second == 0) {
                        sys.row[r].erase(it);
                        col_rows[c].erase(r);
                        touch(c);
                    }
                }
            }
            sys.b[r] -= factor * sys.b[pr];
        }
        // Freeze the pivot row; retire the pivot column.
        row_done[pr] = true;
        for (const auto& [c, v] : sys.row[pr]) {
            if (!col_done[c]) {
                col_rows[c].erase(pr);
                touch(c);
            }
        }
        col_done[pc] = true;
        pivots.emplace_back(pr, pc);
    }

    // Frozen pivot rows only reference columns pivoted later: substitute back.
    std::vector<Rational> x(n, Rational(0));
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
        auto [r, c] = *it;
        Rational acc = sys.b[r];
        for (const auto& [cc, v] : sys.row[r])
            if (cc != c) acc -= v * x[cc];
        x[c] = acc / sys.row[r].at(c);
    }
    return {std::move(x), pivots.size()};
}

// ---------------------------------------------------------------------------
// Hitting probabilities of an explicit finite chain
// ---------------------------------------------------------------------------

using ChainRows = std::vector<std::vector<std::pair<uint32_t, Rational>>>;

struct HittingResult {
    std::vector<Rational> h;
    size_t pivots = 0;
};

// Exact probability of reaching a target state, per state. Rows of target
// states are ignored. States that cannot reach a target get 0, so the
// solved subsystem is always nonsingular (minimal solution of h = Ph + b).
inline HittingResult solve_hitting(const ChainRows& trans, const std::vector<bool>& is_target) {
    size_t n = trans.size();
    std::vector<std::vector<uint32_t>> preds(n);
    for (uint32_t i = 0; i < n; ++i) {
        if (is_target[i]) continue;
        for (const auto& [j, p] : trans[i]) preds[j].push_back(i);
    }
    std::vector<bool> pot(n, false);
    std::deque<uint32_t> work;
    for (uint32_t i = 0; i < n; ++i)
        if (is_target[i]) {
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

    std::vector<uint32_t> idx(n, UINT32_MAX);
    std::vector<uint32_t> rev;
    for (uint32_t i = 0; i < n; ++i)
        if (pot[i] && !is_target[i]) {
            idx[i] = (uint32_t)rev.size();
            rev.push_back(i);
        }
    SparseSystem sys;
    sys.n = rev.size();
    sys.row.resize(sys.n);
    sys.b.assign(sys.n, Rational(0));
    for (uint32_t k = 0; k < rev.size(); ++k) {
        uint32_t i = rev[k];
        auto& r = sys.row[k];
        r[k] = Rational(1);
        for (const auto& [j, p] : trans[i]) {
            if (is_target[j]) {
                sys.b[k] += p;
            } else if (idx[j] != UINT32_MAX) {
                Rational& cell = r[idx[j]];
                cell -= p;
                if (cell == 0) r.erase(idx[j]);
            }
        }
    }
    auto [x, pivots] = gaussian_solve(std::move(sys));
    HittingResult res;
    res.pivots = pivots;
    res.h.assign(n, Rational(0));
    for (uint32_t i = 0; i < n; ++i)
        if (is_target[i]) res.h[i] = 1;
    for (uint32_t k = 0; k < rev.size(); ++k) res.h[rev[k]] = x[k];
    return res;
}

// ---------------------------------------------------------------------------
// solve_chain: the {R,S} pipeline over the modified matrix
// ---------------------------------------------------------------------------

struct ChainSolveResult {
    std::vector<Rational> h;  // per retained state of the system
    Rational value;           // h at the start state
    size_t pivots = 0;
};

// Solves (I-P)h = (column into *) exactly and verifies h = Ph + b by exact
// substitution before returning.
inline ChainSolveResult solve_chain(const ExpandedSystem& sys) {
    size_t n = sys.states.size();
    SparseSystem lin;
    lin.n = n;
    lin.row.resize(n);
    lin.b.assign(n, Rational(0));
    for (uint32_t i = 0; i < n; ++i) {
        auto& r = lin.row[i];
        r[i] = Rational(1);
        for (const auto& [c, p] : sys.rows[i]) {
            if (c == sys.star()) {
                lin.b[i] += p;
            } else {
                Rational& cell = r[c];
                cell -= p;
                if (cell == 0) r.erase(c);
            }
        }
    }
    auto [h, pivots] = gaussian_solve(std::move(lin));
    for (uint32_t i = 0; i < n; ++i) {
        Rational acc(0);
        for (const auto& [c, p] : sys.rows[i]) acc += p * (c == sys.star() ? Rational(1) : h[c]);
        if (acc != h[i]) throw std::logic_error("hitting probabilities fail h = Ph + b");
    }
    ChainSolveResult res;
    res.h = std::move(h);
    res.pivots = pivots;
    if (sys.start_is_target)
        res.value = 1;
    else if (sys.start_row)
        res.value = res.h[*sys.start_row];
    else
        res.value = 0;
    return res;
}

// ---------------------------------------------------------------------------
// Policy iteration on the reachable expanded game
// ---------------------------------------------------------------------------

struct PolicyIterationResult {
    std::vector<Rational> h;        // per expanded state
    std::vector<uint32_t> choice;   // per state: successor index into succ[i] (players)
    size_t iterations = 0;
    size_t pivots = 0;
};

namespace solve_detail {

inline ChainRows induced_chain(const ExpandedGame& g, const std::vector<uint32_t>& choice) {
    ChainRows rows(g.size());
    for (uint32_t i = 0; i < g.size(); ++i) {
        NodeKind k = g.kind_of(i);
        if (k == NodeKind::Random) {
            for (size_t a = 0; a < g.succ[i].size(); ++a)
                rows[i].emplace_back(g.succ[i][a], g.prob[i][a]);
        } else if (k == NodeKind::MaxPlayer || k == NodeKind::MinPlayer) {
            rows[i].emplace_back(g.succ[i][choice[i]], Rational(1));
        } else {
            rows[i].emplace_back(g.succ[i][0], Rational(1));  // switch/target/dead
        }
    }
    return rows;
}

inline std::vector<bool> target_flags(const ExpandedGame& g) {
    std::vector<bool> t(g.size(), false);
    for (uint32_t i = 0; i < g.size(); ++i) t[i] = g.is_target(i);
    return t;
}

// States from which the minimizing player can avoid the target almost
// surely have value 0; they are the complement of the attractor where all
// non-min states are controlled.
inline std::vector<bool> min_avoid_set(const ExpandedGame& g,
                                       const std::vector<uint32_t>* fixed_max) {
    size_t n = g.size();
    std::vector<std::vector<NodeId>> adj(n);
    std::vector<bool> adversarial(n, false);
    for (uint32_t i = 0; i < n; ++i) {
        NodeKind k = g.kind_of(i);
        if (k == NodeKind::MaxPlayer && fixed_max) {
            adj[i].push_back((NodeId)g.succ[i][(*fixed_max)[i]]);
        } else {
            for (uint32_t j : g.succ[i]) adj[i].push_back((NodeId)j);
        }
        adversarial[i] = k == NodeKind::MinPlayer;
    }
    // Attractor to any target state: route all of them through one.
    std::optional<uint32_t> some_target;
    for (uint32_t i = 0; i < n; ++i)
        if (g.is_target(i)) {
            if (some_target)
                adj[i] = {(NodeId)*some_target};
            else
                some_target = i;
        }
    if (!some_target) return std::vector<bool>(n, true);
    std::vector<bool> attracted = attractor_reach(n, adj, adversarial, (NodeId)*some_target);
    std::vector<bool> avoid(n);
    for (uint32_t i = 0; i < n; ++i) avoid[i] = !attracted[i];
    return avoid;
}

}  // namespace solve_detail

// Howard policy iteration for the states of one player kind; the other
// player kind, if present, must be pinned by `fixed_other`. Policies start
// from the first out-edge, evaluation is the exact (minimal) hitting
// probability of the induced chain, and improvement switches every state
// with a strictly better action, keeping the incumbent on ties.
inline PolicyIterationResult policy_iteration(const ExpandedGame& g, NodeKind optimize,
                                              const std::vector<uint32_t>* fixed_other = nullptr) {
    if (optimize != NodeKind::MaxPlayer && optimize != NodeKind::MinPlayer)
        throw ContractError("policy iteration optimizes a player kind");
    NodeKind other =
        optimize == NodeKind::MaxPlayer ? NodeKind::MinPlayer : NodeKind::MaxPlayer;
    size_t n = g.size();
    std::vector<uint32_t> choice(n, 0);
    std::vector<uint32_t> my_states;
    for (uint32_t i = 0; i < n; ++i) {
        NodeKind k = g.kind_of(i);
        if (k == other) {
            if (!fixed_other) throw ContractError("opposing player present but not fixed");
            choice[i] = (*fixed_other)[i];
        } else if (k == optimize) {
            my_states.push_back(i);
        }
    }

    // Value-0 pruning for the minimizing player: without it, policy
    // iteration can stall on ties inside regions the player can hold forever.
    std::vector<bool> frozen_zero(n, false);
    if (optimize == NodeKind::MinPlayer) {
        std::vector<bool> avoid = solve_detail::min_avoid_set(g, fixed_other);
        for (uint32_t i = 0; i < n; ++i) frozen_zero[i] = avoid[i];
        // Inside the avoid region the min player realizes value 0 by staying
        // in it; pin the strategy there (some such successor always exists).
        for (uint32_t i : my_states) {
            if (!avoid[i]) continue;
            for (uint32_t a = 0; a < g.succ[i].size(); ++a)
                if (avoid[g.succ[i][a]]) {
                    choice[i] = a;
                    break;
                }
        }
    }

    auto targets = solve_detail::target_flags(g);
    PolicyIterationResult res;
    std::optional<std::vector<Rational>> prev;
    while (true) {
        ++res.iterations;
        ChainRows rows = solve_detail::induced_chain(g, choice);
        for (uint32_t i = 0; i < n; ++i)
            if (frozen_zero[i]) rows[i].clear();  // absorbing, value 0
        auto eval = solve_hitting(rows, targets);
        res.pivots += eval.pivots;
        if (prev) {
            for (uint32_t i = 0; i < n; ++i) {
                bool ok = optimize == NodeKind::MaxPlayer ? eval.h[i] >= (*prev)[i]
                                                          : eval.h[i] <= (*prev)[i];
                if (!ok) throw std::logic_error("policy iteration lost monotonicity");
            }
        }
        prev = eval.h;
        bool improved = false;
        for (uint32_t i : my_states) {
            if (frozen_zero[i]) continue;
            uint32_t cur = choice[i];
            Rational cur_val = eval.h[g.succ[i][cur]];
            uint32_t best = cur;
            Rational best_val = cur_val;
            for (uint32_t a = 0; a < g.succ[i].size(); ++a) {
                const Rational& v = eval.h[g.succ[i][a]];
                bool better = optimize == NodeKind::MaxPlayer ? v > best_val : v < best_val;
                if (better) {
                    best = a;
                    best_val = v;
                }
            }
            if (best != cur) {
                choice[i] = best;
                improved = true;
            }
        }
        if (!improved) {
            res.h = std::move(eval.h);
            res.choice = std::move(choice);
            return res;
        }
        if (res.iterations > 1'000'000)
            throw std::logic_error("policy iteration failed to terminate");
    }
}

struct SsgResult {
    std::vector<Rational> h;
    std::vector<uint32_t> max_choice;
    std::vector<uint32_t> min_choice;
    size_t iterations = 0;
    size_t pivots = 0;
};

namespace solve_detail {

// Exact one-step Bellman fixpoint check: max/min states take the best
// successor value, random states average, deterministic states copy.
inline bool is_game_fixpoint(const ExpandedGame& g, const std::vector<Rational>& h) {
    for (uint32_t i = 0; i < g.size(); ++i) {
        if (g.is_target(i)) {
            if (h[i] != 1) return false;
            continue;
        }
        NodeKind k = g.kind_of(i);
        Rational expect;
        if (k == NodeKind::Random) {
            expect = 0;
            for (size_t a = 0; a < g.succ[i].size(); ++a) expect += g.prob[i][a] * h[g.succ[i][a]];
        } else if (k == NodeKind::MaxPlayer || k == NodeKind::MinPlayer) {
            expect = h[g.succ[i][0]];
            for (size_t a = 1; a < g.succ[i].size(); ++a) {
                const Rational& v = h[g.succ[i][a]];
                if (k == NodeKind::MaxPlayer ? v > expect : v < expect) expect = v;
            }
        } else {
            expect = h[g.succ[i][0]];
        }
        if (expect != h[i]) return false;
    }
    return true;
}

}  // namespace solve_detail

// Strategy iteration: fix the min strategy, solve the max player's MDP
// exactly, switch min states with a strictly better action, repeat. The
// terminal value vector is certified as a saddle point: it must be a
// fixpoint of the game's Bellman operator and be confirmed by the min
// best-response to the terminal max strategy. If the confirmation fails the
// roles are swapped and iteration continues on the max side, whose
// termination value always equals the game value (it is a Bellman fixpoint
// reachable from below).
inline SsgResult solve_ssg_game(const ExpandedGame& g) {
    size_t n = g.size();
    std::vector<uint32_t> min_choice(n, 0);
    SsgResult res;
    std::vector<Rational> h;
    std::vector<uint32_t> max_choice(n, 0);
    std::optional<std::vector<Rational>> prev;
    while (true) {
        ++res.iterations;
        auto br = policy_iteration(g, NodeKind::MaxPlayer, &min_choice);
        res.pivots += br.pivots;
        h = std::move(br.h);
        max_choice = std::move(br.choice);
        if (prev) {
            for (uint32_t i = 0; i < n; ++i)
                if (h[i] > (*prev)[i]) throw std::logic_error("strategy iteration lost monotonicity");
        }
        prev = h;
        bool improved = false;
        for (uint32_t i = 0; i < n; ++i) {
            if (g.kind_of(i) != NodeKind::MinPlayer) continue;
            uint32_t cur = min_choice[i];
            Rational cur_val = h[g.succ[i][cur]];
            uint32_t best = cur;
            Rational best_val = cur_val;
            for (uint32_t a = 0; a < g.succ[i].size(); ++a) {
                const Rational& v = h[g.succ[i][a]];
                if (v < best_val) {
                    best = a;
                    best_val = v;
                }
            }
            if (best != cur) {
                min_choice[i] = best;
                improved = true;
            }
        }
        if (!improved) break;
        if (res.iterations > 1'000'000)
            throw std::logic_error("strategy iteration failed to terminate");
    }

    // Saddle certificate: h must also be the min best response to max_choice.
    auto confirm = policy_iteration(g, NodeKind::MinPlayer, &max_choice);
    res.pivots += confirm.pivots;
    bool saddle = confirm.h == h && solve_detail::is_game_fixpoint(g, h);
    if (!saddle) {
        // Max-side iteration: evaluate each max strategy by the exact min
        // best response; its fixpoint is the value.
        std::vector<uint32_t> mc(n, 0);
        size_t guard = 0;
        while (true) {
            auto ev = policy_iteration(g, NodeKind::MinPlayer, &mc);
            res.pivots += ev.pivots;
            h = ev.h;
            min_choice = ev.choice;
            bool improved = false;
            for (uint32_t i = 0; i < n; ++i) {
                if (g.kind_of(i) != NodeKind::MaxPlayer) continue;
                Rational cur_val = h[g.succ[i][mc[i]]];
                uint32_t best = mc[i];
                Rational best_val = cur_val;
                for (uint32_t a = 0; a < g.succ[i].size(); ++a) {
                    const Rational& v = h[g.succ[i][a]];
                    if (v > best_val) {
                        best = a;
                        best_val = v;
                    }
                }
                if (best != mc[i]) {
                    mc[i] = best;
                    improved = true;
                }
            }
            ++res.iterations;
            if (!improved) break;
            if (++guard > 1'000'000)
                throw std::logic_error("strategy iteration failed to terminate");
        }
        max_choice = mc;
        if (!solve_detail::is_game_fixpoint(g, h))
            throw std::logic_error("strategy iteration ended off the Bellman fixpoint");
    }
    res.h = std::move(h);
    res.max_choice = std::move(max_choice);
    res.min_choice = std::move(min_choice);
    return res;
}

// ---------------------------------------------------------------------------
// Dispatch, decision problems, reports
// ---------------------------------------------------------------------------

enum class SolveMethod { LinearSolve, PolicyIteration, StrategyIteration, Attractor };

inline const char* method_name(SolveMethod m) {
    switch (m) {
        case SolveMethod::LinearSolve: return "LinearSolve";
        case SolveMethod::PolicyIteration: return "PolicyIteration";
        case SolveMethod::StrategyIteration: return "StrategyIteration";
        case SolveMethod::Attractor: return "Attractor";
    }
    return "?";
}

struct SolveReport {
    Rational value;
    SolveMethod method = SolveMethod::LinearSolve;
    bool qual0 = false;
    bool qual1 = false;
    std::optional<Rational> quant_p;
    std::optional<bool> quant;
    std::optional<StrategyMap> max_strategy;
    std::optional<StrategyMap> min_strategy;
    size_t reachable_states = 0;
    size_t retained_states = 0;
    size_t pivots = 0;
    size_t iterations = 0;
};

namespace solve_detail {

inline StrategyMap choices_to_strategy(const ExpandedGame& g, NodeKind kind,
                                       const std::vector<uint32_t>& choice) {
    StrategyMap s;
    for (uint32_t i = 0; i < g.size(); ++i) {
        if (g.kind_of(i) != kind) continue;
        const GameState& st = g.states[i];
        s.choice[st] = g.states[g.succ[i][choice[i]]].vertex;
    }
    return s;
}

}  // namespace solve_detail

// Exact value and verdicts for any node-type combination at desk scale:
// attractor for deterministic games, linear solve for {R,S}, policy
// iteration with one player, strategy iteration with both.
inline SolveReport solve_instance(const ArrivalInstance& inst,
                                  size_t budget = kDefaultStateBudget,
                                  std::optional<Rational> quant_p = std::nullopt) {
    ExpandedGame g = build_reachable_game(inst, budget);
    bool has_random = false, has_max = false, has_min = false;
    for (uint32_t i = 0; i < g.size(); ++i) {
        switch (g.kind_of(i)) {
            case NodeKind::Random: has_random = g.succ[i].size() > 1 || has_random; break;
            case NodeKind::MaxPlayer: has_max = true; break;
            case NodeKind::MinPlayer: has_min = true; break;
            default: break;
        }
    }
    SolveReport rep;
    rep.reachable_states = g.size();
    if (!has_random) {
        // Deterministic reachability game over the expanded states.
        size_t n = g.size();
        std::vector<std::vector<NodeId>> adj(n);
        std::vector<bool> adversarial(n, false);
        std::optional<uint32_t> some_target;
        for (uint32_t i = 0; i < n; ++i) {
            adversarial[i] = g.kind_of(i) == NodeKind::MinPlayer;
            for (uint32_t j : g.succ[i]) adj[i].push_back((NodeId)j);
        }
        for (uint32_t i = 0; i < n; ++i)
            if (g.is_target(i)) {
                if (some_target)
                    adj[i] = {(NodeId)*some_target};
                else
                    some_target = i;
            }
        rep.method = SolveMethod::Attractor;
        std::vector<NodeId> pick;
        std::vector<bool> won =
            some_target ? attractor_reach(n, adj, adversarial, (NodeId)*some_target, &pick)
                        : std::vector<bool>(n, false);
        rep.value = won[g.start_index] ? 1 : 0;
        StrategyMap maxs, mins;
        for (uint32_t i = 0; i < n; ++i) {
            NodeKind k = g.kind_of(i);
            if (k == NodeKind::MaxPlayer) {
                uint32_t to = won[i] && pick[i] >= 0 ? (uint32_t)pick[i] : g.succ[i][0];
                maxs.choice[g.states[i]] = g.states[to].vertex;
            } else if (k == NodeKind::MinPlayer) {
                uint32_t to = g.succ[i][0];
                for (uint32_t j : g.succ[i])
                    if (!won[j]) {
                        to = j;
                        break;
                    }
                mins.choice[g.states[i]] = g.states[to].vertex;
            }
        }
        if (has_max) rep.max_strategy = std::move(maxs);
        if (has_min) rep.min_strategy = std::move(mins);
        rep.retained_states = n;
    } else if (!has_max && !has_min) {
        ExpandedSystem sys = modified_matrix(inst, budget);
        auto res = solve_chain(sys);
        rep.method = SolveMethod::LinearSolve;
        rep.value = res.value;
        rep.retained_states = sys.states.size();
        rep.pivots = res.pivots;
    } else if (has_max != has_min) {
        NodeKind k = has_max ? NodeKind::MaxPlayer : NodeKind::MinPlayer;
        auto res = policy_iteration(g, k);
        rep.method = SolveMethod::PolicyIteration;
        rep.value = res.h[g.start_index];
        rep.retained_states = g.size();
        rep.pivots = res.pivots;
        rep.iterations = res.iterations;
        auto strat = solve_detail::choices_to_strategy(g, k, res.choice);
        if (has_max)
            rep.max_strategy = std::move(strat);
        else
            rep.min_strategy = std::move(strat);
    } else {
        auto res = solve_ssg_game(g);
        rep.method = SolveMethod::StrategyIteration;
        rep.value = res.h[g.start_index];
        rep.retained_states = g.size();
        rep.pivots = res.pivots;
        rep.iterations = res.iterations;
        rep.max_strategy =
            solve_detail::choices_to_strategy(g, NodeKind::MaxPlayer, res.max_choice);
        rep.min_strategy =
            solve_detail::choices_to_strategy(g, NodeKind::MinPlayer, res.min_choice);
    }
    if (rep.value < 0 || rep.value > 1) throw std::logic_error("value escaped [0,1]");
    rep.qual0 = rep.value > 0;
    rep.qual1 = rep.value == 1;
    if (quant_p) {
        if (*quant_p <= 0 || *quant_p >= 1)
            throw ContractError("quantitative threshold must lie in (0,1)");
        rep.quant_p = quant_p;
        rep.quant = rep.value > *quant_p;
    }
    return rep;
}

enum class Problem { Qual0, Qual1, Quant };

// Denominator-bound exponent k = 2n(|V| * M^|V_S|) as an exact
// big integer; n is the canonical bit-encoding size, M the longest order.
inline BigInt value_denominator_bound_exponent(const ArrivalInstance& inst, size_t n_bits) {
    BigInt M = 1;
    for (NodeId v : inst.switch_nodes)
        if ((long)inst.order[v].size() > M) M = (long)inst.order[v].size();
    BigInt prod;
    mpz_pow_ui(prod.get_mpz_t(), M.get_mpz_t(), inst.switch_nodes.size());
    prod *= (long)inst.num_vertices();
    return 2 * BigInt((unsigned long)n_bits) * prod;
}

// den(value) <= 4^k, checked through bit lengths because 4^k is usually
// far too large to materialize.
inline bool denominator_within_bound(const Rational& value, const BigInt& k) {
    BigInt den = value.get_den();
    BigInt bits((unsigned long)bit_length(den));
    if (bits <= 2 * k) return true;
    if (bits == 2 * k + 1 && mpz_fits_ulong_p(BigInt(2 * k).get_mpz_t())) {
        return den == pow2(BigInt(2 * k).get_ui());
    }
    return false;
}

// Decides Qual-0 (val > 0), Qual-1 (val = 1) or Quant (val > p) by exact
// comparison on the solved value. Independent secondary routes are computed
// and cross-checked whenever they apply: Qual-0 without a min player runs
// the random-to-player reduction (and the one-directional non-hopeful means
// value 0 check); Qual-1 for {R,S} instances runs the target/dead swap and
// decides Qual-0 on the complement. Hopefulness alone cannot replace Qual-0
// because it ignores the switching discipline: a switch ordered (dead,
// target) is hopeful but its forced play never arrives.
inline bool decide(const ArrivalInstance& inst, Problem problem,
                   std::optional<Rational> p = std::nullopt,
                   size_t budget = kDefaultStateBudget) {
    if (problem == Problem::Quant) {
        if (!p) throw ContractError("Quant needs a threshold p");
        SolveReport rep = solve_instance(inst, budget, p);
        return *rep.quant;
    }
    SolveReport rep = solve_instance(inst, budget);
    bool exact = problem == Problem::Qual0 ? rep.qual0 : rep.qual1;
    bool no_players =
        !inst.has_kind(NodeKind::MaxPlayer) && !inst.has_kind(NodeKind::MinPlayer);
    if (problem == Problem::Qual0 && !inst.has_kind(NodeKind::MinPlayer)) {
        if (!hopeful_set(inst).hopeful[inst.start] && exact)
            throw std::logic_error("non-hopeful start must have value 0");
        bool via_player = solve_instance(random_to_player(inst), budget).value == 1;
        if (via_player != exact)
            throw std::logic_error("random-to-player route disagrees with the exact value");
    }
    if (problem == Problem::Qual1 && no_players) {
        // val = 1 iff the swapped complement instance has value 0.
        ArrivalInstance swapped = swap_target_dead(to_simple_form(inst));
        bool via_swap = !(solve_instance(swapped, budget).value > 0);
        if (via_swap != exact)
            throw std::logic_error("swap/Qual-0 route disagrees with the exact value");
    }
    return exact;
}

}  // namespace arrival

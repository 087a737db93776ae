#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "arrival/analysis.hpp"
#include "arrival/model.hpp"
#include "arrival/normalize.hpp"

namespace arrival {

struct EdgeTraversalStat {
    NodeId from = -1, to = -1;
    double mean = 0.0;
    double stddev = 0.0;             // of a single run's count
    bool hopeful = false;
    std::optional<size_t> desperation;
    double bound = 0.0;              // 2^(k+1) - 1 for hopeful edges
    bool flagged = false;            // mean exceeds bound + 5 sigma of the mean
};

struct SimReport {
    uint64_t samples = 0;
    uint64_t reached = 0;
    uint64_t dead = 0;
    uint64_t truncated = 0;
    uint64_t step_limit = 0;
    Rational reach_frequency;
    std::map<uint64_t, uint64_t> step_histogram;  // steps to absorption
    std::vector<EdgeTraversalStat> edges;         // traversal_stats only
};

namespace sim_detail {

inline uint64_t mix_seed(uint64_t seed, uint64_t run) {
    uint64_t z = seed + (run + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Mirrors run_play without recording the trace; returns (outcome, steps) and
// optionally counts edge traversals into `edge_counts` (indexed by the
// instance's flattened adjacency).
inline std::pair<PlayOutcome, uint64_t> run_fast(const ArrivalInstance& inst,
                                                 const StrategyMap& strategy, uint64_t seed,
                                                 uint64_t step_limit,
                                                 std::vector<uint32_t>* edge_counts,
                                                 const std::vector<size_t>* edge_base) {
    ExactSampler sampler(seed);
    GameState cur = initial_state(inst);
    auto settled = [&](NodeId v) -> std::optional<PlayOutcome> {
        if (v == inst.target) return PlayOutcome::ReachedTarget;
        if ((inst.dead && v == *inst.dead) || inst.is_absorbing(v))
            return PlayOutcome::ReachedDead;
        return std::nullopt;
    };
    for (uint64_t step = 0; step < step_limit; ++step) {
        if (auto done = settled(cur.vertex)) return {*done, step};
        NodeId v = cur.vertex;
        NodeKind k = inst.kind(v);
        NodeId to;
        if (k == NodeKind::Switch) {
            const auto& ord = inst.order[v];
            int32_t slot = inst.switch_slot[v];
            to = ord[cur.pos[slot]];
            cur.pos[slot] = (uint16_t)((cur.pos[slot] + 1) % ord.size());
        } else if (k == NodeKind::Random) {
            to = inst.adj[v][sampler.pick(inst.prob[v])];
        } else {
            if (auto c = strategy.at(cur))
                to = *c;
            else
                to = inst.adj[v][0];
        }
        if (edge_counts) {
            const auto& a = inst.adj[v];
            size_t i = std::lower_bound(a.begin(), a.end(), to) - a.begin();
            ++(*edge_counts)[(*edge_base)[v] + i];
        }
        cur.vertex = to;
    }
    if (auto done = settled(cur.vertex)) return {*done, step_limit};
    return {PlayOutcome::Truncated, step_limit};
}

}  // namespace sim_detail

// Monte-Carlo estimate of the value: the frequency of target-reaching runs
// over independent seeded plays. Deterministic for a fixed (seed, samples).
inline SimReport estimate_value(const ArrivalInstance& inst, const StrategyMap& strategy,
                                uint64_t samples, uint64_t seed,
                                std::optional<uint64_t> step_limit = std::nullopt) {
    if (samples < 1) throw ContractError("need at least one sample");
    SimReport rep;
    rep.samples = samples;
    rep.step_limit = step_limit ? *step_limit : default_step_limit(inst);
    for (uint64_t r = 0; r < samples; ++r) {
        auto [outcome, steps] = sim_detail::run_fast(inst, strategy, sim_detail::mix_seed(seed, r),
                                                     rep.step_limit, nullptr, nullptr);
        switch (outcome) {
            case PlayOutcome::ReachedTarget: ++rep.reached; break;
            case PlayOutcome::ReachedDead: ++rep.dead; break;
            case PlayOutcome::Truncated: ++rep.truncated; break;
        }
        if (outcome != PlayOutcome::Truncated) ++rep.step_histogram[steps];
    }
    rep.reach_frequency = make_rational(BigInt((unsigned long)rep.reached),
                                        BigInt((unsigned long)samples));
    return rep;
}

// Empirical mean traversal count per edge with the hopeful-edge expectation
// bound E[T_e] <= 2^(k+1) - 1 at desperation k. Requires a pruned
// simple-form {R,S} instance, the scope of the bound.
inline SimReport traversal_stats(const ArrivalInstance& inst, uint64_t samples, uint64_t seed,
                                 std::optional<uint64_t> step_limit = std::nullopt) {
    if (inst.has_kind(NodeKind::MaxPlayer) || inst.has_kind(NodeKind::MinPlayer))
        throw ContractError("traversal_stats requires an {R,S} instance");
    if (!is_simple_form(inst))
        throw ContractError("traversal_stats requires simple form");
    HopeReport hope = hopeful_set(inst);
    for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v)
        for (NodeId w : inst.adj[v])
            if (!hope.hopeful[w] && w != *inst.dead)
                throw ContractError("traversal_stats requires dead edges pruned to d");

    std::vector<size_t> edge_base(inst.num_vertices() + 1, 0);
    for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v)
        edge_base[v + 1] = edge_base[v] + inst.adj[v].size();
    size_t num_edges = edge_base.back();

    SimReport rep;
    rep.samples = samples;
    rep.step_limit = step_limit ? *step_limit : default_step_limit(inst);
    std::vector<double> sum(num_edges, 0.0), sumsq(num_edges, 0.0);
    std::vector<uint32_t> counts(num_edges);
    StrategyMap empty;
    for (uint64_t r = 0; r < samples; ++r) {
        std::fill(counts.begin(), counts.end(), 0);
        auto [outcome, steps] = sim_detail::run_fast(inst, empty, sim_detail::mix_seed(seed, r),
                                                     rep.step_limit, &counts, &edge_base);
        switch (outcome) {
            case PlayOutcome::ReachedTarget: ++rep.reached; break;
            case PlayOutcome::ReachedDead: ++rep.dead; break;
            case PlayOutcome::Truncated: ++rep.truncated; break;
        }
        if (outcome != PlayOutcome::Truncated) ++rep.step_histogram[steps];
        for (size_t e = 0; e < num_edges; ++e) {
            sum[e] += counts[e];
            sumsq[e] += double(counts[e]) * double(counts[e]);
        }
    }
    rep.reach_frequency = make_rational(BigInt((unsigned long)rep.reached),
                                        BigInt((unsigned long)samples));
    for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v) {
        for (size_t i = 0; i < inst.adj[v].size(); ++i) {
            EdgeTraversalStat st;
            st.from = v;
            st.to = inst.adj[v][i];
            size_t e = edge_base[v] + i;
            st.mean = sum[e] / double(samples);
            double var = sumsq[e] / double(samples) - st.mean * st.mean;
            st.stddev = var > 0 ? std::sqrt(var) : 0.0;
            st.hopeful = hope.hopeful[st.to];
            if (st.hopeful && hope.desperation[st.to]) {
                st.desperation = hope.desperation[st.to];
                st.bound = std::ldexp(1.0, (int)*st.desperation + 1) - 1.0;
                double sigma_mean = st.stddev / std::sqrt(double(samples));
                st.flagged = st.mean > st.bound + 5.0 * sigma_mean;
            }
            rep.edges.push_back(st);
        }
    }
    return rep;
}

}  // namespace arrival

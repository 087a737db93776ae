#pragma once

#include <json.hpp>

#include <string>

#include "arrival/analysis.hpp"
#include "arrival/expand.hpp"
#include "arrival/gadgets.hpp"
#include "arrival/io.hpp"
#include "arrival/model.hpp"
#include "arrival/simulate.hpp"
#include "arrival/solve.hpp"

namespace arrival {

using Json = nlohmann::ordered_json;

// Exact value plus a convenience decimal; the decimal is approximate and
// labeled as such by its key.
inline void put_rational(Json& j, const std::string& key, const Rational& r) {
    j[key] = rational_str(r);
    j[key + "_approx"] = rational_approx(r);
}

inline std::string state_str(const ArrivalInstance& inst, const GameState& s) {
    return expand_detail::state_name(inst, s);
}

inline Json hope_to_json(const ArrivalInstance& inst, const HopeReport& rep) {
    Json j;
    Json hopeful = Json::array();
    Json desperation = Json::object();
    for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v) {
        if (rep.hopeful[v]) hopeful.push_back(inst.name(v));
        if (rep.desperation[v]) desperation[inst.name(v)] = *rep.desperation[v];
    }
    j["hopeful"] = std::move(hopeful);
    j["desperation"] = std::move(desperation);
    j["start_hopeful"] = (bool)rep.hopeful[inst.start];
    return j;
}

inline Json strategy_to_json(const ArrivalInstance& inst, const StrategyMap& s,
                             size_t cap = 10000) {
    Json j = Json::object();
    std::vector<std::pair<std::string, std::string>> rows;
    for (const auto& [state, to] : s.choice)
        rows.emplace_back(state_str(inst, state), inst.name(to));
    std::sort(rows.begin(), rows.end());
    Json choices = Json::object();
    size_t n = 0;
    for (const auto& [k, v] : rows) {
        if (n++ >= cap) break;
        choices[k] = v;
    }
    j["choices"] = std::move(choices);
    j["size"] = rows.size();
    j["truncated"] = rows.size() > cap;
    return j;
}

inline Json solve_to_json(const ArrivalInstance& inst, const SolveReport& rep) {
    Json j;
    put_rational(j, "value", rep.value);
    j["method"] = method_name(rep.method);
    Json verdicts;
    verdicts["qual0"] = rep.qual0;
    verdicts["qual1"] = rep.qual1;
    if (rep.quant_p) {
        put_rational(verdicts, "p", *rep.quant_p);
        verdicts["quant"] = *rep.quant;
    }
    j["verdicts"] = std::move(verdicts);
    Json stats;
    stats["reachable_states"] = rep.reachable_states;
    stats["retained_states"] = rep.retained_states;
    stats["pivots"] = rep.pivots;
    stats["iterations"] = rep.iterations;
    j["stats"] = std::move(stats);
    if (rep.max_strategy) j["max_strategy"] = strategy_to_json(inst, *rep.max_strategy);
    if (rep.min_strategy) j["min_strategy"] = strategy_to_json(inst, *rep.min_strategy);
    return j;
}

inline Json sim_to_json(const ArrivalInstance& inst, const SimReport& rep) {
    Json j;
    j["samples"] = rep.samples;
    j["reached"] = rep.reached;
    j["dead"] = rep.dead;
    j["truncated"] = rep.truncated;
    j["step_limit"] = rep.step_limit;
    put_rational(j, "reach_frequency", rep.reach_frequency);
    Json hist = Json::object();
    for (const auto& [steps, count] : rep.step_histogram)
        hist[std::to_string(steps)] = count;
    j["step_histogram"] = std::move(hist);
    if (!rep.edges.empty()) {
        Json edges = Json::array();
        for (const auto& e : rep.edges) {
            Json je;
            je["from"] = inst.name(e.from);
            je["to"] = inst.name(e.to);
            je["mean"] = e.mean;
            je["stddev"] = e.stddev;
            je["hopeful"] = e.hopeful;
            if (e.desperation) {
                je["desperation"] = *e.desperation;
                je["bound"] = e.bound;
                je["flagged"] = e.flagged;
            }
            edges.push_back(std::move(je));
        }
        j["edges"] = std::move(edges);
    }
    return j;
}

inline Json gadget_stats_to_json(const GadgetStats& st) {
    Json j;
    j["n"] = st.n;
    j["m"] = st.m;
    j["a"] = st.a;
    j["b"] = st.b;
    j["D"] = st.D;
    j["num_vertices"] = st.num_vertices;
    j["num_edges"] = st.num_edges;
    j["sum_ord"] = st.sum_ord;
    return j;
}

inline Json instance_stats_to_json(const ArrivalInstance& inst) {
    Json j;
    j["num_vertices"] = inst.num_vertices();
    size_t edges = 0, sum_ord = 0;
    Json kinds;
    std::map<std::string, size_t> kind_count;
    size_t max_ord = 0;
    for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v) {
        edges += inst.adj[v].size();
        sum_ord += inst.order[v].size();
        max_ord = std::max(max_ord, inst.order[v].size());
        ++kind_count[kind_name(inst.kind(v))];
    }
    j["num_edges"] = edges;
    j["sum_ord"] = sum_ord;
    j["max_ord"] = max_ord;
    for (const auto& [k, c] : kind_count) kinds[k] = c;
    j["kinds"] = std::move(kinds);
    j["start"] = inst.name(inst.start);
    j["target"] = inst.name(inst.target);
    if (inst.dead) j["dead"] = inst.name(*inst.dead);
    j["encoding_bits"] = encoding_bits(inst);
    j["denominator_bound_exponent"] =
        value_denominator_bound_exponent(inst, encoding_bits(inst)).get_str();
    return j;
}

}  // namespace arrival

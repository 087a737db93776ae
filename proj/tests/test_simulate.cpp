#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "arrival/gadgets.hpp"
#include "arrival/normalize.hpp"
#include "arrival/simulate.hpp"
#include "arrival/solve.hpp"
#include "corpus.hpp"

using namespace arrival;

TEST_CASE("a sure win estimates to frequency one") {
    StrategyMap empty;
    SimReport rep = estimate_value(corpus::trivial_win(), empty, 500, 3);
    CHECK(rep.reach_frequency == 1);
    CHECK(rep.truncated == 0);
}

TEST_CASE("coin estimate lands within the binomial window") {
    StrategyMap empty;
    const uint64_t n = 100000;
    SimReport rep = estimate_value(corpus::coin_instance(), empty, n, 17);
    double f = rational_approx(rep.reach_frequency);
    double sigma = std::sqrt(0.25 / double(n));
    CHECK(std::abs(f - 0.5) <= 3 * sigma);
}

TEST_CASE("double-exp estimate matches the exact value") {
    StrategyMap empty;
    const uint64_t n = 100000;
    SimReport rep = estimate_value(gen_double_exp(2), empty, n, 23);
    double f = rational_approx(rep.reach_frequency);
    double sigma = std::sqrt(0.125 * 0.875 / double(n));
    CHECK(std::abs(f - 0.125) <= 3 * sigma);
    CHECK(rep.truncated == 0);
}

TEST_CASE("estimates are deterministic in the seed") {
    StrategyMap empty;
    SimReport a = estimate_value(gen_double_exp(2), empty, 2000, 5);
    SimReport b = estimate_value(gen_double_exp(2), empty, 2000, 5);
    CHECK(a.reach_frequency == b.reach_frequency);
    CHECK(a.step_histogram == b.step_histogram);
    SimReport c = estimate_value(gen_double_exp(2), empty, 2000, 6);
    CHECK((c.reach_frequency != a.reach_frequency || c.step_histogram != a.step_histogram));
}

TEST_CASE("needing at least one sample") {
    StrategyMap empty;
    CHECK_THROWS_AS(estimate_value(corpus::coin_instance(), empty, 0, 1), ContractError);
}

TEST_CASE("traversal bounds hold on the double-exp corpus") {
    for (unsigned n : {1u, 2u}) {
        ArrivalInstance sf = to_simple_form(prune_dead_edges(to_simple_form(gen_double_exp(n))));
        SimReport rep = traversal_stats(sf, 100000, 29);
        for (const auto& e : rep.edges) {
            if (!e.desperation) continue;
            CHECK(!e.flagged);
            if (*e.desperation == 0) CHECK(e.mean <= 1.0);  // T_e in {0,1}
        }
        CHECK(double(rep.truncated) / double(rep.samples) < 1e-3);
    }
}

TEST_CASE("traversal stats insist on a pruned simple {R,S} instance") {
    CHECK_THROWS_AS(traversal_stats(gen_double_exp(2), 10, 1), ContractError);  // not simple
    InstanceBuilder b;
    NodeId v = b.add_node("v", NodeKind::MaxPlayer);
    NodeId t = b.add_node("t", NodeKind::Target);
    NodeId d = b.add_node("d", NodeKind::Dead);
    b.add_edge(v, t);
    b.add_edge(v, d);
    b.add_edge(t, t);
    b.add_edge(d, d);
    b.set_start(v);
    b.set_target(t);
    b.set_dead(d);
    CHECK_THROWS_AS(traversal_stats(b.build(), 10, 1), ContractError);  // player nodes
}

TEST_CASE("estimate converges to the exact value across a corpus") {
    std::mt19937_64 rng(31337);
    StrategyMap empty;
    int within = 0, total = 0;
    for (int trial = 0; trial < 15; ++trial) {
        ArrivalInstance inst = corpus::random_simple_rs(rng, 5, 3);
        Rational exact = solve_instance(inst).value;
        const uint64_t n = 20000;
        SimReport rep = estimate_value(inst, empty, n, 1000 + trial);
        double f = rational_approx(rep.reach_frequency);
        double v = rational_approx(exact);
        double window = 4 * std::sqrt(std::max(v * (1 - v), 1e-9) / double(n)) + 1e-9;
        ++total;
        if (std::abs(f - v) <= window) ++within;
    }
    // 4-sigma windows: allow at most one straggler.
    CHECK(within >= total - 1);
}

TEST_CASE("dead edges after pruning are traversed at most once per run") {
    // In a pruned simple instance every dead edge leads into d directly.
    ArrivalInstance inst = corpus::coin_instance();
    ArrivalInstance sf = to_simple_form(inst);
    SimReport rep = traversal_stats(sf, 20000, 41);
    for (const auto& e : rep.edges)
        if (!e.hopeful) CHECK(e.mean <= 1.0);
}

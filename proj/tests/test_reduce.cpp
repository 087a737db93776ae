#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "arrival/gadgets.hpp"
#include "arrival/normalize.hpp"
#include "arrival/reduce.hpp"
#include "arrival/solve.hpp"
#include "corpus.hpp"

using namespace arrival;

TEST_CASE("random_to_player trivia") {
    // A pure-random instance that surely reaches t: the player wins.
    ArrivalInstance win = corpus::trivial_win();
    CHECK(solve_instance(random_to_player(win)).value == 1);

    // Value 0: the player still loses.
    InstanceBuilder b;
    NodeId s = b.add_node("s", NodeKind::Random);
    NodeId t = b.add_node("t", NodeKind::Target);
    NodeId d = b.add_node("d", NodeKind::Dead);
    b.add_edge(s, d, Rational(1));
    b.add_edge(t, t);
    b.add_edge(d, d);
    b.set_start(s);
    b.set_target(t);
    b.set_dead(d);
    CHECK(solve_instance(random_to_player(b.build())).value == 0);
}

TEST_CASE("player_to_random trivia") {
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
    ArrivalInstance inst = b.build();
    ArrivalInstance rand = player_to_random(inst);
    CHECK(rand.edge_prob(rand.start, rand.target) == make_rational(1, 2));
    CHECK(solve_instance(rand).value > 0);
}

TEST_CASE("player_to_random rejects min players") {
    InstanceBuilder b;
    NodeId v = b.add_node("v", NodeKind::MinPlayer);
    NodeId t = b.add_node("t", NodeKind::Target);
    b.add_edge(v, t);
    b.add_edge(t, t);
    b.set_start(v);
    b.set_target(t);
    CHECK_THROWS_AS(player_to_random(b.build()), ContractError);
}

TEST_CASE("qual-0 equivalences of both reductions on a random corpus") {
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 80; ++trial) {
        corpus::RandomInstanceOptions opt;
        opt.max_vertices = 5;
        ArrivalInstance inst = corpus::random_instance(rng, opt);  // {R,S}
        bool qual0 = solve_instance(inst).value > 0;
        CHECK((solve_instance(random_to_player(inst)).value == 1) == qual0);
    }
    for (int trial = 0; trial < 80; ++trial) {
        corpus::RandomInstanceOptions opt;
        opt.max_vertices = 5;
        opt.with_random = false;
        opt.with_max = true;
        ArrivalInstance inst = corpus::random_instance(rng, opt);  // {S,1}
        bool win = solve_instance(inst).value == 1;
        CHECK((solve_instance(player_to_random(inst)).value > 0) == win);
    }
}

TEST_CASE("round trip through both reductions preserves the qual-0 verdict") {
    std::mt19937_64 rng(707);
    for (int trial = 0; trial < 40; ++trial) {
        corpus::RandomInstanceOptions opt;
        opt.max_vertices = 5;
        opt.with_random = false;
        opt.with_max = true;
        ArrivalInstance inst = corpus::random_instance(rng, opt);  // max-only
        ArrivalInstance back = random_to_player(player_to_random(inst));
        CHECK((solve_instance(inst).value > 0) == (solve_instance(back).value > 0));
    }
}

TEST_CASE("winning traces replay as valid plays across the reductions") {
    std::mt19937_64 rng(808);
    StrategyMap empty;
    auto valid_in = [](const ArrivalInstance& inst, const PlayTrace& tr) {
        for (size_t i = 0; i + 1 < tr.states.size(); ++i) {
            auto succs = valid_successors(inst, tr.states[i]);
            bool ok = false;
            for (const auto& s : succs)
                if (s == tr.states[i + 1]) ok = true;
            if (!ok) return false;
        }
        return true;
    };
    int forward = 0, backward = 0;
    for (int trial = 0; trial < 30; ++trial) {
        corpus::RandomInstanceOptions opt;
        opt.max_vertices = 5;
        ArrivalInstance inst = corpus::random_instance(rng, opt);  // {R,S}
        ArrivalInstance prime = random_to_player(inst);            // {S,1}
        for (uint64_t seed = 0; seed < 10; ++seed) {
            // Plays of the original replay in the reduced instance...
            PlayTrace tr = run_play(inst, empty, seed, 200);
            if (tr.outcome == PlayOutcome::ReachedTarget) {
                REQUIRE(valid_in(prime, tr));
                ++forward;
            }
            // ...and player plays of the reduced instance replay in the
            // original (every player move is a positive-probability edge).
            PlayTrace back = run_play(prime, empty, seed, 200);
            if (back.outcome == PlayOutcome::ReachedTarget) {
                REQUIRE(valid_in(inst, back));
                ++backward;
            }
        }
    }
    REQUIRE(forward > 10);
    REQUIRE(backward > 10);
}

TEST_CASE("dualization complements the value on pruned simple {R,S} instances") {
    std::mt19937_64 rng(909);
    for (int trial = 0; trial < 40; ++trial) {
        ArrivalInstance raw = corpus::random_simple_rs(rng, 5, 3);
        ArrivalInstance pruned = prune_dead_edges(raw);
        ArrivalInstance inst = is_simple_form(pruned) ? pruned : to_simple_form(pruned);
        auto dual = dualize_players(inst);
        CHECK(dual.identity_guaranteed);
        CHECK(solve_instance(dual.instance).value ==
              Rational(1) - solve_instance(inst).value);
    }
}

TEST_CASE("a forced win dualizes to a forced loss") {
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
    ArrivalInstance inst = b.build();
    REQUIRE(solve_instance(inst).value == 1);
    auto dual = dualize_players(inst);
    CHECK(!dual.identity_guaranteed);  // players present
    CHECK(dual.instance.kind(*dual.instance.id_of("v")) == NodeKind::MinPlayer);
    CHECK(solve_instance(dual.instance).value == 0);
}

TEST_CASE("a min player stalling in a cycle breaks the 1-val identity and is flagged") {
    InstanceBuilder b;
    NodeId w = b.add_node("w", NodeKind::Random);
    NodeId v = b.add_node("v", NodeKind::MaxPlayer);
    NodeId v2 = b.add_node("v2", NodeKind::MaxPlayer);
    NodeId t = b.add_node("t", NodeKind::Target);
    NodeId d = b.add_node("d", NodeKind::Dead);
    b.add_edge(w, t, make_rational(1, 3));
    b.add_edge(w, d, make_rational(1, 3));
    b.add_edge(w, v, make_rational(1, 3));
    b.add_edge(v, v2);
    b.add_edge(v2, v);
    b.add_edge(t, t);
    b.add_edge(d, d);
    b.set_start(w);
    b.set_target(t);
    b.set_dead(d);
    ArrivalInstance inst = b.build();
    Rational val = solve_instance(inst).value;
    CHECK(val == make_rational(1, 3));
    auto dual = dualize_players(inst);
    CHECK(!dual.identity_guaranteed);
    Rational dval = solve_instance(dual.instance).value;
    CHECK(dval == make_rational(1, 3));       // the min player stays in the cycle
    CHECK(val + dval != 1);                   // identity genuinely fails
}

TEST_CASE("dualize adds a fresh dead end when none exists") {
    ArrivalInstance inst = corpus::trivial_win();
    auto dual = dualize_players(inst);
    REQUIRE(dual.instance.dead.has_value());
    CHECK(dual.instance.kind(dual.instance.target) == NodeKind::Target);
    CHECK(solve_instance(dual.instance).value == 0);  // new target unreachable
}

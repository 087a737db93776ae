#pragma once

#include <string>
#include <vector>

#include "arrival/io.hpp"
#include "arrival/model.hpp"
#include "arrival/reduce.hpp"

namespace arrival {

// Chain of n switching nodes fed by a single fair coin: reaching the target
// needs 2^n visits to s_1 and hence 2^n - 1 consecutive heads, so the value
// is exactly 2^-(2^n - 1) with only O(n) nodes.
inline ArrivalInstance gen_double_exp(unsigned n) {
    if (n < 1) throw ContractError("double-exp chain needs n >= 1");
    InstanceBuilder b;
    NodeId start = b.add_node("start", NodeKind::Switch);
    std::vector<NodeId> s(n);
    for (unsigned i = 0; i < n; ++i)
        s[i] = b.add_node("s_" + std::to_string(i + 1), NodeKind::Switch);
    NodeId x = b.add_node("x", NodeKind::Random);
    NodeId target = b.add_node("target", NodeKind::Target);
    NodeId fail = b.add_node("fail", NodeKind::Dead);

    b.add_edge(start, s[0]);
    b.set_order(start, {s[0]});
    for (unsigned i = 0; i < n; ++i) {
        NodeId forward = i + 1 < n ? s[i + 1] : target;
        b.add_edge(s[i], x);
        b.add_edge(s[i], forward);
        b.set_order(s[i], {x, forward});
    }
    b.add_edge(x, start);
    b.add_edge(x, fail);
    b.set_uniform(x);
    b.add_edge(target, target);
    b.add_edge(fail, fail);
    b.set_start(start);
    b.set_target(target);
    b.set_dead(fail);
    return b.build();
}

struct SsatInstance {
    CnfFormula formula;  // width <= 3 clauses
    int num_vars = 0;    // even; quantifiers alternate E x1, R x2, ..., R xn
};

// Quantifier pattern is fixed by position (odd = existential, even = random).
// An odd variable count is padded with one trailing randomly-quantified
// variable that occurs in no clause; the value is unchanged.
inline SsatInstance make_ssat(const CnfFormula& f) {
    if (f.num_vars < 1) throw ContractError("SSAT needs at least one variable");
    for (const auto& c : f.clauses)
        if (c.size() > 3) throw ContractError("SSAT clauses must have width <= 3");
    SsatInstance s;
    s.formula = f;
    s.num_vars = f.num_vars + (f.num_vars % 2);
    return s;
}

struct GadgetStats {
    int n = 0;
    int m = 0;
    std::vector<int> a;  // a[i] = #clauses containing literal x_{i+1}
    std::vector<int> b;  // b[i] = #clauses containing literal -x_{i+1}
    int D = 0;
    size_t num_vertices = 0;
    size_t num_edges = 0;
    size_t sum_ord = 0;
};

namespace gadget_detail {

inline GadgetStats literal_counts(const CnfFormula& f, int n) {
    GadgetStats st;
    st.n = n;
    st.m = (int)f.clauses.size();
    st.a.assign(n, 0);
    st.b.assign(n, 0);
    for (const auto& c : f.clauses)
        for (int lit : c) {
            if (lit > 0)
                ++st.a[lit - 1];
            else
                ++st.b[-lit - 1];
        }
    st.D = 0;
    for (int i = 0; i < n; ++i) st.D = std::max({st.D, st.a[i], st.b[i]});
    return st;
}

inline void fill_size_stats(const ArrivalInstance& inst, GadgetStats& st) {
    st.num_vertices = inst.num_vertices();
    st.num_edges = 0;
    st.sum_ord = 0;
    for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v) {
        st.num_edges += inst.adj[v].size();
        st.sum_ord += inst.order[v].size();
    }
}

// Clause gadget indices containing the literal, in clause order.
inline std::vector<int> clauses_with(const CnfFormula& f, int lit) {
    std::vector<int> out;
    for (int l = 0; l < (int)f.clauses.size(); ++l)
        for (int x : f.clauses[l])
            if (x == lit) out.push_back(l);
    return out;
}

}  // namespace gadget_detail

// SSAT to {R,S,1}: a control switch drives an assignment phase (one pass per
// variable, chosen by the player or a coin), an agreement phase (D passes per
// variable that ping every clause the standing assignment fails to witness)
// and a verification sweep that reaches the target only if the player agreed
// with the initial assignment throughout. Each clause switch counts its
// falsified literals and kills the play at the third. The instance value is
// the alternating max/expectation evaluation of the formula.
inline std::pair<ArrivalInstance, GadgetStats> gen_ssat_rs1(const SsatInstance& ssat) {
    const CnfFormula& f = ssat.formula;
    const int n = ssat.num_vars;
    const int m = (int)f.clauses.size();
    if (n % 2 != 0) throw ContractError("SSAT variable count must be even");
    for (const auto& c : f.clauses)
        if (c.size() > 3) throw ContractError("SSAT clauses must have width <= 3");
    GadgetStats st = gadget_detail::literal_counts(f, n);
    const int D = st.D;

    InstanceBuilder b;
    NodeId start = b.add_node("start", NodeKind::Switch);
    NodeId as = b.add_node("as", NodeKind::Switch);
    NodeId ag = b.add_node("ag", NodeKind::Switch);
    NodeId ver = b.add_node("ver", NodeKind::Switch);
    NodeId target = b.add_node("target", NodeKind::Target);
    NodeId fail = b.add_node("fail", NodeKind::Switch);  // absorbing sink

    std::vector<NodeId> as_i(n), ag_i(n), ver_i(n), xT(n), xF(n), ret(n), neg(n), pos(n);
    for (int i = 0; i < n; ++i) {
        std::string s = std::to_string(i + 1);
        // Odd positions are existentially quantified, even ones randomly.
        NodeKind as_kind = (i % 2 == 0) ? NodeKind::MaxPlayer : NodeKind::Random;
        as_i[i] = b.add_node("as_" + s, as_kind);
        ag_i[i] = b.add_node("ag_" + s, NodeKind::MaxPlayer);
        ver_i[i] = b.add_node("ver_" + s, NodeKind::MaxPlayer);
        xT[i] = b.add_node("xT_" + s, NodeKind::Switch);
        xF[i] = b.add_node("xF_" + s, NodeKind::Switch);
        ret[i] = b.add_node("ret_" + s, NodeKind::Switch);
        neg[i] = b.add_node("neg_" + s, NodeKind::MaxPlayer);
        pos[i] = b.add_node("pos_" + s, NodeKind::MaxPlayer);
    }
    std::vector<NodeId> cl(m), failc(m);
    for (int l = 0; l < m; ++l) {
        cl[l] = b.add_node("c_" + std::to_string(l + 1), NodeKind::Switch);
        failc[l] = b.add_node("failc_" + std::to_string(l + 1), NodeKind::Switch);
    }

    // Control: n assignment passes, D*n agreement passes, one verification
    // entry, then the time-out edge to fail.
    {
        std::vector<NodeId> ord;
        ord.insert(ord.end(), n, as);
        ord.insert(ord.end(), (size_t)D * n, ag);  // empty when the formula is
        ord.push_back(ver);                        // trivial (D = 0)
        ord.push_back(fail);
        b.add_edge(start, as);
        if (D > 0) b.add_edge(start, ag);
        b.add_edge(start, ver);
        b.add_edge(start, fail);
        b.set_order(start, ord);
    }
    {
        std::vector<NodeId> ord(as_i.begin(), as_i.end());
        for (NodeId t : as_i) b.add_edge(as, t);
        b.set_order(as, ord);
    }
    {
        std::vector<NodeId> ord(ag_i.begin(), ag_i.end());
        for (NodeId t : ag_i) b.add_edge(ag, t);
        b.set_order(ag, ord);
    }
    b.add_edge(ver, ver_i[0]);
    b.add_edge(ver, fail);
    b.set_order(ver, {ver_i[0], fail});
    b.add_edge(target, target);
    b.add_edge(fail, fail);
    b.set_order(fail, {fail});

    for (int i = 0; i < n; ++i) {
        for (NodeId from : {as_i[i], ag_i[i], ver_i[i]}) {
            b.add_edge(from, xT[i]);
            b.add_edge(from, xF[i]);
        }
        if (i % 2 == 1) b.set_uniform(as_i[i]);  // randomly quantified
        NodeId nxt = i + 1 < n ? ver_i[i + 1] : target;
        auto wire_x = [&](NodeId node, int lit_falsified, NodeId exit_relay) {
            // First pass returns to start; the D middle slots enumerate the
            // clauses containing the opposing literal, padded with the exit
            // relay; the last slot advances the verification sweep.
            std::vector<NodeId> ord;
            ord.push_back(ret[i]);
            auto hit = gadget_detail::clauses_with(f, lit_falsified);
            for (int l : hit) ord.push_back(cl[l]);
            for (int k = (int)hit.size(); k < D; ++k) ord.push_back(exit_relay);
            ord.push_back(nxt);
            for (NodeId t : ord) b.add_edge(node, t);
            b.set_order(node, ord);
        };
        wire_x(xT[i], -(i + 1), neg[i]);  // assigning true falsifies -x_i
        wire_x(xF[i], +(i + 1), pos[i]);  // assigning false falsifies +x_i
        b.add_edge(ret[i], start);
        b.set_order(ret[i], {start});
        b.add_edge(neg[i], start);
        b.add_edge(pos[i], start);
    }
    for (int l = 0; l < m; ++l) {
        int w = (int)f.clauses[l].size();
        std::vector<NodeId> ord;
        for (int k = 0; k < w - 1; ++k) ord.push_back(start);
        for (int k = w - 1; k < 3; ++k) ord.push_back(failc[l]);
        for (NodeId t : ord) b.add_edge(cl[l], t);
        b.set_order(cl[l], ord);
        b.add_edge(failc[l], fail);
        b.set_order(failc[l], {fail});
    }

    b.set_start(start);
    b.set_target(target);
    ArrivalInstance inst = b.build();
    gadget_detail::fill_size_stats(inst, st);
    return {std::move(inst), std::move(st)};
}

// The {R,S,2} dual: player 1 becomes player 2 and the target/fail roles are
// exchanged, clause-internal fail relays included (they point at the old
// fail vertex, which is the new target). Every play terminates, so the value
// is exactly 1 minus the RS1 value.
inline std::pair<ArrivalInstance, GadgetStats> gen_ssat_rs2(const SsatInstance& ssat) {
    auto [inst, st] = gen_ssat_rs1(ssat);
    NodeId old_target = inst.target;
    NodeId old_fail = *inst.id_of("fail");
    for (NodeId v = 0; v < (NodeId)inst.num_vertices(); ++v) {
        if (inst.kinds[v] == NodeKind::MaxPlayer) inst.kinds[v] = NodeKind::MinPlayer;
    }
    inst.kinds[old_fail] = NodeKind::Target;
    inst.order[old_fail].clear();
    inst.kinds[old_target] = NodeKind::Dead;
    inst.target = old_fail;
    inst.dead = old_target;
    inst.rebuild_switch_index();
    inst.validate();
    gadget_detail::fill_size_stats(inst, st);
    return {std::move(inst), std::move(st)};
}

// MAJSAT to {R,S}: every variable is assigned by a fresh coin on each of its
// D+1 passes; a consistency switch routes any divergent pass to a fair coin
// between target and fail, so exactly the all-passes-equal runs (probability
// 2^-Dn) survive to the verification sweep, which reaches the target iff no
// clause saw all its literals falsified. Hence
//   val = 1/2 (1 - 2^-Dn) + p_phi 2^-Dn,
// which is > 1/2 exactly when the satisfying fraction p_phi is > 1/2.
inline std::pair<ArrivalInstance, GadgetStats> gen_majsat_rs(const CnfFormula& f) {
    const int n = f.num_vars;
    const int m = (int)f.clauses.size();
    if (n < 1) throw ContractError("MAJSAT needs at least one variable");
    for (const auto& c : f.clauses)
        for (int lit : c)
            if (std::find(c.begin(), c.end(), -lit) != c.end())
                throw ContractError("tautological clause");
    GadgetStats st = gadget_detail::literal_counts(f, n);
    const int D = st.D;

    InstanceBuilder b;
    NodeId start = b.add_node("start", NodeKind::Switch);
    NodeId as = b.add_node("as", NodeKind::Switch);
    NodeId bad = b.add_node("bad", NodeKind::Random);
    NodeId target = b.add_node("target", NodeKind::Target);
    NodeId fail = b.add_node("fail", NodeKind::Dead);

    std::vector<NodeId> rx(n), xT(n), xF(n), cons(n), neg(n), pos(n);
    for (int i = 0; i < n; ++i) {
        std::string s = std::to_string(i + 1);
        rx[i] = b.add_node("rx_" + s, NodeKind::Random);
        xT[i] = b.add_node("xT_" + s, NodeKind::Switch);
        xF[i] = b.add_node("xF_" + s, NodeKind::Switch);
        cons[i] = b.add_node("cons_" + s, NodeKind::Switch);
        neg[i] = b.add_node("neg_" + s, NodeKind::Switch);
        pos[i] = b.add_node("pos_" + s, NodeKind::Switch);
    }
    std::vector<NodeId> cl(m), sat(m), verl(m), failc(m);
    for (int l = 0; l < m; ++l) {
        std::string s = std::to_string(l + 1);
        cl[l] = b.add_node("c_" + s, NodeKind::Switch);
        sat[l] = b.add_node("sat_" + s, NodeKind::Switch);
        verl[l] = b.add_node("ver_" + s, NodeKind::Switch);
        failc[l] = b.add_node("failc_" + s, NodeKind::Switch);
    }

    // Control: (D+1)n assignment passes, one sweep over the clause checks,
    // then the final edge to target.
    {
        std::vector<NodeId> ord;
        ord.insert(ord.end(), (size_t)(D + 1) * n, as);
        for (int l = 0; l < m; ++l) ord.push_back(verl[l]);
        ord.push_back(target);
        b.add_edge(start, as);
        for (int l = 0; l < m; ++l) b.add_edge(start, verl[l]);
        b.add_edge(start, target);
        b.set_order(start, ord);
    }
    {
        std::vector<NodeId> ord(rx.begin(), rx.end());
        for (NodeId t : rx) b.add_edge(as, t);
        b.set_order(as, ord);
    }
    b.add_edge(bad, target);
    b.add_edge(bad, fail);
    b.set_uniform(bad);
    b.add_edge(target, target);
    b.add_edge(fail, fail);

    for (int i = 0; i < n; ++i) {
        b.add_edge(rx[i], xT[i]);
        b.add_edge(rx[i], xF[i]);
        b.set_uniform(rx[i]);
        auto wire_x = [&](NodeId node, int lit_falsified, NodeId exit_relay) {
            std::vector<NodeId> ord;
            ord.push_back(cons[i]);  // first visit: consistency check
            auto hit = gadget_detail::clauses_with(f, lit_falsified);
            for (int l : hit) ord.push_back(cl[l]);
            for (int k = (int)hit.size(); k < D; ++k) ord.push_back(exit_relay);
            for (NodeId t : ord) b.add_edge(node, t);
            b.set_order(node, ord);
        };
        wire_x(xT[i], -(i + 1), neg[i]);
        wire_x(xF[i], +(i + 1), pos[i]);
        b.add_edge(cons[i], start);
        b.add_edge(cons[i], bad);
        b.set_order(cons[i], {start, bad});
        b.add_edge(neg[i], start);
        b.set_order(neg[i], {start});
        b.add_edge(pos[i], start);
        b.set_order(pos[i], {start});
    }
    for (int l = 0; l < m; ++l) {
        int w = (int)f.clauses[l].size();
        std::vector<NodeId> ord;
        for (int k = 0; k < w - 1; ++k) ord.push_back(start);
        ord.push_back(sat[l]);
        for (NodeId t : ord) b.add_edge(cl[l], t);
        b.set_order(cl[l], ord);
        b.add_edge(sat[l], start);
        b.add_edge(sat[l], failc[l]);
        b.set_order(sat[l], {start, failc[l]});
        b.add_edge(verl[l], sat[l]);
        b.set_order(verl[l], {sat[l]});
        b.add_edge(failc[l], fail);
        b.set_order(failc[l], {fail});
    }

    b.set_start(start);
    b.set_target(target);
    b.set_dead(fail);
    ArrivalInstance inst = b.build();
    gadget_detail::fill_size_stats(inst, st);
    return {std::move(inst), std::move(st)};
}

}  // namespace arrival

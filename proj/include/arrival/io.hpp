#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "arrival/model.hpp"

namespace arrival {

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(int line_, int col_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ":" + std::to_string(col_) + ": " +
                             msg),
          line(line_),
          column(col_) {}
};

namespace io_detail {

struct Tokenizer {
    const std::string& text;
    int line;
    size_t pos = 0;

    std::vector<std::pair<std::string, int>> tokens() {
        std::vector<std::pair<std::string, int>> out;
        while (pos < text.size()) {
            while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
            if (pos >= text.size() || text[pos] == '#') break;
            size_t begin = pos;
            while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t' && text[pos] != '#')
                ++pos;
            out.emplace_back(text.substr(begin, pos - begin), (int)begin + 1);
        }
        return out;
    }
};

}  // namespace io_detail

// Instance text format, one declaration per line, '#' comments:
//   node <name> kind=(random|switch|max|min|target|dead)
//   edge <u> <v> [prob=<a>/<b>]      prob mandatory on random-node out-edges
//   uniform <v>                      1/k on each of v's k out-edges
//   order <v> : <u1> <u2> ...
//   start <name> | target <name> | dead <name>
// Rationals are exact decimal integers a/b; never decimals.
inline ArrivalInstance parse_instance(const std::string& text) {
    InstanceBuilder b;
    struct PendingEdge {
        std::string u, v;
        std::optional<std::string> prob;
        int line, col;
    };
    struct PendingOrder {
        std::string v;
        std::vector<std::string> entries;
        int line, col;
    };
    std::vector<PendingEdge> edges;
    std::vector<PendingOrder> orders;
    std::vector<std::pair<std::string, int>> uniforms;
    std::optional<std::pair<std::string, int>> start, target, dead;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        io_detail::Tokenizer tz{raw, lineno};
        auto toks = tz.tokens();
        if (toks.empty()) continue;
        const std::string& head = toks[0].first;
        auto need = [&](size_t n, const char* what) {
            if (toks.size() != n)
                throw ParseError(lineno, toks.back().second, std::string("expected ") + what);
        };
        if (head == "node") {
            need(3, "'node <name> kind=<kind>'");
            const std::string& kv = toks[2].first;
            if (kv.rfind("kind=", 0) != 0)
                throw ParseError(lineno, toks[2].second, "expected kind=<kind>");
            std::string k = kv.substr(5);
            NodeKind kind;
            if (k == "random") kind = NodeKind::Random;
            else if (k == "switch") kind = NodeKind::Switch;
            else if (k == "max") kind = NodeKind::MaxPlayer;
            else if (k == "min") kind = NodeKind::MinPlayer;
            else if (k == "target") kind = NodeKind::Target;
            else if (k == "dead") kind = NodeKind::Dead;
            else throw ParseError(lineno, toks[2].second, "unknown kind '" + k + "'");
            if (b.has_node(toks[1].first))
                throw ParseError(lineno, toks[1].second, "duplicate node '" + toks[1].first + "'");
            b.add_node(toks[1].first, kind);
        } else if (head == "edge") {
            if (toks.size() != 3 && toks.size() != 4)
                throw ParseError(lineno, toks[0].second, "expected 'edge <u> <v> [prob=a/b]'");
            PendingEdge e{toks[1].first, toks[2].first, std::nullopt, lineno, toks[1].second};
            if (toks.size() == 4) {
                const std::string& pv = toks[3].first;
                if (pv.rfind("prob=", 0) != 0)
                    throw ParseError(lineno, toks[3].second, "expected prob=a/b");
                e.prob = pv.substr(5);
                e.col = toks[3].second;
            }
            edges.push_back(std::move(e));
        } else if (head == "order") {
            if (toks.size() < 4 || toks[2].first != ":")
                throw ParseError(lineno, toks[0].second, "expected 'order <v> : <u1> ...'");
            PendingOrder o{toks[1].first, {}, lineno, toks[1].second};
            for (size_t i = 3; i < toks.size(); ++i) o.entries.push_back(toks[i].first);
            orders.push_back(std::move(o));
        } else if (head == "uniform") {
            need(2, "'uniform <v>'");
            uniforms.emplace_back(toks[1].first, lineno);
        } else if (head == "start" || head == "target" || head == "dead") {
            need(2, "a node name");
            auto& slot = head == "start" ? start : head == "target" ? target : dead;
            if (slot) throw ParseError(lineno, toks[0].second, "duplicate '" + head + "'");
            slot = {toks[1].first, lineno};
        } else {
            throw ParseError(lineno, toks[0].second, "unknown declaration '" + head + "'");
        }
    }

    auto resolve = [&](const std::string& name, int line, int col) -> NodeId {
        if (!b.has_node(name)) throw ParseError(line, col, "unknown node '" + name + "'");
        return b.node(name);
    };
    for (const auto& e : edges) {
        NodeId u = resolve(e.u, e.line, e.col), v = resolve(e.v, e.line, e.col);
        if (e.prob) {
            Rational p;
            try {
                p = parse_rational(*e.prob);
            } catch (const std::invalid_argument& ex) {
                throw ParseError(e.line, e.col, ex.what());
            }
            b.add_edge(u, v, p);
        } else {
            b.add_edge(u, v);
        }
    }
    for (const auto& [name, line] : uniforms) b.set_uniform(resolve(name, line, 1));
    for (const auto& o : orders) {
        NodeId v = resolve(o.v, o.line, o.col);
        std::vector<NodeId> ord;
        for (const auto& entry : o.entries) ord.push_back(resolve(entry, o.line, o.col));
        b.set_order(v, std::move(ord));
    }
    if (!start) throw ParseError(lineno + 1, 1, "missing start declaration");
    if (!target) throw ParseError(lineno + 1, 1, "missing target declaration");
    b.set_start(resolve(start->first, start->second, 1));
    b.set_target(resolve(target->first, target->second, 1));
    if (dead) b.set_dead(resolve(dead->first, dead->second, 1));

    try {
        return b.build();
    } catch (const ModelError& ex) {
        throw ParseError(lineno + 1, 1, ex.what());
    }
}

// Canonical text: node declarations sorted by name, then edges, orders and
// markers; rationals exact. parse(serialize(G)) is structurally G.
inline std::string serialize_instance(const ArrivalInstance& inst) {
    std::vector<NodeId> by_name(inst.num_vertices());
    for (size_t i = 0; i < by_name.size(); ++i) by_name[i] = (NodeId)i;
    std::sort(by_name.begin(), by_name.end(),
              [&](NodeId a, NodeId b) { return inst.name(a) < inst.name(b); });
    std::ostringstream out;
    for (NodeId v : by_name)
        out << "node " << inst.name(v) << " kind=" << kind_name(inst.kind(v)) << "\n";
    for (NodeId v : by_name) {
        std::vector<NodeId> succs = inst.adj[v];
        std::sort(succs.begin(), succs.end(),
                  [&](NodeId a, NodeId b) { return inst.name(a) < inst.name(b); });
        for (NodeId w : succs) {
            out << "edge " << inst.name(v) << " " << inst.name(w);
            if (inst.kind(v) == NodeKind::Random)
                out << " prob=" << rational_str(inst.edge_prob(v, w));
            out << "\n";
        }
    }
    for (NodeId v : by_name) {
        if (inst.kind(v) != NodeKind::Switch) continue;
        out << "order " << inst.name(v) << " :";
        for (NodeId w : inst.order[v]) out << " " << inst.name(w);
        out << "\n";
    }
    out << "start " << inst.name(inst.start) << "\n";
    out << "target " << inst.name(inst.target) << "\n";
    if (inst.dead) out << "dead " << inst.name(*inst.dead) << "\n";
    return out.str();
}

// Canonical bit-encoding size of an instance: 8 bits per byte of the
// canonical serialization. Feeds the value-denominator bound and the
// geq-to-strict default depth.
inline size_t encoding_bits(const ArrivalInstance& inst) {
    return serialize_instance(inst).size() * 8;
}

struct CnfFormula {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;  // nonzero literals, var-distinct

    size_t num_clauses() const { return clauses.size(); }
};

// Standard DIMACS cnf. Duplicate literals inside a clause are deduplicated;
// a complementary pair makes the clause tautological and is rejected (the
// gadget generators cannot use such clauses).
inline CnfFormula parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    CnfFormula f;
    bool got_header = false;
    long declared_clauses = 0;
    std::vector<int> clause;
    while (std::getline(in, raw)) {
        ++lineno;
        if (raw.empty() || raw[0] == 'c') continue;
        if (raw[0] == 'p') {
            std::istringstream hs(raw);
            std::string p, cnf;
            long nv = -1, nc = -1;
            hs >> p >> cnf >> nv >> nc;
            if (p != "p" || cnf != "cnf" || nv < 0 || nc < 0 || !hs)
                throw ParseError(lineno, 1, "malformed DIMACS header");
            f.num_vars = (int)nv;
            declared_clauses = nc;
            got_header = true;
            continue;
        }
        if (!got_header) throw ParseError(lineno, 1, "clause before 'p cnf' header");
        std::istringstream ls(raw);
        int lit;
        while (ls >> lit) {
            if (lit == 0) {
                if (clause.empty()) throw ParseError(lineno, 1, "empty clause");
                std::sort(clause.begin(), clause.end());
                clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
                for (int l : clause)
                    if (std::find(clause.begin(), clause.end(), -l) != clause.end())
                        throw ParseError(lineno, 1, "tautological clause (complementary pair)");
                f.clauses.push_back(clause);
                clause.clear();
            } else {
                if (std::abs(lit) > f.num_vars)
                    throw ParseError(lineno, 1,
                                     "literal " + std::to_string(lit) + " out of range");
                clause.push_back(lit);
            }
        }
    }
    if (!got_header) throw ParseError(lineno + 1, 1, "missing 'p cnf' header");
    if (!clause.empty()) throw ParseError(lineno + 1, 1, "unterminated clause (missing 0)");
    if ((long)f.clauses.size() != declared_clauses)
        throw ParseError(lineno + 1, 1,
                         "clause count mismatch: header says " + std::to_string(declared_clauses) +
                             ", found " + std::to_string(f.clauses.size()));
    return f;
}

inline std::string serialize_dimacs(const CnfFormula& f) {
    std::ostringstream out;
    out << "p cnf " << f.num_vars << " " << f.clauses.size() << "\n";
    for (const auto& c : f.clauses) {
        for (int l : c) out << l << " ";
        out << "0\n";
    }
    return out.str();
}

}  // namespace arrival

#pragma once

// Graph form of a normal logic program, built in two stages. The cnr stage
// gives each multi-literal body its own conjunct node; converting to the
// dependency stage flips the sign of every conjunct-incident edge. Solver
// encodings consume the dependency stage.

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "parser.hpp"

namespace nlpgs {

enum class NodeKind { atom, conjunct, constraint_node };

struct NodeId {
    NodeKind kind = NodeKind::atom;
    std::string name;   // atom nodes only
    size_t index = 0;   // conjunct nodes only

    auto operator<=>(const NodeId&) const = default;

    std::string display() const {
        switch (kind) {
            case NodeKind::atom: return name;
            case NodeKind::conjunct: return "conjunct(" + std::to_string(index) + ")";
            case NodeKind::constraint_node: return "constraint";
        }
        return {};
    }

    static NodeId atom(std::string n) { return {NodeKind::atom, std::move(n), 0}; }
    static NodeId conjunct(size_t i) { return {NodeKind::conjunct, {}, i}; }
    static NodeId constraint() { return {NodeKind::constraint_node, {}, 0}; }
};

struct SignedEdge {
    NodeId from;
    NodeId to;
    Sign sign = Sign::positive;

    auto operator<=>(const SignedEdge&) const = default;
};

enum class Stage { cnr, dependency };

struct DepGraph {
    Stage stage = Stage::cnr;
    std::vector<NodeId> nodes;            // insertion order fixes emission order
    std::map<NodeId, size_t> node_index;
    std::vector<SignedEdge> edges;        // insertion order, exact duplicates dropped
    std::set<NodeId> facts;

    size_t ensure_node(const NodeId& n) {
        auto it = node_index.find(n);
        if (it != node_index.end()) return it->second;
        size_t id = nodes.size();
        nodes.push_back(n);
        node_index.emplace(n, id);
        return id;
    }

    bool has_node(const NodeId& n) const { return node_index.count(n) != 0; }

    void add_edge(const NodeId& from, const NodeId& to, Sign sign) {
        ensure_node(from);
        ensure_node(to);
        SignedEdge e{from, to, sign};
        for (const SignedEdge& x : edges)
            if (x == e) return;
        edges.push_back(std::move(e));
    }

    std::vector<SignedEdge> in_edges(const NodeId& n) const {
        std::vector<SignedEdge> out;
        for (const SignedEdge& e : edges)
            if (e.to == n) out.push_back(e);
        return out;
    }

    std::vector<SignedEdge> out_edges(const NodeId& n) const {
        std::vector<SignedEdge> out;
        for (const SignedEdge& e : edges)
            if (e.from == n) out.push_back(e);
        return out;
    }
};

// Conjunction-node form: bodies with two or more literals get a conjunct node
// numbered densely in rule order; single-literal bodies become direct edges at
// literal polarity; empty bodies mark the head node as a fact. All headless
// constraints share one constraint node.
inline DepGraph build_cnr_graph(const Program& p) {
    DepGraph g;
    g.stage = Stage::cnr;
    size_t next_conjunct = 0;
    for (const Rule& r : p.rules) {
        NodeId head = r.head ? NodeId::atom(*r.head) : NodeId::constraint();
        g.ensure_node(head);
        if (r.body.empty()) {
            g.facts.insert(head);
            continue;
        }
        if (r.body.size() == 1) {
            const Literal& l = r.body[0];
            g.add_edge(NodeId::atom(l.atom), head, l.sign);
            continue;
        }
        NodeId c = NodeId::conjunct(next_conjunct++);
        g.ensure_node(c);
        for (const Literal& l : r.body)
            g.add_edge(NodeId::atom(l.atom), c, l.sign);
        g.add_edge(c, head, Sign::positive);
    }
    return g;
}

// Flips the sign of every conjunct-incident edge. Direct atom-to-atom edges
// keep their polarity.
inline DepGraph cnr_to_dependency_graph(const DepGraph& g) {
    if (g.stage != Stage::cnr)
        throw std::logic_error("cnr_to_dependency_graph: input is not a cnr-stage graph");
    DepGraph out = g;
    out.stage = Stage::dependency;
    for (SignedEdge& e : out.edges)
        if (e.from.kind == NodeKind::conjunct || e.to.kind == NodeKind::conjunct)
            e.sign = negate(e.sign);
    return out;
}

enum class LoopKind { positive, even, odd };

inline const char* loop_kind_name(LoopKind k) {
    switch (k) {
        case LoopKind::positive: return "positive";
        case LoopKind::even: return "even";
        case LoopKind::odd: return "odd";
    }
    return {};
}

// One elementary cycle with a concrete sign choice per hop; signs[i] labels
// the edge nodes[i] -> nodes[(i+1) % size].
struct Loop {
    std::vector<NodeId> nodes;
    std::vector<Sign> signs;
    LoopKind kind = LoopKind::positive;
};

struct LoopReport {
    std::vector<Loop> loops;
    bool truncated = false;
};

namespace detail {

// Johnson's elementary-circuit search over vertex indices.
struct CircuitFinder {
    const std::vector<std::vector<size_t>>& adj;
    size_t n;
    std::vector<bool> blocked;
    std::vector<std::set<size_t>> block_map;
    std::vector<size_t> stack;
    size_t start = 0;
    std::vector<std::vector<size_t>>& out;
    size_t cap;
    bool truncated = false;

    CircuitFinder(const std::vector<std::vector<size_t>>& a,
                  std::vector<std::vector<size_t>>& o, size_t cap_)
        : adj(a), n(a.size()), blocked(n), block_map(n), out(o), cap(cap_) {}

    void unblock(size_t u) {
        blocked[u] = false;
        for (size_t w : block_map[u])
            if (blocked[w]) unblock(w);
        block_map[u].clear();
    }

    bool circuit(size_t v) {
        if (truncated) return true;
        bool found = false;
        stack.push_back(v);
        blocked[v] = true;
        for (size_t w : adj[v]) {
            if (w < start) continue;  // circuits rooted at their least vertex
            if (w == start) {
                if (out.size() >= cap) { truncated = true; break; }
                out.push_back(stack);
                found = true;
            } else if (!blocked[w]) {
                if (circuit(w)) found = true;
                if (truncated) break;
            }
        }
        if (found) {
            unblock(v);
        } else {
            for (size_t w : adj[v])
                if (w >= start) block_map[w].insert(v);
        }
        stack.pop_back();
        return found;
    }

    void run() {
        for (start = 0; start < n && !truncated; ++start) {
            std::fill(blocked.begin(), blocked.end(), false);
            for (auto& s : block_map) s.clear();
            circuit(start);
        }
    }
};

}  // namespace detail

// Enumerates signed loops: every elementary vertex cycle crossed with every
// per-hop sign choice the multigraph offers. Rotated so the lexicographically
// smallest display name leads. positive = no negative hop; otherwise parity
// of the negative-hop count picks even or odd.
inline LoopReport classify_loops(const DepGraph& g, size_t cap = 10000) {
    LoopReport report;
    size_t n = g.nodes.size();
    std::vector<std::vector<size_t>> adj(n);
    std::map<std::pair<size_t, size_t>, std::vector<Sign>> hop_signs;
    for (const SignedEdge& e : g.edges) {
        size_t u = g.node_index.at(e.from), v = g.node_index.at(e.to);
        auto& signs = hop_signs[{u, v}];
        if (signs.empty()) adj[u].push_back(v);
        signs.push_back(e.sign);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());

    std::vector<std::vector<size_t>> circuits;
    detail::CircuitFinder finder(adj, circuits, cap);
    finder.run();

    for (const auto& circ : circuits) {
        size_t k = circ.size();
        // Cartesian product of per-hop sign choices.
        std::vector<const std::vector<Sign>*> choices(k);
        for (size_t i = 0; i < k; ++i)
            choices[i] = &hop_signs.at({circ[i], circ[(i + 1) % k]});
        std::vector<size_t> pick(k, 0);
        for (;;) {
            if (report.loops.size() >= cap) { report.truncated = true; break; }
            Loop loop;
            loop.nodes.reserve(k);
            loop.signs.reserve(k);
            size_t lead = 0;
            for (size_t i = 1; i < k; ++i)
                if (g.nodes[circ[i]].display() < g.nodes[circ[lead]].display()) lead = i;
            int negatives = 0;
            for (size_t i = 0; i < k; ++i) {
                size_t j = (lead + i) % k;
                loop.nodes.push_back(g.nodes[circ[j]]);
                Sign s = (*choices[j])[pick[j]];
                loop.signs.push_back(s);
                if (s == Sign::negative) ++negatives;
            }
            loop.kind = negatives == 0 ? LoopKind::positive
                        : negatives % 2 == 0 ? LoopKind::even
                                             : LoopKind::odd;
            report.loops.push_back(std::move(loop));
            size_t i = 0;
            while (i < k && ++pick[i] == choices[i]->size()) pick[i++] = 0;
            if (i == k) break;
        }
        if (report.truncated) break;
    }
    if (finder.truncated) report.truncated = true;

    std::sort(report.loops.begin(), report.loops.end(), [](const Loop& a, const Loop& b) {
        auto key = [](const Loop& l) {
            std::vector<std::string> names;
            for (const NodeId& node : l.nodes) names.push_back(node.display());
            return std::tuple(l.nodes.size(), names, l.signs);
        };
        return key(a) < key(b);
    });
    return report;
}

// Reads a dependency-stage graph back as a program: facts first in node
// order, then one single-literal rule per in-edge. Conjunct nodes surface as
// ordinary atoms named conjunct_N; the constraint node becomes the atom
// "constraint" plus a closing ":- constraint." (that text reuses a reserved
// name, so it does not re-parse; constraint-free graphs round-trip).
inline Program graph_to_program(const DepGraph& g) {
    if (g.stage != Stage::dependency)
        throw std::logic_error("graph_to_program: input is not a dependency-stage graph");
    auto as_atom = [](const NodeId& n) -> std::string {
        switch (n.kind) {
            case NodeKind::atom: return n.name;
            case NodeKind::conjunct: return "conjunct_" + std::to_string(n.index);
            case NodeKind::constraint_node: return "constraint";
        }
        return {};
    };
    Program p;
    for (const NodeId& n : g.nodes)
        if (g.facts.count(n)) p.rules.push_back(Rule{as_atom(n), {}});
    bool has_constraint = false;
    for (const NodeId& n : g.nodes) {
        if (n.kind == NodeKind::constraint_node) has_constraint = true;
        auto in = g.in_edges(n);
        std::sort(in.begin(), in.end(), [&](const SignedEdge& a, const SignedEdge& b) {
            return g.node_index.at(a.from) < g.node_index.at(b.from);
        });
        for (const SignedEdge& e : in)
            p.rules.push_back(Rule{as_atom(n), {Literal{as_atom(e.from), e.sign}}});
    }
    if (has_constraint)
        p.rules.push_back(Rule{std::nullopt, {Literal{"constraint", Sign::positive}}});
    return p;
}

}  // namespace nlpgs

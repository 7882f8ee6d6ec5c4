#pragma once

// Turns a dependency-stage graph into solver input: the graph as facts over
// node/1, conjunct/1, fact/1, edge/3, plus one of three frozen interpreter
// rule banks. Also renders graphs as DOT.

#include <stdexcept>
#include <string>

#include "graph.hpp"

namespace nlpgs {

enum class Semantics { stable, co_stable, well_founded };

inline const char* semantics_name(Semantics s) {
    switch (s) {
        case Semantics::stable: return "stable";
        case Semantics::co_stable: return "co-stable";
        case Semantics::well_founded: return "well-founded";
    }
    return {};
}

// Fact order is frozen: node/1 in insertion order, then conjunct/1, then
// fact/1, then edge/3 sorted by (source, target) insertion index. Insertion
// order itself is per rule: head, conjunct, body atoms.
inline std::string emit_graph_facts(const DepGraph& g) {
    if (g.stage != Stage::dependency)
        throw std::logic_error("emit_graph_facts: input is not a dependency-stage graph");
    std::string out;
    for (const NodeId& n : g.nodes)
        out += "node(" + n.display() + ").\n";
    for (const NodeId& n : g.nodes)
        if (n.kind == NodeKind::conjunct)
            out += "conjunct(" + n.display() + ").\n";
    for (const NodeId& n : g.nodes)
        if (g.facts.count(n))
            out += "fact(" + n.display() + ").\n";
    std::vector<SignedEdge> edges = g.edges;
    std::sort(edges.begin(), edges.end(), [&](const SignedEdge& a, const SignedEdge& b) {
        return std::pair(g.node_index.at(a.from), g.node_index.at(a.to)) <
               std::pair(g.node_index.at(b.from), g.node_index.at(b.to));
    });
    for (const SignedEdge& e : edges)
        out += "edge(" + e.from.display() + "," + e.to.display() + "," + sign_name(e.sign) +
               ").\n";
    return out;
}

// The three rule banks are frozen text; tests pin their checksums. Do not
// reflow, rename, or "fix" them.
inline const std::string& interpreter_rules(Semantics s) {
    static const std::string co_stable_rules =
        R"(effective_edge(X,Y) :- edge(X,Y,positive), not false(X).
effective_edge(X,Y) :- edge(X,Y,negative), false(X).

true(X) :- fact(X).
true(X) :- node(X), can_pos(X), not false(X).

false(X) :- node(X), not can_pos(X), not true(X).

can_pos(X) :- edge(Y,X,_), effective_edge(Y,X).

:- true(constraint).

#show true/1.
#show false/1.
)";
    static const std::string stable_rules =
        R"(effective_edge(X,Y,positive) :- edge(X,Y,positive), not false(X).
effective_edge(X,Y,negative) :- edge(X,Y,negative), false(X).

true(X) :- fact(X).
true(X) :- node(X), can_pos(X), not false(X).

false(X) :- node(X), not can_pos(X), not true(X).

can_pos(X) :- edge(Y,X,_), effective_edge(Y,X, Sign).

negate(positive, negative).
negate(negative, positive).

update(positive, negative, negative).
update(negative, positive, negative).
update(positive, positive, positive).
update(negative, negative, negative).

depends(X,Y,Sign) :- effective_edge(Y,X,Sign).
depends(X,Y,Sign) :- not conjunct(Z), effective_edge(Z,X,positive),
    depends(Z,Y,Sign).
depends(X,Y,Sign) :- conjunct(Z), effective_edge(Z,X,negative), edge(Z2,Z,S2),
    negate(S2,S3),depends(Z2,Y,S4), update(S3,S4,Sign).

:- true(N), depends(N,N,positive).
:- true(constraint).

#show true/1.
#show false/1.
)";
    // The closing constraint block requires unknown(constraint) and
    // can_unknown(constraint); on graphs with no constraint node neither is
    // derivable from graph facts, so every answer set would be killed. The
    // two guarded defaults below fire exactly when node(constraint) is
    // absent and are inert otherwise.
    static const std::string well_founded_rules =
        R"(effective_edge(X,Y,positive) :- edge(X,Y,positive), not not_true(X).
effective_edge(X,Y,negative) :- edge(X,Y,negative), false(X).

not_true(X) :- node(X), not true(X).

true(X) :- fact(X).
true(X) :- node(X), can_pos(X), not false(X), not unknown(X).

false(X) :- node(X), not can_pos(X), not true(X), not unknown(X).

unknown(X) :- node(X), not true(X), not false(X).

can_pos(X) :- edge(Y,X,_), effective_edge(Y,X, Sign).
can_unknown(X) :- node(X), not can_pos(X), edge_type(S),
    edge(Y,X,S), unknown(Y).

negate(positive, negative).
negate(negative, positive).

edge_type(positive).
edge_type(negative).

update(negative, S, negative) :- edge_type(S).
update(positive, S, S) :- edge_type(S).

dependent_edge(X,Y,Sign) :- true(Y), effective_edge(X,Y,Sign).
dependent_edge(X,Y,Sign) :- unknown(X), unknown(Y), can_unknown(Y),
    edge(X,Y,Sign).
dependent_edge(X,Y,Sign) :- false(Y), not can_unknown(Y), edge(X,Y,Sign).

depends(X,Y,Sign) :- not conjunct(Y), dependent_edge(Y,X,Sign).
depends(X,Y,Sign) :- not conjunct(Z), dependent_edge(Z,X,S1),
    depends(Z,Y,S2), update(S1,S2,Sign).
depends(X,Y,Sign) :- conjunct(Z), dependent_edge(Z,X,negative),
    dependent_edge(Z2,Z,S1), negate(S1,S2), depends(Z2,Y,S3), update(S3,S2,Sign).

% constraint node defaults for graphs without constraints
unknown(constraint) :- not node(constraint).
can_unknown(constraint) :- not node(constraint).

:- edge(N1,N2,S), edge_type(S), false(N2), unknown(N1).
:- edge(N1,N2,S), edge_type(S), unknown(N2), effective_edge(N1,N2,S).
:- node(N), not unknown(N), not conjunct(N), depends(N,N,negative).
:- node(N), not false(N), depends(N,N,positive), not depends(N,N,negative).
:- unknown(N), not can_unknown(N).
:- not unknown(constraint).

#show true/1.
#show false/1.
#show unknown/1.
)";
    switch (s) {
        case Semantics::stable: return stable_rules;
        case Semantics::co_stable: return co_stable_rules;
        case Semantics::well_founded: return well_founded_rules;
    }
    throw std::logic_error("interpreter_rules: bad semantics");
}

struct EncodedProgram {
    std::string facts_text;
    std::string rules_text;
    Semantics semantics = Semantics::stable;

    std::string full_text() const { return facts_text + "\n" + rules_text; }
};

inline EncodedProgram emit_augmented_program(const DepGraph& g, Semantics s) {
    return EncodedProgram{emit_graph_facts(g), interpreter_rules(s), s};
}

// DOT rendering: conjunct nodes filled black, facts double-circled, negative
// edges dashed and labeled "-".
inline std::string emit_dot(const DepGraph& g) {
    std::string out = "digraph dependency_graph {\n";
    for (const NodeId& n : g.nodes) {
        out += "  \"" + n.display() + "\"";
        std::string attrs;
        if (n.kind == NodeKind::conjunct)
            attrs = "shape=circle, style=filled, fillcolor=black, fontcolor=white";
        else if (n.kind == NodeKind::constraint_node)
            attrs = "shape=box";
        if (g.facts.count(n)) {
            if (!attrs.empty()) attrs += ", ";
            attrs += "peripheries=2";
        }
        if (!attrs.empty()) out += " [" + attrs + "]";
        out += ";\n";
    }
    std::vector<SignedEdge> edges = g.edges;
    std::sort(edges.begin(), edges.end(), [&](const SignedEdge& a, const SignedEdge& b) {
        return std::pair(g.node_index.at(a.from), g.node_index.at(a.to)) <
               std::pair(g.node_index.at(b.from), g.node_index.at(b.to));
    });
    for (const SignedEdge& e : edges) {
        out += "  \"" + e.from.display() + "\" -> \"" + e.to.display() + "\"";
        if (e.sign == Sign::negative) out += " [style=dashed, label=\"-\"]";
        out += ";\n";
    }
    out += "}\n";
    return out;
}

}  // namespace nlpgs

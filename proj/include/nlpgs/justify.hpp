#pragma once

// Effective-edge machinery: an edge propagates True to its target when it is
// positive with a True source or negative with a False source. Model
// validation and per-atom justification trees are both built on that one
// definition. Unknown sources never make an edge effective.

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "graph.hpp"
#include "oracles.hpp"
#include "solver.hpp"

namespace nlpgs {

inline bool edge_effective(const SignedEdge& e, const Model& m) {
    TruthValue v = m.assignment.at(e.from);
    return (e.sign == Sign::positive && v == TruthValue::True) ||
           (e.sign == Sign::negative && v == TruthValue::False);
}

namespace detail {

inline void require_total(const DepGraph& g, const Model& m) {
    std::string missing;
    for (const NodeId& n : g.nodes)
        if (!m.assignment.count(n)) missing += (missing.empty() ? "" : ", ") + n.display();
    if (!missing.empty())
        throw std::invalid_argument("model does not assign: " + missing);
}

inline bool edge_less(const SignedEdge& a, const SignedEdge& b) {
    return std::tuple(a.from.display(), a.to.display(), a.sign) <
           std::tuple(b.from.display(), b.to.display(), b.sign);
}

}  // namespace detail

inline std::vector<SignedEdge> effective_edges(const DepGraph& g, const Model& m) {
    detail::require_total(g, m);
    std::vector<SignedEdge> out;
    for (const SignedEdge& e : g.edges)
        if (edge_effective(e, m)) out.push_back(e);
    std::sort(out.begin(), out.end(), detail::edge_less);
    return out;
}

struct Violation {
    enum class Reason { true_without_support, supported_but_not_true, constraint_satisfied };
    NodeId node;
    Reason reason;
};

inline const char* violation_name(Violation::Reason r) {
    switch (r) {
        case Violation::Reason::true_without_support: return "true-without-support";
        case Violation::Reason::supported_but_not_true: return "supported-but-not-true";
        case Violation::Reason::constraint_satisfied: return "constraint-satisfied";
    }
    return {};
}

struct ValidationReport {
    bool valid = true;
    std::vector<Violation> violations;
};

// A model is justified when True nodes are facts or effective-edge targets,
// every effective-edge target is True, and the constraint node stays off.
inline ValidationReport validate_model(const DepGraph& g, const Model& m) {
    detail::require_total(g, m);
    std::set<NodeId> supported;
    for (const SignedEdge& e : g.edges)
        if (edge_effective(e, m)) supported.insert(e.to);
    ValidationReport report;
    for (const NodeId& n : g.nodes) {
        TruthValue v = m.assignment.at(n);
        if (v == TruthValue::True && !g.facts.count(n) && !supported.count(n))
            report.violations.push_back({n, Violation::Reason::true_without_support});
        if (v != TruthValue::True && supported.count(n))
            report.violations.push_back({n, Violation::Reason::supported_but_not_true});
        if (n.kind == NodeKind::constraint_node && v == TruthValue::True)
            report.violations.push_back({n, Violation::Reason::constraint_satisfied});
    }
    report.valid = report.violations.empty();
    return report;
}

enum class JustifyBasis { fact, effective_edge, no_support, unknown_loop };

inline const char* basis_name(JustifyBasis b) {
    switch (b) {
        case JustifyBasis::fact: return "fact";
        case JustifyBasis::effective_edge: return "effective-edge";
        case JustifyBasis::no_support: return "no-support";
        case JustifyBasis::unknown_loop: return "unknown-loop";
    }
    return {};
}

struct JustificationTree {
    NodeId root;
    TruthValue value = TruthValue::False;
    JustifyBasis basis = JustifyBasis::no_support;
    bool revisit = false;                  // visited-set cut, children dropped
    std::vector<NodeId> cycle;             // unknown-loop only
    std::vector<std::pair<SignedEdge, JustificationTree>> children;
};

namespace detail {

// First cycle of Unknown-valued nodes through `start`, following out-edges in
// display order; empty when none exists.
inline std::vector<NodeId> find_unknown_cycle(const DepGraph& g, const Model& m,
                                              const NodeId& start) {
    std::vector<NodeId> path;
    std::set<NodeId> on_path;
    std::vector<NodeId> result;
    auto dfs = [&](auto&& self, const NodeId& n) -> bool {
        path.push_back(n);
        on_path.insert(n);
        auto out = g.out_edges(n);
        std::sort(out.begin(), out.end(), edge_less);
        for (const SignedEdge& e : out) {
            if (m.assignment.at(e.to) != TruthValue::Unknown) continue;
            if (e.to == start) { result = path; return true; }
            if (on_path.count(e.to)) continue;
            if (self(self, e.to)) return true;
        }
        path.pop_back();
        on_path.erase(n);
        return false;
    };
    dfs(dfs, start);
    return result;
}

inline JustificationTree justify_rec(const DepGraph& g, const Model& m, const NodeId& a,
                                     std::set<NodeId>& path) {
    JustificationTree t;
    t.root = a;
    t.value = m.assignment.at(a);
    bool cut = path.count(a) != 0;
    switch (t.value) {
        case TruthValue::True:
            t.basis = g.facts.count(a) ? JustifyBasis::fact : JustifyBasis::effective_edge;
            break;
        case TruthValue::False:
            t.basis = JustifyBasis::no_support;
            break;
        case TruthValue::Unknown:
            t.basis = JustifyBasis::unknown_loop;
            break;
    }
    if (cut) {
        t.revisit = true;
        return t;
    }
    if (t.basis == JustifyBasis::fact) return t;
    path.insert(a);
    auto in = g.in_edges(a);
    std::sort(in.begin(), in.end(), edge_less);
    if (t.value == TruthValue::True) {
        for (const SignedEdge& e : in)
            if (edge_effective(e, m))
                t.children.emplace_back(e, justify_rec(g, m, e.from, path));
    } else if (t.value == TruthValue::False) {
        for (const SignedEdge& e : in)
            t.children.emplace_back(e, justify_rec(g, m, e.from, path));
    } else {
        t.cycle = find_unknown_cycle(g, m, a);
        if (t.cycle.empty()) {
            // Off-cycle Unknown: the value flows in from unknown sources.
            for (const SignedEdge& e : in)
                if (m.assignment.at(e.from) == TruthValue::Unknown)
                    t.children.emplace_back(e, justify_rec(g, m, e.from, path));
        }
    }
    path.erase(a);
    return t;
}

}  // namespace detail

inline JustificationTree justify_atom(const DepGraph& g, const Model& m, const NodeId& a) {
    detail::require_total(g, m);
    if (!g.has_node(a))
        throw std::invalid_argument("atom not in graph: " + a.display());
    std::set<NodeId> path;
    return detail::justify_rec(g, m, a, path);
}

namespace detail {

inline std::string edge_display(const SignedEdge& e) {
    return "edge(" + e.from.display() + "," + e.to.display() + "," + sign_name(e.sign) + ")";
}

inline std::string value_upper(TruthValue v) {
    switch (v) {
        case TruthValue::True: return "TRUE";
        case TruthValue::False: return "FALSE";
        case TruthValue::Unknown: return "UNKNOWN";
    }
    return {};
}

inline std::string node_reason(const JustificationTree& t) {
    std::string r;
    switch (t.basis) {
        case JustifyBasis::fact: r = "fact"; break;
        case JustifyBasis::effective_edge: r = "supported"; break;
        case JustifyBasis::no_support: r = "no effective in-edge"; break;
        case JustifyBasis::unknown_loop:
            if (t.cycle.empty()) {
                r = "unknown";
            } else {
                r = "unknown: in loop ";
                for (const NodeId& n : t.cycle) r += n.display() + " -> ";
                r += t.cycle.front().display();
            }
            break;
    }
    if (t.revisit) r += ", revisited";
    return r;
}

inline void render_text(const JustificationTree& t, const Model& m, int depth,
                        std::string& out) {
    out += t.root.display() + "=" + value_upper(t.value) + " (" + node_reason(t) + ")\n";
    for (const auto& [edge, child] : t.children) {
        out += std::string(2 * (depth + 1), ' ');
        out += edge_display(edge);
        out += edge_effective(edge, m) ? " effective: " : " ineffective: ";
        render_text(child, m, depth + 1, out);
    }
}

inline nlohmann::json render_json(const JustificationTree& t, const Model& m) {
    nlohmann::json j;
    j["node"] = t.root.display();
    j["value"] = truth_name(t.value);
    j["basis"] = basis_name(t.basis);
    if (t.revisit) j["revisit"] = true;
    if (!t.cycle.empty()) {
        nlohmann::json cyc = nlohmann::json::array();
        for (const NodeId& n : t.cycle) cyc.push_back(n.display());
        j["cycle"] = cyc;
    }
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& [edge, child] : t.children) {
        nlohmann::json k;
        k["edge"] = {{"from", edge.from.display()},
                     {"to", edge.to.display()},
                     {"sign", sign_name(edge.sign)},
                     {"effective", edge_effective(edge, m)}};
        k["tree"] = render_json(child, m);
        kids.push_back(std::move(k));
    }
    j["children"] = std::move(kids);
    return j;
}

}  // namespace detail

enum class JustifyFormat { text, json };

// The model is needed to label child edges effective/ineffective.
inline std::string render_justification(const JustificationTree& t, const Model& m,
                                        JustifyFormat format) {
    if (format == JustifyFormat::text) {
        std::string out;
        detail::render_text(t, m, 0, out);
        return out;
    }
    return detail::render_json(t, m).dump(2);
}

// ---- lifting oracle models onto the graph ----

namespace detail {

inline TruthValue kleene_not(TruthValue v) {
    if (v == TruthValue::True) return TruthValue::False;
    if (v == TruthValue::False) return TruthValue::True;
    return TruthValue::Unknown;
}

}  // namespace detail

// Computes conjunct and constraint node values from atom values. A conjunct's
// dependency-stage value is the negation of its body conjunction (the sign
// flips cancel through the head edge); the constraint node disjoins its
// in-edge contributions, i.e. it is True when some constraint body is true.
template <typename AtomValue>
Model extend_model_to_graph(const DepGraph& g, AtomValue&& value_of_atom, Semantics sem) {
    Model m;
    m.semantics = sem;
    for (const NodeId& n : g.nodes)
        if (n.kind == NodeKind::atom) m.assignment[n] = value_of_atom(n.name);
    for (const NodeId& n : g.nodes) {
        if (n.kind != NodeKind::conjunct) continue;
        TruthValue conj = TruthValue::True;
        for (const SignedEdge& e : g.in_edges(n)) {
            TruthValue src = m.assignment.at(e.from);
            TruthValue lit = e.sign == Sign::negative ? src : detail::kleene_not(src);
            if (lit == TruthValue::False) { conj = TruthValue::False; break; }
            if (lit == TruthValue::Unknown) conj = TruthValue::Unknown;
        }
        m.assignment[n] = detail::kleene_not(conj);
    }
    for (const NodeId& n : g.nodes) {
        if (n.kind != NodeKind::constraint_node) continue;
        TruthValue any = TruthValue::False;
        for (const SignedEdge& e : g.in_edges(n)) {
            TruthValue src = m.assignment.at(e.from);
            TruthValue body = e.sign == Sign::positive ? src : detail::kleene_not(src);
            if (body == TruthValue::True) { any = TruthValue::True; break; }
            if (body == TruthValue::Unknown) any = TruthValue::Unknown;
        }
        m.assignment[n] = any;
    }
    return m;
}

inline Model extend_atom_set(const DepGraph& g, const AtomSet& s, Semantics sem) {
    return extend_model_to_graph(
        g,
        [&](const std::string& a) {
            return s.count(a) ? TruthValue::True : TruthValue::False;
        },
        sem);
}

inline Model extend_three_valued(const DepGraph& g, const ThreeValuedModel& t) {
    return extend_model_to_graph(
        g,
        [&](const std::string& a) {
            if (t.true_set.count(a)) return TruthValue::True;
            if (t.false_set.count(a)) return TruthValue::False;
            return TruthValue::Unknown;
        },
        Semantics::well_founded);
}

}  // namespace nlpgs

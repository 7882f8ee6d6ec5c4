#pragma once

// Brute-force reference semantics, computed on the Program itself rather than
// the graph encoding. stable: s = least model of the reduct. co-stable: s is
// a fixpoint of the reduct's immediate-consequence operator (a positive loop
// then admits both the empty and the all-true reading). well-founded: the
// alternating fixpoint. Headless constraints never enter a reduct; they
// post-filter candidates, and under the three-valued semantics a true
// constraint body marks the result inconsistent while unknown is tolerated.

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "parser.hpp"

namespace nlpgs {

using AtomSet = std::set<std::string>;

struct ReductProgram {
    std::vector<Rule> rules;  // headed, all-positive bodies
};

struct OracleCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deletes headed rules whose negative body is contradicted by s, strips
// negative literals from the rest, drops constraints.
inline ReductProgram gl_reduct(const Program& p, const AtomSet& s) {
    ReductProgram r;
    for (const Rule& rule : p.rules) {
        if (rule.is_constraint()) continue;
        bool blocked = false;
        Rule kept;
        kept.head = rule.head;
        for (const Literal& l : rule.body) {
            if (l.sign == Sign::negative) {
                if (s.count(l.atom)) { blocked = true; break; }
            } else {
                kept.body.push_back(l);
            }
        }
        if (!blocked) r.rules.push_back(std::move(kept));
    }
    return r;
}

namespace detail {

inline AtomSet immediate_consequences(const ReductProgram& r, const AtomSet& s) {
    AtomSet out;
    for (const Rule& rule : r.rules) {
        bool fires = true;
        for (const Literal& l : rule.body)
            if (!s.count(l.atom)) { fires = false; break; }
        if (fires) out.insert(*rule.head);
    }
    return out;
}

// True when some headless body is satisfied two-valuedly by s.
inline bool constraint_violated(const Program& p, const AtomSet& s) {
    for (const Rule& rule : p.rules) {
        if (!rule.is_constraint()) continue;
        bool sat = true;
        for (const Literal& l : rule.body) {
            bool holds = l.sign == Sign::positive ? s.count(l.atom) != 0
                                                  : s.count(l.atom) == 0;
            if (!holds) { sat = false; break; }
        }
        if (sat) return true;
    }
    return false;
}

}  // namespace detail

inline AtomSet least_model(const ReductProgram& r) {
    AtomSet s;
    for (;;) {
        AtomSet next = detail::immediate_consequences(r, s);
        if (next == s) return s;
        s = std::move(next);
    }
}

// Starts from every head atom and removes unsupported atoms until stable;
// the survivor set is the greatest fixpoint of the consequence operator.
inline AtomSet greatest_fixpoint_model(const ReductProgram& r) {
    AtomSet s;
    for (const Rule& rule : r.rules) s.insert(*rule.head);
    for (;;) {
        AtomSet supported;
        AtomSet fired = detail::immediate_consequences(r, s);
        for (const std::string& a : s)
            if (fired.count(a)) supported.insert(a);
        if (supported == s) return s;
        s = std::move(supported);
    }
}

inline bool verify_stable(const Program& p, const AtomSet& s) {
    return least_model(gl_reduct(p, s)) == s && !detail::constraint_violated(p, s);
}

// A candidate passes when it is a fixpoint of the reduct's consequence
// operator: closed under the rules and with every member supported.
inline bool verify_co_stable(const Program& p, const AtomSet& s) {
    return detail::immediate_consequences(gl_reduct(p, s), s) == s &&
           !detail::constraint_violated(p, s);
}

namespace detail {

template <typename Check>
std::set<AtomSet> enumerate_models(const Program& p, size_t cap, Check check) {
    std::vector<std::string> atoms = p.atoms();
    if (atoms.size() > cap)
        throw OracleCapError("program has " + std::to_string(atoms.size()) +
                             " atoms, above the exhaustive-enumeration cap of " +
                             std::to_string(cap) + "; use the external solver backend");
    std::set<AtomSet> models;
    for (size_t mask = 0; mask < (size_t{1} << atoms.size()); ++mask) {
        AtomSet s;
        for (size_t i = 0; i < atoms.size(); ++i)
            if (mask & (size_t{1} << i)) s.insert(atoms[i]);
        if (check(p, s)) models.insert(std::move(s));
    }
    return models;
}

}  // namespace detail

inline std::set<AtomSet> stable_models(const Program& p, size_t cap = 22) {
    return detail::enumerate_models(p, cap,
                                    [](const Program& q, const AtomSet& s) { return verify_stable(q, s); });
}

inline std::set<AtomSet> co_stable_models(const Program& p, size_t cap = 22) {
    return detail::enumerate_models(p, cap, [](const Program& q, const AtomSet& s) {
        return verify_co_stable(q, s);
    });
}

struct ThreeValuedModel {
    AtomSet true_set;
    AtomSet false_set;
    AtomSet unknown_set;
    bool consistent = true;  // false when a constraint body is true
};

// Alternating fixpoint: T underestimates truth, U overestimates possibility.
inline ThreeValuedModel well_founded_model(const Program& p) {
    std::vector<std::string> atoms = p.atoms();
    AtomSet t;
    AtomSet u;
    for (;;) {
        u = least_model(gl_reduct(p, t));
        AtomSet t2 = least_model(gl_reduct(p, u));
        if (t2 == t) break;
        t = std::move(t2);
    }
    ThreeValuedModel m;
    m.true_set = t;
    for (const std::string& a : atoms) {
        if (m.true_set.count(a)) continue;
        if (!u.count(a)) m.false_set.insert(a);
        else m.unknown_set.insert(a);
    }
    // Constraint bodies: Kleene-true body => inconsistent; unknown tolerated.
    for (const Rule& rule : p.rules) {
        if (!rule.is_constraint()) continue;
        bool body_true = true;
        for (const Literal& l : rule.body) {
            bool lit_true = l.sign == Sign::positive ? m.true_set.count(l.atom) != 0
                                                     : m.false_set.count(l.atom) != 0;
            if (!lit_true) { body_true = false; break; }
        }
        if (body_true) { m.consistent = false; break; }
    }
    return m;
}

}  // namespace nlpgs

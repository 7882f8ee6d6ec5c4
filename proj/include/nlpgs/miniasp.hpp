#pragma once

// Small answer-set solver covering the fragment the emitter produces:
// constants, function terms, variables, default negation, headless
// constraints, #show name/arity directives, % comments. Grounds via a
// positive-closure fixpoint (negative literals assumed satisfiable), then
// instantiates with never-derivable negative literals dropped, then searches
// smodels-style: forward firing, backward blocking for false heads, last
// -supporter forcing for true heads, unfounded-set falsification. Every
// complete assignment is re-verified as the least model of its reduct.
//
// Output and exit codes mimic clingo's default text mode so the subprocess
// backend can parse either solver.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlpgs::miniasp {

struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------- source syntax ----------

struct Term {
    enum class Kind { number, symbol, variable, compound };
    Kind kind = Kind::symbol;
    long value = 0;
    std::string name;
    std::vector<Term> args;

    std::string render() const {
        switch (kind) {
            case Kind::number: return std::to_string(value);
            case Kind::symbol:
            case Kind::variable: return name;
            case Kind::compound: {
                std::string s = name + "(";
                for (size_t i = 0; i < args.size(); ++i) {
                    if (i) s += ",";
                    s += args[i].render();
                }
                return s + ")";
            }
        }
        return {};
    }
};

struct SrcAtom {
    std::string pred;
    std::vector<Term> args;
};

struct SrcLiteral {
    SrcAtom atom;
    bool negated = false;
};

struct SrcRule {
    std::optional<SrcAtom> head;
    std::vector<SrcLiteral> body;
};

struct SrcProgram {
    std::vector<SrcRule> rules;
    std::set<std::pair<std::string, size_t>> shows;
    bool has_show = false;
};

namespace detail {

struct Cursor {
    const std::string& text;
    size_t pos = 0;
    int line = 1;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void advance() {
        if (text[pos] == '\n') ++line;
        ++pos;
    }
    void skip_trivia() {
        while (!eof()) {
            if (std::isspace(static_cast<unsigned char>(peek()))) advance();
            else if (peek() == '%') { while (!eof() && peek() != '\n') advance(); }
            else break;
        }
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw SolveError(msg + " at line " + std::to_string(line));
    }
    void expect(char c) {
        skip_trivia();
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        advance();
    }
};

inline std::string read_word(Cursor& c) {
    std::string w;
    while (!c.eof()) {
        char ch = c.peek();
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') {
            w.push_back(ch);
            c.advance();
        } else break;
    }
    return w;
}

inline Term parse_term(Cursor& c, size_t& anon_counter) {
    c.skip_trivia();
    if (c.eof()) c.fail("expected term");
    char ch = c.peek();
    Term t;
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '-') {
        bool neg = ch == '-';
        if (neg) c.advance();
        std::string digits = read_word(c);
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char d) {
                return std::isdigit(d);
            }))
            c.fail("malformed number");
        t.kind = Term::Kind::number;
        t.value = std::stol(digits);
        if (neg) t.value = -t.value;
        return t;
    }
    if (std::isupper(static_cast<unsigned char>(ch)) || ch == '_') {
        std::string w = read_word(c);
        t.kind = Term::Kind::variable;
        t.name = w == "_" ? "_Anon" + std::to_string(anon_counter++) : w;
        return t;
    }
    if (!std::islower(static_cast<unsigned char>(ch))) c.fail("expected term");
    std::string w = read_word(c);
    c.skip_trivia();
    if (!c.eof() && c.peek() == '(') {
        c.advance();
        t.kind = Term::Kind::compound;
        t.name = w;
        for (;;) {
            t.args.push_back(parse_term(c, anon_counter));
            c.skip_trivia();
            if (!c.eof() && c.peek() == ',') { c.advance(); continue; }
            break;
        }
        c.expect(')');
        return t;
    }
    t.kind = Term::Kind::symbol;
    t.name = w;
    return t;
}

inline SrcAtom parse_src_atom(Cursor& c, size_t& anon_counter) {
    c.skip_trivia();
    if (c.eof() || !std::islower(static_cast<unsigned char>(c.peek())))
        c.fail("expected atom");
    Term t = parse_term(c, anon_counter);
    SrcAtom a;
    a.pred = t.name;
    a.args = std::move(t.args);
    return a;
}

}  // namespace detail

inline SrcProgram parse_source(const std::string& text) {
    detail::Cursor c{text};
    SrcProgram p;
    size_t anon = 0;
    for (;;) {
        c.skip_trivia();
        if (c.eof()) break;
        if (c.peek() == '#') {
            c.advance();
            std::string dir = detail::read_word(c);
            if (dir != "show") c.fail("unsupported directive #" + dir);
            c.skip_trivia();
            std::string name = detail::read_word(c);
            if (name.empty()) c.fail("expected predicate name in #show");
            c.expect('/');
            c.skip_trivia();
            std::string digits = detail::read_word(c);
            if (digits.empty()) c.fail("expected arity in #show");
            p.shows.emplace(name, std::stoul(digits));
            p.has_show = true;
            c.expect('.');
            continue;
        }
        SrcRule r;
        bool have_head = c.peek() != ':';
        if (have_head) r.head = detail::parse_src_atom(c, anon);
        c.skip_trivia();
        if (!c.eof() && c.peek() == ':') {
            c.advance();
            if (c.eof() || c.peek() != '-') c.fail("expected ':-'");
            c.advance();
            for (;;) {
                c.skip_trivia();
                SrcLiteral lit;
                size_t save = c.pos;
                int save_line = c.line;
                if (!c.eof() && std::islower(static_cast<unsigned char>(c.peek()))) {
                    if (detail::read_word(c) == "not") lit.negated = true;
                    else { c.pos = save; c.line = save_line; }
                }
                lit.atom = detail::parse_src_atom(c, anon);
                r.body.push_back(std::move(lit));
                c.skip_trivia();
                if (!c.eof() && c.peek() == ',') { c.advance(); continue; }
                break;
            }
        }
        c.expect('.');
        if (!r.head && r.body.empty()) c.fail("empty constraint");
        p.rules.push_back(std::move(r));
    }
    return p;
}

// ---------- grounding ----------

namespace detail {

using Subst = std::map<std::string, Term>;

inline void collect_vars(const Term& t, std::set<std::string>& out) {
    if (t.kind == Term::Kind::variable) out.insert(t.name);
    for (const Term& a : t.args) collect_vars(a, out);
}

inline void collect_vars(const SrcAtom& a, std::set<std::string>& out) {
    for (const Term& t : a.args) collect_vars(t, out);
}

inline Term substitute(const Term& t, const Subst& s) {
    if (t.kind == Term::Kind::variable) {
        auto it = s.find(t.name);
        if (it == s.end()) throw SolveError("unbound variable " + t.name);
        return it->second;
    }
    Term out = t;
    for (Term& a : out.args) a = substitute(a, s);
    return out;
}

inline bool term_equal(const Term& a, const Term& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Term::Kind::number) return a.value == b.value;
    if (a.name != b.name || a.args.size() != b.args.size()) return false;
    for (size_t i = 0; i < a.args.size(); ++i)
        if (!term_equal(a.args[i], b.args[i])) return false;
    return true;
}

// One-way match of a pattern (may hold variables) against a ground term.
inline bool match(const Term& pat, const Term& ground, Subst& s) {
    if (pat.kind == Term::Kind::variable) {
        auto it = s.find(pat.name);
        if (it != s.end()) return term_equal(it->second, ground);
        s.emplace(pat.name, ground);
        return true;
    }
    if (pat.kind != ground.kind) return false;
    if (pat.kind == Term::Kind::number) return pat.value == ground.value;
    if (pat.name != ground.name || pat.args.size() != ground.args.size()) return false;
    for (size_t i = 0; i < pat.args.size(); ++i)
        if (!match(pat.args[i], ground.args[i], s)) return false;
    return true;
}

}  // namespace detail

struct GroundRule {
    int head = -1;  // -1 encodes a headless constraint
    std::vector<int> pos;
    std::vector<int> neg;

    auto operator<=>(const GroundRule&) const = default;
};

struct GroundProgram {
    std::vector<std::string> atom_names;                  // id -> rendered form
    std::vector<std::pair<std::string, size_t>> atom_sig; // id -> (pred, arity)
    std::vector<GroundRule> rules;                        // head >= 0
    std::vector<GroundRule> constraints;                  // head == -1
};

namespace detail {

struct Grounder {
    const SrcProgram& src;
    GroundProgram out;
    std::map<std::string, int> atom_ids;
    // (pred, arity) -> atom ids, for body matching
    std::map<std::pair<std::string, size_t>, std::vector<int>> by_sig;
    std::vector<std::vector<Term>> atom_args;

    explicit Grounder(const SrcProgram& s) : src(s) {}

    int intern(const SrcAtom& ground) {
        Term t;
        t.kind = ground.args.empty() ? Term::Kind::symbol : Term::Kind::compound;
        t.name = ground.pred;
        t.args = ground.args;
        std::string key = t.render();
        auto it = atom_ids.find(key);
        if (it != atom_ids.end()) return it->second;
        int id = static_cast<int>(out.atom_names.size());
        atom_ids.emplace(key, id);
        out.atom_names.push_back(key);
        out.atom_sig.emplace_back(ground.pred, ground.args.size());
        by_sig[{ground.pred, ground.args.size()}].push_back(id);
        atom_args.push_back(ground.args);
        if (out.atom_names.size() > 2'000'000)
            throw SolveError("grounding blow-up: more than 2e6 ground atoms");
        return id;
    }

    std::optional<int> lookup(const SrcAtom& ground) const {
        Term t;
        t.kind = ground.args.empty() ? Term::Kind::symbol : Term::Kind::compound;
        t.name = ground.pred;
        t.args = ground.args;
        auto it = atom_ids.find(t.render());
        if (it == atom_ids.end()) return std::nullopt;
        return it->second;
    }

    SrcAtom instantiate(const SrcAtom& a, const Subst& s) const {
        SrcAtom g;
        g.pred = a.pred;
        for (const Term& t : a.args) g.args.push_back(substitute(t, s));
        return g;
    }

    void check_safety() const {
        for (const SrcRule& r : src.rules) {
            std::set<std::string> pos_vars, other_vars;
            for (const SrcLiteral& l : r.body)
                collect_vars(l.atom, l.negated ? other_vars : pos_vars);
            if (r.head) collect_vars(*r.head, other_vars);
            for (const std::string& v : other_vars)
                if (!pos_vars.count(v))
                    throw SolveError("unsafe variable " + v +
                                     ": must occur in a positive body literal");
        }
    }

    // Enumerates substitutions matching every positive body literal against
    // the current base, invoking sink on each complete one.
    template <typename Sink>
    void join(const SrcRule& r, size_t i, Subst& s, Sink&& sink) {
        while (i < r.body.size() && r.body[i].negated) ++i;
        if (i >= r.body.size()) { sink(s); return; }
        const SrcAtom& pat = r.body[i].atom;
        auto it = by_sig.find({pat.pred, pat.args.size()});
        if (it == by_sig.end()) return;
        // Snapshot: ids appended during the sweep are picked up next round.
        std::vector<int> ids = it->second;
        for (int id : ids) {
            Subst trial = s;
            bool ok = true;
            const std::vector<Term>& ground = atom_args[id];
            for (size_t k = 0; k < pat.args.size() && ok; ++k)
                ok = match(pat.args[k], ground[k], trial);
            if (ok) join(r, i + 1, trial, sink);
        }
    }

    void run() {
        check_safety();
        // Positive closure: every head derivable when negation is ignored.
        for (bool grew = true; grew;) {
            grew = false;
            for (const SrcRule& r : src.rules) {
                if (!r.head) continue;
                Subst s;
                join(r, 0, s, [&](const Subst& full) {
                    SrcAtom h = instantiate(*r.head, full);
                    size_t before = out.atom_names.size();
                    intern(h);
                    if (out.atom_names.size() != before) grew = true;
                });
            }
        }
        // Instantiation against the closed base; negative literals on atoms
        // outside the base can never fire and are dropped.
        std::set<GroundRule> seen;
        for (const SrcRule& r : src.rules) {
            Subst s;
            join(r, 0, s, [&](const Subst& full) {
                GroundRule g;
                for (const SrcLiteral& l : r.body) {
                    SrcAtom a = instantiate(l.atom, full);
                    std::optional<int> id = lookup(a);
                    if (l.negated) {
                        if (id) g.neg.push_back(*id);
                    } else {
                        g.pos.push_back(*id);  // matched against base, present
                    }
                }
                if (r.head) g.head = *lookup(instantiate(*r.head, full));
                std::sort(g.pos.begin(), g.pos.end());
                std::sort(g.neg.begin(), g.neg.end());
                if (!seen.insert(g).second) return;
                if (g.head >= 0) out.rules.push_back(g);
                else out.constraints.push_back(g);
            });
        }
    }
};

}  // namespace detail

inline GroundProgram ground_program(const SrcProgram& src) {
    detail::Grounder g(src);
    g.run();
    return std::move(g.out);
}

// ---------- search ----------

struct Result {
    std::vector<std::set<std::string>> models;  // shown atoms, rendered
    bool exhausted = true;
};

namespace detail {

struct Searcher {
    const GroundProgram& g;
    size_t n;
    std::vector<std::vector<size_t>> rules_for_head;
    std::vector<int> branch_order;
    std::vector<int8_t> val;  // -1 undef, 0 false, 1 true
    std::vector<std::set<int>>* found;
    long cap;
    bool stopped = false;

    Searcher(const GroundProgram& gp, std::vector<std::set<int>>* out, long cap_)
        : g(gp), n(gp.atom_names.size()), rules_for_head(n), val(n, -1), found(out), cap(cap_) {
        for (size_t i = 0; i < g.rules.size(); ++i)
            rules_for_head[g.rules[i].head].push_back(i);
        std::set<int> negged;
        for (const GroundRule& r : g.rules)
            for (int a : r.neg) negged.insert(a);
        for (const GroundRule& r : g.constraints)
            for (int a : r.neg) negged.insert(a);
        branch_order.assign(negged.begin(), negged.end());
        for (size_t i = 0; i < n; ++i)
            if (!negged.count(static_cast<int>(i))) branch_order.push_back(static_cast<int>(i));
    }

    bool lit_false(int atom, bool negated) const {
        return negated ? val[atom] == 1 : val[atom] == 0;
    }
    bool lit_true(int atom, bool negated) const {
        return negated ? val[atom] == 0 : val[atom] == 1;
    }

    bool body_blocked(const GroundRule& r) const {
        for (int a : r.pos)
            if (lit_false(a, false)) return true;
        for (int a : r.neg)
            if (lit_false(a, true)) return true;
        return false;
    }
    bool body_true(const GroundRule& r) const {
        for (int a : r.pos)
            if (!lit_true(a, false)) return false;
        for (int a : r.neg)
            if (!lit_true(a, true)) return false;
        return true;
    }

    // Sets atom to v; returns false on contradiction with the current value.
    bool assign(int atom, int8_t v, bool& changed) {
        if (val[atom] == v) return true;
        if (val[atom] != -1) return false;
        val[atom] = v;
        changed = true;
        return true;
    }

    // Forces the single undecided literal of r to be false; pre: exists.
    bool block_rule(const GroundRule& r, bool& changed) {
        for (int a : r.pos)
            if (val[a] == -1) return assign(a, 0, changed);
        for (int a : r.neg)
            if (val[a] == -1) return assign(a, 1, changed);
        return false;  // nothing undecided: caller misjudged
    }

    size_t undecided_count(const GroundRule& r) const {
        size_t k = 0;
        for (int a : r.pos) k += val[a] == -1;
        for (int a : r.neg) k += val[a] == -1;
        return k;
    }

    bool propagate() {
        for (bool changed = true; changed;) {
            changed = false;
            // Forward: satisfied body forces the head true.
            for (const GroundRule& r : g.rules) {
                if (!body_true(r)) continue;
                if (val[r.head] == 0) return false;
                if (!assign(r.head, 1, changed)) return false;
            }
            // Constraints: never satisfiable.
            for (const GroundRule& r : g.constraints) {
                if (body_blocked(r)) continue;
                size_t u = undecided_count(r);
                if (u == 0) return false;
                if (u == 1 && !block_rule(r, changed)) return false;
            }
            // False heads block every rule; true heads with a single
            // remaining supporter force its body.
            for (size_t a = 0; a < n; ++a) {
                if (val[a] == 0) {
                    for (size_t ri : rules_for_head[a]) {
                        const GroundRule& r = g.rules[ri];
                        if (body_blocked(r)) continue;
                        size_t u = undecided_count(r);
                        if (u == 0) return false;
                        if (u == 1 && !block_rule(r, changed)) return false;
                    }
                } else if (val[a] == 1) {
                    const GroundRule* only = nullptr;
                    size_t possible = 0;
                    for (size_t ri : rules_for_head[a]) {
                        if (body_blocked(g.rules[ri])) continue;
                        ++possible;
                        only = &g.rules[ri];
                    }
                    if (possible == 0) return false;
                    if (possible == 1) {
                        for (int b : only->pos)
                            if (!assign(b, 1, changed)) return false;
                        for (int b : only->neg)
                            if (!assign(b, 0, changed)) return false;
                    }
                }
            }
            if (changed) continue;
            // Unfounded-set falsification: the upper closure over unblocked
            // rules bounds everything that can still be derived.
            std::vector<bool> in_u(n, false);
            for (bool grew = true; grew;) {
                grew = false;
                for (const GroundRule& r : g.rules) {
                    if (in_u[r.head] || body_blocked(r)) continue;
                    bool supported = true;
                    for (int a : r.pos)
                        if (!in_u[a]) { supported = false; break; }
                    if (supported) { in_u[r.head] = true; grew = true; }
                }
            }
            for (size_t a = 0; a < n; ++a) {
                if (in_u[a]) continue;
                if (val[a] == 1) return false;
                if (val[a] == -1 && !assign(static_cast<int>(a), 0, changed)) return false;
            }
        }
        return true;
    }

    // Complete assignments are independently re-verified: the true set must
    // be the least model of the reduct and violate no constraint.
    bool leaf_is_stable() const {
        std::vector<bool> derived(n, false);
        for (bool grew = true; grew;) {
            grew = false;
            for (const GroundRule& r : g.rules) {
                if (derived[r.head]) continue;
                bool fires = true;
                for (int a : r.neg)
                    if (val[a] == 1) { fires = false; break; }
                for (int a : r.pos)
                    if (fires && !derived[a]) fires = false;
                if (fires) { derived[r.head] = true; grew = true; }
            }
        }
        for (size_t a = 0; a < n; ++a)
            if (derived[a] != (val[a] == 1)) return false;
        for (const GroundRule& r : g.constraints)
            if (body_true(r)) return false;
        return true;
    }

    void search() {
        if (stopped || !propagate()) return;
        int pick = -1;
        for (int a : branch_order)
            if (val[a] == -1) { pick = a; break; }
        if (pick == -1) {
            if (!leaf_is_stable()) return;
            std::set<int> model;
            for (size_t a = 0; a < n; ++a)
                if (val[a] == 1) model.insert(static_cast<int>(a));
            found->push_back(std::move(model));
            if (cap > 0 && static_cast<long>(found->size()) >= cap) stopped = true;
            return;
        }
        std::vector<int8_t> saved = val;
        val[pick] = 1;
        search();
        if (stopped) return;
        val = saved;
        val[pick] = 0;
        search();
        if (!stopped) val = std::move(saved);
    }
};

}  // namespace detail

// max_models <= 0 enumerates everything.
inline Result solve_ground(const GroundProgram& g, const SrcProgram& src, long max_models) {
    std::vector<std::set<int>> raw;
    detail::Searcher s(g, &raw, max_models);
    s.search();
    Result res;
    res.exhausted = !s.stopped;
    for (const std::set<int>& m : raw) {
        std::set<std::string> shown;
        for (int a : m) {
            if (src.has_show && !src.shows.count(g.atom_sig[a])) continue;
            shown.insert(g.atom_names[a]);
        }
        res.models.push_back(std::move(shown));
    }
    return res;
}

inline Result solve_text(const std::string& text, long max_models) {
    SrcProgram src = parse_source(text);
    GroundProgram g = ground_program(src);
    return solve_ground(g, src, max_models);
}

// clingo-flavoured report: Answer blocks, a verdict line, a model count.
inline std::string format_output(const Result& r, const std::string& source_name) {
    std::string out = "miniasp version 1.0.0\nReading from " + source_name + "\nSolving...\n";
    for (size_t i = 0; i < r.models.size(); ++i) {
        out += "Answer: " + std::to_string(i + 1) + "\n";
        std::string line;
        for (const std::string& a : r.models[i]) {
            if (!line.empty()) line += " ";
            line += a;
        }
        out += line + "\n";
    }
    out += r.models.empty() ? "UNSATISFIABLE\n" : "SATISFIABLE\n";
    out += "\nModels       : " + std::to_string(r.models.size()) +
           (r.exhausted ? "" : "+") + "\n";
    return out;
}

// clingo exit convention: 20 unsat, 30 sat and exhausted, 10 sat and capped.
inline int exit_code(const Result& r) {
    if (r.models.empty()) return 20;
    return r.exhausted ? 30 : 10;
}

}  // namespace nlpgs::miniasp

#pragma once

// Front end for propositional normal logic programs:
//   rule       p :- q, not r.
//   fact       p.
//   constraint :- q, not r.
// Atoms match [a-z][A-Za-z0-9_]*. Variables and compound terms are rejected;
// this front end never grounds.

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlpgs {

enum class Sign { positive, negative };

inline Sign negate(Sign s) { return s == Sign::positive ? Sign::negative : Sign::positive; }

inline const char* sign_name(Sign s) { return s == Sign::positive ? "positive" : "negative"; }

struct Literal {
    std::string atom;
    Sign sign = Sign::positive;

    auto operator<=>(const Literal&) const = default;
};

// head == nullopt encodes a headless constraint.
struct Rule {
    std::optional<std::string> head;
    std::vector<Literal> body;

    bool is_fact() const { return head.has_value() && body.empty(); }
    bool is_constraint() const { return !head.has_value(); }

    auto operator<=>(const Rule&) const = default;
};

struct Program {
    std::vector<Rule> rules;

    // All atom names mentioned anywhere, sorted.
    std::vector<std::string> atoms() const {
        std::set<std::string> s;
        for (const Rule& r : rules) {
            if (r.head) s.insert(*r.head);
            for (const Literal& l : r.body) s.insert(l.atom);
        }
        return {s.begin(), s.end()};
    }

    auto operator<=>(const Program&) const = default;
};

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ", column " +
                             std::to_string(col_) + ")"),
          line(line_), column(col_) {}
};

// Names the emitted graph vocabulary claims for itself.
inline const std::set<std::string>& reserved_atom_names() {
    static const std::set<std::string> names = {
        "constraint", "conjunct", "node", "edge", "fact", "true", "false", "unknown", "not"};
    return names;
}

inline bool is_valid_atom_name(const std::string& s) {
    if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

namespace detail {

struct Cursor {
    const std::string& text;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    void advance() {
        if (text[pos] == '\n') { ++line; col = 1; } else { ++col; }
        ++pos;
    }

    void skip_trivia() {
        while (!eof()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '%') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }
};

inline std::string read_word(Cursor& c) {
    std::string w;
    while (!c.eof()) {
        char ch = c.peek();
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') {
            w.push_back(ch);
            c.advance();
        } else {
            break;
        }
    }
    return w;
}

inline std::string parse_atom_name(Cursor& c) {
    int line = c.line, col = c.col;
    char ch = c.peek();
    if (std::isupper(static_cast<unsigned char>(ch)) || ch == '_')
        throw ParseError("variable '" + read_word(c) + "' not allowed: input must be propositional, grounding is out of scope", line, col);
    if (std::isdigit(static_cast<unsigned char>(ch)))
        throw ParseError("expected atom, found number", line, col);
    if (!std::islower(static_cast<unsigned char>(ch)))
        throw ParseError(std::string("expected atom, found '") + ch + "'", line, col);
    std::string name = read_word(c);
    c.skip_trivia();
    if (!c.eof() && c.peek() == '(')
        throw ParseError("compound term '" + name + "(...)' not allowed: input must be propositional, grounding is out of scope", line, col);
    if (reserved_atom_names().count(name))
        throw ParseError("atom name '" + name + "' is reserved by the graph encoding", line, col);
    return name;
}

inline Literal parse_literal(Cursor& c) {
    c.skip_trivia();
    if (c.eof()) throw ParseError("expected literal, found end of input", c.line, c.col);
    // "not" is a keyword only in literal position.
    if (std::islower(static_cast<unsigned char>(c.peek()))) {
        size_t save_pos = c.pos;
        int save_line = c.line, save_col = c.col;
        if (read_word(c) == "not") {
            c.skip_trivia();
            if (c.eof()) throw ParseError("expected atom after 'not'", c.line, c.col);
            if (std::islower(static_cast<unsigned char>(c.peek()))) {
                size_t p2 = c.pos;
                int l2 = c.line, col2 = c.col;
                if (read_word(c) == "not")
                    throw ParseError("double negation not supported", l2, col2);
                c.pos = p2; c.line = l2; c.col = col2;
            }
            return Literal{parse_atom_name(c), Sign::negative};
        }
        c.pos = save_pos; c.line = save_line; c.col = save_col;
    }
    return Literal{parse_atom_name(c), Sign::positive};
}

}  // namespace detail

// Whole-text parse. Throws ParseError with 1-based line/column on bad input.
inline Program parse_program(const std::string& text) {
    detail::Cursor c{text};
    Program p;
    for (;;) {
        c.skip_trivia();
        if (c.eof()) break;
        int line = c.line, col = c.col;
        char ch = c.peek();
        if (ch == '#')
            throw ParseError("directives are not part of the input language", line, col);
        Rule rule;
        if (ch == ':') {
            c.advance();
            if (c.eof() || c.peek() != '-') throw ParseError("expected ':-'", line, col);
            c.advance();
        } else {
            rule.head = detail::parse_atom_name(c);
            c.skip_trivia();
            if (c.eof()) throw ParseError("expected '.' or ':-' after rule head", c.line, c.col);
            if (c.peek() == '.') {
                c.advance();
                p.rules.push_back(std::move(rule));
                continue;
            }
            if (c.peek() == ':') {
                c.advance();
                if (c.eof() || c.peek() != '-')
                    throw ParseError("expected ':-' after rule head", c.line, c.col);
                c.advance();
            } else {
                throw ParseError(std::string("expected '.' or ':-', found '") + c.peek() + "'",
                                 c.line, c.col);
            }
        }
        // Body: one or more comma-separated literals, closed by '.'.
        for (;;) {
            rule.body.push_back(detail::parse_literal(c));
            c.skip_trivia();
            if (c.eof()) throw ParseError("expected ',' or '.', found end of input", c.line, c.col);
            char t = c.peek();
            if (t == ',') { c.advance(); continue; }
            if (t == '.') { c.advance(); break; }
            throw ParseError(std::string("expected ',' or '.', found '") + t + "'", c.line, c.col);
        }
        p.rules.push_back(std::move(rule));
    }
    return p;
}

// Drops duplicate body literals (first occurrence kept) and exact duplicate
// rules (first kept). p :- q, not q. stays: contradictory bodies are legal.
inline Program normalize_program(const Program& p) {
    Program out;
    std::set<Rule> seen;
    for (const Rule& r : p.rules) {
        Rule n;
        n.head = r.head;
        std::set<Literal> lits;
        for (const Literal& l : r.body)
            if (lits.insert(l).second) n.body.push_back(l);
        if (seen.insert(n).second) out.rules.push_back(std::move(n));
    }
    return out;
}

inline std::string print_literal(const Literal& l) {
    return l.sign == Sign::negative ? "not " + l.atom : l.atom;
}

inline std::string print_rule(const Rule& r) {
    std::string s;
    if (r.head) s += *r.head;
    if (!r.body.empty() || !r.head) {
        if (r.head) s += " ";
        s += ":- ";
        for (size_t i = 0; i < r.body.size(); ++i) {
            if (i) s += ", ";
            s += print_literal(r.body[i]);
        }
    }
    s += ".";
    return s;
}

inline std::string print_program(const Program& p) {
    std::string s;
    for (const Rule& r : p.rules) {
        s += print_rule(r);
        s += "\n";
    }
    return s;
}

}  // namespace nlpgs

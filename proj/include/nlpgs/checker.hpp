#pragma once

// Differential harness: the graph pipeline (emit + solve) against the native
// oracles, over a fixed reference suite, the exhaustive tiny space, or a
// seeded random corpus. stable and co-stable compare conjunct-stripped models
// as sets of true-atom sets; well-founded compares the single three-valued
// assignment, with an inconsistent oracle matching an unsatisfiable pipeline.
// Solving runs in-process through the bundled engine by default; a subprocess
// backend exercises the real solver protocol.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "emitter.hpp"
#include "graph.hpp"
#include "justify.hpp"
#include "miniasp.hpp"
#include "oracles.hpp"
#include "parser.hpp"
#include "solver.hpp"

namespace nlpgs {

inline const char* semantics_flag(Semantics s) {
    switch (s) {
        case Semantics::stable: return "stable";
        case Semantics::co_stable: return "costable";
        case Semantics::well_founded: return "wfs";
    }
    return {};
}

enum class CheckBackend { in_process, subprocess };

struct CheckConfig {
    CheckBackend backend = CheckBackend::in_process;
    std::string solver_path;  // subprocess mode; empty resolves automatically
    double timeout_sec = 30.0;
    size_t oracle_cap = 22;
    std::string reproducer_dir;  // when set, disagreeing programs are archived
};

struct Disagreement {
    std::string name;
    std::string program_text;
    Semantics semantics = Semantics::stable;
    std::string oracle_models;
    std::string pipeline_models;
    std::string reason;
};

struct AgreementReport {
    size_t total = 0;
    size_t agreed = 0;
    std::vector<Disagreement> disagreements;
};

struct CompareResult {
    bool agree = false;
    std::string oracle_models;
    std::string pipeline_models;
    std::string reason;
};

namespace detail {

inline std::string render_atom_sets(const std::set<AtomSet>& sets) {
    if (sets.empty()) return "UNSAT";
    std::string out;
    for (const AtomSet& s : sets) {
        if (!out.empty()) out += " ";
        out += "{";
        bool first = true;
        for (const std::string& a : s) {
            if (!first) out += ",";
            out += a;
            first = false;
        }
        out += "}";
    }
    return out;
}

inline std::string render_three_valued(const ThreeValuedModel& m) {
    if (!m.consistent) return "UNSAT";
    std::map<std::string, const char*> byatom;
    for (const std::string& a : m.true_set) byatom[a] = "true";
    for (const std::string& a : m.false_set) byatom[a] = "false";
    for (const std::string& a : m.unknown_set) byatom[a] = "unknown";
    std::string out;
    for (const auto& [a, v] : byatom) {
        if (!out.empty()) out += " ";
        out += a + "=" + v;
    }
    return out.empty() ? "{}" : out;
}

// Pipeline models projected to true-atom sets (stable / co-stable reading).
inline std::set<AtomSet> models_to_atom_sets(const std::vector<Model>& models,
                                             const DepGraph& g) {
    std::set<AtomSet> out;
    for (const Model& m : models) {
        AtomSet s;
        for (const auto& [node, value] : strip_conjuncts(m, g).assignment)
            if (value == TruthValue::True) s.insert(node.name);
        out.insert(std::move(s));
    }
    return out;
}

inline std::string render_pipeline_wfs(const std::vector<Model>& models, const DepGraph& g) {
    if (models.empty()) return "UNSAT";
    std::string out;
    for (const Model& m : models) {
        if (!out.empty()) out += " | ";
        std::string one;
        for (const auto& [node, value] : strip_conjuncts(m, g).assignment) {
            if (!one.empty()) one += " ";
            one += node.name + "=" + truth_name(value);
        }
        out += one.empty() ? "{}" : one;
    }
    return models.size() > 1 ? std::to_string(models.size()) + " models: " + out : out;
}

}  // namespace detail

// Emits and solves p's graph under s. in_process mode routes the encoding
// through the bundled engine and the same output-binding path the subprocess
// uses.
inline std::vector<Model> pipeline_models(const Program& p, Semantics s,
                                          const CheckConfig& cfg, const DepGraph& g) {
    EncodedProgram encoded = emit_augmented_program(g, s);
    if (cfg.backend == CheckBackend::subprocess) {
        SolveConfig sc;
        sc.solver_path = cfg.solver_path;
        sc.model_cap = 0;
        sc.timeout_sec = cfg.timeout_sec;
        return solve_external(encoded, sc).models;
    }
    miniasp::Result res = miniasp::solve_text(encoded.full_text(), 0);
    std::string raw;
    for (size_t i = 0; i < res.models.size(); ++i) {
        raw += "Answer: " + std::to_string(i + 1) + "\n";
        std::string line;
        for (const std::string& a : res.models[i]) {
            if (!line.empty()) line += " ";
            line += a;
        }
        raw += line + "\n";
    }
    raw += res.models.empty() ? "UNSATISFIABLE\n" : "SATISFIABLE\n";
    return bind_models(parse_answer_sets(raw), encoded);
}

inline CompareResult compare_on(const Program& p, Semantics s, const CheckConfig& cfg) {
    CompareResult r;
    DepGraph g = cnr_to_dependency_graph(build_cnr_graph(p));
    std::vector<Model> models;
    try {
        models = pipeline_models(p, s, cfg, g);
    } catch (const std::exception& e) {
        r.reason = std::string("backend failure: ") + e.what();
        r.pipeline_models = "<error>";
        r.oracle_models = "<not computed>";
        return r;
    }
    for (const Model& m : models) {
        ValidationReport v = validate_model(g, m);
        if (!v.valid) {
            r.reason = "pipeline model fails effective-edge validation at " +
                       v.violations.front().node.display() + " (" +
                       violation_name(v.violations.front().reason) + ")";
            r.pipeline_models = detail::render_pipeline_wfs(models, g);
            r.oracle_models = "<not computed>";
            return r;
        }
    }
    try {
        if (s == Semantics::well_founded) {
            ThreeValuedModel oracle = well_founded_model(p);
            r.oracle_models = detail::render_three_valued(oracle);
            r.pipeline_models = detail::render_pipeline_wfs(models, g);
            if (!oracle.consistent) {
                r.agree = models.empty();
            } else if (models.size() == 1) {
                Model expected = extend_three_valued(g, oracle);
                r.agree = strip_conjuncts(models[0], g).assignment ==
                          strip_conjuncts(expected, g).assignment;
            } else {
                r.agree = false;
            }
        } else {
            std::set<AtomSet> oracle = s == Semantics::stable
                                           ? stable_models(p, cfg.oracle_cap)
                                           : co_stable_models(p, cfg.oracle_cap);
            std::set<AtomSet> pipeline = detail::models_to_atom_sets(models, g);
            r.oracle_models = detail::render_atom_sets(oracle);
            r.pipeline_models = detail::render_atom_sets(pipeline);
            r.agree = oracle == pipeline;
        }
    } catch (const std::exception& e) {
        r.reason = std::string("oracle failure: ") + e.what();
        r.oracle_models = "<error>";
        return r;
    }
    if (!r.agree && r.reason.empty()) r.reason = "model sets differ";
    return r;
}

// The worked examples: every program whose behavior the documentation pins.
inline std::vector<std::pair<std::string, std::string>> reference_suite() {
    return {
        {"self_blocking_conjunction", "p :- q, not r, not p."},
        {"alternative_support", "p :- q, not p. p :- not r."},
        {"single_conjunctive_rule", "p :- q, not r."},
        {"all_negative_body", "p :- not q, not r, not p."},
        {"pure_constraint", ":- not q, not r."},
        {"even_loop_with_positive_guard", "p :- not q, r. q :- not p."},
        {"positive_loop_under_fact", "p :- q, r. q :- p. r."},
        {"two_atom_positive_loop", "p :- q. q :- p."},
        {"even_loop", "p :- not q. q :- not p."},
        {"odd_loop", "p :- not q. q :- not r. r :- not p."},
        {"entangled_loops", "p :- not q, r. q :- not p. r :- p."},
    };
}

struct CorpusConfig {
    enum class Mode { exhaustive, random, reference_suite };
    Mode mode = Mode::reference_suite;
    size_t atoms = 3;
    size_t rules = 3;
    size_t body = 2;
    size_t count = 100;    // random mode
    uint64_t seed = 0;     // random mode
    std::vector<Semantics> semantics = {Semantics::stable, Semantics::co_stable,
                                        Semantics::well_founded};
    CheckConfig check;
};

namespace detail {

inline std::vector<std::string> corpus_atoms(size_t n) {
    std::vector<std::string> out;
    for (size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('p' + i)));
    return out;
}

// All bodies of up to `max_len` distinct literals over `atoms`.
inline std::vector<std::vector<Literal>> corpus_bodies(const std::vector<std::string>& atoms,
                                                       size_t max_len) {
    std::vector<Literal> literals;
    for (const std::string& a : atoms) {
        literals.push_back({a, Sign::positive});
        literals.push_back({a, Sign::negative});
    }
    std::vector<std::vector<Literal>> out = {{}};
    std::vector<std::vector<Literal>> current = {{}};
    for (size_t len = 1; len <= max_len; ++len) {
        std::vector<std::vector<Literal>> next;
        for (const std::vector<Literal>& base : current) {
            size_t start = 0;
            if (!base.empty()) {
                for (size_t i = 0; i < literals.size(); ++i)
                    if (literals[i] == base.back()) { start = i + 1; break; }
            }
            for (size_t i = start; i < literals.size(); ++i) {
                std::vector<Literal> b = base;
                b.push_back(literals[i]);
                next.push_back(b);
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        current = std::move(next);
    }
    return out;
}

inline void archive_reproducer(const CheckConfig& cfg, const Disagreement& d, size_t index) {
    if (cfg.reproducer_dir.empty()) return;
    std::filesystem::create_directories(cfg.reproducer_dir);
    std::string path = cfg.reproducer_dir + "/" + d.name + "_" +
                       semantics_flag(d.semantics) + "_" + std::to_string(index) + ".lp";
    std::ofstream out(path);
    out << "% semantics: " << semantics_flag(d.semantics) << "\n"
        << "% oracle:    " << d.oracle_models << "\n"
        << "% pipeline:  " << d.pipeline_models << "\n"
        << "% reason:    " << d.reason << "\n"
        << d.program_text;
}

inline void run_one(const std::string& name, const Program& p, AgreementReport& report,
                    const CorpusConfig& cfg) {
    for (Semantics s : cfg.semantics) {
        CompareResult r = compare_on(p, s, cfg.check);
        ++report.total;
        if (r.agree) {
            ++report.agreed;
            continue;
        }
        Disagreement d;
        d.name = name;
        d.program_text = print_program(p);
        d.semantics = s;
        d.oracle_models = r.oracle_models;
        d.pipeline_models = r.pipeline_models;
        d.reason = r.reason;
        archive_reproducer(cfg.check, d, report.disagreements.size());
        report.disagreements.push_back(std::move(d));
    }
}

}  // namespace detail

inline AgreementReport run_corpus(const CorpusConfig& cfg) {
    AgreementReport report;
    if (cfg.mode == CorpusConfig::Mode::reference_suite) {
        for (const auto& [name, text] : reference_suite())
            detail::run_one(name, parse_program(text), report, cfg);
        return report;
    }
    if (cfg.mode == CorpusConfig::Mode::exhaustive) {
        std::vector<std::string> atoms = detail::corpus_atoms(cfg.atoms);
        std::vector<std::vector<Literal>> bodies = detail::corpus_bodies(atoms, cfg.body);
        std::vector<Rule> universe;
        for (const std::string& head : atoms)
            for (const std::vector<Literal>& body : bodies)
                universe.push_back(Rule{head, body});
        // Subsets of the rule universe, smallest first, lexicographic indices.
        std::vector<size_t> picked;
        size_t counter = 0;
        auto emit = [&]() {
            Program p;
            for (size_t i : picked) p.rules.push_back(universe[i]);
            detail::run_one("exhaustive_" + std::to_string(counter++), p, report, cfg);
        };
        auto rec = [&](auto&& self, size_t start, size_t remaining) -> void {
            if (remaining == 0) return;
            for (size_t i = start; i < universe.size(); ++i) {
                picked.push_back(i);
                emit();
                self(self, i + 1, remaining - 1);
                picked.pop_back();
            }
        };
        emit();  // the empty program
        rec(rec, 0, cfg.rules);
        return report;
    }
    // Seeded random corpus; occasionally includes headless constraints.
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::string> atoms = detail::corpus_atoms(cfg.atoms);
    for (size_t k = 0; k < cfg.count; ++k) {
        Program p;
        size_t nrules = rng() % (cfg.rules + 1);
        for (size_t r = 0; r < nrules; ++r) {
            Rule rule;
            bool constraint = rng() % 6 == 0;
            if (!constraint) rule.head = atoms[rng() % atoms.size()];
            size_t len = constraint ? 1 + rng() % cfg.body : rng() % (cfg.body + 1);
            for (size_t l = 0; l < len; ++l)
                rule.body.push_back(
                    {atoms[rng() % atoms.size()],
                     rng() % 2 == 0 ? Sign::positive : Sign::negative});
            p.rules.push_back(std::move(rule));
        }
        detail::run_one("random_" + std::to_string(k), normalize_program(p), report, cfg);
    }
    return report;
}

enum class ReportFormat { text, json };

inline std::string render_report(const AgreementReport& r, ReportFormat format) {
    if (format == ReportFormat::json) {
        nlohmann::json j;
        j["total"] = r.total;
        j["agreed"] = r.agreed;
        nlohmann::json rows = nlohmann::json::array();
        for (const Disagreement& d : r.disagreements) {
            rows.push_back({{"name", d.name},
                            {"semantics", semantics_flag(d.semantics)},
                            {"program", d.program_text},
                            {"oracle", d.oracle_models},
                            {"pipeline", d.pipeline_models},
                            {"reason", d.reason}});
        }
        j["disagreements"] = std::move(rows);
        return j.dump(2) + "\n";
    }
    std::string out;
    out += "checked:   " + std::to_string(r.total) + "\n";
    out += "agreed:    " + std::to_string(r.agreed) + "\n";
    char rate[32];
    std::snprintf(rate, sizeof(rate), "%.4f",
                  r.total == 0 ? 1.0 : static_cast<double>(r.agreed) / r.total);
    out += "agreement: " + std::string(rate) + "\n";
    for (const Disagreement& d : r.disagreements) {
        out += "\ndisagreement: " + d.name + " [" + semantics_flag(d.semantics) + "]\n";
        out += "  program:  ";
        std::string prog = d.program_text;
        for (char& c : prog)
            if (c == '\n') c = ' ';
        out += prog + "\n";
        out += "  oracle:   " + d.oracle_models + "\n";
        out += "  pipeline: " + d.pipeline_models + "\n";
        out += "  reason:   " + d.reason + "\n";
    }
    return out;
}

}  // namespace nlpgs

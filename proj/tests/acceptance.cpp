// Acceptance gate: one check per release criterion, each printing a single
// PASS/FAIL line. Failing lines carry the measured values, so a red criterion
// documents exactly what diverges instead of hiding it.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nlpgs/checker.hpp"
#include "nlpgs/emitter.hpp"
#include "nlpgs/graph.hpp"
#include "nlpgs/justify.hpp"
#include "nlpgs/oracles.hpp"
#include "nlpgs/parser.hpp"
#include "nlpgs/solver.hpp"

using namespace nlpgs;

namespace {

// Pinned budgets; a slower machine fails loudly rather than silently.
constexpr double kSolveBudgetSec = 5.0;
constexpr double kSweepBudgetSec = 120.0;
constexpr double kPerSolveBudgetSec = 1.0;

const char* kExample = "p :- not q, r. q :- not p. r :- p.";

const std::string kExampleFacts =
    "node(p).\n"
    "node(conjunct(0)).\n"
    "node(q).\n"
    "node(r).\n"
    "conjunct(conjunct(0)).\n"
    "edge(p,q,negative).\n"
    "edge(p,r,positive).\n"
    "edge(conjunct(0),p,negative).\n"
    "edge(q,conjunct(0),positive).\n"
    "edge(r,conjunct(0),negative).\n";

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void fail(const std::string& msg) {
        pass = false;
        notes.push_back(msg);
    }
    void note(const std::string& msg) { notes.push_back(msg); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DepGraph dep(const std::string& text) {
    return cnr_to_dependency_graph(build_cnr_graph(parse_program(text)));
}

std::vector<Model> external_models(const std::string& text, Semantics sem) {
    return solve_external(emit_augmented_program(dep(text), sem)).models;
}

// Mirror of the CLI's native backend: oracles on the source program, lifted
// onto the graph's node set afterwards.
std::vector<Model> native_models(const std::string& text, Semantics sem) {
    Program p = parse_program(text);
    DepGraph g = dep(text);
    std::vector<Model> models;
    if (sem == Semantics::well_founded) {
        ThreeValuedModel m = well_founded_model(p);
        if (m.consistent) models.push_back(extend_three_valued(g, m));
        return models;
    }
    std::set<AtomSet> sets =
        sem == Semantics::stable ? stable_models(p) : co_stable_models(p);
    for (const AtomSet& s : sets) models.push_back(extend_atom_set(g, s, sem));
    return models;
}

std::vector<Model> backend_models(const std::string& text, Semantics sem, bool external) {
    return external ? external_models(text, sem) : native_models(text, sem);
}

std::set<AtomSet> true_sets(const std::vector<Model>& models, const DepGraph& g) {
    std::set<AtomSet> out;
    for (const Model& m : models) {
        AtomSet s;
        for (const auto& [node, value] : strip_conjuncts(m, g).assignment)
            if (value == TruthValue::True) s.insert(node.name);
        out.insert(std::move(s));
    }
    return out;
}

bool all_atoms_unknown(const std::vector<Model>& models, const DepGraph& g) {
    if (models.size() != 1) return false;
    for (const NodeId& n : g.nodes)
        if (n.kind == NodeKind::atom &&
            models[0].assignment.at(n) != TruthValue::Unknown)
            return false;
    return true;
}

std::string show_sets(const std::set<AtomSet>& sets) { return detail::render_atom_sets(sets); }

const char* backend_name(bool external) { return external ? "external" : "native"; }

// ---- criterion 1: the worked example's graph, byte for byte ----

Outcome criterion1() {
    Outcome o;
    std::string facts = emit_graph_facts(dep(kExample));
    if (facts == kExampleFacts) {
        o.note("ten graph facts byte-exact");
    } else {
        o.fail("graph facts differ from the pinned ten-line listing; got:\n" + facts);
    }
    return o;
}

// ---- criterion 2: the worked example under all three semantics ----

Outcome criterion2() {
    Outcome o;
    DepGraph g = dep(kExample);
    const std::set<AtomSet> expected_stable = {{"q"}};
    const std::set<AtomSet> expected_costable = {{"q"}, {"p", "r"}};
    for (bool external : {true, false}) {
        auto t0 = std::chrono::steady_clock::now();

        std::set<AtomSet> stable =
            true_sets(backend_models(kExample, Semantics::stable, external), g);
        if (stable != expected_stable)
            o.fail(std::string("stable/") + backend_name(external) + ": got " +
                   show_sets(stable) + ", pinned {q}");

        std::set<AtomSet> costable =
            true_sets(backend_models(kExample, Semantics::co_stable, external), g);
        if (costable != expected_costable)
            o.fail(std::string("costable/") + backend_name(external) + ": got " +
                   show_sets(costable) + ", pinned {q} {p,r}");

        std::vector<Model> wfs = backend_models(kExample, Semantics::well_founded, external);
        if (!all_atoms_unknown(wfs, g)) {
            std::string got = detail::render_pipeline_wfs(wfs, g);
            std::string msg = std::string("wfs/") + backend_name(external) + ": got " + got +
                              ", pinned all atoms unknown";
            if (!external)
                msg += " (the alternating-fixpoint oracle decides the guarded loop, q true"
                       " and p, r false; the graph reading keeps it open; the two readings"
                       " genuinely differ on this program)";
            o.fail(msg);
        }

        double dt = seconds_since(t0);
        if (dt >= kSolveBudgetSec)
            o.fail(std::string(backend_name(external)) + " backend took " +
                   std::to_string(dt) + " s, budget " + std::to_string(kSolveBudgetSec));
    }
    if (o.pass) o.note("both backends, three semantics, inside the 5 s budget");
    return o;
}

// ---- criterion 3: loop micro-suite, both backends ----

Outcome criterion3() {
    Outcome o;
    struct Case {
        const char* text;
        Semantics sem;
        std::set<AtomSet> expected;
    };
    const std::vector<Case> cases = {
        {"p :- not q. q :- not p.", Semantics::stable, {{"p"}, {"q"}}},
        {"p :- not q. q :- not r. r :- not p.", Semantics::stable, {}},
        {"p :- q, r. q :- p. r.", Semantics::stable, {{"r"}}},
        {"p :- q, r. q :- p. r.", Semantics::co_stable, {{"r"}, {"p", "q", "r"}}},
        {"p :- q. q :- p.", Semantics::co_stable, {{}, {"p", "q"}}},
    };
    for (const Case& c : cases) {
        DepGraph g = dep(c.text);
        for (bool external : {true, false}) {
            std::set<AtomSet> got = true_sets(backend_models(c.text, c.sem, external), g);
            if (got != c.expected)
                o.fail(std::string("\"") + c.text + "\" " + semantics_flag(c.sem) + "/" +
                       backend_name(external) + ": got " + show_sets(got) + ", pinned " +
                       show_sets(c.expected));
        }
    }
    // positive loop under the well-founded reading: both atoms false
    DepGraph loop = dep("p :- q. q :- p.");
    for (bool external : {true, false}) {
        std::vector<Model> wfs =
            backend_models("p :- q. q :- p.", Semantics::well_founded, external);
        bool ok = wfs.size() == 1 &&
                  wfs[0].assignment.at(NodeId::atom("p")) == TruthValue::False &&
                  wfs[0].assignment.at(NodeId::atom("q")) == TruthValue::False;
        if (!ok)
            o.fail(std::string("\"p :- q. q :- p.\" wfs/") + backend_name(external) +
                   ": expected both atoms false, got " +
                   detail::render_pipeline_wfs(wfs, loop));
    }
    if (o.pass) o.note("even, odd, and positive loops behave as pinned on both backends");
    return o;
}

// ---- criterion 4: oracle self-consistency over the exhaustive tiny space ----

Outcome criterion4() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> atoms = detail::corpus_atoms(3);
    std::vector<std::vector<Literal>> bodies = detail::corpus_bodies(atoms, 2);
    std::vector<Rule> universe;
    for (const std::string& head : atoms)
        for (const std::vector<Literal>& body : bodies) universe.push_back(Rule{head, body});

    size_t programs = 0;
    size_t violations = 0;
    std::string first;
    auto examine = [&](const Program& p) {
        ++programs;
        auto blame = [&](const std::string& what) {
            ++violations;
            if (first.empty()) first = what + " on \"" + print_program(p) + "\"";
        };
        std::set<AtomSet> stable = stable_models(p);
        for (const AtomSet& s : stable)
            if (least_model(gl_reduct(p, s)) != s) blame("stable model is not its reduct's least model");
        std::set<AtomSet> costable = co_stable_models(p);
        for (const AtomSet& s : costable) {
            ReductProgram r = gl_reduct(p, s);
            if (detail::immediate_consequences(r, s) != s)
                blame("co-stable model is not a consequence fixpoint");
            AtomSet gfp = greatest_fixpoint_model(r);
            for (const std::string& a : s)
                if (!gfp.count(a)) { blame("co-stable model escapes the greatest fixpoint"); break; }
        }
        if (!stable.empty()) {
            ThreeValuedModel wfs = well_founded_model(p);
            for (const AtomSet& s : stable) {
                for (const std::string& a : wfs.true_set)
                    if (!s.count(a)) { blame("well-founded true atom missing from a stable model"); break; }
                for (const std::string& a : wfs.false_set)
                    if (s.count(a)) { blame("well-founded false atom inside a stable model"); break; }
            }
        }
    };

    Program p;
    examine(p);  // the empty program
    size_t n = universe.size();
    for (size_t i = 0; i < n; ++i) {
        p.rules = {universe[i]};
        examine(p);
        for (size_t j = i + 1; j < n; ++j) {
            p.rules = {universe[i], universe[j]};
            examine(p);
            for (size_t k = j + 1; k < n; ++k) {
                p.rules = {universe[i], universe[j], universe[k]};
                examine(p);
            }
        }
    }

    double dt = seconds_since(t0);
    if (programs != 47972)
        o.fail("enumerated " + std::to_string(programs) + " programs, expected 47972");
    if (violations > 0)
        o.fail(std::to_string(violations) + " violations; first: " + first);
    if (dt >= kSweepBudgetSec)
        o.fail("sweep took " + std::to_string(dt) + " s, budget " +
               std::to_string(kSweepBudgetSec));
    if (o.pass)
        o.note("47972 programs, zero violations, " + std::to_string(dt).substr(0, 5) + " s");
    return o;
}

// ---- criterion 5: differential agreement, pipeline vs oracles ----

Outcome criterion5() {
    Outcome o;

    // Every documented example program must agree under every semantics.
    CorpusConfig ref;
    AgreementReport suite = run_corpus(ref);
    if (!suite.disagreements.empty()) {
        std::string names;
        for (const Disagreement& d : suite.disagreements) {
            if (!names.empty()) names += ", ";
            names += d.name + " [" + semantics_flag(d.semantics) + "]";
        }
        o.fail(std::to_string(suite.disagreements.size()) + " of " +
               std::to_string(suite.total) + " reference checks disagree: " + names +
               " (the graph reading leaves guarded even loops open where the"
               " alternating fixpoint decides them; see the divergence note in the README)");
    }

    // Full tiny space: measure the rate per semantics and archive reproducers.
    std::filesystem::remove_all("acceptance_reproducers");
    CorpusConfig full;
    full.mode = CorpusConfig::Mode::exhaustive;
    full.atoms = 3;
    full.rules = 3;
    full.body = 2;
    full.check.reproducer_dir = "acceptance_reproducers";
    AgreementReport space = run_corpus(full);
    std::map<Semantics, size_t> misses;
    for (const Disagreement& d : space.disagreements) ++misses[d.semantics];
    size_t per = space.total / 3;
    auto rate = [&](Semantics s) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s %.4f%% (%zu/%zu)", semantics_flag(s),
                      100.0 * (per - misses[s]) / per, per - misses[s], per);
        return std::string(buf);
    };
    o.note("full-space agreement: " + rate(Semantics::stable) + ", " +
           rate(Semantics::co_stable) + ", " + rate(Semantics::well_founded) + "; " +
           std::to_string(space.disagreements.size()) +
           " reproducers archived in acceptance_reproducers/");
    return o;
}

// ---- criterion 6: justification soundness and the pinned effective edges ----

Outcome criterion6() {
    Outcome o;
    const std::vector<std::string> texts = {
        kExample,
        "p :- not q. q :- not p.",
        "p :- not q. q :- not r. r :- not p.",
        "p :- q, r. q :- p. r.",
        "p :- q. q :- p.",
    };
    size_t validated = 0;
    for (const std::string& text : texts) {
        DepGraph g = dep(text);
        for (Semantics sem :
             {Semantics::stable, Semantics::co_stable, Semantics::well_founded}) {
            for (bool external : {true, false}) {
                for (const Model& m : backend_models(text, sem, external)) {
                    ValidationReport rep = validate_model(g, m);
                    ++validated;
                    if (!rep.valid)
                        o.fail("\"" + text + "\" " + semantics_flag(sem) + "/" +
                               backend_name(external) + ": model fails validation at " +
                               rep.violations.front().node.display() + " (" +
                               violation_name(rep.violations.front().reason) + ")");
                }
            }
        }
    }

    DepGraph g = dep(kExample);
    auto displays = [&](const Model& m) {
        std::vector<std::string> out;
        for (const SignedEdge& e : effective_edges(g, m)) out.push_back(detail::edge_display(e));
        return out;
    };
    Model stable = extend_atom_set(g, {"q"}, Semantics::stable);
    std::vector<std::string> got = displays(stable);
    std::vector<std::string> want = {"edge(p,q,negative)", "edge(q,conjunct(0),positive)",
                                     "edge(r,conjunct(0),negative)"};
    if (got != want) o.fail("effective edges of the {q} model are off the pin");

    Model alt = extend_atom_set(g, {"p", "r"}, Semantics::co_stable);
    std::vector<std::string> got2 = displays(alt);
    std::vector<std::string> want2 = {"edge(conjunct(0),p,negative)", "edge(p,r,positive)"};
    if (got2 != want2) o.fail("effective edges of the {p,r} model are off the pin");

    if (o.pass)
        o.note(std::to_string(validated) +
               " models validated; both pinned effective-edge sets match");
    return o;
}

// ---- criterion 7: end-to-end latency on the documented examples ----

Outcome criterion7() {
    Outcome o;
    double slowest = 0.0;
    std::string slowest_name;
    for (const auto& [name, text] : reference_suite()) {
        for (Semantics sem :
             {Semantics::stable, Semantics::co_stable, Semantics::well_founded}) {
            auto t0 = std::chrono::steady_clock::now();
            DepGraph g = dep(text);
            solve_external(emit_augmented_program(g, sem));
            double dt = seconds_since(t0);
            if (dt > slowest) {
                slowest = dt;
                slowest_name = name + std::string(" [") + semantics_flag(sem) + "]";
            }
            if (dt >= kPerSolveBudgetSec)
                o.fail(name + std::string(" [") + semantics_flag(sem) + "] took " +
                       std::to_string(dt) + " s, budget 1 s");
        }
    }
    if (o.pass) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "33 transform+solve runs, slowest %s at %.0f ms",
                      slowest_name.c_str(), slowest * 1000.0);
        o.note(buf);
    }
    return o;
}

// ---- criterion 8: byte-identical repeated runs of the CLI ----

Outcome criterion8() {
    Outcome o;
    const char* cli = std::getenv("NLPGS_CLI");
    if (!cli || !*cli) {
        o.fail("NLPGS_CLI is not set; cannot exercise the binary");
        return o;
    }
    detail::TempFile input(std::string(kExample) + "\n");
    auto run_twice = [&](std::vector<std::string> args, const std::string& label) {
        args.insert(args.begin(), cli);
        args.push_back(input.path);
        ProcessResult a = run_process(args, 60.0);
        ProcessResult b = run_process(args, 60.0);
        if (a.exit_code != 0 || b.exit_code != 0)
            o.fail(label + ": nonzero exit (" + std::to_string(a.exit_code) + ", " +
                   std::to_string(b.exit_code) + ")");
        else if (a.out != b.out)
            o.fail(label + ": repeated runs differ");
    };
    run_twice({"transform"}, "transform");
    run_twice({"transform", "--full"}, "transform --full");
    run_twice({"solve"}, "solve stable");
    run_twice({"solve", "--semantics", "costable"}, "solve costable");
    run_twice({"solve", "--semantics", "wfs"}, "solve wfs");
    if (o.pass) o.note("transform and solve byte-identical across repeated runs");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    using Criterion = Outcome (*)();
    const std::vector<Criterion> criteria = {criterion1, criterion2, criterion3, criterion4,
                                             criterion5, criterion6, criterion7, criterion8};
    int only = 0;
    if (argc > 1) {
        only = std::atoi(argv[1]);
        if (only < 1 || only > static_cast<int>(criteria.size())) {
            std::cerr << "usage: acceptance [1-" << criteria.size() << "]\n";
            return 64;
        }
    }
    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<size_t>(only) != i + 1) continue;
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.notes = {std::string("exception: ") + e.what()};
        }
        std::string detail;
        for (const std::string& n : o.notes) {
            if (!detail.empty()) detail += "; ";
            detail += n;
        }
        std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " - "
                  << detail << "\n";
        if (!o.pass) ++failures;
    }
    return failures;
}

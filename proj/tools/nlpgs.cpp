// nlpgs: transform normal logic programs into their dependency-graph
// encoding, solve them under stable, co-stable, or well-founded semantics,
// justify individual atoms, and differential-check the pipeline against
// native oracle implementations.
//
// Exit codes: 0 success, 1 operational error, 2 unsatisfiable when
// --fail-on-unsat is set, 3 reference-suite disagreement in `check`.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlpgs/checker.hpp"
#include "nlpgs/emitter.hpp"
#include "nlpgs/graph.hpp"
#include "nlpgs/justify.hpp"
#include "nlpgs/oracles.hpp"
#include "nlpgs/parser.hpp"
#include "nlpgs/solver.hpp"

namespace {

using namespace nlpgs;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Semantics parse_semantics(const std::string& flag) {
    if (flag == "stable") return Semantics::stable;
    if (flag == "costable") return Semantics::co_stable;
    if (flag == "wfs") return Semantics::well_founded;
    throw std::runtime_error("unknown semantics '" + flag +
                             "' (expected stable, costable, or wfs)");
}

struct SolveOptions {
    std::string input = "-";
    std::string semantics = "stable";
    std::string backend = "external";
    std::string solver_path;
    std::string format = "text";
    size_t models = 0;  // 0 = all
    double timeout = 30.0;
    bool keep_conjuncts = false;
    bool fail_on_unsat = false;
};

// Full-node models under the requested semantics and backend, plus status.
// Models come back sorted so output is byte-stable across runs.
std::pair<std::vector<Model>, SolveStatus> solve_models(const Program& p, const DepGraph& g,
                                                        const SolveOptions& opt) {
    Semantics sem = parse_semantics(opt.semantics);
    std::vector<Model> models;
    SolveStatus status = SolveStatus::unsatisfiable;
    if (opt.backend == "external") {
        EncodedProgram encoded = emit_augmented_program(g, sem);
        SolveConfig cfg;
        cfg.solver_path = opt.solver_path;
        cfg.model_cap = opt.models;
        cfg.timeout_sec = opt.timeout;
        SolveResult res = solve_external(encoded, cfg);
        models = std::move(res.models);
        status = res.status;
    } else if (opt.backend == "native") {
        // The oracles run on the source program, not a read-back of the
        // graph: conjunct nodes have no faithful rule form, and re-encoding
        // them loses stable-model equivalence.
        if (sem == Semantics::well_founded) {
            ThreeValuedModel m = well_founded_model(p);
            if (m.consistent) models.push_back(extend_three_valued(g, m));
        } else {
            std::set<AtomSet> sets = sem == Semantics::stable ? stable_models(p)
                                                              : co_stable_models(p);
            for (const AtomSet& s : sets) models.push_back(extend_atom_set(g, s, sem));
        }
        status = models.empty() ? SolveStatus::unsatisfiable : SolveStatus::satisfiable;
    } else {
        throw std::runtime_error("unknown backend '" + opt.backend +
                                 "' (expected external or native)");
    }
    std::sort(models.begin(), models.end(),
              [](const Model& a, const Model& b) { return a.assignment < b.assignment; });
    if (opt.models > 0 && models.size() > opt.models) models.resize(opt.models);
    return {std::move(models), status};
}

std::string render_model_line(const Model& m) {
    std::string out;
    for (const auto& [node, value] : m.assignment) {
        if (!out.empty()) out += " ";
        out += node.display() + "=" + truth_name(value);
    }
    return out.empty() ? "{}" : out;
}

int cmd_transform(const std::string& input, bool full, const std::string& dot_path,
                  const std::string& format, const std::string& semantics) {
    Semantics sem = parse_semantics(semantics);
    Program p = parse_program(read_input(input));
    DepGraph g = cnr_to_dependency_graph(build_cnr_graph(p));
    std::string facts = emit_graph_facts(g);
    if (!dot_path.empty()) {
        std::string dot = emit_dot(g);
        if (dot_path == "-") {
            std::cout << dot;
            return 0;
        }
        std::ofstream out(dot_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write DOT file: " + dot_path);
        out << dot;
    }
    if (format == "json") {
        nlohmann::json j;
        nlohmann::json lines = nlohmann::json::array();
        std::istringstream ss(facts);
        std::string line;
        while (std::getline(ss, line)) lines.push_back(line);
        j["facts"] = std::move(lines);
        if (full) j["rules"] = interpreter_rules(sem);
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (full) {
        std::cout << emit_augmented_program(g, sem).full_text();
    } else {
        std::cout << facts;
    }
    return 0;
}

int cmd_solve(const SolveOptions& opt) {
    Program p = parse_program(read_input(opt.input));
    DepGraph g = cnr_to_dependency_graph(build_cnr_graph(p));
    auto [models, status] = solve_models(p, g, opt);
    std::vector<Model> shown;
    for (const Model& m : models)
        shown.push_back(opt.keep_conjuncts ? m : strip_conjuncts(m, g));
    if (opt.format == "json") {
        nlohmann::json j;
        j["semantics"] = opt.semantics;
        j["status"] = status == SolveStatus::satisfiable ? "satisfiable" : "unsatisfiable";
        nlohmann::json rows = nlohmann::json::array();
        for (const Model& m : shown) {
            nlohmann::json row = nlohmann::json::object();
            for (const auto& [node, value] : m.assignment)
                row[node.display()] = truth_name(value);
            rows.push_back(std::move(row));
        }
        j["models"] = std::move(rows);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "semantics: " << opt.semantics << "\n";
        std::cout << "status: "
                  << (status == SolveStatus::satisfiable ? "satisfiable" : "unsatisfiable")
                  << "\n";
        for (size_t i = 0; i < shown.size(); ++i)
            std::cout << "model " << i + 1 << ": " << render_model_line(shown[i]) << "\n";
    }
    if (status == SolveStatus::unsatisfiable && opt.fail_on_unsat) return 2;
    return 0;
}

int cmd_justify(const SolveOptions& opt, size_t model_index, const std::string& atom) {
    Program p = parse_program(read_input(opt.input));
    DepGraph g = cnr_to_dependency_graph(build_cnr_graph(p));
    auto [models, status] = solve_models(p, g, opt);
    if (models.empty()) {
        std::cout << "status: unsatisfiable; nothing to justify\n";
        return 0;
    }
    if (model_index < 1 || model_index > models.size())
        throw std::runtime_error("model index " + std::to_string(model_index) +
                                 " out of range (have " + std::to_string(models.size()) +
                                 " models)");
    const Model& m = models[model_index - 1];
    ValidationReport report = validate_model(g, m);
    std::vector<NodeId> targets;
    if (!atom.empty()) {
        auto node = detail::node_from_display(atom);
        if (!node || !g.has_node(*node))
            throw std::runtime_error("atom '" + atom + "' does not occur in the program");
        targets.push_back(*node);
    } else {
        for (const NodeId& n : g.nodes)
            if (n.kind == NodeKind::atom) targets.push_back(n);
        std::sort(targets.begin(), targets.end(),
                  [](const NodeId& a, const NodeId& b) { return a.display() < b.display(); });
    }
    Semantics sem = parse_semantics(opt.semantics);
    std::vector<SignedEdge> effective = effective_edges(g, m);
    bool all_unknown = effective.empty() &&
                       std::all_of(g.nodes.begin(), g.nodes.end(), [&](const NodeId& n) {
                           return n.kind != NodeKind::atom ||
                                  m.assignment.at(n) == TruthValue::Unknown;
                       });
    if (opt.format == "json") {
        nlohmann::json j;
        j["model"] = model_index;
        j["semantics"] = opt.semantics;
        j["valid"] = report.valid;
        if (sem == Semantics::well_founded && all_unknown)
            j["summary"] = "no effective edges; all atoms unknown";
        nlohmann::json trees = nlohmann::json::array();
        for (const NodeId& n : targets)
            trees.push_back(nlohmann::json::parse(
                render_justification(justify_atom(g, m, n), m, JustifyFormat::json)));
        j["trees"] = std::move(trees);
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "model " << model_index << " of " << models.size() << " (" << opt.semantics
              << "): " << render_model_line(strip_conjuncts(m, g)) << "\n";
    if (!report.valid) {
        for (const Violation& v : report.violations)
            std::cout << "validation violation: " << v.node.display() << " ("
                      << violation_name(v.reason) << ")\n";
    }
    if (sem == Semantics::well_founded && all_unknown) {
        std::cout << "no effective edges; all atoms unknown\n";
        if (atom.empty()) return 0;
    }
    for (const NodeId& n : targets) {
        std::cout << "\n"
                  << render_justification(justify_atom(g, m, n), m, JustifyFormat::text);
    }
    return 0;
}

struct CheckOptions {
    bool reference_suite = false;
    bool exhaustive = false;
    bool random_mode = false;
    size_t atoms = 3;
    size_t rules = 3;
    size_t body = 2;
    size_t count = 100;
    uint64_t seed = 0;
    std::string semantics;  // empty = all three
    std::string backend = "native";
    std::string solver_path;
    std::string reproducer_dir;
    std::string format = "text";
    double timeout = 30.0;
};

int cmd_check(const CheckOptions& opt) {
    int modes = int(opt.reference_suite) + int(opt.exhaustive) + int(opt.random_mode);
    if (modes > 1)
        throw std::runtime_error(
            "pick one of --reference-suite, --exhaustive, --random");
    CorpusConfig cfg;
    if (opt.exhaustive) cfg.mode = CorpusConfig::Mode::exhaustive;
    else if (opt.random_mode) cfg.mode = CorpusConfig::Mode::random;
    else cfg.mode = CorpusConfig::Mode::reference_suite;
    cfg.atoms = opt.atoms;
    cfg.rules = opt.rules;
    cfg.body = opt.body;
    cfg.count = opt.count;
    cfg.seed = opt.seed;
    if (!opt.semantics.empty()) cfg.semantics = {parse_semantics(opt.semantics)};
    cfg.check.backend = opt.backend == "external" ? CheckBackend::subprocess
                                                  : CheckBackend::in_process;
    cfg.check.solver_path = opt.solver_path;
    cfg.check.timeout_sec = opt.timeout;
    cfg.check.reproducer_dir = opt.reproducer_dir;
    AgreementReport report = run_corpus(cfg);
    std::cout << render_report(report,
                               opt.format == "json" ? ReportFormat::json : ReportFormat::text);
    if (cfg.mode == CorpusConfig::Mode::reference_suite && !report.disagreements.empty())
        return 3;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dependency-graph transformation and solving for normal logic programs"};
    app.require_subcommand(1);

    // transform
    auto* transform = app.add_subcommand(
        "transform", "emit the dependency graph of a program as facts");
    std::string t_input = "-";
    bool t_full = false;
    std::string t_dot, t_format = "text", t_semantics = "stable";
    transform->add_option("input", t_input, "program file, or - for stdin");
    transform->add_flag("--full", t_full, "append the interpreter rules");
    transform->add_option("--semantics", t_semantics,
                          "rule bank appended by --full: stable, costable, or wfs")
        ->check(CLI::IsMember({"stable", "costable", "wfs"}));
    transform->add_option("--dot", t_dot, "write a DOT rendering to this path (- for stdout)");
    transform->add_option("--format", t_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    // solve
    auto* solve = app.add_subcommand("solve", "solve a program under a chosen semantics");
    SolveOptions s_opt;
    solve->add_option("input", s_opt.input, "program file, or - for stdin");
    solve->add_option("--semantics", s_opt.semantics, "stable, costable, or wfs")
        ->check(CLI::IsMember({"stable", "costable", "wfs"}));
    solve->add_option("--backend", s_opt.backend, "external solver or native oracle")
        ->check(CLI::IsMember({"external", "native"}));
    solve->add_option("--models", s_opt.models, "model cap, 0 = all");
    solve->add_option("--timeout", s_opt.timeout, "solver timeout in seconds");
    solve->add_option("--solver", s_opt.solver_path, "solver executable path");
    solve->add_flag("--keep-conjuncts", s_opt.keep_conjuncts,
                    "keep conjunct and constraint nodes in model output");
    solve->add_flag("--fail-on-unsat", s_opt.fail_on_unsat,
                    "exit with code 2 when the program is unsatisfiable");
    solve->add_option("--format", s_opt.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    // justify
    auto* justify = app.add_subcommand(
        "justify", "explain each atom of a model through its effective edges");
    SolveOptions j_opt;
    size_t j_model = 1;
    std::string j_atom;
    justify->add_option("input", j_opt.input, "program file, or - for stdin");
    justify->add_option("--semantics", j_opt.semantics, "stable, costable, or wfs")
        ->check(CLI::IsMember({"stable", "costable", "wfs"}));
    justify->add_option("--backend", j_opt.backend, "external solver or native oracle")
        ->check(CLI::IsMember({"external", "native"}));
    justify->add_option("--model", j_model, "1-based model index");
    justify->add_option("--atom", j_atom, "justify a single atom");
    justify->add_option("--timeout", j_opt.timeout, "solver timeout in seconds");
    justify->add_option("--solver", j_opt.solver_path, "solver executable path");
    justify->add_option("--format", j_opt.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    // check
    auto* check = app.add_subcommand(
        "check", "differential-check the pipeline against the native oracles");
    CheckOptions c_opt;
    check->add_flag("--reference-suite", c_opt.reference_suite,
                    "run the fixed suite of documented example programs");
    check->add_flag("--exhaustive", c_opt.exhaustive,
                    "enumerate every program within the size bounds");
    check->add_flag("--random", c_opt.random_mode, "sample seeded random programs");
    check->add_option("--atoms", c_opt.atoms, "atom count bound");
    check->add_option("--rules", c_opt.rules, "rule count bound");
    check->add_option("--body", c_opt.body, "body length bound");
    check->add_option("--count", c_opt.count, "random program count");
    check->add_option("--seed", c_opt.seed, "random seed");
    check->add_option("--semantics", c_opt.semantics,
                      "restrict to one semantics (default: all three)")
        ->check(CLI::IsMember({"stable", "costable", "wfs"}));
    check->add_option("--backend", c_opt.backend,
                      "native in-process engine or external subprocess")
        ->check(CLI::IsMember({"external", "native"}));
    check->add_option("--solver", c_opt.solver_path, "solver executable path");
    check->add_option("--timeout", c_opt.timeout, "per-program solver timeout in seconds");
    check->add_option("--reproducers", c_opt.reproducer_dir,
                      "archive disagreeing programs into this directory");
    check->add_option("--format", c_opt.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (transform->parsed())
            return cmd_transform(t_input, t_full, t_dot, t_format, t_semantics);
        if (solve->parsed()) return cmd_solve(s_opt);
        if (justify->parsed()) return cmd_justify(j_opt, j_model, j_atom);
        if (check->parsed()) return cmd_check(c_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "nlpgs/miniasp.hpp"
#include "nlpgs/oracles.hpp"
#include "nlpgs/parser.hpp"
#include "nlpgs/solver.hpp"

using namespace nlpgs;

namespace {

std::set<std::set<std::string>> model_sets(const std::string& text) {
    miniasp::Result r = miniasp::solve_text(text, 0);
    return {r.models.begin(), r.models.end()};
}

}  // namespace

TEST_CASE("propositional programs solve to their stable models") {
    CHECK(model_sets("p :- not q. q :- not p.") ==
          std::set<std::set<std::string>>{{"p"}, {"q"}});
    CHECK(model_sets("p :- not q. q :- not r. r :- not p.").empty());
    CHECK(model_sets("a :- b. b :- a.") == std::set<std::set<std::string>>{{}});
    CHECK(model_sets("p :- q, r. q :- p. r.") == std::set<std::set<std::string>>{{"r"}});
    CHECK(model_sets("p :- not q. q :- not p. :- p.") ==
          std::set<std::set<std::string>>{{"q"}});
    CHECK(model_sets("p. q :- p, not r.") == std::set<std::set<std::string>>{{"p", "q"}});
    CHECK(model_sets("") == std::set<std::set<std::string>>{{}});
}

TEST_CASE("never-derivable negated atoms drop out at instantiation") {
    CHECK(model_sets("p :- not q.") == std::set<std::set<std::string>>{{"p"}});
    CHECK(model_sets(":- not q.").empty());
}

TEST_CASE("the model cap stops enumeration and marks the result unexhausted") {
    miniasp::Result all = miniasp::solve_text("p :- not q. q :- not p.", 0);
    CHECK(all.models.size() == 2);
    CHECK(all.exhausted);
    CHECK(miniasp::exit_code(all) == 30);

    miniasp::Result one = miniasp::solve_text("p :- not q. q :- not p.", 1);
    CHECK(one.models.size() == 1);
    CHECK_FALSE(one.exhausted);
    CHECK(miniasp::exit_code(one) == 10);

    miniasp::Result unsat = miniasp::solve_text("p. :- p.", 0);
    CHECK(unsat.models.empty());
    CHECK(miniasp::exit_code(unsat) == 20);
}

TEST_CASE("variables ground over the positive closure") {
    std::set<std::set<std::string>> paths = model_sets(
        "edge(a,b). edge(b,c). path(X,Y) :- edge(X,Y). "
        "path(X,Z) :- edge(X,Y), path(Y,Z).");
    REQUIRE(paths.size() == 1);
    CHECK(*paths.begin() == std::set<std::string>{"edge(a,b)", "edge(b,c)", "path(a,b)",
                                                  "path(a,c)", "path(b,c)"});

    CHECK(model_sets("node(a). node(b). colored(a). "
                     "uncolored(X) :- node(X), not colored(X).") ==
          std::set<std::set<std::string>>{
              {"colored(a)", "node(a)", "node(b)", "uncolored(b)"}});
}

TEST_CASE("compound terms, numbers, and anonymous variables") {
    CHECK(model_sets("p(f(a)). q(X) :- p(f(X)).") ==
          std::set<std::set<std::string>>{{"p(f(a))", "q(a)"}});
    CHECK(model_sets("n(1). n(2). bad(2). m(X) :- n(X), not bad(X).") ==
          std::set<std::set<std::string>>{{"bad(2)", "m(1)", "n(1)", "n(2)"}});
    CHECK(model_sets("p(a). p(b). q :- p(_).") ==
          std::set<std::set<std::string>>{{"p(a)", "p(b)", "q"}});
    CHECK(model_sets("n(-3). m(X) :- n(X).") ==
          std::set<std::set<std::string>>{{"m(-3)", "n(-3)"}});
}

TEST_CASE("#show restricts the reported atoms") {
    CHECK(model_sets("#show q/1.\np(a). q(b) :- p(a).") ==
          std::set<std::set<std::string>>{{"q(b)"}});
    CHECK(model_sets("#show t/0.\np. t :- p.") ==
          std::set<std::set<std::string>>{{"t"}});
    // several #show lines accumulate
    CHECK(model_sets("#show a/0.\n#show b/0.\na. b :- a. c :- b.") ==
          std::set<std::set<std::string>>{{"a", "b"}});
}

TEST_CASE("unsafe and malformed input is refused") {
    CHECK_THROWS_WITH(miniasp::solve_text("p(X) :- not q(X).", 0),
                      Catch::Matchers::ContainsSubstring("unsafe variable X") &&
                          Catch::Matchers::ContainsSubstring("positive body literal"));
    CHECK_THROWS_AS(miniasp::solve_text("p :- .", 0), miniasp::SolveError);
    CHECK_THROWS_AS(miniasp::solve_text("p", 0), miniasp::SolveError);
    CHECK_THROWS_AS(miniasp::solve_text("#maximize p.", 0), miniasp::SolveError);
    CHECK_THROWS_AS(miniasp::solve_text("p(a,).", 0), miniasp::SolveError);
}

TEST_CASE("report format matches the clingo conventions") {
    miniasp::Result two = miniasp::solve_text("p :- not q. q :- not p.", 0);
    CHECK(miniasp::format_output(two, "test.lp") ==
          "miniasp version 1.0.0\n"
          "Reading from test.lp\n"
          "Solving...\n"
          "Answer: 1\n"
          "p\n"
          "Answer: 2\n"
          "q\n"
          "SATISFIABLE\n"
          "\n"
          "Models       : 2\n");

    miniasp::Result unsat = miniasp::solve_text("p. :- p.", 0);
    CHECK(miniasp::format_output(unsat, "in.lp") ==
          "miniasp version 1.0.0\n"
          "Reading from in.lp\n"
          "Solving...\n"
          "UNSATISFIABLE\n"
          "\n"
          "Models       : 0\n");

    miniasp::Result capped = miniasp::solve_text("p :- not q. q :- not p.", 1);
    CHECK_THAT(miniasp::format_output(capped, "x"),
               Catch::Matchers::EndsWith("Models       : 1+\n"));
}

namespace {

Program random_tiny_program(std::mt19937_64& rng) {
    const std::vector<std::string> atoms = {"p", "q", "r"};
    Program p;
    size_t nrules = rng() % 5;
    for (size_t i = 0; i < nrules; ++i) {
        Rule r;
        if (rng() % 6 != 0) r.head = atoms[rng() % atoms.size()];
        size_t nbody = r.head ? rng() % 3 : 1 + rng() % 2;
        for (size_t j = 0; j < nbody; ++j)
            r.body.push_back({atoms[rng() % atoms.size()],
                              rng() % 2 ? Sign::negative : Sign::positive});
        p.rules.push_back(std::move(r));
    }
    return p;
}

}  // namespace

TEST_CASE("property: search agrees with the brute-force stable oracle") {
    std::mt19937_64 rng(271828);
    for (int i = 0; i < 3000; ++i) {
        Program p = random_tiny_program(rng);
        std::set<AtomSet> expected = stable_models(p);
        std::set<std::set<std::string>> got = model_sets(print_program(p));
        if (got != expected) {
            CAPTURE(print_program(p));
            REQUIRE(got == expected);
        }
    }
}

TEST_CASE("property: every reported model is exhausted-search complete") {
    // With a cap of k the first k models must be a prefix-consistent subset
    // of the full enumeration.
    std::mt19937_64 rng(161803);
    for (int i = 0; i < 300; ++i) {
        Program p = random_tiny_program(rng);
        std::string text = print_program(p);
        miniasp::Result all = miniasp::solve_text(text, 0);
        REQUIRE(all.exhausted);
        for (long cap = 1; cap <= 2; ++cap) {
            miniasp::Result some = miniasp::solve_text(text, cap);
            size_t expect = std::min<size_t>(cap, all.models.size());
            REQUIRE(some.models.size() == expect);
            for (size_t k = 0; k < expect; ++k) REQUIRE(some.models[k] == all.models[k]);
        }
    }
}

TEST_CASE("solver binary: files, stdin, exit codes") {
    std::string solver = testutil::env_or("NLPGS_SOLVER");
    REQUIRE_FALSE(solver.empty());

    detail::TempFile input("p :- not q. q :- not p.\n");
    ProcessResult all = run_process({solver, input.path, "0"}, 30.0);
    CHECK(all.exit_code == 30);
    CHECK_THAT(all.out, Catch::Matchers::ContainsSubstring("Answer: 2"));
    CHECK_THAT(all.out, Catch::Matchers::ContainsSubstring("SATISFIABLE"));

    ProcessResult capped = run_process({solver, input.path}, 30.0);
    CHECK(capped.exit_code == 10);
    CHECK_THAT(capped.out, Catch::Matchers::ContainsSubstring("Models       : 1+"));

    detail::TempFile unsat("p. :- p.\n");
    ProcessResult u = run_process({solver, unsat.path, "0"}, 30.0);
    CHECK(u.exit_code == 20);
    CHECK_THAT(u.out, Catch::Matchers::ContainsSubstring("UNSATISFIABLE"));

    ProcessResult from_stdin =
        run_process({"/bin/sh", "-c", "echo 'p.' | '" + solver + "' - 0"}, 30.0);
    CHECK(from_stdin.exit_code == 30);
    CHECK_THAT(from_stdin.out, Catch::Matchers::ContainsSubstring("Reading from stdin"));

    CHECK(run_process({solver}, 30.0).exit_code == 65);
    CHECK(run_process({solver, "/nonexistent/input.lp", "0"}, 30.0).exit_code == 65);
    CHECK(run_process({solver, input.path, "-2"}, 30.0).exit_code == 65);
    detail::TempFile bad("p :- not not q.\n");
    ProcessResult b = run_process({solver, bad.path, "0"}, 30.0);
    CHECK(b.exit_code == 65);
    CHECK_THAT(b.err, Catch::Matchers::ContainsSubstring("error"));
}

#pragma once

/// Subprocess backend: runs the augmented program through a CLINGO-compatible
// solver ("<solver> FILE N" with N the model cap, 0 = all), parses the text
// output, and maps shown true/false/unknown atoms onto graph nodes. Solver
// resolution order: explicit path, NLPGS_SOLVER, clingo on PATH, the bundled
// miniasp next to the running binary.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "emitter.hpp"
#include "graph.hpp"

namespace nlpgs {

enum class TruthValue { True, False, Unknown };

inline const char* truth_name(TruthValue v) {
    switch (v) {
        case TruthValue::True: return "true";
        case TruthValue::False: return "false";
        case TruthValue::Unknown: return "unknown";
    }
    return {};
}

struct Model {
    std::map<NodeId, TruthValue> assignment;
    Semantics semantics = Semantics::stable;
};

enum class SolveStatus { satisfiable, unsatisfiable };

struct SolveStats {
    double wall_seconds = 0.0;
    size_t model_count = 0;
};

struct SolveResult {
    SolveStatus status = SolveStatus::unsatisfiable;
    std::vector<Model> models;
    SolveStats stats;
};

struct SolverError : std::runtime_error {
    int exit_code = 0;
    std::string stderr_text;
    std::string program_text;

    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
    SolverError(const std::string& msg, int code, std::string err, std::string prog)
        : std::runtime_error(msg + (err.empty() ? "" : "\nsolver stderr:\n" + err)),
          exit_code(code), stderr_text(std::move(err)), program_text(std::move(prog)) {}
};

struct SolveConfig {
    std::string solver_path;  // empty: resolve automatically
    long model_cap = 0;       // 0 = enumerate all
    double timeout_sec = 30.0;
};

namespace detail {

inline bool is_executable(const std::string& path) {
    return !path.empty() && ::access(path.c_str(), X_OK) == 0;
}

inline std::string self_directory() {
    char buf[4096];
    ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
    if (n <= 0) return {};
    buf[n] = '\0';
    std::string p(buf);
    size_t slash = p.find_last_of('/');
    return slash == std::string::npos ? std::string{} : p.substr(0, slash);
}

inline std::string find_on_path(const std::string& name) {
    const char* path = std::getenv("PATH");
    if (!path) return {};
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        if (dir.empty()) continue;
        std::string candidate = dir + "/" + name;
        if (is_executable(candidate)) return candidate;
    }
    return {};
}

}  // namespace detail

inline std::string resolve_solver_path(const std::string& explicit_path = {}) {
    if (!explicit_path.empty()) {
        if (!detail::is_executable(explicit_path))
            throw SolverError("solver not found or not executable: " + explicit_path);
        return explicit_path;
    }
    if (const char* env = std::getenv("NLPGS_SOLVER"); env && *env) {
        if (!detail::is_executable(env))
            throw SolverError(std::string("NLPGS_SOLVER is not executable: ") + env);
        return env;
    }
    if (std::string p = detail::find_on_path("clingo"); !p.empty()) return p;
    if (std::string dir = detail::self_directory(); !dir.empty()) {
        std::string sibling = dir + "/miniasp";
        if (detail::is_executable(sibling)) return sibling;
    }
    throw SolverError(
        "no solver available: pass --solver, set NLPGS_SOLVER, or put clingo on PATH");
}

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string out;
    std::string err;
};

// fork/exec with both output streams captured and a hard wall-clock kill.
inline ProcessResult run_process(const std::vector<std::string>& argv, double timeout_sec) {
    int out_pipe[2], err_pipe[2];
    if (::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0)
        throw SolverError("pipe() failed: " + std::string(std::strerror(errno)));
    pid_t pid = ::fork();
    if (pid < 0) throw SolverError("fork() failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::dup2(err_pipe[1], STDERR_FILENO);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::close(err_pipe[0]);
        ::close(err_pipe[1]);
        std::vector<char*> cargv;
        for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        ::execvp(cargv[0], cargv.data());
        ::_exit(127);
    }
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    ProcessResult res;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(timeout_sec));
    struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    bool open_fd[2] = {true, true};
    std::string* sinks[2] = {&res.out, &res.err};
    while (open_fd[0] || open_fd[1]) {
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                             deadline - std::chrono::steady_clock::now())
                             .count();
        if (remaining <= 0) {
            res.timed_out = true;
            ::kill(pid, SIGKILL);
            break;
        }
        for (int i = 0; i < 2; ++i) fds[i].events = open_fd[i] ? POLLIN : 0;
        int rc = ::poll(fds, 2, static_cast<int>(std::min<long long>(remaining, 1000)));
        if (rc < 0) {
            if (errno == EINTR) continue;
            ::kill(pid, SIGKILL);
            break;
        }
        for (int i = 0; i < 2; ++i) {
            if (!open_fd[i] || !(fds[i].revents & (POLLIN | POLLHUP))) continue;
            char buf[65536];
            ssize_t n = ::read(fds[i].fd, buf, sizeof(buf));
            if (n > 0) sinks[i]->append(buf, static_cast<size_t>(n));
            else open_fd[i] = false;
        }
    }
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);
    int status = 0;
    // After SIGKILL or stream EOF the wait should be immediate; guard anyway.
    auto hard_deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
    for (;;) {
        pid_t done = ::waitpid(pid, &status, WNOHANG);
        if (done == pid) break;
        if (done < 0 && errno != EINTR) break;
        if (std::chrono::steady_clock::now() > hard_deadline) {
            ::kill(pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            break;
        }
        ::usleep(2000);
    }
    if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status)) res.exit_code = 128 + WTERMSIG(status);
    return res;
}

namespace detail {

struct TempFile {
    std::string path;
    TempFile(const std::string& contents) {
        char tmpl[] = "/tmp/nlpgs_XXXXXX";
        int fd = ::mkstemp(tmpl);
        if (fd < 0) throw SolverError("mkstemp failed: " + std::string(std::strerror(errno)));
        path = tmpl;
        size_t off = 0;
        while (off < contents.size()) {
            ssize_t n = ::write(fd, contents.data() + off, contents.size() - off);
            if (n <= 0) {
                ::close(fd);
                throw SolverError("writing solver input failed");
            }
            off += static_cast<size_t>(n);
        }
        ::close(fd);
    }
    ~TempFile() {
        if (!path.empty()) ::unlink(path.c_str());
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
};

// Shown atoms name nodes by display form; reverse that mapping.
inline std::optional<NodeId> node_from_display(const std::string& s) {
    if (s == "constraint") return NodeId::constraint();
    if (s.rfind("conjunct(", 0) == 0 && s.back() == ')') {
        std::string digits = s.substr(9, s.size() - 10);
        if (digits.empty() ||
            !std::all_of(digits.begin(), digits.end(),
                         [](unsigned char c) { return std::isdigit(c); }))
            return std::nullopt;
        return NodeId::conjunct(std::stoul(digits));
    }
    if (!is_valid_atom_name(s)) return std::nullopt;
    return NodeId::atom(s);
}

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

struct ParsedOutput {
    std::vector<Model> models;
    SolveStatus status = SolveStatus::unsatisfiable;
};

// Parses clingo-style text output: each "Answer: k" line is followed by one
// line of shown atoms; a SATISFIABLE or UNSATISFIABLE verdict closes the run.
// Atoms other than true/1, false/1, unknown/1 are ignored.
inline ParsedOutput parse_solver_output(const std::string& raw) {
    ParsedOutput out;
    std::vector<std::string> lines;
    {
        std::stringstream ss(raw);
        std::string line;
        while (std::getline(ss, line)) lines.push_back(line);
    }
    bool verdict_seen = false;
    bool sat = false;
    for (size_t i = 0; i < lines.size(); ++i) {
        std::string t = detail::trim(lines[i]);
        if (t.rfind("Answer:", 0) == 0) {
            if (i + 1 >= lines.size())
                throw SolverError("solver output ends inside an answer block:\n" + raw);
            Model m;
            std::stringstream atoms(lines[i + 1]);
            std::string tok;
            while (atoms >> tok) {
                size_t open = tok.find('(');
                if (open == std::string::npos || tok.back() != ')') continue;
                std::string pred = tok.substr(0, open);
                TruthValue v;
                if (pred == "true") v = TruthValue::True;
                else if (pred == "false") v = TruthValue::False;
                else if (pred == "unknown") v = TruthValue::Unknown;
                else continue;
                std::string inner = tok.substr(open + 1, tok.size() - open - 2);
                auto node = detail::node_from_display(inner);
                if (!node)
                    throw SolverError("unparseable node name in solver output: " + tok);
                auto [it, inserted] = m.assignment.emplace(*node, v);
                if (!inserted && it->second != v)
                    throw SolverError("contradictory assignment in solver output: " + tok);
            }
            out.models.push_back(std::move(m));
            ++i;
        } else if (t == "SATISFIABLE") {
            verdict_seen = true;
            sat = true;
        } else if (t == "UNSATISFIABLE") {
            verdict_seen = true;
            sat = false;
        }
    }
    if (!verdict_seen)
        throw SolverError("no SATISFIABLE/UNSATISFIABLE verdict in solver output:\n" + raw);
    if (!sat && !out.models.empty())
        throw SolverError("solver reported UNSATISFIABLE but printed answers:\n" + raw);
    out.status = sat ? SolveStatus::satisfiable : SolveStatus::unsatisfiable;
    return out;
}

inline std::vector<Model> parse_answer_sets(const std::string& raw) {
    return parse_solver_output(raw).models;
}

namespace detail {

// Node set as emitted, recovered from the facts block's node/1 lines.
inline std::vector<NodeId> nodes_from_facts(const std::string& facts_text) {
    std::vector<NodeId> nodes;
    std::stringstream ss(facts_text);
    std::string line;
    while (std::getline(ss, line)) {
        std::string t = trim(line);
        if (t.rfind("node(", 0) != 0 || t.size() < 7 || t.substr(t.size() - 2) != ").")
            continue;
        auto node = node_from_display(t.substr(5, t.size() - 7));
        if (node) nodes.push_back(*node);
    }
    return nodes;
}

}  // namespace detail

// Restricts parsed models to the encoding's node set (the well-founded bank
// derives unknown(constraint) even without a constraint node; that helper
// atom is dropped), checks totality, and stamps the semantics.
inline std::vector<Model> bind_models(const std::vector<Model>& parsed,
                                      const EncodedProgram& e) {
    std::vector<NodeId> nodes = detail::nodes_from_facts(e.facts_text);
    std::set<NodeId> node_set(nodes.begin(), nodes.end());
    std::vector<Model> out;
    for (const Model& m : parsed) {
        Model kept;
        kept.semantics = e.semantics;
        for (const auto& [node, value] : m.assignment)
            if (node_set.count(node)) kept.assignment.emplace(node, value);
        if (kept.assignment.size() != node_set.size()) {
            std::string missing;
            for (const NodeId& n : nodes)
                if (!kept.assignment.count(n))
                    missing += (missing.empty() ? "" : ", ") + n.display();
            throw SolverError("solver answer does not cover the node set (missing: " +
                              missing + ")");
        }
        out.push_back(std::move(kept));
    }
    return out;
}

// Runs the solver on the encoded program and maps each answer onto the
// graph's nodes.
inline SolveResult solve_external(const EncodedProgram& e, const SolveConfig& cfg = {}) {
    std::string solver = resolve_solver_path(cfg.solver_path);
    std::string text = e.full_text();
    detail::TempFile file(text);
    auto t0 = std::chrono::steady_clock::now();
    ProcessResult proc =
        run_process({solver, file.path, std::to_string(cfg.model_cap)}, cfg.timeout_sec);
    auto t1 = std::chrono::steady_clock::now();
    if (proc.timed_out)
        throw SolverError("solver timed out after " + std::to_string(cfg.timeout_sec) +
                          " s", -1, proc.err, text);
    if (proc.exit_code == 127)
        throw SolverError("solver could not be executed: " + solver, 127, proc.err, text);
    ParsedOutput parsed;
    try {
        parsed = parse_solver_output(proc.out);
    } catch (const SolverError&) {
        throw SolverError("solver failed (exit " + std::to_string(proc.exit_code) +
                          ") on program:\n" + text, proc.exit_code, proc.err, text);
    }
    SolveResult result;
    result.status = parsed.status;
    result.models = bind_models(parsed.models, e);
    result.stats.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    result.stats.model_count = result.models.size();
    return result;
}

// Drops conjunct and constraint bookkeeping nodes; atom values are untouched.
inline Model strip_conjuncts(const Model& m, const DepGraph& g) {
    (void)g;
    Model out;
    out.semantics = m.semantics;
    for (const auto& [node, value] : m.assignment)
        if (node.kind == NodeKind::atom) out.assignment.emplace(node, value);
    return out;
}

}  // namespace nlpgs

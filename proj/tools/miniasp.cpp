// Standalone solver binary: miniasp FILE [MODELS]
// MODELS caps enumeration (0 = all, default 1, matching clingo's default).
// Exit codes follow clingo: 10 sat, 20 unsat, 30 sat and exhausted, 65 on
// input errors.

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nlpgs/miniasp.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args.size() > 2) {
        std::cerr << "usage: miniasp FILE [MODELS]\n";
        return 65;
    }
    long cap = 1;
    if (args.size() == 2) {
        try {
            size_t used = 0;
            cap = std::stol(args[1], &used);
            if (used != args[1].size() || cap < 0) throw std::invalid_argument(args[1]);
        } catch (const std::exception&) {
            std::cerr << "miniasp: bad model count '" << args[1] << "'\n";
            return 65;
        }
    }
    std::string text;
    if (args[0] == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        std::ifstream in(args[0]);
        if (!in) {
            std::cerr << "miniasp: cannot open " << args[0] << "\n";
            return 65;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        nlpgs::miniasp::Result res = nlpgs::miniasp::solve_text(text, cap);
        std::cout << nlpgs::miniasp::format_output(res, args[0] == "-" ? "stdin" : args[0]);
        return nlpgs::miniasp::exit_code(res);
    } catch (const std::exception& e) {
        std::cerr << "miniasp: error: " << e.what() << "\n";
        return 65;
    }
}

#pragma once

/// \file cli.hpp
/// \brief The `ptree` command-line front end.
///
/// Exit codes: 0 ok, 1 usage, 2 invalid input, 3 evaluation error.

#include "ptree/io.hpp"
#include "ptree/mincut.hpp"
#include "ptree/query.hpp"
#include "ptree/transforms.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace ptree::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInvalidInput = 2, kEvaluationError = 3 };

/// Input file or text could not be read, parsed or validated.
class InputError : public Error {
public:
    using Error::Error;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

inline ProbabilityTree load_tree_file(const std::string& path) {
    try {
        return load_json(read_file(path));
    } catch (const InvalidTreeError& e) {
        throw InputError(path + ": " + e.what());
    } catch (const ParseError& e) {
        throw InputError(path + ": " + e.what());
    } catch (const SchemaError& e) {
        throw InputError(path + ": " + e.what());
    }
}

template <class F>
auto parse_input(F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw InputError(e.what());
    }
}

inline std::string format_probability(const Prob& p) {
    std::ostringstream os;
    os << p.str() << " (" << std::fixed << std::setprecision(6) << p.to_double() << ")";
    return os.str();
}

/// Edges whose probability differs between two trees of the same shape.
inline std::vector<std::string> changed_edges(const ProbabilityTree& before, const ProbabilityTree& after) {
    std::vector<std::string> out;
    for (const auto& n : after.nodes()) {
        const Node* old = before.find(n.id);
        if (!old || old->transitions.size() != n.transitions.size()) continue;
        for (std::size_t k = 0; k < n.transitions.size(); ++k)
            if (old->transitions[k].prob != n.transitions[k].prob)
                out.push_back(std::to_string(n.id) + " -> " + std::to_string(n.transitions[k].child) + ": " +
                              old->transitions[k].prob.short_str() + " => " + n.transitions[k].prob.short_str());
    }
    return out;
}

inline std::string describe_tree(const ProbabilityTree& tree) {
    std::ostringstream os;
    for (const auto& n : tree.nodes()) {
        os << n.id << ":";
        for (const auto& s : n.statements) os << " " << s.str();
        if (!n.transitions.empty()) {
            os << "  ->";
            for (const auto& t : n.transitions) os << " " << t.child << "@" << t.prob.short_str();
        }
        os << "\n";
    }
    return os.str();
}

// =============================================================================
// REPL
// =============================================================================

/// `current` is always the replay of `history` over `reference`.
struct ReplState {
    ProbabilityTree reference;
    ProbabilityTree current;
    std::vector<PipelineStep> history;

    explicit ReplState(ProbabilityTree tree) : reference(tree), current(std::move(tree)) {}

    static ProbabilityTree replay(const ProbabilityTree& reference, const std::vector<PipelineStep>& steps) {
        PipelineState state(reference);
        for (const auto& s : steps) state.apply(s);
        return state.current;
    }

    void push(PipelineStep step) {
        auto steps = history;
        steps.push_back(std::move(step));
        current = replay(reference, steps);  // throws before touching history
        history = std::move(steps);
    }

    bool undo() {
        if (history.empty()) return false;
        history.pop_back();
        current = replay(reference, history);
        return true;
    }

    void reset() {
        history.clear();
        current = reference;
    }
};

inline void run_repl(ReplState& state, std::istream& in, std::ostream& out, std::ostream& err) {
    std::string line;
    const auto report_change = [&](const ProbabilityTree& before) {
        const auto edges = changed_edges(before, state.current);
        if (edges.empty()) out << "no edges changed\n";
        for (const auto& e : edges) out << "  " << e << "\n";
    };
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string cmd;
        ls >> cmd;
        std::string rest;
        std::getline(ls, rest);
        if (cmd.empty() || cmd[0] == '#') continue;
        try {
            if (cmd == "quit" || cmd == "exit") break;
            if (cmd == "see" || cmd == "do" || cmd == "cf") {
                Event e = parse_event(rest);
                const auto kind = cmd == "see" ? PipelineStep::Kind::See
                                               : (cmd == "do" ? PipelineStep::Kind::Do : PipelineStep::Kind::Cf);
                const ProbabilityTree before = state.current;
                state.push({kind, std::move(e)});
                out << "applied " << format_step(state.history.back()) << "\n";
                report_change(before);
            } else if (cmd == "p") {
                const Event e = parse_event(rest);
                out << format_probability(event_probability(state.current, mincut_of_expr(state.current, e)))
                    << "\n";
            } else if (cmd == "undo") {
                const ProbabilityTree before = state.current;
                if (!state.undo()) {
                    out << "nothing to undo\n";
                    continue;
                }
                out << "undone\n";
                report_change(before);
            } else if (cmd == "reset") {
                state.reset();
                out << "reset\n";
            } else if (cmd == "show") {
                for (const auto& s : state.history) out << "# " << format_step(s) << "\n";
                out << describe_tree(state.current);
            } else if (cmd == "dot") {
                std::string path;
                std::istringstream(rest) >> path;
                if (path.empty()) throw InputError("usage: dot <file>");
                write_file(path, export_dot(state.current));
                out << "wrote " << path << "\n";
            } else if (cmd == "help") {
                out << "commands: see|do|cf <event>, p <event>, undo, show, dot <file>, reset, quit\n";
            } else {
                err << "error: unknown command '" << cmd << "' (try help)\n";
            }
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
        }
    }
}

// =============================================================================
// Entry point
// =============================================================================

inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Causal reasoning on discrete probability trees", "ptree"};
    app.require_subcommand(1);

    std::string tree_path, text, dot_path, out_path;
    std::vector<std::string> ops;
    bool json_out = false;
    std::size_t width = 0;

    auto* validate = app.add_subcommand("validate", "Check a tree document and print the report");
    validate->add_option("tree", tree_path, "Tree JSON file")->required();

    auto* query = app.add_subcommand("query", "Evaluate P(target | steps...)");
    query->add_option("tree", tree_path, "Tree JSON file")->required();
    query->add_option("query", text, "Query, e.g. \"P(X=0 | do(Y=1); Z=0)\"")->required();
    query->add_flag("--json", json_out, "Emit {\"prob\", \"decimal\"} JSON");

    auto* mincut = app.add_subcommand("mincut", "Print the min-cut and critical set of an event");
    mincut->add_option("tree", tree_path, "Tree JSON file")->required();
    mincut->add_option("event", text, "Event, e.g. \"Y=1\"")->required();
    mincut->add_option("--dot", dot_path, "Write a colored Graphviz file");

    auto* transform = app.add_subcommand("transform", "Apply see/do/cf steps and write the resulting tree");
    transform->add_option("tree", tree_path, "Tree JSON file")->required();
    transform->add_option("--op", ops, "Step, e.g. \"do(Y=1)\"; repeatable")->required();
    transform->add_option("-o,--output", out_path, "Output tree JSON file")->required();

    auto* mass = app.add_subcommand("mass", "Print an ASCII probability mass diagram");
    mass->add_option("tree", tree_path, "Tree JSON file")->required();
    mass->add_option("--width", width, "Total height in rows (default: max(24, leaf count))");

    auto* repl = app.add_subcommand("repl", "Interactive see/do/cf composition");
    repl->add_option("tree", tree_path, "Tree JSON file")->required();

    std::vector<const char*> argv{"ptree"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (validate->parsed()) {
            const auto tree = parse_input([&] {
                try {
                    return load_json_unchecked(read_file(tree_path));
                } catch (const SchemaError& e) {
                    throw InputError(tree_path + ": " + e.what());
                }
            });
            const auto report = validate_tree(tree);
            out << report.str();
            return report.ok ? kOk : kInvalidInput;
        }

        const ProbabilityTree tree = load_tree_file(tree_path);

        if (query->parsed()) {
            const QueryAst q = parse_input([&] { return parse_query(text); });
            const auto result = apply_pipeline(tree, q.steps, q.target);
            if (json_out) {
                nlohmann::ordered_json j;
                j["prob"] = result.prob.str();
                j["decimal"] = result.prob.to_double();
                out << j.dump() << "\n";
            } else {
                out << format_probability(result.prob) << "\n";
            }
        } else if (mincut->parsed()) {
            const Event e = parse_input([&] { return parse_event(text); });
            const MinCut cut = mincut_of_expr(tree, e);
            const CriticalSet crit = critical_set(tree, cut);
            out << "true: " << format_ids(cut.true_set) << "  false: " << format_ids(cut.false_set)
                << "  critical: " << format_ids(crit.nodes) << "\n";
            if (!dot_path.empty()) write_file(dot_path, export_dot(tree, cut, crit));
        } else if (transform->parsed()) {
            PipelineState state(tree);
            for (const auto& op : ops) state.apply(parse_input([&] { return parse_step(op); }));
            write_file(out_path, save_json(state.current));
        } else if (mass->parsed()) {
            const std::size_t leaves = enumerate_realizations(tree).size();
            if (width == 0) width = std::max<std::size_t>(24, leaves);
            if (width < leaves) throw InputError("--width must be at least the leaf count " + std::to_string(leaves));
            out << render_mass_diagram(tree, width);
        } else if (repl->parsed()) {
            ReplState state(tree);
            run_repl(state, in, out, err);
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kEvaluationError;
    }
    return kOk;
}

}  // namespace ptree::cli

#include "medbt/analysis.hpp"
#include "medbt/corpus.hpp"
#include "medbt/dsl.hpp"
#include "medbt/exec.hpp"
#include "medbt/json_io.hpp"
#include "medbt/service.hpp"
#include "medbt/validate.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <charconv>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace medbt;

namespace {

enum ExitCode : int { kOk = 0, kInvalid = 1, kExecution = 2, kCheckFailed = 3 };

/// Input-side failure (missing file, parse error, bad flag value): exit 1.
struct InputError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct Loaded
{
    std::string name;
    std::string source;
    std::vector<ParseDiagnostic> diagnostics;
    std::optional<Tree> tree;
};

std::optional<std::string> read_file(const fs::path& path)
{
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) return std::nullopt;
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool is_example(const std::string& name)
{
    for (const auto& n : example_names())
        if (n == name) return true;
    return false;
}

/// Reads a .bt file, or a corpus tree by name when no such file exists.
Loaded load(const std::string& path_or_name)
{
    Loaded loaded;
    if (auto text = read_file(path_or_name)) {
        loaded.name = path_or_name;
        loaded.source = std::move(*text);
    } else if (is_example(path_or_name)) {
        loaded.name = path_or_name;
        loaded.source = load_example(path_or_name).source;
    } else {
        throw InputError("cannot read '" + path_or_name + "'");
    }
    auto result = parse(loaded.source);
    loaded.diagnostics = std::move(result.diagnostics);
    if (result.ok()) loaded.tree = std::move(result.tree);
    return loaded;
}

Tree load_tree(const std::string& path_or_name, const std::string& subtree_id)
{
    Loaded loaded = load(path_or_name);
    if (!loaded.tree) {
        for (const auto& d : loaded.diagnostics) std::cerr << format_diagnostic(d, loaded.name) << '\n';
        throw InputError("'" + loaded.name + "' does not parse");
    }
    if (subtree_id.empty()) return std::move(*loaded.tree);
    if (!find_node(loaded.tree->root, subtree_id)) throw InputError("unknown node '" + subtree_id + "'");
    return subtree(*loaded.tree, subtree_id);
}

void require_leaf(const Tree& tree, const std::string& id)
{
    const Node* node = find_node(tree.root, id);
    if (!node || !is_leaf(node->kind)) throw InputError("unknown leaf '" + id + "'");
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    return out;
}

double parse_probability(const std::string& text)
{
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !(value >= 0.0 && value <= 1.0))
        throw InputError("probability must be a number in [0, 1], got '" + text + "'");
    return value;
}

std::pair<std::string, std::string> split_assignment(const std::string& text, const char* flag)
{
    auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError(std::string(flag) + " expects KEY=VALUE, got '" + text + "'");
    return {text.substr(0, eq), text.substr(eq + 1)};
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& path)
{
    Loaded loaded = load(path);
    for (const auto& d : loaded.diagnostics) std::cout << format_diagnostic(d, loaded.name) << '\n';
    std::size_t errors = 0;
    for (const auto& d : loaded.diagnostics)
        if (d.severity == Severity::Error) ++errors;
    if (errors > 0) {
        std::cout << loaded.name << ": " << errors << (errors == 1 ? " error" : " errors") << '\n';
        return kInvalid;
    }
    std::cout << loaded.name << ": ok (" << leaves(loaded.tree->root).size() << " leaves)\n";
    return kOk;
}

struct RunArgs
{
    std::string path, script, trace, subtree;
    std::size_t max_ticks = kDefaultTickBudget;
};

int cmd_run(const RunArgs& args)
{
    Tree tree = load_tree(args.path, args.subtree);
    auto text = read_file(args.script);
    if (!text) throw InputError("cannot read '" + args.script + "'");
    ResolutionScript script;
    try {
        script = script_from_json(Json::parse(*text), tree.schema);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed script '" + args.script + "': " + e.what());
    } catch (const ExecutionError&) {
        throw;
    } catch (const Error& e) {
        throw InputError("malformed script '" + args.script + "': " + e.what());
    }
    for (const auto& [leaf, entries] : script.entries) require_leaf(tree, leaf);

    RunResult result = run_scripted(tree, script, args.max_ticks);
    if (!args.trace.empty()) {
        auto out = open_output(args.trace);
        write_trace(out, result.trace);
    }
    if (result.outcome == RunOutcome::BudgetExhausted)
        std::cout << "status: running (budget_exhausted after " << result.ticks_used << " ticks)\n";
    else
        std::cout << "status: " << to_string(result.final_status) << " (" << result.ticks_used
                  << (result.ticks_used == 1 ? " tick" : " ticks") << ")\n";
    return kOk;
}

struct SimulateArgs
{
    std::string path, report, subtree;
    double p_default = 0.5;
    std::vector<std::string> p;
    std::uint64_t runs = 10'000;
    std::uint64_t seed = 0;
    std::size_t max_ticks = kDefaultTickBudget;
    unsigned threads = 0;
};

int cmd_simulate(const SimulateArgs& args)
{
    Tree tree = load_tree(args.path, args.subtree);
    StochasticModel model;
    model.seed = args.seed;
    model.default_p = args.p_default;
    for (const auto& assignment : args.p) {
        auto [leaf, value] = split_assignment(assignment, "--p");
        require_leaf(tree, leaf);
        model.p[leaf] = parse_probability(value);
    }
    SimulationReport report = simulate(tree, model, args.runs, {args.max_ticks, args.threads});
    if (!args.report.empty()) {
        auto out = open_output(args.report);
        out << report_to_json(report).dump(2) << '\n';
    }
    std::cout << "tree: " << report.tree << "\nruns: " << report.runs << "  seed: " << report.seed
              << "\nsuccess_rate: " << report.success_rate << "  mean_ticks: " << report.mean_ticks
              << "  budget_exhausted: " << report.budget_exhausted << '\n';
    for (const auto& [leaf, stats] : report.leaf_stats)
        std::cout << "  " << leaf << ": ticked in " << report.ticked_fraction(leaf) << " of runs, "
                  << stats.attempts << " attempts\n";
    return kOk;
}

struct ExportArgs
{
    std::string path, format = "dot", out, subtree;
};

int cmd_export(const ExportArgs& args)
{
    Tree tree = load_tree(args.path, args.subtree);
    std::string dot;
    std::string summary;
    if (args.format == "dot") {
        if (auto problems = validate(tree); !problems.empty())
            throw InputError("tree does not validate: " + problems.front().node_id + ": " + problems.front().rule);
        dot = export_dot(tree);
        summary = std::to_string(leaves(tree.root).size()) + " leaves";
    } else {
        Fsm fsm = to_fsm(tree);
        dot = export_dot(fsm);
        summary = std::to_string(fsm.states.size()) + " states, " + std::to_string(fsm.transitions.size()) +
                  " transitions";
    }
    if (args.out.empty() || args.out == "-") {
        std::cout << dot;
    } else {
        auto out = open_output(args.out);
        out << dot;
        std::cout << "wrote " << args.out << " (" << summary << ")\n";
    }
    return kOk;
}

struct CheckArgs
{
    std::string path, subtree;
    std::vector<std::string> requirements;
    std::size_t max_executions = 1'000'000;
};

int cmd_check(const CheckArgs& args)
{
    Tree tree = load_tree(args.path, args.subtree);
    std::vector<OrderingRequirement> requirements;
    for (const auto& text : args.requirements) {
        auto [target, list] = split_assignment(text, "--require-before");
        OrderingRequirement req{target, {}};
        std::stringstream items(list);
        for (std::string item; std::getline(items, item, ',');)
            if (!item.empty()) req.prerequisites.push_back(item);
        require_leaf(tree, req.target);
        for (const auto& p : req.prerequisites) require_leaf(tree, p);
        requirements.push_back(std::move(req));
    }

    EnumerationLimits limits;
    limits.max_executions = args.max_executions;
    bool all_hold = true;
    for (const auto& req : requirements) {
        OrderingReport report = check_ordering(tree, req, limits);
        std::cout << req.target << " after";
        for (std::size_t i = 0; i < req.prerequisites.size(); ++i)
            std::cout << (i ? ", " : " ") << req.prerequisites[i] << " x" << attempt_bound(tree, req.prerequisites[i]);
        if (report.holds) {
            std::cout << ": holds over " << report.executions << " executions (target reached in "
                      << report.target_reached << ")";
            if (report.min_prior_failures) std::cout << ", min prior failures " << *report.min_prior_failures;
            std::cout << '\n';
        } else {
            all_hold = false;
            std::cout << ": VIOLATED\n  counterexample: " << report.counterexample << '\n';
        }
    }
    return all_hold ? kOk : kCheckFailed;
}

struct ServeArgs
{
    std::string path, host = "127.0.0.1", ui_dir, subtree;
    int port = 8080;
};

int cmd_serve(const ServeArgs& args)
{
    Tree tree = load_tree(args.path, args.subtree);
    if (auto problems = validate(tree); !problems.empty())
        throw InputError("tree does not validate: " + problems.front().node_id + ": " + problems.front().rule);

    // Block the shutdown signals in every thread; a dedicated thread waits for them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    SessionService service(std::move(tree));
    httplib::Server server;
    std::optional<fs::path> ui_dir;
    if (!args.ui_dir.empty()) {
        if (!fs::is_directory(args.ui_dir)) throw InputError("no such directory '" + args.ui_dir + "'");
        ui_dir = args.ui_dir;
    }
    install_routes(server, service, ui_dir);

    int port = args.port;
    if (port == 0) {
        port = server.bind_to_any_port(args.host);
        if (port < 0) {
            std::cerr << "error: cannot bind " << args.host << '\n';
            return kExecution;
        }
    } else if (!server.bind_to_port(args.host, port)) {
        std::cerr << "error: cannot bind " << args.host << ':' << port << " (port busy?)\n";
        return kExecution;
    }
    std::cout << "serving " << args.path << " on http://" << args.host << ':' << port << '/' << std::endl;

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.listen_after_bind();
    // listen can also return on its own; wake the waiter so it can be joined.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();

    auto closed = service.close_all();
    std::cout << "shutting down: " << closed.size() << (closed.size() == 1 ? " session" : " sessions") << " closed";
    for (const auto& id : closed) std::cout << ' ' << id;
    std::cout << std::endl;
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Behavior-tree engine and toolkit for medical procedures"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a tree, printing diagnostics");
    validate_cmd->add_option("path", validate_path, "Tree file or corpus name")->required();

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Execute a tree against a resolution script");
    run_cmd->add_option("path", run_args.path, "Tree file or corpus name")->required();
    run_cmd->add_option("script", run_args.script, "Resolution script (JSON)")->required();
    run_cmd->add_option("--max-ticks", run_args.max_ticks, "Tick budget")->check(CLI::PositiveNumber);
    run_cmd->add_option("--trace", run_args.trace, "Write JSON-lines trace to this path");
    run_cmd->add_option("--subtree", run_args.subtree, "Use the subtree rooted at this node id");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo simulation with Bernoulli leaf outcomes");
    sim_cmd->add_option("path", sim_args.path, "Tree file or corpus name")->required();
    sim_cmd->add_option("--p-default", sim_args.p_default, "Success probability of leaves without --p")
        ->check(CLI::Range(0.0, 1.0));
    sim_cmd->add_option("--p", sim_args.p, "Per-leaf success probability, LEAF=P (repeatable)");
    sim_cmd->add_option("--runs", sim_args.runs, "Number of runs")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim_args.seed, "Random seed");
    sim_cmd->add_option("--report", sim_args.report, "Write the JSON report to this path");
    sim_cmd->add_option("--max-ticks", sim_args.max_ticks, "Tick budget per run")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--threads", sim_args.threads, "Worker threads (0 = hardware); does not affect the report");
    sim_cmd->add_option("--subtree", sim_args.subtree, "Use the subtree rooted at this node id");

    ExportArgs export_args;
    auto* export_cmd = app.add_subcommand("export", "Export a tree or its automaton as Graphviz DOT");
    export_cmd->add_option("path", export_args.path, "Tree file or corpus name")->required();
    export_cmd->add_option("--format", export_args.format, "dot or fsm-dot")
        ->check(CLI::IsMember({"dot", "fsm-dot"}));
    export_cmd->add_option("--out", export_args.out, "Output path (default stdout)");
    export_cmd->add_option("--subtree", export_args.subtree, "Use the subtree rooted at this node id");

    CheckArgs check_args;
    auto* check_cmd = app.add_subcommand("check", "Check last-resort ordering requirements exhaustively");
    check_cmd->add_option("path", check_args.path, "Tree file or corpus name")->required();
    check_cmd->add_option("--require-before", check_args.requirements, "TARGET=LEAF,LEAF,... (repeatable)")
        ->required();
    check_cmd->add_option("--max-executions", check_args.max_executions, "Enumeration limit")
        ->check(CLI::PositiveNumber);
    check_cmd->add_option("--subtree", check_args.subtree, "Use the subtree rooted at this node id");

    ServeArgs serve_args;
    auto* serve_cmd = app.add_subcommand("serve", "Serve interactive sessions over HTTP");
    serve_cmd->add_option("path", serve_args.path, "Tree file or corpus name")->required();
    serve_cmd->add_option("--port", serve_args.port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--host", serve_args.host, "Bind address");
    serve_cmd->add_option("--ui-dir", serve_args.ui_dir, "Directory with the UI bundle");
    serve_cmd->add_option("--subtree", serve_args.subtree, "Use the subtree rooted at this node id");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*validate_cmd) return cmd_validate(validate_path);
        if (*run_cmd) return cmd_run(run_args);
        if (*sim_cmd) return cmd_simulate(sim_args);
        if (*export_cmd) return cmd_export(export_args);
        if (*check_cmd) return cmd_check(check_args);
        if (*serve_cmd) return cmd_serve(serve_args);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const UnsupportedNode& e) {
        std::cerr << "error: unsupported node '" << e.node_id() << "': " << e.what() << '\n';
        return kExecution;
    } catch (const ExecutionError& e) {
        std::cerr << "error: execution failed at '" << e.node_id() << "': " << e.what() << '\n';
        return kExecution;
    } catch (const EnumerationLimitExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExecution;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExecution;
    }
    return kInvalid;
}

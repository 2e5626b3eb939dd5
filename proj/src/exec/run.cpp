#include "run_internal.hpp"

#include "medbt/validate.hpp"

namespace medbt {

namespace detail {

void require_valid(const Tree& tree)
{
    auto violations = validate(tree);
    if (violations.empty()) return;
    std::string message = "tree '" + tree.name + "' does not validate:";
    for (const auto& v : violations) message += " [" + v.node_id + ": " + v.rule + "]";
    throw Error(message);
}

RunResult run_unchecked(const Tree& tree, LeafResolver& resolver, Blackboard initial, std::size_t max_ticks,
                        bool record_trace)
{
    RunResult result;
    TickContext ctx;
    ctx.blackboard = std::move(initial);
    ctx.resolver = &resolver;
    if (record_trace) ctx.trace = &result.trace;

    result.outcome = RunOutcome::BudgetExhausted;
    while (result.ticks_used < max_ticks) {
        Status s = tick(tree, ctx);
        ++result.ticks_used;
        result.final_status = s;
        if (s != Status::Running) {
            result.outcome = RunOutcome::Completed;
            break;
        }
    }
    result.final_blackboard = std::move(ctx.blackboard);
    return result;
}

} // namespace detail

std::string_view to_string(RunOutcome outcome)
{
    return outcome == RunOutcome::Completed ? "completed" : "budget_exhausted";
}

RunResult run(const Tree& tree, LeafResolver& resolver, const RunOptions& options)
{
    if (options.max_ticks < 1) throw Error("max_ticks must be at least 1");
    detail::require_valid(tree);
    Blackboard initial = options.initial_blackboard ? *options.initial_blackboard : Blackboard::with_defaults(tree.schema);
    return detail::run_unchecked(tree, resolver, std::move(initial), options.max_ticks, options.record_trace);
}

RunResult run_scripted(const Tree& tree, const ResolutionScript& script, std::size_t max_ticks,
                       std::optional<Blackboard> initial_blackboard)
{
    ScriptedResolver resolver(script);
    RunOptions options;
    options.max_ticks = max_ticks;
    options.initial_blackboard = std::move(initial_blackboard);
    return run(tree, resolver, options);
}

} // namespace medbt

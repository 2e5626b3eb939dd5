#include "medbt/engine.hpp"
#include "medbt/error.hpp"

namespace medbt {

namespace {

void record(TickContext& ctx, const Node& node, TracePhase phase, std::optional<Status> status = {},
            std::vector<BlackboardDelta> delta = {})
{
    if (!ctx.trace) return;
    ctx.trace->push_back(TraceEvent{ctx.tick_index, node.id, phase, status, std::move(delta)});
}

NodeMemory& memory_of(TickContext& ctx, const Node& node)
{
    return ctx.memory[node.id];
}

bool resumed(TickContext& ctx, const Node& node)
{
    auto it = ctx.memory.find(node.id);
    return it != ctx.memory.end() && it->second.running;
}

// Post-order: innermost Running nodes are reported first.
void halt_subtree(const Node& node, TickContext& ctx)
{
    for (const auto& child : node.children) halt_subtree(child, ctx);
    auto it = ctx.memory.find(node.id);
    if (it == ctx.memory.end()) return;
    if (it->second.running) {
        record(ctx, node, TracePhase::Halted);
        if (is_leaf(node.kind) && ctx.resolver) ctx.resolver->halted(node);
    }
    ctx.memory.erase(it);
}

void write(TickContext& ctx, const Node& node, const std::string& key, Value value,
           std::vector<BlackboardDelta>& delta)
{
    std::optional<Value> old;
    try {
        old = ctx.blackboard.set(key, value);
    } catch (const BlackboardError& e) {
        throw ExecutionError(node.id, "leaf '" + node.id + "': " + e.what());
    }
    delta.push_back(BlackboardDelta{key, std::move(old), ctx.blackboard.get(key)});
}

bool evaluate(const Predicate& predicate, const Node& node, const Blackboard& blackboard)
{
    try {
        return predicate.evaluate(blackboard);
    } catch (const BlackboardError& e) {
        throw ExecutionError(node.id, "node '" + node.id + "': " + e.what());
    }
}

Status resolve_leaf(const Node& node, TickContext& ctx, std::vector<BlackboardDelta>& delta)
{
    const StringList* options = nullptr;
    if (node.kind == NodeKind::Select) {
        const Value* value = ctx.blackboard.find(node.params.options_key);
        if (!value)
            throw ExecutionError(node.id, "select '" + node.id + "': blackboard key '" +
                                              node.params.options_key + "' is absent");
        options = std::get_if<StringList>(value);
        if (!options)
            throw ExecutionError(node.id, "select '" + node.id + "': blackboard key '" +
                                              node.params.options_key + "' is not a list");
        if (options->empty()) return Status::Failure;
    }

    std::optional<Resolution> resolution;
    if (ctx.resolver) {
        LeafQuery query{node, ctx.blackboard, {}, ctx.tick_index};
        if (options) query.options = std::span<const std::string>(*options);
        resolution = ctx.resolver->resolve(query);
    }

    if (!resolution) {
        if (node.kind == NodeKind::Condition && node.params.check)
            return evaluate(*node.params.check, node, ctx.blackboard) ? Status::Success : Status::Failure;
        throw ExecutionError(node.id, "leaf '" + node.id + "' was not resolved");
    }

    switch (resolution->kind) {
    case Resolution::Kind::Pending:
        return Status::Running;

    case Resolution::Kind::Choice: {
        if (node.kind != NodeKind::Select)
            throw ContractViolation(node.id, "leaf '" + node.id + "' is not a select but was given a choice");
        if (resolution->choice >= options->size())
            throw ExecutionError(node.id, "select '" + node.id + "': option " + std::to_string(resolution->choice) +
                                              " out of range (" + std::to_string(options->size()) + " options)");
        write(ctx, node, node.params.into_key, (*options)[resolution->choice], delta);
        return Status::Success;
    }

    case Resolution::Kind::Outcome:
        break;
    }

    const Status status = resolution->status;
    if (status == Status::Running && !node.params.long_running)
        throw ContractViolation(node.id, "leaf '" + node.id + "' returned running but is not declared long_running");
    if (node.kind == NodeKind::Condition && !resolution->writes.empty())
        throw ContractViolation(node.id, "condition '" + node.id + "' attempted to write the blackboard");
    if (node.kind == NodeKind::Select && status == Status::Success)
        throw ContractViolation(node.id, "select '" + node.id + "' succeeded without a choice");

    for (auto& [key, value] : resolution->writes) write(ctx, node, key, value, delta);

    if (node.kind == NodeKind::Action && status == Status::Success && !node.params.appends.empty()) {
        const Value* current = ctx.blackboard.find(node.params.appends);
        StringList list;
        if (current) {
            auto existing = std::get_if<StringList>(current);
            if (!existing)
                throw ExecutionError(node.id, "action '" + node.id + "': blackboard key '" + node.params.appends +
                                                  "' is not a list");
            list = *existing;
        }
        list.push_back(node.label);
        write(ctx, node, node.params.appends, std::move(list), delta);
    }
    return status;
}

Status tick_sequence_like(const Node& node, TickContext& ctx, Status decisive)
{
    std::size_t start = resumed(ctx, node) ? memory_of(ctx, node).child_index : 0;
    for (std::size_t i = start; i < node.children.size(); ++i) {
        Status s = tick_node(node.children[i], ctx);
        if (s == Status::Running) {
            memory_of(ctx, node).child_index = i;
            return Status::Running;
        }
        if (s == decisive) return s;
    }
    return decisive == Status::Failure ? Status::Success : Status::Failure;
}

Status tick_parallel(const Node& node, TickContext& ctx)
{
    const std::size_t n = node.children.size();
    const int required_successes = effective_success_threshold(node);
    const int tolerated_failures = effective_failure_threshold(node);

    NodeMemory& mem = memory_of(ctx, node);
    if (mem.child_results.size() != n) mem.child_results.assign(n, std::nullopt);

    auto finish = [&](Status result) {
        auto& results = memory_of(ctx, node).child_results;
        for (std::size_t j = 0; j < n; ++j)
            if (!results[j]) halt_subtree(node.children[j], ctx);
        return result;
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (memory_of(ctx, node).child_results[i]) continue;
        Status s = tick_node(node.children[i], ctx);
        auto& results = memory_of(ctx, node).child_results;
        if (s != Status::Running) results[i] = s;

        int successes = 0, failures = 0, unfinished = 0;
        for (const auto& r : results) {
            if (!r) ++unfinished;
            else if (*r == Status::Success) ++successes;
            else ++failures;
        }
        if (failures >= tolerated_failures) return finish(Status::Failure);
        if (successes >= required_successes) return finish(Status::Success);
        if (successes + unfinished < required_successes) return finish(Status::Failure);
    }
    return Status::Running;
}

} // namespace

std::string_view to_string(TracePhase phase)
{
    switch (phase) {
    case TracePhase::Enter: return "enter";
    case TracePhase::Exit: return "exit";
    case TracePhase::Halted: return "halted";
    }
    return "?";
}

Status tick_node(const Node& node, TickContext& ctx)
{
    record(ctx, node, TracePhase::Enter);

    Status status;
    std::vector<BlackboardDelta> delta;
    if (node.kind == NodeKind::Root) {
        if (node.children.empty()) throw ExecutionError(node.id, "root has no child");
        status = tick_node(node.children.front(), ctx);
    } else if (is_composite(node.kind)) {
        status = tick_composite(node, ctx);
    } else if (is_decorator(node.kind)) {
        status = tick_decorator(node, ctx);
    } else {
        status = resolve_leaf(node, ctx, delta);
    }

    if (status == Status::Running)
        memory_of(ctx, node).running = true;
    else
        ctx.memory.erase(node.id);

    record(ctx, node, TracePhase::Exit, status, std::move(delta));
    return status;
}

Status tick_composite(const Node& node, TickContext& ctx)
{
    switch (node.kind) {
    case NodeKind::Sequence:
        return tick_sequence_like(node, ctx, Status::Failure);
    case NodeKind::Selector:
        return tick_sequence_like(node, ctx, Status::Success);
    case NodeKind::Parallel:
        return tick_parallel(node, ctx);
    case NodeKind::Recovery: {
        if (node.children.size() != 2) throw ExecutionError(node.id, "recovery requires exactly two children");
        if (!(resumed(ctx, node) && memory_of(ctx, node).in_fallback)) {
            Status s = tick_node(node.children[0], ctx);
            if (s != Status::Failure) return s;
            memory_of(ctx, node).in_fallback = true;
        }
        return tick_node(node.children[1], ctx);
    }
    default:
        throw ExecutionError(node.id, "node '" + node.id + "' is not a composite");
    }
}

Status tick_decorator(const Node& node, TickContext& ctx)
{
    if (node.children.size() != 1) throw ExecutionError(node.id, "decorator requires exactly one child");
    const Node& child = node.children.front();

    switch (node.kind) {
    case NodeKind::Invert: {
        Status s = tick_node(child, ctx);
        if (s == Status::Running) return s;
        return s == Status::Success ? Status::Failure : Status::Success;
    }
    case NodeKind::Retry: {
        const int attempts = node.params.bound.value_or(1);
        if (!resumed(ctx, node)) memory_of(ctx, node).counter = 0;
        for (;;) {
            Status s = tick_node(child, ctx);
            if (s != Status::Failure) return s;
            if (++memory_of(ctx, node).counter >= attempts) return Status::Failure;
        }
    }
    case NodeKind::Repeat: {
        if (!resumed(ctx, node)) memory_of(ctx, node).counter = 0;
        Status s = tick_node(child, ctx);
        if (s != Status::Success) return s;
        if (node.params.until) return evaluate(*node.params.until, node, ctx.blackboard) ? Status::Success : Status::Running;
        const int iterations = node.params.bound.value_or(1);
        return ++memory_of(ctx, node).counter >= iterations ? Status::Success : Status::Running;
    }
    default:
        throw ExecutionError(node.id, "node '" + node.id + "' is not a decorator");
    }
}

Status tick_leaf(const Node& node, TickContext& ctx)
{
    if (!is_leaf(node.kind)) throw ExecutionError(node.id, "node '" + node.id + "' is not a leaf");
    std::vector<BlackboardDelta> delta;
    return resolve_leaf(node, ctx, delta);
}

Status tick(const Tree& tree, TickContext& ctx)
{
    Status status = tick_node(tree.root, ctx);
    ++ctx.tick_index;
    return status;
}

void reset(const Tree&, TickContext& ctx)
{
    ctx.memory.clear();
    ctx.tick_index = 0;
}

} // namespace medbt

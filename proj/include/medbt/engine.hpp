#pragma once

#include "medbt/blackboard.hpp"
#include "medbt/node.hpp"
#include "medbt/status.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace medbt {

using BlackboardWrite = std::pair<std::string, Value>;

/// What a resolver decided for one leaf tick.
struct Resolution
{
    enum class Kind : std::uint8_t { Outcome, Choice, Pending };

    Kind kind = Kind::Outcome;
    Status status = Status::Success;
    std::size_t choice = 0;
    std::vector<BlackboardWrite> writes;

    static Resolution outcome(Status status, std::vector<BlackboardWrite> writes = {})
    {
        return {Kind::Outcome, status, 0, std::move(writes)};
    }
    static Resolution chose(std::size_t option) { return {Kind::Choice, Status::Success, option, {}}; }
    /// Awaiting human input; the leaf reports Running.
    static Resolution pending() { return {Kind::Pending, Status::Running, 0, {}}; }
};

struct LeafQuery
{
    const Node& node;
    const Blackboard& blackboard;
    /// Select only: the options read from the blackboard.
    std::span<const std::string> options;
    std::size_t tick_index = 0;
};

/// Maps a leaf tick to an outcome. Returning nullopt means "no answer": the
/// engine then evaluates a Condition's check predicate if it has one and
/// raises an unresolved-leaf error otherwise.
class LeafResolver
{
public:
    virtual ~LeafResolver() = default;
    virtual std::optional<Resolution> resolve(const LeafQuery& query) = 0;
    /// A Running leaf was stopped by a Parallel.
    virtual void halted(const Node&) {}
};

enum class TracePhase : std::uint8_t { Enter, Exit, Halted };

std::string_view to_string(TracePhase phase);

struct BlackboardDelta
{
    std::string key;
    std::optional<Value> old_value;
    Value new_value;

    bool operator==(const BlackboardDelta&) const = default;
};

struct TraceEvent
{
    std::size_t tick = 0;
    std::string node_id;
    TracePhase phase = TracePhase::Enter;
    std::optional<Status> status; // exit only
    std::vector<BlackboardDelta> delta;

    bool operator==(const TraceEvent&) const = default;
};

/// Per-node state carried between ticks.
struct NodeMemory
{
    bool running = false;
    std::size_t child_index = 0;                    // Sequence/Selector resume point
    int counter = 0;                                 // Retry failures, Repeat iterations
    bool in_fallback = false;                        // Recovery
    std::vector<std::optional<Status>> child_results; // Parallel
};

struct TickContext
{
    Blackboard blackboard;
    /// Not owned. Must outlive every tick made with this context.
    LeafResolver* resolver = nullptr;
    std::unordered_map<std::string, NodeMemory> memory;
    /// Optional sink; when null nothing is recorded.
    std::vector<TraceEvent>* trace = nullptr;
    std::size_t tick_index = 0;
};

/// One top-down pass from the root. Returns the status of the root's child
/// and advances ctx.tick_index.
Status tick(const Tree& tree, TickContext& ctx);

Status tick_node(const Node& node, TickContext& ctx);
Status tick_composite(const Node& node, TickContext& ctx);
Status tick_decorator(const Node& node, TickContext& ctx);
Status tick_leaf(const Node& node, TickContext& ctx);

/// Clears per-node memory and the tick counter. The blackboard is untouched.
void reset(const Tree& tree, TickContext& ctx);

} // namespace medbt

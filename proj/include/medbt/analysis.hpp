#pragma once

#include "medbt/error.hpp"
#include "medbt/node.hpp"
#include "medbt/status.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace medbt {

using StateId = std::size_t;

struct FsmSymbol
{
    std::string leaf;
    Status outcome = Status::Success;

    auto operator<=>(const FsmSymbol&) const = default;
};

struct FsmState
{
    std::string label;
    /// Leaf ticked next in this configuration; empty for accepting states.
    std::string leaf;
};

struct FsmTransition
{
    StateId from = 0;
    FsmSymbol symbol;
    StateId to = 0;
};

/// Configuration automaton of a tree: one state per "next leaf to tick plus
/// decorator counters", one transition per leaf outcome.
struct Fsm
{
    std::vector<FsmState> states;
    StateId initial = 0;
    std::map<StateId, Status> accepting;
    std::vector<FsmTransition> transitions;

    std::optional<StateId> next(StateId from, const FsmSymbol& symbol) const;

    /// Follows `symbols` from the initial state. Returns the accepting status
    /// reached exactly when the input is consumed, or nullopt if the input
    /// gets stuck or ends in a non-accepting state.
    std::optional<Status> accepts(std::span<const FsmSymbol> symbols) const;
};

/// Thrown for trees the configuration construction does not cover.
class UnsupportedNode : public Error
{
public:
    UnsupportedNode(std::string node_id, const std::string& what) : Error(what), m_node_id(std::move(node_id)) {}
    const std::string& node_id() const { return m_node_id; }

private:
    std::string m_node_id;
};

/// Requires a valid tree without Parallel nodes or until-predicate repeats.
Fsm to_fsm(const Tree& tree);

struct ReachabilityAnswer
{
    bool reachable = false;
    std::vector<FsmSymbol> witness;
    std::size_t min_prior_failures = 0;
};

/// Shortest way to reach a state that ticks `target_leaf`, minimising the
/// number of Failure symbols first and the length second. `fixed` pins leaves
/// to a single outcome (transitions with the other outcome are ignored).
/// Throws Error if no state ticks `target_leaf`.
ReachabilityAnswer reachability(const Fsm& fsm, const std::string& target_leaf,
                                const std::map<std::string, Status>& fixed = {});

/// Graphviz digraph of the tree: conditions yellow, actions green, composites
/// labelled with their glyph.
std::string export_dot(const Tree& tree);
/// Graphviz digraph of the automaton; accepting states double-circled.
std::string export_dot(const Fsm& fsm);

} // namespace medbt

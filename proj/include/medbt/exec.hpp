#pragma once

#include "medbt/engine.hpp"
#include "medbt/error.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace medbt {

inline constexpr std::size_t kDefaultTickBudget = 10'000;

// ---------------------------------------------------------------------------
// Scripted execution
// ---------------------------------------------------------------------------

/// One scripted attempt of a leaf. Selects use `choice` for Success.
struct ScriptEntry
{
    Status status = Status::Success;
    std::optional<std::size_t> choice;
    std::vector<BlackboardWrite> writes;

    bool operator==(const ScriptEntry&) const = default;
};

/// Per-leaf ordered outcomes, consumed one per leaf tick.
struct ResolutionScript
{
    std::map<std::string, std::vector<ScriptEntry>> entries;

    ResolutionScript& add(const std::string& leaf, Status status);
    ResolutionScript& add(const std::string& leaf, std::initializer_list<Status> statuses);
    ResolutionScript& choose(const std::string& leaf, std::size_t option);
};

class ScriptUnderrun : public ExecutionError
{
public:
    using ExecutionError::ExecutionError;
};

/// Replays a ResolutionScript. Leaves absent from the script are left to the
/// engine (check predicates); leaves whose list is exhausted raise ScriptUnderrun.
class ScriptedResolver : public LeafResolver
{
public:
    explicit ScriptedResolver(const ResolutionScript& script) : m_script(script) {}

    std::optional<Resolution> resolve(const LeafQuery& query) override;

    std::size_t consumed(const std::string& leaf) const;

private:
    const ResolutionScript& m_script;
    std::map<std::string, std::size_t> m_cursor;
};

enum class RunOutcome : std::uint8_t { Completed, BudgetExhausted };

std::string_view to_string(RunOutcome outcome);

struct RunResult
{
    Status final_status = Status::Running;
    RunOutcome outcome = RunOutcome::Completed;
    std::size_t ticks_used = 0;
    std::vector<TraceEvent> trace;
    Blackboard final_blackboard;
};

struct RunOptions
{
    std::size_t max_ticks = kDefaultTickBudget;
    /// Defaults to the schema's initial values.
    std::optional<Blackboard> initial_blackboard;
    bool record_trace = true;
};

/// Ticks until the tree leaves Running or the budget runs out. Throws Error
/// if the tree does not validate; ExecutionError from the engine propagates.
RunResult run(const Tree& tree, LeafResolver& resolver, const RunOptions& options = {});

RunResult run_scripted(const Tree& tree, const ResolutionScript& script, std::size_t max_ticks = kDefaultTickBudget,
                       std::optional<Blackboard> initial_blackboard = std::nullopt);

// ---------------------------------------------------------------------------
// Stochastic simulation
// ---------------------------------------------------------------------------

/// Identifier of the random stream recorded in every report. Each run draws
/// from std::mt19937_64 seeded with splitmix64(seed ^ splitmix64(run_index));
/// a Bernoulli(p) draw is (next() >> 11) * 2^-53 < p; a uniform option index
/// is drawn by rejection on next() % n.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64/splitmix64-run-seed/u53-bernoulli/v1";

std::uint64_t splitmix64(std::uint64_t x);

struct StochasticModel
{
    double default_p = 0.5;
    std::map<std::string, double> p;
    std::uint64_t seed = 0;

    double probability(const std::string& leaf) const;
};

struct LeafStats
{
    std::uint64_t attempts = 0;     // total ticks across all runs
    std::uint64_t runs_ticked = 0;  // runs in which the leaf was ticked at least once

    bool operator==(const LeafStats&) const = default;
};

struct SimulationReport
{
    std::string tree;
    std::uint64_t seed = 0;
    std::uint64_t runs = 0;
    std::string rng{kRngAlgorithm};
    std::uint64_t successes = 0;
    std::uint64_t failures = 0;
    std::uint64_t budget_exhausted = 0;
    std::uint64_t total_ticks = 0;
    double success_rate = 0.0;
    double mean_ticks = 0.0;
    std::map<std::string, LeafStats> leaf_stats;

    double ticked_fraction(const std::string& leaf) const;
};

struct SimulateOptions
{
    std::size_t max_ticks = kDefaultTickBudget;
    /// 0 picks hardware concurrency. The report does not depend on it.
    unsigned threads = 0;
};

/// Throws Error if p is outside [0, 1] or the tree does not validate.
SimulationReport simulate(const Tree& tree, const StochasticModel& model, std::uint64_t runs,
                          const SimulateOptions& options = {});

// ---------------------------------------------------------------------------
// Interactive sessions
// ---------------------------------------------------------------------------

struct Prompt
{
    std::string leaf_id;
    NodeKind kind = NodeKind::Action;
    std::string label;
    std::vector<std::string> options; // Select only

    bool operator==(const Prompt&) const = default;
};

struct Answer
{
    std::string leaf_id;
    std::optional<Status> status;
    std::optional<std::size_t> choice;
    std::vector<BlackboardWrite> writes;
};

struct SessionUpdate
{
    std::vector<TraceEvent> events;
    std::optional<Prompt> prompt;
    std::optional<Status> final_status;
    bool budget_exhausted = false;
};

class SessionError : public Error
{
public:
    using Error::Error;
};

/// Single-stepped execution with a human resolving leaves.
///
/// Interactive leaves always prompt. Auto leaves are offered to the optional
/// automation resolver first, then to the check predicate (conditions), and
/// otherwise prompt. Scripted leaves require the automation resolver. At most
/// one prompt is pending; other leaves wanting input in the same tick report
/// Running and ask again on a later tick.
///
/// Not thread-safe: callers serialize step() per session.
class Session
{
public:
    Session(std::string id, Tree tree, Blackboard initial, LeafResolver* automation = nullptr,
            std::size_t step_budget = kDefaultTickBudget);

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    /// Runs until the next prompt or termination. `answer` must address the
    /// pending prompt when there is one and be absent otherwise.
    SessionUpdate step(std::optional<Answer> answer = std::nullopt);

    const std::string& id() const { return m_id; }
    const Tree& tree() const { return m_tree; }
    const Blackboard& blackboard() const { return m_ctx.blackboard; }
    const std::vector<TraceEvent>& log() const { return m_log; }
    const std::optional<Prompt>& pending_prompt() const { return m_human.pending; }
    std::optional<Status> final_status() const { return m_final; }
    bool finished() const { return m_final.has_value() || m_budget_exhausted; }
    std::size_t tick_index() const { return m_ctx.tick_index; }

private:
    class HumanResolver : public LeafResolver
    {
    public:
        std::optional<Resolution> resolve(const LeafQuery& query) override;
        void halted(const Node& node) override;

        LeafResolver* automation = nullptr;
        std::optional<Prompt> pending;
        std::optional<Answer> answer;
    };

    std::string m_id;
    Tree m_tree;
    TickContext m_ctx;
    HumanResolver m_human;
    std::vector<TraceEvent> m_log;
    std::optional<Status> m_final;
    bool m_budget_exhausted = false;
    std::size_t m_step_budget;
};

/// Validates the tree (throws Error otherwise) and returns a session at tick 0.
std::unique_ptr<Session> session_start(std::string id, Tree tree, Blackboard initial_blackboard,
                                       LeafResolver* automation = nullptr);

// ---------------------------------------------------------------------------
// Exhaustive enumeration and ordering checks
// ---------------------------------------------------------------------------

struct LeafOutcome
{
    std::string leaf;
    Status status = Status::Success;

    bool operator==(const LeafOutcome&) const = default;
};

struct Execution
{
    std::vector<LeafOutcome> outcomes; // leaf exits in trace order
    Status final_status = Status::Running;
    RunOutcome outcome = RunOutcome::Completed;
};

struct EnumerationLimits
{
    std::size_t max_executions = 1'000'000;
    std::size_t max_decisions = 64; // leaf resolutions per execution
    std::size_t max_ticks = kDefaultTickBudget;
};

class EnumerationLimitExceeded : public Error
{
public:
    using Error::Error;
};

/// Visits every execution obtained by resolving each leaf tick Success or
/// Failure (Selects succeed with option 0). Returns the number visited.
std::size_t enumerate_executions(const Tree& tree, const std::function<void(const Execution&)>& visit,
                                 const EnumerationLimits& limits = {},
                                 std::optional<Blackboard> initial_blackboard = std::nullopt);

/// Product of the Retry bounds enclosing `leaf` (1 when there are none).
int attempt_bound(const Tree& tree, std::string_view leaf);

struct OrderingRequirement
{
    std::string target;
    std::vector<std::string> prerequisites;
};

struct OrderingReport
{
    bool holds = true;
    std::size_t executions = 0;
    std::size_t target_reached = 0;
    std::optional<std::size_t> min_prior_failures;
    std::string counterexample; // first violating execution, rendered
};

/// Last-resort property over every execution: `target` is ticked iff each
/// prerequisite has failed attempt_bound() times with no success before it.
/// Throws Error for ids that are not leaves of the tree.
OrderingReport check_ordering(const Tree& tree, const OrderingRequirement& requirement,
                              const EnumerationLimits& limits = {});

} // namespace medbt

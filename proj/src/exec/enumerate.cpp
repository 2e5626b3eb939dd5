#include "run_internal.hpp"

#include <set>
#include <sstream>

namespace medbt {

namespace {

// Resolves leaf ticks from a decision prefix, extending it with 0 (Success)
// when the prefix runs out. 1 means Failure.
class BranchingResolver : public LeafResolver
{
public:
    BranchingResolver(std::vector<std::uint8_t>& decisions, std::size_t max_decisions)
        : m_decisions(decisions), m_max(max_decisions)
    {}

    std::optional<Resolution> resolve(const LeafQuery& query) override
    {
        if (m_pos >= m_max)
            throw EnumerationLimitExceeded("an execution needs more than " + std::to_string(m_max) +
                                           " leaf resolutions");
        if (m_pos == m_decisions.size()) m_decisions.push_back(0);
        const bool fail = m_decisions[m_pos++] != 0;
        if (query.node.kind == NodeKind::Select && !fail) return Resolution::chose(0);
        return Resolution::outcome(fail ? Status::Failure : Status::Success);
    }

private:
    std::vector<std::uint8_t>& m_decisions;
    std::size_t m_max;
    std::size_t m_pos = 0;
};

std::string render(const Execution& e)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < e.outcomes.size(); ++i) {
        if (i) out << ", ";
        out << e.outcomes[i].leaf << ":" << (e.outcomes[i].status == Status::Success ? "S" : "F");
    }
    out << " => " << to_string(e.final_status);
    return out.str();
}

const Node& require_leaf(const Tree& tree, const std::string& id)
{
    const Node* node = find_node(tree, id);
    if (!node || !is_leaf(node->kind)) throw Error("unknown leaf '" + id + "'");
    return *node;
}

} // namespace

std::size_t enumerate_executions(const Tree& tree, const std::function<void(const Execution&)>& visit,
                                 const EnumerationLimits& limits, std::optional<Blackboard> initial_blackboard)
{
    detail::require_valid(tree);
    const Blackboard initial = initial_blackboard ? *initial_blackboard : Blackboard::with_defaults(tree.schema);
    std::set<std::string, std::less<>> leaf_ids;
    for (const Node* leaf : leaves(tree.root)) leaf_ids.insert(leaf->id);

    std::vector<std::uint8_t> decisions;
    std::size_t count = 0;
    for (;;) {
        if (count >= limits.max_executions)
            throw EnumerationLimitExceeded("more than " + std::to_string(limits.max_executions) + " executions");
        BranchingResolver resolver(decisions, limits.max_decisions);
        RunResult r = detail::run_unchecked(tree, resolver, initial, limits.max_ticks, true);

        Execution e;
        e.final_status = r.final_status;
        e.outcome = r.outcome;
        for (const auto& ev : r.trace)
            if (ev.phase == TracePhase::Exit && ev.status != Status::Running && leaf_ids.count(ev.node_id))
                e.outcomes.push_back({ev.node_id, *ev.status});
        visit(e);
        ++count;

        while (!decisions.empty() && decisions.back() == 1) decisions.pop_back();
        if (decisions.empty()) break;
        decisions.back() = 1;
    }
    return count;
}

int attempt_bound(const Tree& tree, std::string_view leaf)
{
    int bound = 1;
    for (const Node* n : path_to(tree.root, leaf))
        if (n->kind == NodeKind::Retry) bound *= n->params.bound.value_or(1);
    return bound;
}

OrderingReport check_ordering(const Tree& tree, const OrderingRequirement& requirement,
                              const EnumerationLimits& limits)
{
    require_leaf(tree, requirement.target);
    std::map<std::string, int> bounds;
    for (const auto& p : requirement.prerequisites) {
        require_leaf(tree, p);
        bounds[p] = attempt_bound(tree, p);
    }

    OrderingReport report;
    auto violate = [&](const Execution& e, const std::string& why) {
        if (!report.holds) return;
        report.holds = false;
        report.counterexample = why + ": " + render(e);
    };

    report.executions = enumerate_executions(
        tree,
        [&](const Execution& e) {
            std::map<std::string, int> failures, successes;
            std::size_t prior_failures = 0;
            bool reached = false;
            for (const auto& o : e.outcomes) {
                if (o.leaf == requirement.target) {
                    reached = true;
                    break;
                }
                if (o.status == Status::Failure) {
                    ++failures[o.leaf];
                    ++prior_failures;
                } else {
                    ++successes[o.leaf];
                }
            }

            bool exhausted = true;
            for (const auto& [leaf, bound] : bounds)
                if (failures[leaf] != bound || successes[leaf] != 0) exhausted = false;

            if (reached) {
                ++report.target_reached;
                if (!report.min_prior_failures || prior_failures < *report.min_prior_failures)
                    report.min_prior_failures = prior_failures;
                if (!exhausted) violate(e, requirement.target + " ticked before every prerequisite failed");
            } else if (exhausted && !bounds.empty()) {
                violate(e, "every prerequisite failed but " + requirement.target + " was never ticked");
            }
        },
        limits);
    return report;
}

} // namespace medbt

#include "medbt/analysis.hpp"
#include "medbt/validate.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <tuple>

namespace medbt {

namespace {

constexpr StateId kNone = static_cast<StateId>(-1);

// Continuation-passing construction: every subtree is compiled against the
// states its success and failure lead to. Retry/Repeat counters are unrolled,
// so each attempt gets its own copy of the child's states.
class Builder
{
public:
    Fsm build(const Tree& tree)
    {
        m_success = add("SUCCESS", "");
        m_failure = add("FAILURE", "");
        const StateId entry = compile(tree.root.children.front(), m_success, m_failure, "");
        return renumber(entry);
    }

private:
    StateId add(std::string label, std::string leaf)
    {
        m_states.push_back(FsmState{std::move(label), std::move(leaf)});
        return m_states.size() - 1;
    }

    static std::string with_context(const std::string& context, const std::string& part)
    {
        return context.empty() ? part : context + ", " + part;
    }

    StateId compile(const Node& node, StateId on_success, StateId on_failure, const std::string& context)
    {
        switch (node.kind) {
        case NodeKind::Action:
        case NodeKind::Condition:
        case NodeKind::Select: {
            std::string label = "at " + node.id;
            if (!context.empty()) label += " [" + context + "]";
            const StateId s = add(std::move(label), node.id);
            m_transitions.push_back({s, {node.id, Status::Success}, on_success});
            m_transitions.push_back({s, {node.id, Status::Failure}, on_failure});
            return s;
        }
        case NodeKind::Sequence: {
            StateId entry = on_success;
            for (auto it = node.children.rbegin(); it != node.children.rend(); ++it)
                entry = compile(*it, entry, on_failure, context);
            return entry;
        }
        case NodeKind::Selector: {
            StateId entry = on_failure;
            for (auto it = node.children.rbegin(); it != node.children.rend(); ++it)
                entry = compile(*it, on_success, entry, context);
            return entry;
        }
        case NodeKind::Recovery: {
            const StateId fallback = compile(node.children[1], on_success, on_failure, context);
            return compile(node.children[0], on_success, fallback, context);
        }
        case NodeKind::Invert:
            return compile(node.children.front(), on_failure, on_success, context);
        case NodeKind::Retry: {
            const int n = node.params.bound.value_or(1);
            StateId entry = on_failure;
            for (int k = n; k >= 1; --k)
                entry = compile(node.children.front(), on_success, entry,
                                with_context(context, node.id + " attempt " + std::to_string(k) + "/" +
                                                          std::to_string(n)));
            return entry;
        }
        case NodeKind::Repeat: {
            if (node.params.until)
                throw UnsupportedNode(node.id, "repeat '" + node.id + "' has an until predicate; only bounded "
                                                                      "repeats can be lowered to an FSM");
            const int n = node.params.bound.value_or(1);
            StateId entry = on_success;
            for (int k = n; k >= 1; --k)
                entry = compile(node.children.front(), entry, on_failure,
                                with_context(context, node.id + " iteration " + std::to_string(k) + "/" +
                                                          std::to_string(n)));
            return entry;
        }
        case NodeKind::Parallel:
            throw UnsupportedNode(node.id, "parallel '" + node.id + "' cannot be lowered to an FSM");
        case NodeKind::Root:
            break;
        }
        throw UnsupportedNode(node.id, "unexpected node '" + node.id + "'");
    }

    // Breadth-first numbering from the entry state, terminals last.
    Fsm renumber(StateId entry)
    {
        std::vector<std::vector<std::size_t>> out(m_states.size());
        for (std::size_t i = 0; i < m_transitions.size(); ++i) out[m_transitions[i].from].push_back(i);

        std::vector<StateId> order;
        std::vector<StateId> index(m_states.size(), kNone);
        std::deque<StateId> queue;
        auto visit = [&](StateId s) {
            if (index[s] != kNone || s == m_success || s == m_failure) return;
            index[s] = order.size();
            order.push_back(s);
            queue.push_back(s);
        };
        visit(entry);
        while (!queue.empty()) {
            const StateId s = queue.front();
            queue.pop_front();
            for (std::size_t t : out[s]) visit(m_transitions[t].to);
        }
        for (StateId terminal : {m_success, m_failure}) {
            index[terminal] = order.size();
            order.push_back(terminal);
        }

        Fsm fsm;
        for (StateId s : order) fsm.states.push_back(m_states[s]);
        fsm.initial = index[entry];
        fsm.accepting[index[m_success]] = Status::Success;
        fsm.accepting[index[m_failure]] = Status::Failure;
        for (StateId s : order)
            for (std::size_t t : out[s])
                fsm.transitions.push_back({index[s], m_transitions[t].symbol, index[m_transitions[t].to]});
        return fsm;
    }

    std::vector<FsmState> m_states;
    std::vector<FsmTransition> m_transitions;
    StateId m_success = 0;
    StateId m_failure = 0;
};

} // namespace

std::optional<StateId> Fsm::next(StateId from, const FsmSymbol& symbol) const
{
    for (const auto& t : transitions)
        if (t.from == from && t.symbol == symbol) return t.to;
    return std::nullopt;
}

std::optional<Status> Fsm::accepts(std::span<const FsmSymbol> symbols) const
{
    StateId state = initial;
    for (const auto& symbol : symbols) {
        auto n = next(state, symbol);
        if (!n) return std::nullopt;
        state = *n;
    }
    auto it = accepting.find(state);
    if (it == accepting.end()) return std::nullopt;
    return it->second;
}

Fsm to_fsm(const Tree& tree)
{
    auto violations = validate(tree);
    if (!violations.empty())
        throw Error("tree '" + tree.name + "' does not validate: " + violations.front().node_id + ": " +
                    violations.front().rule);
    return Builder().build(tree);
}

ReachabilityAnswer reachability(const Fsm& fsm, const std::string& target_leaf,
                                const std::map<std::string, Status>& fixed)
{
    bool known = false;
    for (const auto& s : fsm.states)
        if (s.leaf == target_leaf) known = true;
    if (!known) throw Error("unknown leaf '" + target_leaf + "'");

    std::vector<std::vector<std::size_t>> out(fsm.states.size());
    for (std::size_t i = 0; i < fsm.transitions.size(); ++i) out[fsm.transitions[i].from].push_back(i);

    using Cost = std::pair<std::size_t, std::size_t>; // (failures, length)
    const Cost infinite{static_cast<std::size_t>(-1), 0};
    std::vector<Cost> cost(fsm.states.size(), infinite);
    std::vector<std::size_t> via(fsm.states.size(), static_cast<std::size_t>(-1));
    using Item = std::tuple<Cost, StateId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    cost[fsm.initial] = {0, 0};
    queue.emplace(cost[fsm.initial], fsm.initial);

    ReachabilityAnswer answer;
    while (!queue.empty()) {
        auto [c, s] = queue.top();
        queue.pop();
        if (c != cost[s]) continue;
        if (fsm.states[s].leaf == target_leaf) {
            answer.reachable = true;
            answer.min_prior_failures = c.first;
            for (StateId at = s; at != fsm.initial;) {
                const auto& t = fsm.transitions[via[at]];
                answer.witness.push_back(t.symbol);
                at = t.from;
            }
            std::reverse(answer.witness.begin(), answer.witness.end());
            return answer;
        }
        for (std::size_t ti : out[s]) {
            const auto& t = fsm.transitions[ti];
            if (auto f = fixed.find(t.symbol.leaf); f != fixed.end() && f->second != t.symbol.outcome) continue;
            Cost next{c.first + (t.symbol.outcome == Status::Failure ? 1 : 0), c.second + 1};
            if (next < cost[t.to]) {
                cost[t.to] = next;
                via[t.to] = ti;
                queue.emplace(next, t.to);
            }
        }
    }
    return answer;
}

} // namespace medbt

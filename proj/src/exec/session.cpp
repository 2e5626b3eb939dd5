#include "run_internal.hpp"

namespace medbt {

std::optional<Resolution> Session::HumanResolver::resolve(const LeafQuery& query)
{
    const Node& node = query.node;
    if (answer && answer->leaf_id == node.id) {
        Answer a = std::move(*answer);
        answer.reset();
        if (node.kind == NodeKind::Select && a.choice) return Resolution::chose(*a.choice);
        return Resolution::outcome(a.status.value_or(Status::Success), std::move(a.writes));
    }

    switch (node.params.mode) {
    case LeafMode::Scripted:
        if (!automation)
            throw ExecutionError(node.id, "leaf '" + node.id + "' is scripted but the session has no automation");
        return automation->resolve(query);
    case LeafMode::Auto:
        if (automation)
            if (auto r = automation->resolve(query)) return r;
        if (node.kind == NodeKind::Condition && node.params.check) return std::nullopt;
        break;
    case LeafMode::Interactive:
        break;
    }

    if (!pending)
        pending = Prompt{node.id, node.kind, node.label,
                         std::vector<std::string>(query.options.begin(), query.options.end())};
    return Resolution::pending();
}

void Session::HumanResolver::halted(const Node& node)
{
    if (pending && pending->leaf_id == node.id) pending.reset();
    if (automation) automation->halted(node);
}

Session::Session(std::string id, Tree tree, Blackboard initial, LeafResolver* automation, std::size_t step_budget)
    : m_id(std::move(id)), m_tree(std::move(tree)), m_step_budget(step_budget)
{
    m_ctx.blackboard = std::move(initial);
    m_human.automation = automation;
}

SessionUpdate Session::step(std::optional<Answer> answer)
{
    if (m_final) throw SessionError("session '" + m_id + "' has finished");
    if (m_budget_exhausted) throw SessionError("session '" + m_id + "' exhausted its tick budget");

    if (const auto& pending = m_human.pending) {
        if (!answer) throw SessionError("a prompt is pending for leaf '" + pending->leaf_id + "'; an answer is required");
        if (answer->leaf_id != pending->leaf_id)
            throw SessionError("answer addresses leaf '" + answer->leaf_id + "' but the pending prompt is for '" +
                               pending->leaf_id + "'");
        const Node* node = find_node(m_tree, pending->leaf_id);
        if (pending->kind == NodeKind::Select) {
            if (answer->choice) {
                if (*answer->choice >= pending->options.size())
                    throw SessionError("option " + std::to_string(*answer->choice) + " out of range (" +
                                       std::to_string(pending->options.size()) + " options)");
            } else if (answer->status != Status::Failure) {
                throw SessionError("select answer needs a choice or status failure");
            }
        } else {
            if (!answer->status) throw SessionError("answer for leaf '" + answer->leaf_id + "' needs a status");
            if (*answer->status == Status::Running && !(node && node->params.long_running))
                throw SessionError("leaf '" + answer->leaf_id + "' is not long_running; answer success or failure");
            if (pending->kind == NodeKind::Condition && !answer->writes.empty())
                throw SessionError("condition '" + answer->leaf_id + "' cannot write the blackboard");
        }
        m_human.answer = std::move(answer);
        m_human.pending.reset();
    } else if (answer) {
        throw SessionError("no pending prompt");
    }

    SessionUpdate update;
    m_ctx.resolver = &m_human;
    m_ctx.trace = &update.events;
    try {
        std::size_t ticks = 0;
        for (; ticks < m_step_budget; ++ticks) {
            Status s = tick(m_tree, m_ctx);
            m_human.answer.reset();
            if (s != Status::Running) {
                m_final = s;
                update.final_status = s;
                break;
            }
            if (m_human.pending) {
                update.prompt = m_human.pending;
                break;
            }
        }
        if (ticks == m_step_budget) {
            m_budget_exhausted = true;
            update.budget_exhausted = true;
        }
    } catch (...) {
        m_ctx.trace = nullptr;
        m_log.insert(m_log.end(), update.events.begin(), update.events.end());
        m_budget_exhausted = true; // the context is mid-tick; no further steps
        throw;
    }
    m_ctx.trace = nullptr;
    m_log.insert(m_log.end(), update.events.begin(), update.events.end());
    return update;
}

std::unique_ptr<Session> session_start(std::string id, Tree tree, Blackboard initial_blackboard,
                                       LeafResolver* automation)
{
    detail::require_valid(tree);
    return std::make_unique<Session>(std::move(id), std::move(tree), std::move(initial_blackboard), automation);
}

} // namespace medbt

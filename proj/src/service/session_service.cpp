#include "medbt/service.hpp"
#include "medbt/analysis.hpp"
#include "medbt/dsl.hpp"

namespace medbt {

namespace {

Json events_to_json(const std::vector<TraceEvent>& events)
{
    Json out = Json::array();
    for (const auto& e : events) out.push_back(trace_event_to_json(e));
    return out;
}

Json update_to_json(const SessionUpdate& update)
{
    Json j;
    j["events"] = events_to_json(update.events);
    if (update.prompt) j["prompt"] = prompt_to_json(*update.prompt);
    if (update.final_status) j["final_status"] = to_string(*update.final_status);
    if (update.budget_exhausted) j["budget_exhausted"] = true;
    return j;
}

template <typename F>
auto guarded(F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const ProtocolError&) {
        throw;
    } catch (const SessionError& e) {
        throw ProtocolError(409, e.what());
    } catch (const ExecutionError& e) {
        throw ProtocolError(422, e.what());
    } catch (const Error& e) {
        throw ProtocolError(400, e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(400, e.what());
    }
}

} // namespace

Json structure_to_json(const Node& node)
{
    Json j;
    j["id"] = node.id;
    j["kind"] = keyword(node.kind);
    j["label"] = node.label;
    if (node.kind == NodeKind::Parallel) {
        j["success_threshold"] = effective_success_threshold(node);
        j["failure_threshold"] = effective_failure_threshold(node);
    }
    if (node.params.bound) j["bound"] = *node.params.bound;
    if (node.params.until) j["until"] = node.params.until->to_string();
    if (is_leaf(node.kind)) j["mode"] = to_string(node.params.mode);
    Json children = Json::array();
    for (const auto& c : node.children) children.push_back(structure_to_json(c));
    j["children"] = std::move(children);
    return j;
}

SessionService::SessionService(Tree tree) : m_tree(std::move(tree)) {}

Json SessionService::create_session(const Json& body)
{
    return guarded([&] {
        if (!body.is_null() && !body.is_object()) throw ProtocolError(400, "request body must be a JSON object");

        Tree tree = m_tree;
        if (body.is_object() && body.contains("tree")) {
            if (!body["tree"].is_string()) throw ProtocolError(400, "\"tree\" must be DSL text");
            auto parsed = parse(body["tree"].get<std::string>());
            if (!parsed.ok()) {
                std::string message = "tree does not parse:";
                for (const auto& d : parsed.diagnostics)
                    if (d.severity == Severity::Error) message += " " + format_diagnostic(d, "tree");
                throw ProtocolError(400, message);
            }
            tree = std::move(*parsed.tree);
        }

        Blackboard initial = Blackboard::with_defaults(tree.schema);
        if (body.is_object() && body.contains("blackboard"))
            initial = blackboard_from_json(body["blackboard"], std::move(initial));

        auto slot = std::make_shared<Slot>();
        std::string id;
        {
            std::lock_guard lock(m_mutex);
            id = "s" + std::to_string(m_next_id++);
            slot->session = session_start(id, std::move(tree), std::move(initial));
            m_sessions.emplace(id, slot);
        }

        std::lock_guard lock(slot->mutex);
        Json response;
        response["session_id"] = id;
        Json update = update_to_json(slot->session->step());
        for (auto& [key, value] : update.items()) response[key] = value;
        return response;
    });
}

Json SessionService::step(const std::string& session_id, const Json& body)
{
    auto slot = find(session_id);
    return guarded([&] {
        std::optional<Answer> answer;
        if (body.is_object() && body.contains("answer") && !body["answer"].is_null())
            answer = answer_from_json(body["answer"], slot->session->tree().schema);
        std::lock_guard lock(slot->mutex);
        return update_to_json(slot->session->step(std::move(answer)));
    });
}

Json SessionService::state(const std::string& session_id) const
{
    auto slot = find(session_id);
    std::lock_guard lock(slot->mutex);
    const Session& s = *slot->session;
    Json j;
    j["session_id"] = s.id();
    j["tree"] = s.tree().name;
    j["tick"] = s.tick_index();
    j["finished"] = s.finished();
    if (s.pending_prompt()) j["prompt"] = prompt_to_json(*s.pending_prompt());
    if (s.final_status()) j["final_status"] = to_string(*s.final_status());
    j["blackboard"] = blackboard_to_json(s.blackboard());
    j["events"] = events_to_json(s.log());
    return j;
}

Json SessionService::tree_description() const
{
    Json j;
    j["name"] = m_tree.name;
    j["dsl"] = serialize(m_tree);
    j["dot"] = export_dot(m_tree);
    j["structure"] = structure_to_json(m_tree.root);
    return j;
}

std::vector<std::string> SessionService::close_all()
{
    std::lock_guard lock(m_mutex);
    std::vector<std::string> ids;
    for (const auto& [id, slot] : m_sessions) ids.push_back(id);
    m_sessions.clear();
    return ids;
}

std::size_t SessionService::session_count() const
{
    std::lock_guard lock(m_mutex);
    return m_sessions.size();
}

std::shared_ptr<SessionService::Slot> SessionService::find(const std::string& session_id) const
{
    std::lock_guard lock(m_mutex);
    auto it = m_sessions.find(session_id);
    if (it == m_sessions.end()) throw ProtocolError(404, "no session '" + session_id + "'");
    return it->second;
}

} // namespace medbt

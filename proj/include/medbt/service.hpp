#pragma once

#include "medbt/exec.hpp"
#include "medbt/json_io.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace medbt {

/// Protocol-level failure carrying the HTTP status it maps to.
class ProtocolError : public Error
{
public:
    ProtocolError(int http_status, const std::string& what) : Error(what), m_status(http_status) {}
    int http_status() const { return m_status; }

private:
    int m_status;
};

/// JSON session protocol, independent of the transport.
///
///   POST /sessions            {tree?, blackboard?}  -> {session_id, events, prompt?, final_status?}
///   POST /sessions/{id}/step  {answer?}             -> {events, prompt?, final_status?}
///   GET  /sessions/{id}                             -> full state
///   GET  /tree                                      -> {name, dsl, dot, structure}
///
/// Event objects use the trace-line schema. Sessions are independent; calls
/// on one session are serialized by a per-session lock.
class SessionService
{
public:
    explicit SessionService(Tree tree);

    Json create_session(const Json& body);
    Json step(const std::string& session_id, const Json& body);
    Json state(const std::string& session_id) const;
    Json tree_description() const;

    /// Drops every session and returns the ids that were still open.
    std::vector<std::string> close_all();
    std::size_t session_count() const;

private:
    struct Slot
    {
        std::mutex mutex;
        std::unique_ptr<Session> session;
    };

    std::shared_ptr<Slot> find(const std::string& session_id) const;

    Tree m_tree;
    mutable std::mutex m_mutex;
    std::map<std::string, std::shared_ptr<Slot>> m_sessions;
    std::uint64_t m_next_id = 1;
};

Json structure_to_json(const Node& node);

/// Registers the protocol endpoints and the UI bundle (served from `ui_dir`
/// when given, otherwise a placeholder page) on `server`.
void install_routes(httplib::Server& server, SessionService& service,
                    const std::optional<std::filesystem::path>& ui_dir = std::nullopt);

} // namespace medbt

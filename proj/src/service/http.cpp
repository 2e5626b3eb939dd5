#include "medbt/service.hpp"

#include <httplib.h>

namespace medbt {

namespace {

constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>medbt</title></head>
<body>
<h1>medbt session server</h1>
<p>No UI bundle configured (start with --ui-dir). The JSON protocol is available:</p>
<ul>
<li>POST /sessions</li>
<li>POST /sessions/{id}/step</li>
<li>GET /sessions/{id}</li>
<li>GET /tree</li>
</ul>
</body></html>
)";

void reply(httplib::Response& res, int status, const Json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <typename F>
void handle(httplib::Response& res, F&& f)
{
    try {
        reply(res, 200, f());
    } catch (const ProtocolError& e) {
        reply(res, e.http_status(), Json{{"error", e.what()}});
    } catch (const std::exception& e) {
        reply(res, 500, Json{{"error", e.what()}});
    }
}

Json body_of(const httplib::Request& req)
{
    if (req.body.empty()) return Json();
    try {
        return Json::parse(req.body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ProtocolError(400, std::string("malformed JSON: ") + e.what());
    }
}

} // namespace

void install_routes(httplib::Server& server, SessionService& service,
                    const std::optional<std::filesystem::path>& ui_dir)
{
    // SO_REUSEADDR only: a second server on a busy port must fail to bind.
    server.set_socket_options([](auto sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });

    server.Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] { return service.create_session(body_of(req)); });
    });
    server.Post(R"(/sessions/([A-Za-z0-9_-]+)/step)", [&service](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] { return service.step(req.matches[1], body_of(req)); });
    });
    server.Get(R"(/sessions/([A-Za-z0-9_-]+))", [&service](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] { return service.state(req.matches[1]); });
    });
    server.Get("/tree", [&service](const httplib::Request&, httplib::Response& res) {
        handle(res, [&] { return service.tree_description(); });
    });

    if (ui_dir && std::filesystem::is_directory(*ui_dir)) {
        server.set_mount_point("/", ui_dir->string());
    } else {
        server.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
        });
    }
}

} // namespace medbt

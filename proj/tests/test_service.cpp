#include "support/helpers.hpp"

#include "medbt/corpus.hpp"
#include "medbt/service.hpp"

#include <doctest.h>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <thread>

using namespace medbt;

namespace {

/// Protocol server on an ephemeral port for the lifetime of the object.
struct LiveServer
{
    explicit LiveServer(Tree tree, std::optional<std::filesystem::path> ui_dir = std::nullopt)
        : service(std::move(tree))
    {
        install_routes(server, service, ui_dir);
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LiveServer()
    {
        server.stop();
        thread.join();
    }

    httplib::Client client() const
    {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(10, 0);
        return c;
    }

    SessionService service;
    httplib::Server server;
    int port = 0;
    std::thread thread;
};

Json post(httplib::Client& c, const std::string& path, const Json& body, int expected_status = 200)
{
    auto res = c.Post(path, body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == expected_status);
    return Json::parse(res->body);
}

Json get(httplib::Client& c, const std::string& path, int expected_status = 200)
{
    auto res = c.Get(path);
    REQUIRE(res);
    CHECK(res->status == expected_status);
    return Json::parse(res->body);
}

Json answer(const std::string& leaf, const std::string& status)
{
    return Json{{"answer", {{"leaf", leaf}, {"status", status}}}};
}

bool is_trace_event(const Json& e)
{
    static const std::set<std::string> allowed = {"tick", "node", "phase", "status", "delta"};
    if (!e.is_object() || !e.contains("tick") || !e.contains("node") || !e.contains("phase")) return false;
    for (const auto& [key, value] : e.items())
        if (!allowed.count(key)) return false;
    return true;
}

} // namespace

TEST_CASE("creating a session runs to the first prompt")
{
    SessionService service(load_example("airway").tree);
    Json created = service.create_session(Json::object());
    CHECK(created["session_id"] == "s1");
    REQUIRE(created.contains("prompt"));
    CHECK(created["prompt"]["leaf"] == "spo2_ok");
    CHECK(created["prompt"]["kind"] == "condition");
    CHECK_FALSE(created.contains("final_status"));
    for (const auto& e : created["events"]) CHECK(is_trace_event(e));
    CHECK(service.session_count() == 1);
}

TEST_CASE("service errors map to HTTP statuses")
{
    SessionService service(load_example("blood_draw").tree);
    auto status_of = [](auto&& f) {
        try {
            f();
        } catch (const ProtocolError& e) {
            return e.http_status();
        }
        return 200;
    };
    CHECK(status_of([&] { service.step("s42", Json::object()); }) == 404);
    CHECK(status_of([&] { service.state("s42"); }) == 404);
    CHECK(status_of([&] { service.create_session(Json::array()); }) == 400);
    CHECK(status_of([&] { service.create_session(Json{{"tree", "tree \"x\" { sequence { } }"}}); }) == 400);

    SessionService typed(load_example("tumor_ablation").tree);
    CHECK(status_of([&] { typed.create_session(Json{{"blackboard", {{"nope", 1}}}}); }) == 400);
    CHECK(status_of([&] { typed.create_session(Json{{"blackboard", {{"region_area", "big"}}}}); }) == 400);
    CHECK(typed.session_count() == 0);

    service.create_session(Json::object());
    CHECK(status_of([&] { service.step("s2", Json::object()); }) == 404);
    CHECK(status_of([&] { service.step("s1", Json::object()); }) == 409);
    CHECK(status_of([&] { service.step("s1", answer("patient_ready", "success")); }) == 409);
    CHECK(status_of([&] { service.step("s1", Json{{"answer", {{"status", "success"}}}}); }) == 400);
}

TEST_CASE("a session may bring its own tree and blackboard")
{
    SessionService service(load_example("blood_draw").tree);
    Json created = service.create_session(Json{
        {"tree", R"(tree "mini" { blackboard { ok: bool = false } condition "ready" check="ok = true" })"},
        {"blackboard", {{"ok", true}}}});
    CHECK_FALSE(created.contains("prompt"));
    CHECK(created["final_status"] == "success");
    Json state = service.state(created["session_id"].get<std::string>());
    CHECK(state["tree"] == "mini");
    CHECK(state["finished"] == true);
}

TEST_CASE("the tree description round-trips")
{
    Tree t = load_example("tumor_ablation").tree;
    SessionService service(t);
    Json d = service.tree_description();
    CHECK(d["name"] == "tumor_ablation");
    CHECK(testing_support::parse_ok(d["dsl"].get<std::string>()) == t);
    CHECK(d["dot"].get<std::string>().rfind("digraph", 0) == 0);
    CHECK(d["structure"]["kind"] == "root");
    CHECK(d["structure"]["children"][0]["id"] == "margin_recovery");
}

TEST_CASE("http: ablation session through the select prompt")
{
    Tree t = load_example("tumor_ablation").tree;
    LiveServer live(t);
    auto c = live.client();

    Json created = post(c, "/sessions", Json{{"blackboard", {{"region_area", 2.5}, {"region_shape", "irregular"}}}});
    const std::string id = created["session_id"];
    CHECK(created["prompt"]["leaf"] == "scan_cavity");

    Json update;
    for (const char* leaf : {"scan_cavity", "region_detected", "measure_region", "plan_raster", "plan_spiral",
                             "plan_contour", "plan_spot"})
        update = post(c, "/sessions/" + id + "/step", answer(leaf, "success"));
    REQUIRE(update.contains("prompt"));
    CHECK(update["prompt"]["leaf"] == "select_plan");
    CHECK(update["prompt"]["options"] == Json::array({"raster", "spiral", "contour", "spot"}));

    update = post(c, "/sessions/" + id + "/step", Json{{"answer", {{"leaf", "select_plan"}, {"choice", 1}}}});
    CHECK(update["prompt"]["leaf"] == "ablate");
    bool wrote_choice = false;
    for (const auto& e : update["events"]) {
        CHECK(is_trace_event(e));
        if (e["node"] == "select_plan" && e.contains("delta")) wrote_choice = e["delta"][0]["new"] == "spiral";
    }
    CHECK(wrote_choice);

    update = post(c, "/sessions/" + id + "/step", answer("ablate", "success"));
    CHECK(update["final_status"] == "success");

    Json state = get(c, "/sessions/" + id);
    CHECK(state["finished"] == true);
    CHECK(state["blackboard"]["chosen_plan"] == "spiral");
    CHECK(state["events"].size() > 0);

    post(c, "/sessions/" + id + "/step", Json::object(), 409);
    get(c, "/sessions/nope", 404);
    auto bad = c.Post("/sessions", "{not json", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
}

TEST_CASE("http: monitor failure halts the running airway attempt")
{
    LiveServer live(load_example("airway").tree);
    auto c = live.client();
    Json created = post(c, "/sessions", Json::object());
    const std::string path = "/sessions/" + created["session_id"].get<std::string>() + "/step";

    Json u = post(c, path, answer("spo2_ok", "success"));
    CHECK(u["prompt"]["leaf"] == "laryngoscopy");
    u = post(c, path, answer("laryngoscopy", "running"));
    CHECK(u["prompt"]["leaf"] == "spo2_ok");
    u = post(c, path, answer("spo2_ok", "failure"));
    CHECK(u["prompt"]["leaf"] == "rescue_ventilation");
    u = post(c, path, answer("rescue_ventilation", "failure"));
    CHECK(u["final_status"] == "failure");

    std::vector<std::string> halted;
    for (const auto& e : u["events"])
        if (e["phase"] == "halted") halted.push_back(e["node"]);
    CHECK(halted == std::vector<std::string>{"laryngoscopy", "laryngoscopy_attempts", "airway_technique",
                                             "main_algorithm"});
}

TEST_CASE("http: concurrent sessions are isolated")
{
    LiveServer live(load_example("blood_draw").tree);
    constexpr int kClients = 8;
    std::vector<std::string> finals(kClients);
    std::vector<std::thread> threads;
    for (int i = 0; i < kClients; ++i) {
        threads.emplace_back([&, i] {
            auto c = live.client();
            auto res = c.Post("/sessions", "{}", "application/json");
            if (!res) return;
            const std::string id = Json::parse(res->body)["session_id"];
            const std::string path = "/sessions/" + id + "/step";
            const std::string vein = i % 2 ? "success" : "failure";
            for (auto [leaf, status] : std::vector<std::pair<std::string, std::string>>{
                     {"secure_equipment", "success"}, {"secure_paperwork", "success"},
                     {"patient_ready", "success"}, {"left_arm_vein", vein}}) {
                res = c.Post(path, answer(leaf, status).dump(), "application/json");
                if (!res || res->status != 200) return;
            }
            Json last = Json::parse(res->body);
            if (last.contains("final_status")) finals[i] = "done:" + last["final_status"].get<std::string>();
            else finals[i] = "prompt:" + last["prompt"]["leaf"].get<std::string>();
        });
    }
    for (auto& t : threads) t.join();
    for (int i = 0; i < kClients; ++i) {
        CAPTURE(i);
        CHECK(finals[i] == (i % 2 ? "done:success" : "prompt:right_arm_vein"));
    }
    CHECK(live.service.session_count() == kClients);
    CHECK(live.service.close_all().size() == kClients);
    CHECK(live.service.session_count() == 0);
}

TEST_CASE("http: tree description and UI bundle")
{
    const auto dir = std::filesystem::temp_directory_path() / "medbt_ui_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "index.html") << "<html>bundle</html>";

    {
        LiveServer live(load_example("blood_draw").tree, dir);
        auto c = live.client();
        Json tree = get(c, "/tree");
        CHECK(tree["dot"].get<std::string>().find("fillcolor=yellow") != std::string::npos);
        auto index = c.Get("/");
        REQUIRE(index);
        CHECK(index->body == "<html>bundle</html>");
    }
    {
        LiveServer live(load_example("blood_draw").tree);
        auto c = live.client();
        auto index = c.Get("/");
        REQUIRE(index);
        CHECK(index->status == 200);
        CHECK(index->body.find("/sessions") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

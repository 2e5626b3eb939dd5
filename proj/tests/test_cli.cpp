#include "medbt/corpus.hpp"
#include "medbt/service.hpp"

#include <doctest.h>
#include <httplib.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

extern char** environ;

namespace {

struct Outcome
{
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("medbt_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write(const std::string& name, const std::string& content)
{
    fs::path p = scratch() / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
}

Outcome cli(const std::string& args)
{
    const fs::path out = scratch() / "stdout.txt";
    const fs::path err = scratch() / "stderr.txt";
    const std::string cmd = std::string("\"") + MEDBT_EXE + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    o.out = slurp(out);
    o.err = slurp(err);
    return o;
}

std::string corpus(const std::string& name)
{
    return std::string("\"") + MEDBT_SOURCE_DIR + "/corpus/" + name + ".bt\"";
}

std::string q(const fs::path& p)
{
    return "\"" + p.string() + "\"";
}

std::size_t lines(const std::string& text)
{
    return std::size_t(std::count(text.begin(), text.end(), '\n'));
}

} // namespace

TEST_CASE("validate")
{
    CHECK(cli("validate blood_draw").code == 0);
    for (const char* name : {"blood_draw", "airway", "tumor_ablation"}) {
        Outcome o = cli("validate " + corpus(name));
        CHECK(o.code == 0);
        CHECK(o.out.find("ok") != std::string::npos);
    }

    Outcome two = cli("validate " + q(write("two.bt", "tree \"t\" {\n  action \"a\"\n  action \"b\"\n}\n")));
    CHECK(two.code == 1);
    CHECK(lines(two.out) == 2); // one diagnostic plus the summary
    CHECK(two.out.find("two.bt:1:10: error: root must have exactly one child") != std::string::npos);

    Outcome missing = cli("validate " + q(scratch() / "absent.bt"));
    CHECK(missing.code == 1);
    CHECK(missing.err.find("cannot read") != std::string::npos);
}

TEST_CASE("run")
{
    const fs::path trace = scratch() / "trace.jsonl";
    const fs::path script = write("airway.json", R"({
        "spo2_ok": ["success"],
        "laryngoscopy": ["failure", "failure", "failure"],
        "intubating_sga": ["failure", "failure"],
        "surgical_airway": ["success"],
        "confirm_placement": ["success"],
        "ventilate": ["success"]
    })");
    Outcome ok = cli("run airway " + q(script) + " --trace " + q(trace));
    CHECK(ok.code == 0);
    CHECK(ok.out.find("status: success") != std::string::npos);
    const std::string lines_text = slurp(trace);
    CHECK(lines_text.find("\"node\":\"surgical_airway\"") != std::string::npos);
    std::istringstream in(lines_text);
    for (std::string line; std::getline(in, line);) CHECK(medbt::Json::accept(line));

    const fs::path veins = write("veins.json", R"({"secure_equipment": ["S"], "secure_paperwork": ["S"],
        "patient_ready": ["S"], "left_arm_vein": ["F"], "right_arm_vein": ["F"]})");
    Outcome fail = cli("run blood_draw " + q(veins));
    CHECK(fail.code == 0);
    CHECK(fail.out.find("status: failure") != std::string::npos);

    const fs::path short_script = write("short.json", R"({"secure_equipment": ["S"], "secure_paperwork": ["S"],
        "patient_ready": ["S"], "left_arm_vein": []})");
    Outcome underrun = cli("run blood_draw " + q(short_script));
    CHECK(underrun.code == 2);
    CHECK(underrun.err.find("left_arm_vein") != std::string::npos);

    CHECK(cli("run blood_draw " + q(write("bad.json", "{oops"))).code == 1);
    CHECK(cli("run blood_draw " + q(write("ghost.json", R"({"ghost": ["S"]})"))).code == 1);
}

TEST_CASE("simulate")
{
    Outcome certain = cli("simulate airway --p-default 1 --runs 500 --seed 1");
    CHECK(certain.code == 0);
    CHECK(certain.out.find("success_rate: 1 ") != std::string::npos);

    const fs::path a = scratch() / "a.json";
    const fs::path b = scratch() / "b.json";
    const std::string common = "simulate airway --subtree main_algorithm --p-default 0.7 --p ventilate=0.9 "
                               "--runs 20000 --seed 99 --report ";
    CHECK(cli(common + q(a)).code == 0);
    CHECK(cli(common + q(b) + " --threads 3").code == 0);
    CHECK(slurp(a) == slurp(b));
    const auto report = medbt::Json::parse(slurp(a));
    CHECK(report["runs"] == 20000);
    CHECK(report["rng"] == std::string(medbt::kRngAlgorithm));

    CHECK(cli("simulate airway --p ghost=0.5").code == 1);
    CHECK(cli("simulate airway --p ventilate=1.5").code == 1);
    CHECK(cli("simulate airway --p ventilate").code == 1);
}

TEST_CASE("export")
{
    Outcome dot = cli("export blood_draw --format dot");
    CHECK(dot.code == 0);
    CHECK(dot.out.find("fillcolor=yellow") != std::string::npos);

    const fs::path out = scratch() / "tree.dot";
    Outcome to_file = cli("export blood_draw --out " + q(out));
    CHECK(to_file.code == 0);
    CHECK(slurp(out) == dot.out);

    Outcome unsupported = cli("export airway --format fsm-dot");
    CHECK(unsupported.code == 2);
    CHECK(unsupported.err.find("emergency_airway") != std::string::npos);

    Outcome main = cli("export airway --subtree main_algorithm --format fsm-dot");
    CHECK(main.code == 0);
    CHECK(main.out.find("doublecircle") != std::string::npos);

    CHECK(cli("export airway --format png").code == 1);
    CHECK(cli("export airway --subtree nowhere").code == 1);
}

TEST_CASE("check")
{
    Outcome holds = cli("check airway --subtree main_algorithm --require-before "
                          "surgical_airway=laryngoscopy,intubating_sga");
    CHECK(holds.code == 0);
    CHECK(holds.out.find("min prior failures 5") != std::string::npos);

    std::string permuted = medbt::load_example("airway").source;
    const std::string sga = "        retry(2) id=sga_attempts {\n          action \"intubating_sga\" long_running=true\n        }\n";
    const std::string surgical = "        action \"surgical_airway\" long_running=true\n";
    const auto at = permuted.find(sga);
    REQUIRE(at != std::string::npos);
    REQUIRE(permuted.find(surgical) == at + sga.size());
    permuted.replace(at, sga.size() + surgical.size(), surgical + sga);
    Outcome broken = cli("check " + q(write("permuted.bt", permuted)) +
                           " --require-before surgical_airway=laryngoscopy,intubating_sga");
    CHECK(broken.code == 3);
    CHECK(broken.out.find("VIOLATED") != std::string::npos);

    CHECK(cli("check airway --require-before surgical_airway=laryngoscopy,ghost").code == 1);
    CHECK(cli("check airway --require-before surgical_airway").code == 1);
}

TEST_CASE("serve: sessions, shutdown and a busy port")
{
    int out_pipe[2];
    REQUIRE(pipe(out_pipe) == 0);
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, out_pipe[0]);
    std::vector<std::string> args = {MEDBT_EXE, "serve", "airway", "--port", "0"};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    pid_t pid = 0;
    REQUIRE(posix_spawn(&pid, MEDBT_EXE, &actions, nullptr, argv.data(), environ) == 0);
    posix_spawn_file_actions_destroy(&actions);
    close(out_pipe[1]);
    FILE* out = fdopen(out_pipe[0], "r");

    char buffer[512] = {};
    REQUIRE(fgets(buffer, sizeof buffer, out));
    const std::string banner = buffer;
    const auto colon = banner.rfind(':');
    REQUIRE(colon != std::string::npos);
    const int port = std::stoi(banner.substr(colon + 1));

    httplib::Client client("127.0.0.1", port);
    auto created = client.Post("/sessions", "{}", "application/json");
    REQUIRE(created);
    CHECK(created->status == 200);
    const auto body = medbt::Json::parse(created->body);
    CHECK(body["prompt"]["leaf"] == "spo2_ok");
    REQUIRE(client.Post("/sessions", "{}", "application/json"));

    // A second server on the same port must refuse to start.
    Outcome busy = cli("serve blood_draw --port " + std::to_string(port));
    CHECK(busy.code == 2);

    kill(pid, SIGTERM);
    std::string rest;
    while (fgets(buffer, sizeof buffer, out)) rest += buffer;
    fclose(out);
    int status = 0;
    waitpid(pid, &status, 0);
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(rest.find("2 sessions closed s1 s2") != std::string::npos);
}

TEST_CASE("usage errors")
{
    CHECK(cli("").code == 1);
    CHECK(cli("frobnicate").code == 1);
    CHECK(cli("--help").code == 0);
}

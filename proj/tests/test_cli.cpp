#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// End-to-end checks of the command-line surface: exit codes, output files,
// and byte determinism of reports and SVGs.

#include "polyzono/serialization.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = POLYZONO_CLI_PATH;

int run_cli(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("cli_tmp") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

const char* kIdentityNet = R"({"input_dim": 2, "layers": [
    {"weights": [[1.0, 0.0], [0.0, 1.0]], "bias": [0.0, 0.0], "activation": "identity"}]})";

const char* kUnitBox = R"({"l": [-1.0, -1.0], "u": [1.0, 1.0]})";

}  // namespace

TEST_CASE("enclose writes the box back for an identity network") {
    TempDir dir("enclose");
    write(dir.file("net.json"), kIdentityNet);
    write(dir.file("box.json"), kUnitBox);

    const int code = run_cli("enclose --net " + dir.file("net.json") + " --box " +
                             dir.file("box.json") + " --out " + dir.path.string());
    CHECK(code == 0);

    const json pz = json::parse(slurp(dir.file("enclosure.json")));
    CHECK(pz["dims"]["n"] == 2);
    CHECK(pz["dims"]["h"] == 2);
    CHECK(pz["c"] == json::array({0.0, 0.0}));
    CHECK(json::parse(slurp(dir.file("enclose_report.json")))["command"] == "enclose");
}

TEST_CASE("missing files exit with code 2") {
    TempDir dir("missing");
    CHECK(run_cli("enclose --net /nonexistent.json --box /nonexistent.json --out " +
                  dir.path.string()) == 2);
    CHECK(run_cli("verify --net /nonexistent.json --spec /nonexistent.json") == 2);
    CHECK(run_cli("reach --setup /nonexistent.json") == 2);
}

TEST_CASE("verify exit codes cover all three verdicts") {
    TempDir dir("verify");
    write(dir.file("net.json"), kIdentityNet);

    write(dir.file("true.json"), R"({"mode": "prove", "A": [[1.0, 0.0]], "b": [2.0],
        "input_box": {"l": [-1.0, -1.0], "u": [1.0, 1.0]}})");
    CHECK(run_cli("verify --net " + dir.file("net.json") + " --spec " + dir.file("true.json") +
                  " --report " + dir.file("r1.json")) == 0);

    write(dir.file("false.json"), R"({"mode": "prove", "A": [[1.0, 0.0]], "b": [-2.0],
        "input_box": {"l": [-1.0, -1.0], "u": [1.0, 1.0]}})");
    CHECK(run_cli("verify --net " + dir.file("net.json") + " --spec " + dir.file("false.json") +
                  " --report " + dir.file("r2.json")) == 1);
    const json r2 = json::parse(slurp(dir.file("r2.json")));
    CHECK(r2["verdict"] == "falsified");
    REQUIRE(r2.contains("counterexample"));
    CHECK(r2["counterexample"]["input"].size() == 2);

    // a hat-shaped network needs splits; with budget 1 it must give up
    write(dir.file("hat.json"), R"({"input_dim": 1, "layers": [
        {"weights": [[1.0], [-1.0]], "bias": [0.5, 0.5], "activation": "relu"},
        {"weights": [[-1.0, -1.0]], "bias": [2.0], "activation": "identity"}]})");
    write(dir.file("hard.json"), R"({"mode": "prove", "A": [[1.0]], "b": [1.2],
        "input_box": {"l": [-1.0], "u": [1.0]}})");
    CHECK(run_cli("verify --net " + dir.file("hat.json") + " --spec " + dir.file("hard.json") +
                  " --max-subproblems 1 --report " + dir.file("r3.json")) == 3);
}

TEST_CASE("reach handles zero dynamics and goal checks") {
    TempDir dir("reach");
    write(dir.file("net.json"), kIdentityNet);

    const std::string setup = R"({
        "plant": {"linear": {"A": [[0.0, 0.0], [0.0, 0.0]], "B": [[0.0, 0.0], [0.0, 0.0]]}},
        "controller": "net.json",
        "X0": {"l": [0.1, 0.2], "u": [0.3, 0.4]},
        "dt": 0.5, "tF": 1.0,
        "goal": {"l": [-1.0, -1.0], "u": [1.0, 1.0]}})";
    write(dir.file("setup.json"), setup);
    CHECK(run_cli("reach --setup " + dir.file("setup.json") + " --out " + dir.path.string() +
                  " --report " + dir.file("report.json")) == 0);

    const json result = json::parse(slurp(dir.file("reach.json")));
    REQUIRE(result["time_points"].size() == 3);
    for (const json& jpz : result["time_points"]) {
        CHECK(jpz["c"][0].get<double>() == doctest::Approx(0.2));
        CHECK(jpz["c"][1].get<double>() == doctest::Approx(0.3));
    }
    CHECK(json::parse(slurp(dir.file("report.json")))["goal_proved"] == true);

    // unreachable goal reports inconclusive via exit code 3
    std::string bad = setup;
    const std::string from = R"("goal": {"l": [-1.0, -1.0], "u": [1.0, 1.0]})";
    bad.replace(bad.find(from), from.size(), R"("goal": {"l": [5.0, 5.0], "u": [6.0, 6.0]})");
    write(dir.file("bad.json"), bad);
    CHECK(run_cli("reach --setup " + dir.file("bad.json") + " --out " + dir.path.string() +
                  " --report " + dir.file("bad_report.json")) == 3);
}

TEST_CASE("propagator divergence exits with code 4") {
    TempDir dir("diverge");
    write(dir.file("setup.json"), R"({
        "plant": {"expressions": ["x1^2 + 0*u1"], "input_dim": 1, "disturbance_dim": 0},
        "controller": {"input_dim": 1, "layers": [
            {"weights": [[0.0]], "bias": [0.0], "activation": "identity"}]},
        "X0": {"l": [5.0], "u": [6.0]},
        "dt": 1.0, "tF": 1.0,
        "propagator": {"substeps": 1}})");
    CHECK(run_cli("reach --setup " + dir.file("setup.json") + " --out " + dir.path.string()) == 4);
}

TEST_CASE("plot renders deterministic SVG") {
    TempDir dir("plot");
    const polyzono::PolyZonotope example = [] {
        polyzono::Vec c(2);
        c << 4.0, 4.0;
        polyzono::Mat G(2, 3);
        G << 2.0, 1.0, 2.0, 0.0, 2.0, 2.0;
        polyzono::Mat GI(2, 1);
        GI << 1.0, 0.0;
        polyzono::ExpMat E(2, 3);
        E << 1, 0, 3, 0, 1, 1;
        return polyzono::PolyZonotope(c, G, GI, E);
    }();
    write(dir.file("set.json"), polyzono::pz_to_json(example).dump());

    const std::string cmd = "plot --set " + dir.file("set.json") + " --grid 40 --seed 7 --out-svg " +
                            dir.file("plot.svg") + " --report " + dir.file("report.json");
    CHECK(run_cli(cmd) == 0);
    const std::string first = slurp(dir.file("plot.svg"));
    CHECK(first.find("<svg") != std::string::npos);
    CHECK(first.find("<rect") != std::string::npos);

    CHECK(run_cli(cmd) == 0);
    CHECK(slurp(dir.file("plot.svg")) == first);
}

TEST_CASE("reports are byte-identical across runs") {
    TempDir dir("determinism");
    write(dir.file("net.json"), kIdentityNet);
    write(dir.file("box.json"), kUnitBox);

    const std::string cmd = "enclose --net " + dir.file("net.json") + " --box " +
                            dir.file("box.json") + " --out " + dir.path.string() + " --svg";
    CHECK(run_cli(cmd) == 0);
    const std::string report1 = slurp(dir.file("enclose_report.json"));
    const std::string svg1 = slurp(dir.file("enclosure.svg"));
    CHECK(run_cli(cmd) == 0);
    CHECK(slurp(dir.file("enclose_report.json")) == report1);
    CHECK(slurp(dir.file("enclosure.svg")) == svg1);
}

TEST_CASE("simulate writes trajectories") {
    TempDir dir("simulate");
    write(dir.file("net.json"), kIdentityNet);
    const std::string setup = R"({
        "plant": {"linear": {"A": [[0.0, 0.0], [0.0, 0.0]], "B": [[0.0, 0.0], [0.0, 0.0]]}},
        "controller": "net.json",
        "X0": {"l": [0.0, 0.0], "u": [0.1, 0.1]},
        "dt": 0.5, "tF": 1.0})";
    write(dir.file("setup.json"), setup);
    CHECK(run_cli("simulate --setup " + dir.file("setup.json") + " --samples 3 --out " +
                  dir.path.string()) == 0);
    const json doc = json::parse(slurp(dir.file("trajectories.json")));
    CHECK(doc["trajectories"].size() == 3);
}

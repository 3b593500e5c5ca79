#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

Result run_cli(const std::string& args) {
    const std::string cmd = std::string(SPINCHAIN_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    Result r;
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.out += buf.data();
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

json last_json_line(const std::string& out) {
    std::istringstream in(out);
    std::string line, last;
    while (std::getline(in, line)) {
        if (!line.empty()) last = line;
    }
    return json::parse(last);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path workdir() {
    const fs::path dir = fs::temp_directory_path() / "spinchain_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& name, int n_sites) {
    const json cfg = {
        {"chain", {{"n_sites", n_sites}, {"coupling", 1.0}}},
        {"reservoirs", {{"both", {{"kind", "lorentzian"}, {"g", 0.3}, {"gamma", 0.02}}}}},
        {"grid", {{"t_max", 5.0}, {"n_points", 11}}},
        {"output", {{"dir", dir.string()}, {"name", name}}},
    };
    const fs::path p = dir / (name + ".config.json");
    std::ofstream(p) << cfg.dump(2);
    return p;
}

}  // namespace

TEST_CASE("one-site chain exits with a config error report") {
    const fs::path dir = workdir();
    const auto r = run_cli("run " + write_config(dir, "one", 1).string());
    CHECK(r.status == 2);
    const json j = last_json_line(r.out);
    CHECK(j["status"] == "config-error");
    CHECK(j["error"] == "DimensionError");
    CHECK(j["message"].get<std::string>().find("2 sites") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "one.csv"));
}

TEST_CASE("run writes the CSV and its sidecar, and the sidecar reruns identically") {
    const fs::path dir = workdir();
    const auto r = run_cli("run " + write_config(dir, "five", 5).string());
    REQUIRE(r.status == 0);
    const json j = last_json_line(r.out);
    CHECK(j["status"] == "ok");
    CHECK(j["backend"] == "laplace");
    const std::string csv = slurp(dir / "five.csv");
    CHECK(csv.rfind("t,re_c1,im_c1,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);

    const fs::path again = dir / "again";
    const auto r2 = run_cli("run " + (dir / "five.json").string() + " --out-dir " + again.string());
    REQUIRE(r2.status == 0);
    CHECK(slurp(again / "five.csv") == csv);
}

TEST_CASE("backend override and cross-check report") {
    const fs::path dir = workdir();
    const auto r = run_cli("run " + write_config(dir, "cc", 3).string() + " --backend cross-check");
    REQUIRE(r.status == 0);
    const json j = last_json_line(r.out);
    CHECK(j["backend"] == "cross-check");
    const json report = json::parse(slurp(dir / "cc.crosscheck.json"));
    CHECK(report["within_tolerance"] == true);
    CHECK(run_cli("run " + write_config(dir, "bad", 3).string() + " --backend quantum").status == 2);
}

TEST_CASE("validate prints the resolved configuration") {
    const fs::path dir = workdir();
    const auto r = run_cli("validate " + write_config(dir, "v", 4).string());
    REQUIRE(r.status == 0);
    const json j = json::parse(r.out);
    CHECK(j["config"]["backend"] == "laplace");
    CHECK(j["config"]["inversion"]["method"] == "fourier-euler");
}

TEST_CASE("missing config file is an io error") {
    const auto r = run_cli("run /nonexistent/spinchain.json");
    CHECK(r.status == 4);
    CHECK(last_json_line(r.out)["status"] == "io-error");
}

TEST_CASE("out-of-range tolerance is rejected") {
    const fs::path dir = workdir();
    const auto r = run_cli("run " + write_config(dir, "tol", 3).string() + " --tol 1e-20");
    CHECK(r.status == 2);
    CHECK(last_json_line(r.out)["error"] == "ParamError");
}

TEST_CASE("sweep over an axis") {
    const fs::path dir = workdir();
    const fs::path cfg = write_config(dir, "sw", 4);
    const auto r = run_cli("sweep " + cfg.string() + " --axis reservoirs.both.g --values 0.1,0.3 --jobs 2");
    REQUIRE(r.status == 0);
    CHECK(last_json_line(r.out)["points"] == 2);
    CHECK(fs::exists(dir / "sw_000.csv"));
    CHECK(fs::exists(dir / "sw_001.json"));
    CHECK(fs::exists(dir / "sw.summary.csv"));

    const auto empty = run_cli("sweep " + cfg.string() + " --axis reservoirs.both.g --values \"\"");
    REQUIRE(empty.status == 0);
    CHECK(last_json_line(empty.out)["points"] == 0);

    const auto unknown = run_cli("sweep " + cfg.string() + " --axis chain.colour --values 1");
    CHECK(unknown.status == 2);
    CHECK(last_json_line(unknown.out)["error"] == "UnknownAxis");
}

TEST_CASE("usage errors") {
    CHECK(run_cli("").status != 0);
    CHECK(run_cli("frobnicate x.json").status != 0);
}

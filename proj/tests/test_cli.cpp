#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const char* cli() { return IREP_CLI_PATH; }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(cli()) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("irep_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::map<std::string, std::string> contents(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        out[fs::relative(e.path(), dir).string()] = ss.str();
    }
    return out;
}

}  // namespace

TEST_CASE("exit codes") {
    const fs::path d = fresh_dir("codes");
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("--version") == 0);
    CHECK(run_cli("matrix --e2 0.1 --bc 3 --jmax 500 --out " + d.string()) == 0);
    CHECK(run_cli("matrix --e2 0.7 --bc 3 --out " + d.string()) == 2);
    CHECK(run_cli("matrix --e2 0.1 --bc 0.5 --out " + d.string()) == 2);
    CHECK(run_cli("invade -w S99 -m S03 --out " + d.string()) == 2);
    CHECK(run_cli("abm --n 50 --out " + d.string()) == 2);
    CHECK(run_cli("no-such-command") == 2);
    CHECK(run_cli("reproduce 9Z --out " + d.string()) == 2);
}

TEST_CASE("repeated runs are byte-identical") {
    const fs::path a = fresh_dir("rep_a");
    const fs::path b = fresh_dir("rep_b");
    const std::string args =
        "abm --n 60 --delta 0.1 -w S03 -m S16 --seed 4 --replicates 2 --burn-in 2 --sample-units 5 "
        "--sample-stride 3 --out ";
    REQUIRE(run_cli(args + a.string()) == 0);
    REQUIRE(run_cli(args + b.string()) == 0);
    const auto ca = contents(a);
    CHECK(ca.size() >= 4);
    CHECK(ca == contents(b));

    const std::string eq = "equilibrium -w S09 -m S03 --e2 0.1 --jmax 50 --out ";
    REQUIRE(run_cli(eq + a.string()) == 0);
    REQUIRE(run_cli(eq + b.string()) == 0);
    CHECK(contents(a) == contents(b));
}

TEST_CASE("config files and overriding flags") {
    const fs::path d = fresh_dir("config");
    const fs::path cfg = d / "cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({"e2": 0.2, "bc": "3", "jmax": 300})";
    }
    REQUIRE(run_cli("matrix --config " + cfg.string() + " --out " + d.string()) == 0);
    CHECK(fs::exists(d / "matrix_e2_0.2_bc_3.csv"));
    REQUIRE(run_cli("matrix --config " + cfg.string() + " --e2 0.1 --out " + d.string()) == 0);
    CHECK(fs::exists(d / "matrix_e2_0.1_bc_3.csv"));

    const fs::path bad = d / "bad.json";
    {
        std::ofstream out(bad);
        out << R"({"nonsense": 1})";
    }
    CHECK(run_cli("matrix --config " + bad.string() + " --out " + d.string()) == 2);
}

TEST_CASE("output directory from the environment") {
    const fs::path d = fresh_dir("env");
    const std::string cmd = "IREP_OUTPUT_DIR=" + d.string() + " " + cli() + " public --e2 0.1 >/dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(d / "public_e1_0_e2_0.1.csv"));
}

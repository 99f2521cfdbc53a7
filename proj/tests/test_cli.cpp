// End-to-end checks of the command-line binary: exit codes, produced files,
// and byte-level determinism across repeated runs. The binary path comes in
// through the TPNS_BIN compile definition.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TPNS_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

struct ScratchDir {
    fs::path path;
    explicit ScratchDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("tpns_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
    REQUIRE(out.good());
}

// Small, quick configuration shared by the run/study cases.
const char* kTinyConfig = R"({
    "target_h": 0.5,
    "tau": 0.25,
    "T": 0.5,
    "tau_list": [0.5, 0.25, 0.125],
    "vtk_every": 2
})";

}  // namespace

TEST_CASE("usage errors exit with code 1", "[cli]") {
    CHECK(run_cli("") == 1);                       // missing subcommand
    CHECK(run_cli("frobnicate") == 1);             // unknown subcommand
    CHECK(run_cli("run --bogus-flag 1") == 1);     // unknown option
    CHECK(run_cli("--help") == 0);                 // help is a success
}

TEST_CASE("configuration problems exit with code 1", "[cli]") {
    const ScratchDir dir("badcfg");
    CHECK(run_cli("run --config " + (dir.path / "missing.json").string()) == 1);

    const fs::path malformed = dir.path / "malformed.json";
    write_file(malformed, "{ nope");
    CHECK(run_cli("run --config " + malformed.string()) == 1);

    const fs::path unknown = dir.path / "unknown.json";
    write_file(unknown, R"({"no_such_key": 1})");
    CHECK(run_cli("mesh --config " + unknown.string()) == 1);

    const fs::path badtau = dir.path / "badtau.json";
    write_file(badtau, R"({"tau": 2.0})");
    CHECK(run_cli("run --config " + badtau.string()) == 1);
}

TEST_CASE("mesh subcommand writes the mesh file", "[cli]") {
    const ScratchDir dir("mesh");
    const fs::path cfg = dir.path / "cfg.json";
    write_file(cfg, R"({"target_h": 0.5})");
    const fs::path out = dir.path / "out";
    REQUIRE(run_cli("mesh --config " + cfg.string() + " --out " + out.string()) == 0);
    REQUIRE(fs::exists(out / "mesh.txt"));
    CHECK(slurp(out / "mesh.txt").rfind("tpns-mesh 1\n", 0) == 0);
}

TEST_CASE("run subcommand writes step logs and periodic snapshots", "[cli]") {
    const ScratchDir dir("run");
    const fs::path cfg = dir.path / "cfg.json";
    write_file(cfg, kTinyConfig);
    const fs::path out = dir.path / "out";
    REQUIRE(run_cli("run --config " + cfg.string() + " --out " + out.string()) == 0);

    REQUIRE(fs::exists(out / "steps.csv"));
    const std::string steps = slurp(out / "steps.csv");
    CHECK(std::count(steps.begin(), steps.end(), '\n') == 3);  // header + 2 steps

    // vtk_every = 2 over 2 steps: initial state and the final step.
    CHECK(fs::exists(out / "solution_0000.vtk"));
    CHECK(fs::exists(out / "solution_0002.vtk"));
    CHECK(!fs::exists(out / "solution_0001.vtk"));
}

TEST_CASE("repeated runs are byte-identical", "[cli]") {
    const ScratchDir dir("det");
    const fs::path cfg = dir.path / "cfg.json";
    write_file(cfg, kTinyConfig);
    const fs::path out_a = dir.path / "a";
    const fs::path out_b = dir.path / "b";
    REQUIRE(run_cli("run --config " + cfg.string() + " --out " + out_a.string()) == 0);
    REQUIRE(run_cli("run --config " + cfg.string() + " --out " + out_b.string()) == 0);
    CHECK(slurp(out_a / "steps.csv") == slurp(out_b / "steps.csv"));
    CHECK(slurp(out_a / "solution_0002.vtk") == slurp(out_b / "solution_0002.vtk"));
}

TEST_CASE("study subcommand writes error and slope tables", "[cli]") {
    const ScratchDir dir("study");
    const fs::path cfg = dir.path / "cfg.json";
    write_file(cfg, kTinyConfig);
    const fs::path out = dir.path / "out";
    REQUIRE(run_cli("study --config " + cfg.string() + " --out " + out.string()) == 0);

    const std::string errors = slurp(out / "errors.csv");
    CHECK(errors.rfind("tau,err_u_L2L2,err_ustar_L2L2,err_P_L2L2,err_ustar_L2H1,err_u_minus_ustar\n",
                       0) == 0);
    CHECK(std::count(errors.begin(), errors.end(), '\n') == 5);  // header + 3 rows + slope row
    CHECK(errors.find("\nslope,") != std::string::npos);

    const std::string slopes = slurp(out / "slopes.csv");
    CHECK(slopes.rfind("quantity,slope\n", 0) == 0);
    CHECK(std::count(slopes.begin(), slopes.end(), '\n') == 6);
}

TEST_CASE("check subcommand passes on the default problem", "[cli][slow]") {
    const ScratchDir dir("check");
    const fs::path out = dir.path / "out";
    REQUIRE(run_cli("check --out " + out.string()) == 0);
    const std::string props = slurp(out / "properties.csv");
    CHECK(props.rfind("name,measured,threshold,passed\n", 0) == 0);
    CHECK(props.find(",0\n") == std::string::npos);  // no failing rows
}

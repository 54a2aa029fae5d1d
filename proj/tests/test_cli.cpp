#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* kBin = FBC_LAB_PATH;

struct Run {
    int exit_code = -1;
    std::string out;
};

// run the tool, capture combined output, translate the shell status
Run run_cli(const std::string& args) {
    fs::path log = fs::temp_directory_path() / "fbc_cli_test_log.txt";
    std::string cmd = std::string(kBin) + " " + args + " > " + log.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    Run r;
#ifdef _WIN32
    r.exit_code = status;
#else
    r.exit_code = WEXITSTATUS(status);
#endif
    std::ifstream in(log.string(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& leaf) {
    auto p = fs::temp_directory_path() / "fbc_cli_test" / leaf;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("help lists the subcommands") {
    auto r = run_cli("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("kernel-check") != std::string::npos);
    CHECK(r.out.find("current-sweep") != std::string::npos);
    CHECK(r.out.find("full-suite") != std::string::npos);
}

TEST_CASE("kernel-check writes the profile table and a manifest") {
    auto dir = scratch("kernel");
    auto r = run_cli("kernel-check --out-dir " + dir.string() + " --seed 3");
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(dir / "kernel_profile.csv"));
    REQUIRE(fs::exists(dir / "manifest.json"));

    std::string csv = slurp(dir / "kernel_profile.csv");
    CHECK(csv.rfind("# schema: kernel_profile v1\n", 0) == 0);

    std::string manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("\"subcommand\": \"kernel-check\"") != std::string::npos);
    CHECK(manifest.find("\"timing\"") != std::string::npos);
}

TEST_CASE("unknown config keys abort with status 2 and name the key") {
    auto dir = scratch("badkey");
    auto cfg = dir / "bad.ini";
    std::ofstream(cfg.string()) << "[kernel_check]\nalhpa = 2\n";
    auto r = run_cli("kernel-check --config " + cfg.string() + " --out-dir " +
                     dir.string());
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("kernel_check.alhpa") != std::string::npos);
}

TEST_CASE("malformed config lines abort with status 2") {
    auto dir = scratch("badline");
    auto cfg = dir / "bad.ini";
    std::ofstream(cfg.string()) << "[kernel_check]\nthis line has no equals\n";
    auto r = run_cli("kernel-check --config " + cfg.string() + " --out-dir " +
                     dir.string());
    CHECK(r.exit_code == 2);
}

TEST_CASE("unknown subcommands are rejected") {
    auto r = run_cli("definitely-not-a-subcommand");
    CHECK(r.exit_code != 0);
}

TEST_CASE("seeded runs are reproducible and flags override config") {
    auto d1 = scratch("seed_a");
    auto d2 = scratch("seed_b");
    auto d3 = scratch("seed_c");

    CHECK(run_cli("fbm-sample --out-dir " + d1.string() + " --seed 9").exit_code == 0);
    CHECK(run_cli("fbm-sample --out-dir " + d2.string() + " --seed 9").exit_code == 0);
    CHECK(slurp(d1 / "path_0.csv") == slurp(d2 / "path_0.csv"));

    // config file says seed 3, the flag must win
    auto cfg = d3 / "cfg.ini";
    std::ofstream(cfg.string()) << "seed = 3\n";
    CHECK(run_cli("fbm-sample --config " + cfg.string() + " --out-dir " + d3.string() +
                  " --seed 9")
              .exit_code == 0);
    CHECK(slurp(d3 / "path_0.csv") == slurp(d1 / "path_0.csv"));
}

TEST_CASE("wick-check quick mode passes and reports per-case rows") {
    auto dir = scratch("wick");
    auto r = run_cli("wick-check --out-dir " + dir.string() + " --quick --seed 7");
    CHECK(r.exit_code == 0);
    std::string csv = slurp(dir / "wick_suite.csv");
    CHECK(csv.find("case,lhs,rhs,z_score,pass") != std::string::npos);
}

TEST_CASE("cov-table emits both exact and reference columns") {
    auto dir = scratch("cov");
    auto r = run_cli("cov-table --out-dir " + dir.string());
    CHECK(r.exit_code == 0);
    std::string csv = slurp(dir / "cov_table.csv");
    CHECK(csv.find("c_exact,c_reference") != std::string::npos);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const char* bin = std::getenv("GRADECHO_CLI");
    REQUIRE_MESSAGE(bin != nullptr, "GRADECHO_CLI must point at the CLI binary");
    const std::string cmd = std::string(bin) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 512> buf{};
    while (fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("timing subcommand prints the reversal time") {
    const auto r = run_cli("timing --preset pr-yso --lx 1mm --delta-nu 1.11GHz --out cli-tmp/t");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("t_rev = 2.67604 us") != std::string::npos);
    CHECK(std::filesystem::exists("cli-tmp/t/plan.json"));
    CHECK(std::filesystem::exists("cli-tmp/t/schedule.csv"));
}

TEST_CASE("bound subcommand reproduces the published ratios") {
    const auto r = run_cli("bound --eps 0.9 --lx-over-lambda 133.3 --n 1.8 --out cli-tmp/b");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("0.000213") != std::string::npos);
    const auto r2 = run_cli("bound --eps 0.99 --lx-over-lambda 133.3 --n 1.8 --out cli-tmp/b");
    CHECK(r2.output.find("6.644") != std::string::npos);
}

TEST_CASE("ensemble subcommand reports unit backward retrieval") {
    const auto r = run_cli("ensemble --profile ideal-linear --n 10000 --out cli-tmp/e");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("backward rate at t_rev = 1.000000") != std::string::npos);
    CHECK(r.output.find("verdict: backward") != std::string::npos);
}

TEST_CASE("field subcommand solves a layout file") {
    // exercise the JSON layout path with a quadrupole written in micrometers
    const char* layout = R"({"period_lx_um": 160.0, "ly_um": 80.0,
        "electrodes": [
            {"x_um": -40, "y_um":  38, "w_um": 4, "h_um": 4, "potential_v":  0.5},
            {"x_um":  40, "y_um":  38, "w_um": 4, "h_um": 4, "potential_v": -0.5},
            {"x_um": -40, "y_um": -38, "w_um": 4, "h_um": 4, "potential_v": -0.5},
            {"x_um":  40, "y_um": -38, "w_um": 4, "h_um": 4, "potential_v":  0.5}],
        "region_a": [[-40, 40]]})";
    std::filesystem::create_directories("cli-tmp");
    std::ofstream("cli-tmp/quad.json") << layout;
    const auto r =
        run_cli("field --layout cli-tmp/quad.json --grid 128 --span-frac 0.8 --out cli-tmp/f");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("ratio =") != std::string::npos);
    CHECK(std::filesystem::exists("cli-tmp/f/field_map.csv"));
    CHECK(std::filesystem::exists("cli-tmp/f/shift_profile.csv"));
    CHECK(std::filesystem::exists("cli-tmp/f/linearity.json"));
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(run_cli("no-such-command").exit_code == 1);
    CHECK(run_cli("field --out cli-tmp/x").exit_code == 1); // neither layout nor family
    CHECK(run_cli("timing --lx nonsense --out cli-tmp/x").exit_code == 1);
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("seeded runs produce byte-identical outputs") {
    const std::string args =
        "ensemble --profile ideal-linear --n 512 --residual gaussian --residual-rms 2e5 "
        "--seed 11 --out ";
    CHECK(run_cli(args + "cli-tmp/d1").exit_code == 0);
    CHECK(run_cli(args + "cli-tmp/d2").exit_code == 0);
    const auto a = slurp("cli-tmp/d1/emission_series.csv");
    const auto b = slurp("cli-tmp/d2/emission_series.csv");
    REQUIRE(!a.empty());
    CHECK(a == b);
}

// Integration tests that drive the compiled CLI binary. The test runner
// passes its path through the QTSS_CLI environment variable.

#include <catch2/catch.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "qtss/report.hpp"

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    const char* bin = std::getenv("QTSS_CLI");
    REQUIRE(bin != nullptr);
    const std::string cmd = std::string(bin) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("cli run reconstructs on every trial") {
    const auto r = run_cli("run --d 3 --t 2 --n 2 --secret 2 --seed 7 --trials 50");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "correct=50/50"));
    CHECK(contains(r.output, "verdict=honest"));
    CHECK(!contains(r.output, "corrupt-detected=5"));
}

TEST_CASE("cli run t=1 single participant") {
    const auto r = run_cli("run --t 1 --n 1 --d 5 --secret 4");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "recovered=4"));
    CHECK(contains(r.output, "correct=1/1"));
}

TEST_CASE("cli tamper run is detected on the pre-verified instance") {
    const auto r = run_cli("run --d 5 --t 2 --n 4 --secret 2 --tamper 2:1 --seed 3 --trials 5");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "recovered=3"));  // shifted by delta = 1
    CHECK(contains(r.output, "verdict=corrupt-detected"));
    CHECK(contains(r.output, "correct=0/5"));
}

TEST_CASE("cli structured output is byte-identical across reruns") {
    const std::string args =
        "run --d 5 --t 3 --n 4 --secret 3 --seed 42 --trials 20 --format structured";
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(contains(a.output, "schema version=1"));

    // parses back into records; re-serialization reproduces the bytes
    const auto records = qtss::parse_records(a.output);
    CHECK(qtss::serialize_records(records) == a.output);
}

TEST_CASE("cli refuses oversized states with the computed d^t") {
    const auto r = run_cli("run --d 13 --t 6 --n 6 --secret 1");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.output, "4826809"));  // 13^6

    const auto ok = run_cli("run --d 13 --t 6 --n 6 --secret 1 --max-amplitudes 5000000 --trials 1");
    CHECK(ok.exit_code == 0);
}

TEST_CASE("cli rejects invalid configurations with exit code 2") {
    CHECK(run_cli("run --badflag").exit_code == 2);
    CHECK(run_cli("run --d 4").exit_code == 2);             // not prime
    CHECK(run_cli("run --d 3 --secret 7").exit_code == 2);  // secret >= d
    CHECK(run_cli("flaw-demo --t 1 --n 1").exit_code == 2);
    CHECK(run_cli("run --tamper 1:0").exit_code == 2);      // delta = 0
    CHECK(run_cli("run --active 1").exit_code == 2);        // |active| != t
    CHECK(run_cli("").exit_code == 2);                      // subcommand required
}

TEST_CASE("cli flaw-demo shows uniform song outcomes and exact proposed recovery") {
    const auto r = run_cli("flaw-demo --seed 11 --trials 600");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "uniform: yes"));
    CHECK(contains(r.output, "600/600 correct"));
    CHECK(contains(r.output, "analytic step-6 marginal: 0.333333333 0.333333333 0.333333333"));
}

TEST_CASE("cli flaw-demo generalizes to d=5 t=3") {
    const auto r = run_cli("flaw-demo --d 5 --t 3 --n 4 --secret 1 --seed 5 --trials 500");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "uniform: yes"));
    CHECK(contains(r.output,
                   "analytic step-6 marginal: 0.200000000 0.200000000 0.200000000 0.200000000 "
                   "0.200000000"));
}

TEST_CASE("cli tally prints measured vs table counts with the divergence note") {
    const auto r = run_cli("tally --d 7 --t 3 --n 4");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "song (measured):"));
    CHECK(contains(r.output, "iqft=1 measure=1"));      // song column
    CHECK(contains(r.output, "iqft=3 measure=3"));      // proposed, measured
    CHECK(contains(r.output, "iqft=2 measure=2"));      // proposed, table 1
    CHECK(contains(r.output, "the published table lists (t-1)"));

    const auto structured = run_cli("tally --d 7 --t 3 --n 4 --format structured");
    CHECK(structured.exit_code == 0);
    CHECK(contains(structured.output, "note divergence="));
}

TEST_CASE("cli help exits cleanly") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("run --help").exit_code == 0);
}

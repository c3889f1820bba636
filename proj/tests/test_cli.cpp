#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace mav;
using namespace tsup;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(MAVSCHED_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("generate -> validate -> solve round trip") {
    auto gen = run("generate --lines 1 --stops 3 --trips 2 --horizon 16 --scenarios 1 "
                   "--groups 2 --slack 1 --flex-stops 1 --seed 5 -o /tmp/mav_cli_a.json");
    REQUIRE(gen.exit_code == 0);
    auto val = run("validate /tmp/mav_cli_a.json");
    CHECK(val.exit_code == 0);
    CHECK(val.out.find("instance ok") != std::string::npos);

    auto mono = run("solve /tmp/mav_cli_a.json --method monolithic --no-timestamp");
    CHECK(mono.exit_code == 0);
    CHECK(mono.out.find("\"status\": \"Optimal\"") != std::string::npos);

    auto il = run("solve /tmp/mav_cli_a.json --method il --no-timestamp");
    CHECK(il.exit_code == 0);
    CHECK(il.out.find("\"cuts\"") != std::string::npos);

    auto rh = run("solve /tmp/mav_cli_a.json --method rh-il --ch 8 --ph 12 --no-timestamp");
    CHECK(rh.exit_code == 0);

    auto seq = run("solve /tmp/mav_cli_a.json --method sequential --no-timestamp");
    CHECK(seq.exit_code == 0);
}

TEST_CASE("reports are byte-identical without timestamps") {
    run("generate --lines 2 --stops 3 --trips 2 --horizon 18 --scenarios 2 --groups 2 "
        "--transfer-fraction 0.5 --slack 1 --flex-stops 1 --seed 9 -o /tmp/mav_cli_b.json");
    auto a = run("solve /tmp/mav_cli_b.json --method il --no-timestamp -o /tmp/mav_cli_b1.out");
    auto b = run("solve /tmp/mav_cli_b.json --method il --no-timestamp -o /tmp/mav_cli_b2.out");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(slurp("/tmp/mav_cli_b1.out") == slurp("/tmp/mav_cli_b2.out"));
}

TEST_CASE("infeasible instances exit with code 2") {
    // A group larger than Q*CAP can never board within capacity.
    Instance inst = one_line(2, 1, 12, 1, 0);
    add_group(inst, 0, inst.eptn.line_index("a"), 1, 2, 0, 9);
    save_instance(inst, "/tmp/mav_cli_inf.json");
    auto r = run("solve /tmp/mav_cli_inf.json --method monolithic --no-timestamp");
    CHECK(r.exit_code == 2);
}

TEST_CASE("compare emits the strategy and method tables") {
    run("generate --lines 2 --stops 3 --trips 2 --horizon 18 --scenarios 1 --groups 2 "
        "--transfer-fraction 0.5 --slack 1 --flex-stops 1 --seed 4 -o /tmp/mav_cli_c.json");
    auto strat = run("compare /tmp/mav_cli_c.json --what strategies");
    REQUIRE(strat.exit_code == 0);
    CHECK(strat.out.find("fixed") != std::string::npos);
    CHECK(strat.out.find("partial") != std::string::npos);
    CHECK(strat.out.find("complete") != std::string::npos);
    auto methods = run("compare /tmp/mav_cli_c.json --what methods");
    REQUIRE(methods.exit_code == 0);
    CHECK(methods.out.find("integrated") != std::string::npos);
    CHECK(methods.out.find("sequential") != std::string::npos);
    auto solvers = run("compare /tmp/mav_cli_c.json --what solvers");
    CHECK(solvers.exit_code == 0);  // equality of monolithic and il objectives
}

TEST_CASE("oracle-check passes clean and fails the corrupted negative control") {
    run("generate --lines 1 --stops 3 --trips 2 --horizon 14 --scenarios 1 --groups 2 "
        "--slack 1 --flex-stops 1 --seed 3 -o /tmp/mav_cli_d.json");
    auto ok = run("oracle-check /tmp/mav_cli_d.json");
    REQUIRE(ok.exit_code == 0);
    CHECK(ok.out.find("MISMATCH") == std::string::npos);
    auto bad = run("oracle-check /tmp/mav_cli_d.json --corrupt-solver");
    CHECK(bad.exit_code == 2);
    CHECK(bad.out.find("monolithic") != std::string::npos);
    CHECK(bad.out.find("MISMATCH") != std::string::npos);
}

TEST_CASE("pareto and scenario-study emit their tables") {
    run("generate --lines 1 --stops 3 --trips 2 --horizon 16 --scenarios 2 --groups 2 "
        "--slack 1 --flex-stops 1 --seed 8 -o /tmp/mav_cli_e.json");
    auto par = run("pareto /tmp/mav_cli_e.json --pareto-steps 3");
    REQUIRE(par.exit_code == 0);
    CHECK(par.out.find("w1,w2,") != std::string::npos);
    auto stu = run("scenario-study /tmp/mav_cli_e.json --scenarios-sample 1 2 --seed 2");
    REQUIRE(stu.exit_code == 0);
    CHECK(stu.out.find("scenarios,train_objective") != std::string::npos);
}

TEST_CASE("bad inputs exit with code 1 and a message") {
    auto r = run("solve /tmp/definitely_missing_file.json --method il");
    CHECK(r.exit_code == 1);
    auto guard = run("oracle-check /tmp/mav_cli_e.json --guard 1");
    CHECK(guard.exit_code == 1);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace mav;

namespace {

ModelIr random_binary_milp(std::mt19937_64& rng, int n, int m) {
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ModelIr ir;
    for (int j = 0; j < n; ++j) ir.add_var("b" + std::to_string(j), 0, 1, VarType::Binary);
    for (int j = 0; j < n; ++j) ir.objective.add(j, coef(rng));
    for (int i = 0; i < m; ++i) {
        Row row;
        for (int j = 0; j < n; ++j)
            if (unit(rng) < 0.5) row.terms.emplace_back(j, coef(rng));
        if (row.terms.empty()) row.terms.emplace_back(0, 1.0);
        row.sense = unit(rng) < 0.5 ? Sense::Le : Sense::Ge;
        row.rhs = coef(rng);
        row.label = "random";
        ir.rows.push_back(row);
    }
    return ir;
}

double enumerate_optimum(const ModelIr& ir, bool* feasible) {
    int n = ir.num_vars();
    double best = 0.0;
    *feasible = false;
    for (long long mask = 0; mask < (1LL << n); ++mask) {
        std::vector<double> x(n);
        for (int j = 0; j < n; ++j) x[j] = (mask >> j) & 1;
        if (!check_solution(ir, x, 1e-9).empty()) continue;
        double obj = evaluate_objective(ir, x);
        if (!*feasible || obj < best) {
            best = obj;
            *feasible = true;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("binary knapsack toy solves to 3") {
    ModelIr ir;
    ir.add_var("x", 0, 1, VarType::Binary);
    ir.add_var("y", 0, 1, VarType::Binary);
    ir.objective.add(0, -3.0);
    ir.objective.add(1, -2.0);
    ir.add_row({{0, 1.0}, {1, 1.0}}, Sense::Le, 1.0, "knapsack");
    MilpOptions opts;
    opts.watched = {0, 1};
    MilpSolution sol = solve_milp(ir, opts);
    REQUIRE(sol.status == MilpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(-3.0));
    CHECK(sol.x[0] == doctest::Approx(1.0));
}

TEST_CASE("branch bounds split floor/ceil") {
    auto bb = branch_bounds(7, 0.4);
    CHECK(bb.le_up == 0.0);
    CHECK(bb.ge_lo == 1.0);
    auto bb2 = branch_bounds(3, 2.6);
    CHECK(bb2.le_up == 2.0);
    CHECK(bb2.ge_lo == 3.0);
}

TEST_CASE("random binary MILPs match exhaustive enumeration") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 120; ++t) {
        ModelIr ir = random_binary_milp(rng, 2 + t % 9, 1 + t % 6);
        bool feasible;
        double opt = enumerate_optimum(ir, &feasible);
        MilpOptions opts;
        for (int j = 0; j < ir.num_vars(); ++j) opts.watched.push_back(j);
        MilpSolution sol = solve_milp(ir, opts);
        if (!feasible) {
            CHECK(sol.status == MilpStatus::Infeasible);
        } else {
            REQUIRE(sol.status == MilpStatus::Optimal);
            CHECK(sol.objective == doctest::Approx(opt).epsilon(1e-7).scale(1.0));
            CHECK(check_solution(ir, sol.x, 1e-6).empty());
        }
    }
}

TEST_CASE("an inert callback changes nothing") {
    std::mt19937_64 rng(17);
    ModelIr ir = random_binary_milp(rng, 8, 4);
    MilpOptions plain;
    for (int j = 0; j < ir.num_vars(); ++j) plain.watched.push_back(j);
    MilpSolution base = solve_milp(ir, plain);

    MilpOptions with_cb = plain;
    bool fired = false;
    with_cb.callback = [&](const CandidateView& cand) -> std::vector<CutRow> {
        if (fired || !cand.integral) return {};
        fired = true;
        CutRow cut;
        cut.terms.emplace_back(0, 1.0);
        cut.sense = Sense::Ge;
        cut.rhs = -1.0;  // x0 >= -1 never binds
        cut.label = "inert";
        return {cut};
    };
    MilpSolution sol = solve_milp(ir, with_cb);
    CHECK(sol.status == base.status);
    if (base.status == MilpStatus::Optimal)
        CHECK(sol.objective == doctest::Approx(base.objective));
}

TEST_CASE("final bound never exceeds the incumbent") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 30; ++t) {
        ModelIr ir = random_binary_milp(rng, 10, 6);
        MilpOptions opts;
        for (int j = 0; j < ir.num_vars(); ++j) opts.watched.push_back(j);
        MilpSolution sol = solve_milp(ir, opts);
        if (sol.status == MilpStatus::Optimal) CHECK(sol.bound <= sol.objective + 1e-9);
    }
}

TEST_CASE("determinism: identical model and limits replay identically") {
    std::mt19937_64 rng(31);
    ModelIr ir = random_binary_milp(rng, 12, 8);
    MilpOptions opts;
    for (int j = 0; j < ir.num_vars(); ++j) opts.watched.push_back(j);
    MilpSolution a = solve_milp(ir, opts);
    MilpSolution b = solve_milp(ir, opts);
    CHECK(a.node_count == b.node_count);
    CHECK(a.status == b.status);
    if (a.status == MilpStatus::Optimal) CHECK(a.x == b.x);
}

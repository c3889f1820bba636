#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dense_simplex.hpp"
#include "support.hpp"

using namespace mav;

namespace {

LpProblem random_lp(std::mt19937_64& rng, int m, int n) {
    std::uniform_real_distribution<double> coef(-4.0, 4.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    LpProblem lp;
    std::vector<double> x0;
    for (int j = 0; j < n; ++j) {
        double lo = std::floor(coef(rng));
        double up = lo + std::ceil(unit(rng) * 6) + 1;
        lp.add_var(lo, up, coef(rng));
        x0.push_back(lo + unit(rng) * (up - lo));
    }
    for (int i = 0; i < m; ++i) {
        LpRow row;
        double act = 0.0;
        for (int j = 0; j < n; ++j) {
            if (unit(rng) < 0.3) {
                double c = coef(rng);
                if (c != 0.0) {
                    row.terms.emplace_back(j, c);
                    act += c * x0[j];
                }
            }
        }
        if (row.terms.empty()) {
            row.terms.emplace_back(i % n, 1.0);
            act = x0[i % n];
        }
        double roll = unit(rng);
        if (roll < 0.45) {
            row.sense = Sense::Le;
            row.rhs = act + unit(rng) * 2;
        } else if (roll < 0.9) {
            row.sense = Sense::Ge;
            row.rhs = act - unit(rng) * 2;
        } else {
            row.sense = Sense::Eq;
            row.rhs = act;
        }
        lp.rows.push_back(row);
    }
    return lp;
}

void check_certificates(const LpProblem& lp, const LpSolution& sol) {
    for (int j = 0; j < lp.num_vars; ++j) {
        CHECK(sol.x[j] >= lp.lo[j] - 1e-7);
        CHECK(sol.x[j] <= lp.up[j] + 1e-7);
    }
    for (size_t i = 0; i < lp.rows.size(); ++i) {
        double lhs = 0.0;
        for (auto [j, c] : lp.rows[i].terms) lhs += c * sol.x[j];
        if (lp.rows[i].sense == Sense::Le) CHECK(lhs <= lp.rows[i].rhs + 1e-6);
        if (lp.rows[i].sense == Sense::Ge) CHECK(lhs >= lp.rows[i].rhs - 1e-6);
        if (lp.rows[i].sense == Sense::Eq) CHECK(std::abs(lhs - lp.rows[i].rhs) <= 1e-6);
        if (lp.rows[i].sense == Sense::Le) CHECK(sol.duals[i] <= 1e-7);
        if (lp.rows[i].sense == Sense::Ge) CHECK(sol.duals[i] >= -1e-7);
        double slack = lp.rows[i].rhs - lhs;
        CHECK(std::abs(slack * sol.duals[i]) <= 1e-5 * (1.0 + std::abs(lp.rows[i].rhs)));
    }
    for (int j = 0; j < lp.num_vars; ++j) {
        bool at_lo = std::abs(sol.x[j] - lp.lo[j]) <= 1e-6;
        bool at_up = std::abs(sol.x[j] - lp.up[j]) <= 1e-6;
        if (at_lo && !at_up) CHECK(sol.reduced[j] >= -1e-6);
        if (at_up && !at_lo) CHECK(sol.reduced[j] <= 1e-6);
        if (!at_lo && !at_up) CHECK(std::abs(sol.reduced[j]) <= 1e-6);
    }
    // Strong duality with bound terms.
    double dual_obj = 0.0;
    for (size_t i = 0; i < lp.rows.size(); ++i) dual_obj += sol.duals[i] * lp.rows[i].rhs;
    for (int j = 0; j < lp.num_vars; ++j) {
        bool at_lo = std::abs(sol.x[j] - lp.lo[j]) <= 1e-6;
        dual_obj += sol.reduced[j] * (at_lo ? lp.lo[j] : lp.up[j]);
    }
    CHECK(std::abs(dual_obj - sol.objective) <= 1e-6 * (1.0 + std::abs(sol.objective)));
}

}  // namespace

TEST_CASE("one-variable LP: objective 3 and dual 1 on the binding row") {
    LpProblem lp;
    lp.add_var(0.0, 10.0, 1.0);
    lp.rows.push_back({{{0, 1.0}}, Sense::Ge, 3.0});
    LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(sol.duals[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("contradictory rows are infeasible") {
    LpProblem lp;
    lp.add_var(0.0, 10.0, 1.0);
    lp.rows.push_back({{{0, 1.0}}, Sense::Ge, 3.0});
    lp.rows.push_back({{{0, 1.0}}, Sense::Le, 2.0});
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("degenerate and equality-heavy LPs solve with certificates") {
    LpProblem lp;
    int x = lp.add_var(0, 5, 0.0);
    int y = lp.add_var(0, 5, -1.0);
    lp.rows.push_back({{{x, 1.0}, {y, 1.0}}, Sense::Eq, 4.0});
    lp.rows.push_back({{{x, 1.0}, {y, -1.0}}, Sense::Le, 0.0});
    lp.rows.push_back({{{x, 2.0}, {y, 2.0}}, Sense::Le, 8.0});
    LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(-4.0));
    check_certificates(lp, sol);
}

TEST_CASE("random LPs match the dense tableau oracle") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> md(2, 20), nd(2, 40);
    int optimal = 0;
    for (int t = 0; t < 250; ++t) {
        LpProblem lp = random_lp(rng, md(rng), nd(rng));
        LpSolution sol = solve_lp(lp);
        tsup::DenseResult oracle = tsup::dense_simplex(lp);
        REQUIRE(sol.status == oracle.status);
        if (sol.status == LpStatus::Optimal) {
            ++optimal;
            CHECK(sol.objective == doctest::Approx(oracle.objective).epsilon(1e-6).scale(1.0));
            check_certificates(lp, sol);
        }
    }
    CHECK(optimal > 100);
}

TEST_CASE("deliberately infeasible random LPs agree with the oracle") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 60; ++t) {
        LpProblem lp = random_lp(rng, 6, 8);
        lp.rows.push_back({{{0, 1.0}}, Sense::Ge, lp.up[0] + 1.0});
        LpSolution sol = solve_lp(lp);
        CHECK(sol.status == LpStatus::Infeasible);
        CHECK(tsup::dense_simplex(lp).status == LpStatus::Infeasible);
    }
}

TEST_CASE("determinism: identical inputs give identical runs") {
    std::mt19937_64 rng(11);
    LpProblem lp = random_lp(rng, 15, 30);
    LpSolution a = solve_lp(lp);
    LpSolution b = solve_lp(lp);
    CHECK(a.iterations == b.iterations);
    CHECK(a.objective == b.objective);
    CHECK(a.x == b.x);
}

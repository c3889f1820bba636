#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mav/model_build.hpp"

namespace mav {

// Trace of one scenario's passenger flows under a fixed timetable and plan.
struct FlowTrace {
    struct Leg {
        int trip = 0;          // 1-based; 0 = leg never boarded
        Minutes wait = 0;      // measured from the group's wait reference
        bool in_vehicle = false;
    };
    std::vector<std::vector<Leg>> legs;                           // per group
    std::vector<std::vector<std::vector<long long>>> board;      // [l][k][i]
    std::vector<std::vector<std::vector<long long>>> alight;
    std::vector<std::vector<std::vector<long long>>> load;
    std::vector<std::vector<long long>> depot_out;               // [m][t] = DV - AV
    std::vector<long long> kappa_need;                           // per depot
    double origin_wait_cost = 0.0;    // phi1 * eps * theta_T weighted, no probability
    double transfer_wait_cost = 0.0;
    double oper_cost = 0.0;           // phi2 weighted, no probability
};

struct FlowResult {
    std::optional<FlowTrace> trace;
    std::string violation;  // non-empty when the pair breaks a constraint

    bool ok() const { return trace.has_value(); }
};

// Deterministic first-available assignment; verifies the timetable against
// its windows/headways and the plan against capacity, coupling windows,
// balance, unidirectionality and depot stocks.
FlowResult simulate_flow(const Instance& inst, const Timetable& tt, const CapacityPlan& plan,
                         int scenario);

struct SecondStagePlanOption {
    double cost = 0.0;  // phi1*eps2 transfer waits + phi2 operations (no probability)
    CapacityPlan plan;
};

struct SecondStageResult {
    bool feasible = false;
    SecondStagePlanOption best;
    // All feasible options sorted by cost; used for joint fleet-budget search.
    std::vector<SecondStagePlanOption> options;
};

// Exact enumeration of formations and unit moves for one scenario under a
// fixed timetable. `collect_all` retains the full option list.
SecondStageResult oracle_second_stage(const Instance& inst, const FixedFirstStage& fixed,
                                      int scenario, Strategy strategy, bool collect_all = false);

struct OracleSolution {
    bool feasible = false;
    double objective = 0.0;
    Timetable timetable;
    std::vector<CapacityPlan> plans;
    CostBreakdown costs;
};

// Exhaustive search over grid timetables within the departure windows,
// formations, and coupling moves. Throws SearchSpaceTooLarge past the guard.
OracleSolution brute_force_solve(const Instance& inst, Strategy strategy,
                                 long long guard = 10'000'000);

// Enumerates all timetables (departure tables) feasible for the windows and
// headways; the visitor returns false to stop early.
void enumerate_timetables(const Instance& inst,
                          const std::function<bool(const Timetable&)>& visit,
                          long long guard = 10'000'000);

// Cost pieces for a complete solution, probability-weighted, exact.
CostBreakdown evaluate_solution_costs(const Instance& inst, const FixedFirstStage& fixed,
                                      const std::vector<CapacityPlan>& plans);

// Minimal per-depot stock a plan's flows require in one scenario.
std::vector<long long> depot_needs(const Instance& inst, const FixedFirstStage& fixed,
                                   const CapacityPlan& plan, int scenario);

long long brute_force_estimate(const Instance& inst);

}  // namespace mav

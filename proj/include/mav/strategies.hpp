#pragma once

#include "mav/rolling.hpp"

namespace mav {

struct MonoResult {
    MilpStatus status = MilpStatus::Infeasible;
    double objective = 0.0;
    Timetable timetable;
    std::vector<CapacityPlan> plans;
    FixedFirstStage first_stage;
    CostBreakdown costs;
    double gap = 0.0;
    long long nodes = 0;
    double wall_sec = 0.0;
    long long used_maus = 0;
};

// Monolithic branch-and-cut solve with exact cost recomputation and a
// secondary min-fleet pass at the optimal objective.
MonoResult solve_monolithic(const Instance& inst, Strategy strategy, bool valid_inequalities,
                            const MilpLimits& limits, bool minimize_fleet = true);

struct StrategyReport {
    Strategy strategy;
    MilpStatus status = MilpStatus::Infeasible;
    double passenger_cost = 0.0;
    double oper_cost = 0.0;
    double objective = 0.0;
    long long used_maus = 0;
    double wall_sec = 0.0;
};

std::vector<StrategyReport> compare_strategies(const Instance& inst, const MilpLimits& limits);

struct SequentialReport {
    bool feasible = false;
    double step1_objective = 0.0;  // origin-wait cost of the timetable
    double objective = 0.0;        // full objective when step 2 is feasible
    double passenger_cost = 0.0;
    double oper_cost = 0.0;
    long long used_maus = 0;
    Timetable timetable;
    std::vector<CapacityPlan> plans;
};

SequentialReport solve_sequential(const Instance& inst, const MilpLimits& limits);

struct ScenarioStudyRow {
    int count = 0;
    double train_objective = 0.0;
    double eval_objective = 0.0;  // out-of-sample over the full scenario set
    double wall_sec = 0.0;
};

std::vector<ScenarioStudyRow> scenario_count_study(const Instance& base,
                                                   const std::vector<int>& counts, uint64_t seed,
                                                   const MilpLimits& limits);

struct ParetoPoint {
    double w1 = 0.0, w2 = 0.0;
    double normalized = 0.0;
    double raw_passenger = 0.0;
    double raw_oper = 0.0;
    bool dominated = false;
};

struct ParetoBounds {
    double pass_lo = 0.0, pass_hi = 0.0;  // pass_lo is 0 by construction
    double oper_lo = 0.0, oper_hi = 0.0;
};

ParetoBounds pareto_bounds(const Instance& inst);
std::vector<ParetoPoint> pareto_sweep(const Instance& inst, int steps, const MilpLimits& limits);

}  // namespace mav

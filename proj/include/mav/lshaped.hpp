#pragma once

#include <optional>
#include <ostream>

#include "mav/milp.hpp"
#include "mav/model_build.hpp"
#include "mav/oracle.hpp"

namespace mav {

// Lower bound on the second-stage value: one unit per trip and stop.
double lower_bound_L(const Instance& inst);

enum class CutKind { Optimality, Subgradient, Feasibility };

struct CutRecord {
    CutKind kind;
    CutRow row;
    long long snapshot_id = -1;
    // Generating snapshot and its exact recourse value (optimality cuts),
    // kept for the validity test-suite.
    std::vector<std::pair<int, double>> snapshot_bits;
    double f_value = 0.0;
};

// Watched first-stage candidate: the semantic snapshot plus the 0/1 values of
// the master's z / chi / zeta variables it was taken from.
struct FirstStageSnapshot {
    FixedFirstStage fixed;
    std::vector<std::pair<int, double>> bits;  // master var -> 0/1 over z, chi, zeta
    long long id = -1;
};

enum class EvalMode { Integer, LpRelaxed };

struct ScenarioEval {
    bool feasible = false;
    double value = 0.0;  // subproblem objective (no probability weight)
    // LpRelaxed mode: duals of the pin rows keyed back to master variables.
    std::vector<std::pair<VarKey, double>> z_duals;
    std::vector<std::pair<VarKey, double>> chi_duals;   // key includes scenario
    std::vector<std::pair<VarKey, double>> zeta_duals;  // key includes scenario
    std::vector<double> x;  // subproblem solution vector (Integer mode)
};

struct SecondStageEval {
    bool all_feasible = false;
    double total = 0.0;  // sum of rho_w * value_w
    std::vector<ScenarioEval> per_scenario;
};

SecondStageEval evaluate_second_stage(const Instance& inst, const FixedFirstStage& fixed,
                                      EvalMode mode, bool valid_inequalities, int threads = 1);

struct LShapedConfig {
    double gap = 0.0;
    double time_sec = 1e18;
    bool use_valid_inequalities = true;
    bool subgradient_cuts = true;
    int threads = 1;
    std::ostream* node_log = nullptr;
};

struct BoundsRecord {
    double upper, lower;
};

struct CutCounts {
    long long optimality = 0, subgradient = 0, feasibility = 0;
};

struct LShapedSolution {
    MilpStatus status = MilpStatus::Infeasible;
    double objective = 0.0;
    Timetable timetable;
    std::vector<CapacityPlan> plans;
    FixedFirstStage first_stage;
    CostBreakdown costs;
    double gap = 0.0;
    double wall_sec = 0.0;
    long long nodes = 0;
    CutCounts cuts;
    std::vector<BoundsRecord> bound_trace;  // (UB, LB) at each update point
    long long used_maus = 0;
    std::vector<CutRecord> cut_log;
};

// Cut constructors, exposed for the validity test-suite.
CutRow make_optimality_cut(const FirstStageSnapshot& snap, int eta_var, double f_value, double L);
CutRow make_subgradient_cut(const Instance& inst, const BuiltModel& master,
                            const FirstStageSnapshot& snap, int eta_var,
                            const SecondStageEval& lp_eval);
CutRow make_feasibility_cut(const FirstStageSnapshot& snap);

FirstStageSnapshot snapshot_from_candidate(const Instance& inst, const BuiltModel& master,
                                           const std::vector<double>& x);

LShapedSolution run_integer_lshaped(const Instance& inst, const LShapedConfig& config);

}  // namespace mav

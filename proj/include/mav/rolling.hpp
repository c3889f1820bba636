#pragma once

#include <optional>

#include "mav/lshaped.hpp"

namespace mav {

struct HorizonConfig {
    Minutes ch = 0;  // control horizon (committed span per stage)
    Minutes ph = 0;  // prediction horizon (optimized lookahead)
};

enum class InnerSolver { IntegerLShaped, Monolithic };

struct GroupProgress {
    int legs_resolved = 0;
    std::vector<int> boarded;  // trip per resolved leg (1-based)
    bool stranded = false;     // no committed or future trip can serve the next leg
};

// Rolling state between stages: committed plan fragments and passenger /
// vehicle status per scenario.
struct SystemState {
    Minutes clock = 0;
    // [line][trip]: committed departure minutes per stop (empty = uncommitted)
    std::vector<std::vector<std::vector<Minutes>>> committed_depart;
    // [w][line][trip][stop]: committed formations (empty = uncommitted)
    std::vector<std::vector<std::vector<std::vector<long long>>>> committed_formation;
    std::vector<std::vector<MoveOp>> committed_moves;  // per scenario
    std::vector<std::vector<GroupProgress>> progress;  // [w][p]
    // Classification per scenario (group ids)
    std::vector<std::vector<int>> removed, pending_transfer, pending_alight, remaining;

    bool trip_committed(int l, int k1) const {
        return !committed_depart[l][k1 - 1].empty();
    }
};

SystemState initial_state(const Instance& inst);

// Arrival/departure realization of all committed trips.
Timetable simulate_timetable(const Instance& inst, const SystemState& state);

// Re-derives passenger progress and the spec's status sets from the committed
// plan fragments, and advances the clock by ch.
SystemState update_status(const Instance& inst, SystemState state, Minutes ch);

struct SubInstance {
    Instance instance;
    std::vector<int> first_trip;            // per line: original index of stage trip 1 (0 = none)
    std::vector<std::vector<int>> group_map;  // per scenario: stage group -> original id
    std::vector<std::vector<char>> commit_mask;  // per line/stage-trip: commits this stage
    Minutes ph_end = 0;
    int total_trips = 0;
};

SubInstance select_window(const Instance& inst, const SystemState& state, Minutes ph, Minutes ch);

struct StageTrace {
    int stage = 0;
    Minutes clock = 0;
    int trips = 0;
    int groups = 0;
    double stage_objective = 0.0;
    double cumulative_objective = 0.0;
    double wall_sec = 0.0;
};

struct RollingSolution {
    MilpStatus status = MilpStatus::Infeasible;
    double objective = 0.0;
    Timetable timetable;
    std::vector<CapacityPlan> plans;
    FixedFirstStage first_stage;
    CostBreakdown costs;
    std::vector<StageTrace> stages;
    double wall_sec = 0.0;
    long long used_maus = 0;
};

struct RollingConfig {
    InnerSolver inner = InnerSolver::IntegerLShaped;
    LShapedConfig il;           // also carries gap/time for the monolithic inner
    Strategy strategy = Strategy::CompletelyFlexible;
    std::ostream* stage_log = nullptr;  // JSON-lines stage trace
};

RollingSolution run_rolling_horizon(const Instance& inst, const HorizonConfig& horizon,
                                    const RollingConfig& config);

// (objective - best_known) / objective * 100.
double opt_gap(double objective, double best_known);

}  // namespace mav

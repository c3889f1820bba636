#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mav/network.hpp"

namespace mav {

struct TimeGrid {
    Minutes delta = 1;   // minutes per interval
    int horizon = 1;     // number of intervals; planning span is [0, delta*horizon]

    Minutes span() const { return delta * horizon; }
};

// Per-trip schedule template on one directed line.
struct TripTemplate {
    Minutes origin_time = 0;              // scheduled arrival at the first stop
    std::vector<Minutes> run_times;       // per section, size = stops-1
    Minutes shift_min = 0, shift_max = 0; // bounds on the departure shift at stop 1
    std::vector<Minutes> dwell_min;       // per stop
    std::vector<Minutes> dwell_max;       // per stop
};

struct PassengerGroup {
    int group_id = -1;
    long long size = 1;
    Minutes arrival_time = 0;        // u_p at the origin stop (wait reference)
    int origin_stop = -1;            // 1-based stop index on lines.front()
    int dest_stop = -1;              // 1-based stop index on lines.back()
    std::vector<int> lines;          // directed line indices, in travel order
    std::vector<int> corridors;      // corridor indices linking consecutive lines

    // Rolling-horizon carry-over: a group already aboard whose next boarding
    // becomes eligible at `eligibility_time` while its wait is still measured
    // from `arrival_time` and priced as a transfer wait.
    Minutes eligibility_time = -1;   // <0: same as arrival_time
    bool transfer_carry = false;

    Minutes board_threshold() const {
        return eligibility_time >= 0 ? eligibility_time : arrival_time;
    }
};

struct Scenario {
    int scenario_id = -1;
    double probability = 0.0;        // dyadic rationals survive serialization exactly
    std::vector<PassengerGroup> groups;
};

struct CostModel {
    long long cap_per_unit = 1;      // passenger capacity of one unit
    long long max_units = 1;         // fleet budget B
    int max_formation = 1;           // |Q|; formations are 1..max_formation
    double wait_value = 1.0;         // monetary value per waiting minute
    double eps1 = 1.0, eps2 = 1.0;   // origin / transfer wait weights
    double phi1 = 1.0, phi2 = 1.0;   // passenger / operational cost weights
    // unit_cost[line][stop-1][q-1]: cost of running q units over the section
    // leaving that stop (the last stop's entry prices the trip's final leg arrival).
    std::vector<std::vector<std::vector<double>>> unit_cost;

    double vartheta(int line, int stop1, int q) const {
        return unit_cost.at(line).at(stop1 - 1).at(q - 1);
    }
};

struct Headway {
    Minutes min = 0;
    Minutes max = 0;
};

// Couples a rolling-horizon stage model to what earlier stages committed:
// headway anchors against the last committed trip, committed depot flows, and
// the in-stage commit mask that keeps unit moves within one commit batch.
struct StageCoupling {
    // per line: departure minutes of the committed trip preceding trip 1
    std::vector<std::vector<Minutes>> prev_trip_depart;  // empty vector = no anchor
    // committed cumulative flows per (scenario, depot, t-1)
    std::vector<std::vector<std::vector<double>>> inflow_const, outflow_const;
    // per line/trip: committed in the current stage (moves must not straddle)
    std::vector<std::vector<char>> commits_now;

    bool empty() const { return prev_trip_depart.empty() && inflow_const.empty(); }
};

struct Instance {
    Ptn ptn;
    CorridorWindows corridor_windows;
    DepotPrep depot_prep;
    Eptn eptn;
    TimeGrid grid;
    std::vector<std::vector<TripTemplate>> trips;  // per directed line
    std::vector<Headway> headways;                 // per directed line
    CostModel costs;
    std::vector<Scenario> scenarios;
    StageCoupling stage;  // populated only for rolling-horizon stage models

    int num_lines() const { return eptn.num_lines(); }
    int num_trips(int line) const { return static_cast<int>(trips.at(line).size()); }
    int total_trips() const;
};

// Structural validation; throws SemanticError naming the violated rule.
void validate_instance(const Instance& inst);

Instance load_instance(const std::string& path);
Instance parse_instance(const std::string& json_text);
std::string serialize_instance(const Instance& inst);
void save_instance(const Instance& inst, const std::string& path);

struct GeneratorSpec {
    int lines = 1;              // undirected lines
    int stops_per_line = 3;
    int trips_per_line = 2;
    int horizon = 30;           // intervals
    Minutes delta = 1;
    int scenarios = 1;
    int groups_per_scenario = 2;    // demand intensity
    double transfer_fraction = 0.0; // share of groups routed over a corridor
    int max_formation = 2;
    long long cap_per_unit = 8;
    long long max_units = -1;       // -1: generous default
    double phi1 = 1.0, phi2 = 1.0;
    double wait_value = 1.0;
    Minutes window_slack = 2;       // extra shift/dwell slack in grid units
    bool trips_both_directions = true;  // false: only forward directions run trips
    int flex_stops = 99;            // stops per line with dwell slack (prefix)
};

Instance generate_random_instance(const GeneratorSpec& spec, uint64_t seed);

// Origin / destination buckets: groups boarding (alighting) at a stop of a
// directed line, per scenario. Boarding legs include transfer-in stops and
// alighting legs include transfer-out stops.
std::vector<const PassengerGroup*> passengers_by_origin(const Instance& inst, int scenario,
                                                        int line, int stop1);
std::vector<const PassengerGroup*> passengers_by_destination(const Instance& inst, int scenario,
                                                             int line, int stop1);

// Board/alight stop of group `p` on the leg using directed line `lines[leg]`.
int group_board_stop(const Instance& inst, const PassengerGroup& p, int leg);
int group_alight_stop(const Instance& inst, const PassengerGroup& p, int leg);

}  // namespace mav

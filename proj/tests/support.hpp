#pragma once

// Shared fixtures: hand-built tiny instances and solve shortcuts.

#include "mav/lshaped.hpp"
#include "mav/oracle.hpp"
#include "mav/strategies.hpp"

namespace tsup {

using namespace mav;

// One undirected line (trips on the forward direction only), `stops` stops,
// `trips` trips. Dwell slack only at stop 1 keeps enumeration small.
inline Instance one_line(int stops, int trips, int horizon, Minutes delta = 1,
                         Minutes slack = 1) {
    Instance inst;
    for (int i = 0; i < stops; ++i) inst.ptn.nodes.push_back("n" + std::to_string(i));
    for (int i = 0; i + 1 < stops; ++i)
        inst.ptn.add_edge("n" + std::to_string(i), "n" + std::to_string(i + 1));
    inst.ptn.line_paths.emplace_back("a", inst.ptn.nodes);
    inst.corridor_windows.default_window = {delta, 4 * delta};
    inst.depot_prep.default_prep = delta;
    inst.eptn = build_eptn(inst.ptn, inst.corridor_windows, inst.depot_prep);
    inst.grid = {delta, horizon};
    inst.trips.resize(inst.num_lines());
    inst.headways.assign(inst.num_lines(), {delta, delta * horizon});
    int fwd = inst.eptn.line_index("a");
    for (int k = 0; k < trips; ++k) {
        TripTemplate tt;
        tt.origin_time = delta * (1 + 3 * k);
        tt.run_times.assign(stops - 1, delta);
        tt.shift_min = 0;
        tt.shift_max = slack;
        tt.dwell_min.assign(stops, delta);
        tt.dwell_max.assign(stops, delta);
        tt.dwell_max[0] = delta + slack;
        inst.trips[fwd].push_back(tt);
    }
    inst.costs.cap_per_unit = 4;
    inst.costs.max_formation = 2;
    inst.costs.wait_value = 1.0;
    inst.costs.unit_cost.resize(inst.num_lines());
    for (int l = 0; l < inst.num_lines(); ++l) {
        inst.costs.unit_cost[l].resize(inst.eptn.lines[l].num_stops());
        for (auto& per_stop : inst.costs.unit_cost[l]) per_stop = {1.0, 2.0};
    }
    inst.costs.max_units = 16;
    Scenario sc;
    sc.scenario_id = 0;
    sc.probability = 1.0;
    inst.scenarios.push_back(sc);
    return inst;
}

inline void add_group(Instance& inst, int scenario, int line, int origin, int dest,
                      Minutes arrival, long long size = 1) {
    PassengerGroup g;
    g.group_id = static_cast<int>(inst.scenarios[scenario].groups.size());
    g.size = size;
    g.arrival_time = arrival;
    g.origin_stop = origin;
    g.dest_stop = dest;
    g.lines = {line};
    inst.scenarios[scenario].groups.push_back(g);
}

inline void add_transfer_group(Instance& inst, int scenario, int corridor, int origin, int dest,
                               Minutes arrival, long long size = 1) {
    const auto& co = inst.eptn.corridors[corridor];
    PassengerGroup g;
    g.group_id = static_cast<int>(inst.scenarios[scenario].groups.size());
    g.size = size;
    g.arrival_time = arrival;
    g.origin_stop = origin;
    g.dest_stop = dest;
    g.lines = {co.from_line, co.to_line};
    g.corridors = {corridor};
    inst.scenarios[scenario].groups.push_back(g);
}

// Two undirected lines crossing at one shared node (stop 2 of each forward
// direction); trips only on the forward directions.
inline Instance two_line(int stops, int trips, int horizon, Minutes delta = 1,
                         Minutes slack = 1) {
    Instance inst;
    std::vector<std::string> pa, pb;
    for (int i = 0; i < stops; ++i) {
        pa.push_back("a" + std::to_string(i));
        pb.push_back(i == 1 ? "a1" : "b" + std::to_string(i));
    }
    for (const auto& path : {pa, pb})
        for (const auto& n : path)
            if (!inst.ptn.has_node(n)) inst.ptn.nodes.push_back(n);
    for (int i = 0; i + 1 < stops; ++i) {
        inst.ptn.add_edge(pa[i], pa[i + 1]);
        inst.ptn.add_edge(pb[i], pb[i + 1]);
    }
    inst.ptn.line_paths.emplace_back("a", pa);
    inst.ptn.line_paths.emplace_back("b", pb);
    inst.corridor_windows.default_window = {delta, 6 * delta};
    inst.depot_prep.default_prep = delta;
    inst.eptn = build_eptn(inst.ptn, inst.corridor_windows, inst.depot_prep);
    inst.grid = {delta, horizon};
    inst.trips.resize(inst.num_lines());
    inst.headways.assign(inst.num_lines(), {delta, delta * horizon});
    for (const std::string& id : {std::string("a"), std::string("b")}) {
        int l = inst.eptn.line_index(id);
        for (int k = 0; k < trips; ++k) {
            TripTemplate tt;
            tt.origin_time = delta * (1 + 3 * k);
            tt.run_times.assign(stops - 1, delta);
            tt.shift_min = 0;
            tt.shift_max = slack;
            tt.dwell_min.assign(stops, delta);
            tt.dwell_max.assign(stops, delta);
            tt.dwell_max[0] = delta + slack;
            inst.trips[l].push_back(tt);
        }
    }
    inst.costs.cap_per_unit = 4;
    inst.costs.max_formation = 2;
    inst.costs.wait_value = 1.0;
    inst.costs.unit_cost.resize(inst.num_lines());
    for (int l = 0; l < inst.num_lines(); ++l) {
        inst.costs.unit_cost[l].resize(inst.eptn.lines[l].num_stops());
        for (auto& per_stop : inst.costs.unit_cost[l]) per_stop = {1.0, 2.0};
    }
    inst.costs.max_units = 24;
    Scenario sc;
    sc.scenario_id = 0;
    sc.probability = 1.0;
    inst.scenarios.push_back(sc);
    return inst;
}

// One undirected line with trips in both directions; returning units can be
// reused for the reverse direction after the depot preparation time.
inline Instance one_line_bidir(int horizon = 20) {
    Instance inst = one_line(2, 1, horizon, 1, 0);
    int fwd = inst.eptn.line_index("a");
    int rev = inst.eptn.line_index("a'");
    inst.trips[fwd].clear();
    TripTemplate t1;
    t1.origin_time = 1;
    t1.run_times = {1};
    t1.shift_min = t1.shift_max = 0;
    t1.dwell_min = {1, 1};
    t1.dwell_max = {1, 1};
    inst.trips[fwd].push_back(t1);
    TripTemplate t2;
    t2.origin_time = 2;
    t2.run_times = {1};
    t2.shift_min = 0;
    t2.shift_max = 6;
    t2.dwell_min = {1, 1};
    t2.dwell_max = {1, 1};
    inst.trips[rev].push_back(t2);
    inst.costs.max_units = 16;
    return inst;
}

inline GeneratorSpec suite_spec(int lines, int seed_class) {
    GeneratorSpec s;
    s.lines = lines;
    s.stops_per_line = 3 + seed_class % 2;
    s.trips_per_line = 2;
    s.horizon = 16 + 2 * (seed_class % 3);
    s.delta = 1;
    s.scenarios = 1 + seed_class % 2;
    s.groups_per_scenario = 2 + seed_class % 2;
    s.transfer_fraction = lines > 1 ? 0.5 : 0.0;
    s.max_formation = 2;
    s.cap_per_unit = 3;
    s.window_slack = 1;
    s.flex_stops = 1;
    s.trips_both_directions = false;
    return s;
}

// The oracle suite: generated tiny instances whose exact optimum is cheap to
// enumerate.
inline std::vector<Instance> oracle_suite(int count, uint64_t seed0 = 1000) {
    std::vector<Instance> out;
    int i = 0;
    while (static_cast<int>(out.size()) < count) {
        int lines = 1 + (i % 3 == 2 ? 1 : 0);  // every third instance is 2-line
        Instance inst = generate_random_instance(suite_spec(lines, i), seed0 + i);
        out.push_back(std::move(inst));
        ++i;
    }
    return out;
}

inline double mono_objective(const Instance& inst, Strategy s = Strategy::CompletelyFlexible,
                             bool vi = true) {
    MonoResult r = solve_monolithic(inst, s, vi, {}, false);
    if (r.status == MilpStatus::Infeasible) return std::numeric_limits<double>::infinity();
    return r.objective;
}

}  // namespace tsup

#include "mav/rolling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

namespace mav {

double opt_gap(double objective, double best_known) {
    if (objective == 0.0) throw DivisionByZeroError("opt gap of a zero objective");
    return (objective - best_known) / objective * 100.0;
}

SystemState initial_state(const Instance& inst) {
    SystemState s;
    s.committed_depart.resize(inst.num_lines());
    for (int l = 0; l < inst.num_lines(); ++l) s.committed_depart[l].resize(inst.num_trips(l));
    int W = static_cast<int>(inst.scenarios.size());
    s.committed_formation.resize(W);
    for (int w = 0; w < W; ++w) {
        s.committed_formation[w].resize(inst.num_lines());
        for (int l = 0; l < inst.num_lines(); ++l)
            s.committed_formation[w][l].resize(inst.num_trips(l));
    }
    s.committed_moves.resize(W);
    s.progress.resize(W);
    for (int w = 0; w < W; ++w) {
        s.progress[w].resize(inst.scenarios[w].groups.size());
        for (size_t p = 0; p < inst.scenarios[w].groups.size(); ++p)
            s.progress[w][p].boarded.assign(inst.scenarios[w].groups[p].lines.size(), 0);
    }
    s.removed.resize(W);
    s.pending_transfer.resize(W);
    s.pending_alight.resize(W);
    s.remaining.resize(W);
    return s;
}

Timetable simulate_timetable(const Instance& inst, const SystemState& state) {
    Timetable tt;
    tt.depart.resize(inst.num_lines());
    tt.arrive.resize(inst.num_lines());
    for (int l = 0; l < inst.num_lines(); ++l) {
        tt.depart[l].resize(inst.num_trips(l));
        tt.arrive[l].resize(inst.num_trips(l));
        for (int k = 1; k <= inst.num_trips(l); ++k) {
            if (!state.trip_committed(l, k)) continue;
            const auto& tpl = inst.trips[l][k - 1];
            const auto& d = state.committed_depart[l][k - 1];
            tt.depart[l][k - 1] = d;
            auto& a = tt.arrive[l][k - 1];
            a.resize(d.size());
            Minutes alpha = std::max(tpl.shift_min, d[0] - tpl.origin_time - tpl.dwell_max[0]);
            a[0] = tpl.origin_time + alpha;
            for (size_t i = 1; i < d.size(); ++i) a[i] = d[i - 1] + tpl.run_times[i - 1];
        }
    }
    return tt;
}

namespace {

// Advance a group's resolved prefix against committed trips only.
void resolve_progress(const Instance& inst, const SystemState& state, const Timetable& committed,
                      int w, int p, GroupProgress& gp) {
    const auto& grp = inst.scenarios[w].groups[p];
    while (gp.legs_resolved < static_cast<int>(grp.lines.size()) && !gp.stranded) {
        int leg = gp.legs_resolved;
        int l = grp.lines[leg];
        Minutes threshold;
        int stop;
        if (leg == 0) {
            threshold = grp.board_threshold();
            stop = grp.origin_stop;
        } else {
            const auto& co = inst.eptn.corridors[grp.corridors[leg - 1]];
            int kprev = gp.boarded[leg - 1];
            threshold = committed.arrive[co.from_line][kprev - 1][co.from_stop - 1] + co.theta_min;
            stop = co.to_stop;
        }
        int taken = 0;
        bool open_future = false;
        for (int k = 1; k <= inst.num_trips(l); ++k) {
            if (!state.trip_committed(l, k)) {
                open_future = true;  // an uncommitted trip may still serve this leg
                break;
            }
            if (committed.depart[l][k - 1][stop - 1] >= threshold) {
                taken = k;
                break;
            }
        }
        if (taken == 0) {
            if (!open_future) gp.stranded = true;
            break;
        }
        gp.boarded[leg] = taken;
        gp.legs_resolved++;
    }
}

std::vector<std::vector<std::vector<double>>> committed_flows(const Instance& inst,
                                                              const SystemState& state,
                                                              const Timetable& committed,
                                                              bool inflow) {
    int W = static_cast<int>(inst.scenarios.size());
    const Minutes D = inst.grid.delta;
    int T = inst.grid.horizon;
    std::vector<std::vector<std::vector<double>>> out(W);
    for (int w = 0; w < W; ++w) {
        out[w].assign(inst.eptn.depots.size(), std::vector<double>(T, 0.0));
        for (size_t m = 0; m < inst.eptn.depots.size(); ++m) {
            const auto& dep = inst.eptn.depots[m];
            int prep = static_cast<int>(dep.prep_time / D);
            const auto& lines = inflow ? dep.ll_lines : dep.fl_lines;
            for (int t = 1; t <= T; ++t) {
                double sum = 0.0;
                for (int l : lines)
                    for (int k = 1; k <= inst.num_trips(l); ++k) {
                        if (!state.trip_committed(l, k)) continue;
                        int S = inst.eptn.lines[l].num_stops();
                        int stop = inflow ? S : 1;
                        Minutes cutoff = inflow ? D * (t - prep) : D * t;
                        if (committed.depart[l][k - 1][stop - 1] <= cutoff)
                            sum += static_cast<double>(
                                state.committed_formation[w][l][k - 1][stop - 1]);
                    }
                out[w][m][t - 1] = sum;
            }
        }
    }
    return out;
}

}  // namespace

SystemState update_status(const Instance& inst, SystemState state, Minutes ch) {
    Timetable committed = simulate_timetable(inst, state);
    int W = static_cast<int>(inst.scenarios.size());
    for (int w = 0; w < W; ++w) {
        state.removed[w].clear();
        state.pending_transfer[w].clear();
        state.pending_alight[w].clear();
        state.remaining[w].clear();
        for (size_t p = 0; p < inst.scenarios[w].groups.size(); ++p) {
            auto& gp = state.progress[w][p];
            resolve_progress(inst, state, committed, w, static_cast<int>(p), gp);
            const auto& grp = inst.scenarios[w].groups[p];
            int legs = static_cast<int>(grp.lines.size());
            if (gp.legs_resolved == legs) {
                int lastk = gp.boarded[legs - 1];
                Minutes dest_arrival =
                    committed.arrive[grp.lines[legs - 1]][lastk - 1][grp.dest_stop - 1];
                if (dest_arrival <= state.clock + ch)
                    state.removed[w].push_back(static_cast<int>(p));
                else
                    state.pending_alight[w].push_back(static_cast<int>(p));
            } else if (gp.legs_resolved > 0) {
                state.pending_transfer[w].push_back(static_cast<int>(p));
            } else {
                state.remaining[w].push_back(static_cast<int>(p));
            }
        }
    }
    state.clock += ch;
    return state;
}

SubInstance select_window(const Instance& inst, const SystemState& state, Minutes ph, Minutes ch) {
    DepartureWindows win = compute_departure_windows(inst);
    Minutes ph_end = state.clock + ph;
    SubInstance subi;
    subi.ph_end = ph_end;
    Instance& si = subi.instance;
    si.ptn = inst.ptn;
    si.corridor_windows = inst.corridor_windows;
    si.depot_prep = inst.depot_prep;
    si.eptn = inst.eptn;
    si.grid = inst.grid;
    si.costs = inst.costs;
    si.headways = inst.headways;
    si.trips.resize(inst.num_lines());
    subi.first_trip.assign(inst.num_lines(), 0);
    subi.commit_mask.resize(inst.num_lines());
    si.stage.prev_trip_depart.resize(inst.num_lines());
    si.stage.commits_now.resize(inst.num_lines());

    Timetable committed = simulate_timetable(inst, state);
    for (int l = 0; l < inst.num_lines(); ++l) {
        int first = 1;
        while (first <= inst.num_trips(l) && state.trip_committed(l, first)) ++first;
        // Skip trips whose whole window already passed (possible only when the
        // clock is moved past them externally).
        int S = inst.eptn.lines[l].num_stops();
        while (first <= inst.num_trips(l) && win.depart_hi(l, first, S) < state.clock) ++first;
        int last = first - 1;
        for (int k = first; k <= inst.num_trips(l); ++k) {
            if (win.depart_lo(l, k, 1) <= ph_end)
                last = k;
            else
                break;
        }
        if (last >= first) {
            subi.first_trip[l] = first;
            for (int k = first; k <= last; ++k) {
                si.trips[l].push_back(inst.trips[l][k - 1]);
                bool commits = win.depart_hi(l, k, 1) <= state.clock + ch;
                subi.commit_mask[l].push_back(commits ? 1 : 0);
                subi.total_trips++;
            }
            if (first >= 2) si.stage.prev_trip_depart[l] = committed.depart[l][first - 2];
        }
        si.stage.commits_now[l] = subi.commit_mask[l];
    }

    // Maximum possible departure per (line, stop) among stage trips: a group
    // is selected when a stage trip could still serve its next boarding.
    auto max_hi = [&](int l, int stop) -> Minutes {
        if (subi.first_trip[l] == 0) return -1;
        int first = subi.first_trip[l];
        int count = static_cast<int>(si.trips[l].size());
        return win.depart_hi(l, first + count - 1, stop);
    };

    int W = static_cast<int>(inst.scenarios.size());
    subi.group_map.resize(W);
    for (int w = 0; w < W; ++w) {
        Scenario sc;
        sc.scenario_id = w;
        sc.probability = inst.scenarios[w].probability;
        for (size_t p = 0; p < inst.scenarios[w].groups.size(); ++p) {
            const auto& grp = inst.scenarios[w].groups[p];
            const auto& gp = state.progress[w][p];
            int legs = static_cast<int>(grp.lines.size());
            if (gp.legs_resolved == legs || gp.stranded) continue;
            int leg = gp.legs_resolved;
            PassengerGroup g;
            if (leg == 0) {
                Minutes reach = max_hi(grp.lines[0], grp.origin_stop);
                if (grp.board_threshold() > std::max(ph_end, reach)) continue;
                g = grp;
            } else {
                const auto& co = inst.eptn.corridors[grp.corridors[leg - 1]];
                int kprev = gp.boarded[leg - 1];
                Minutes after = committed.arrive[co.from_line][kprev - 1][co.from_stop - 1];
                Minutes ready = after + co.theta_min;
                Minutes reach = max_hi(co.to_line, co.to_stop);
                if (ready > reach) continue;  // carry over to a later stage
                g.size = grp.size;
                g.arrival_time = after;
                g.eligibility_time = ready;
                g.transfer_carry = true;
                g.origin_stop = co.to_stop;
                g.dest_stop = grp.dest_stop;
                g.lines.assign(grp.lines.begin() + leg, grp.lines.end());
                g.corridors.assign(grp.corridors.begin() + leg, grp.corridors.end());
            }
            // Remap trip-independent data only; trip indices are not stored in
            // groups so renumbering trips needs no group rewrite.
            g.group_id = static_cast<int>(sc.groups.size());
            sc.groups.push_back(std::move(g));
            subi.group_map[w].push_back(static_cast<int>(p));
        }
        si.scenarios.push_back(std::move(sc));
    }

    si.stage.inflow_const = committed_flows(inst, state, committed, true);
    si.stage.outflow_const = committed_flows(inst, state, committed, false);
    return subi;
}

RollingSolution run_rolling_horizon(const Instance& inst, const HorizonConfig& horizon,
                                    const RollingConfig& config) {
    auto t0 = std::chrono::steady_clock::now();
    if (horizon.ch <= 0 || horizon.ch > horizon.ph)
        throw SemanticError("horizon config must satisfy 0 < ch <= ph");
    if (horizon.ch % inst.grid.delta != 0 || horizon.ph % inst.grid.delta != 0)
        throw SemanticError("ch and ph must be grid-aligned");

    RollingSolution out;
    SystemState state = initial_state(inst);
    int total = inst.total_trips();
    double cumulative = 0.0;
    int stage_idx = 0;
    int committed_count = 0;

    while (committed_count < total) {
        auto stage_t0 = std::chrono::steady_clock::now();
        SubInstance subi = select_window(inst, state, horizon.ph, horizon.ch);
        bool any_commit = false;
        for (const auto& mask : subi.commit_mask)
            for (char c : mask) any_commit |= c != 0;
        if (subi.total_trips == 0 || !any_commit) {
            state.clock += horizon.ch;
            stage_idx++;
            if (state.clock > inst.grid.span() + horizon.ph)
                throw StageInfeasibleError("stage loop passed the horizon with trips uncommitted");
            continue;
        }

        Timetable stage_tt;
        std::vector<CapacityPlan> stage_plans;
        double stage_obj = 0.0;
        if (config.inner == InnerSolver::IntegerLShaped) {
            LShapedSolution s = run_integer_lshaped(subi.instance, config.il);
            if (s.status == MilpStatus::Infeasible || s.status == MilpStatus::TimeLimit)
                throw StageInfeasibleError("stage " + std::to_string(stage_idx) +
                                           " admits no feasible plan");
            stage_tt = s.timetable;
            stage_plans = s.plans;
            stage_obj = s.objective;
        } else {
            BuiltModel mono =
                build_monolithic(subi.instance, config.strategy, config.il.use_valid_inequalities);
            MilpOptions mo;
            WatchedSet ws = watched_monolithic(mono);
            mo.watched = ws.vars;
            mo.watched_levels = ws.levels;
            mo.limits.gap = config.il.gap;
            mo.limits.time_sec = config.il.time_sec;
            MilpSolution ms = solve_milp(mono.ir, mo);
            if (ms.status == MilpStatus::Infeasible || ms.x.empty())
                throw StageInfeasibleError("stage " + std::to_string(stage_idx) +
                                           " admits no feasible plan");
            std::vector<double> exact = reconstruct_solution(subi.instance, mono, ms.x);
            stage_tt = decode_timetable(subi.instance, mono, exact);
            for (size_t w = 0; w < subi.instance.scenarios.size(); ++w)
                stage_plans.push_back(
                    decode_plan(subi.instance, mono, exact, static_cast<int>(w)));
            stage_obj = evaluate_objective(mono.ir, exact);
        }

        // Commit the CH portion.
        for (int l = 0; l < inst.num_lines(); ++l) {
            for (size_t j = 0; j < subi.commit_mask[l].size(); ++j) {
                if (!subi.commit_mask[l][j]) continue;
                int orig_k = subi.first_trip[l] + static_cast<int>(j);
                state.committed_depart[l][orig_k - 1] = stage_tt.depart[l][j];
                for (size_t w = 0; w < inst.scenarios.size(); ++w)
                    state.committed_formation[w][l][orig_k - 1] =
                        stage_plans[w].formation[l][j];
                ++committed_count;
            }
        }
        for (size_t w = 0; w < inst.scenarios.size(); ++w)
            for (const auto& mv : stage_plans[w].moves) {
                const auto& co = inst.eptn.corridors[mv.corridor];
                int from_stage = mv.from_trip - 1;
                int to_stage = mv.to_trip - 1;
                if (!subi.commit_mask[co.from_line][from_stage] ||
                    !subi.commit_mask[co.to_line][to_stage])
                    continue;  // lookahead move; re-decided when those trips commit
                MoveOp orig = mv;
                orig.from_trip = subi.first_trip[co.from_line] + from_stage;
                orig.to_trip = subi.first_trip[co.to_line] + to_stage;
                state.committed_moves[w].push_back(orig);
            }

        cumulative += stage_obj;
        StageTrace tr;
        tr.stage = stage_idx;
        tr.clock = state.clock;
        tr.trips = subi.total_trips;
        tr.groups = 0;
        for (const auto& gm : subi.group_map) tr.groups += static_cast<int>(gm.size());
        tr.stage_objective = stage_obj;
        tr.cumulative_objective = cumulative;
        tr.wall_sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - stage_t0).count();
        out.stages.push_back(tr);
        if (config.stage_log) {
            (*config.stage_log) << "{\"stage\":" << tr.stage << ",\"clock\":" << tr.clock
                                << ",\"trips\":" << tr.trips << ",\"groups\":" << tr.groups
                                << ",\"objective\":" << tr.stage_objective
                                << ",\"cumulative\":" << tr.cumulative_objective
                                << ",\"wall_sec\":" << tr.wall_sec << "}\n";
        }
        state = update_status(inst, std::move(state), horizon.ch);
        stage_idx++;
    }

    // Stitch the full-horizon solution.
    out.timetable.depart.resize(inst.num_lines());
    for (int l = 0; l < inst.num_lines(); ++l) {
        out.timetable.depart[l].resize(inst.num_trips(l));
        for (int k = 1; k <= inst.num_trips(l); ++k)
            out.timetable.depart[l][k - 1] = state.committed_depart[l][k - 1];
    }
    out.first_stage = make_first_stage(inst, out.timetable.depart);
    out.timetable.arrive = out.first_stage.arrive;
    for (size_t w = 0; w < inst.scenarios.size(); ++w) {
        CapacityPlan plan;
        plan.scenario = static_cast<int>(w);
        plan.formation.resize(inst.num_lines());
        for (int l = 0; l < inst.num_lines(); ++l) {
            plan.formation[l].resize(inst.num_trips(l));
            for (int k = 1; k <= inst.num_trips(l); ++k)
                plan.formation[l][k - 1] = state.committed_formation[w][l][k - 1];
        }
        plan.moves = state.committed_moves[w];
        plan.kappa.assign(inst.eptn.depots.size(), 0);
        out.plans.push_back(std::move(plan));
    }
    // Minimal depot stocks for the stitched plan.
    for (size_t w = 0; w < inst.scenarios.size(); ++w)
        out.plans[w].kappa = depot_needs(inst, out.first_stage, out.plans[w], static_cast<int>(w));
    out.costs = evaluate_solution_costs(inst, out.first_stage, out.plans);
    out.objective = out.costs.total();
    out.status = MilpStatus::Feasible;
    std::vector<long long> agg(inst.eptn.depots.size(), 0);
    for (const auto& plan : out.plans)
        for (size_t m = 0; m < agg.size(); ++m) agg[m] = std::max(agg[m], plan.kappa[m]);
    for (long long v : agg) out.used_maus += v;
    out.wall_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace mav

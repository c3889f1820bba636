#include "mav/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace mav {

namespace {

struct MoveCandidate {
    int corridor, from_trip, to_trip;
};

// Eligible coupling moves under a fixed timetable: reroutable corridor,
// transfer window satisfied, not straddling a stage commit boundary.
std::vector<MoveCandidate> eligible_moves(const Instance& inst, const FixedFirstStage& fixed) {
    std::vector<MoveCandidate> out;
    for (size_t g = 0; g < inst.eptn.corridors.size(); ++g) {
        const auto& co = inst.eptn.corridors[g];
        if (co.from_stop < 2 || co.to_stop < 2) continue;
        for (int k = 1; k <= inst.num_trips(co.from_line); ++k)
            for (int k2 = 1; k2 <= inst.num_trips(co.to_line); ++k2) {
                Minutes gap = fixed.depart[co.to_line][k2 - 1][co.to_stop - 1] -
                              fixed.arrive[co.from_line][k - 1][co.from_stop - 1];
                if (gap < co.theta_min || gap > co.theta_max) continue;
                if (!inst.stage.commits_now.empty() &&
                    inst.stage.commits_now[co.from_line][k - 1] !=
                        inst.stage.commits_now[co.to_line][k2 - 1])
                    continue;
                out.push_back({static_cast<int>(g), k, k2});
            }
    }
    return out;
}

struct Loads {
    // [l][k][i] passengers aboard when leaving stop i
    std::vector<std::vector<std::vector<long long>>> v, b, c;
};

Loads compute_loads(const Instance& inst, const FixedFirstStage& fixed, int w) {
    Loads L;
    L.v.resize(inst.num_lines());
    L.b.resize(inst.num_lines());
    L.c.resize(inst.num_lines());
    for (int l = 0; l < inst.num_lines(); ++l) {
        int S = inst.eptn.lines[l].num_stops();
        L.v[l].assign(inst.num_trips(l), std::vector<long long>(S, 0));
        L.b[l] = L.v[l];
        L.c[l] = L.v[l];
    }
    const auto& sc = inst.scenarios[w];
    for (size_t p = 0; p < sc.groups.size(); ++p) {
        const auto& grp = sc.groups[p];
        for (size_t leg = 0; leg < grp.lines.size(); ++leg) {
            int k = fixed.boarded[w][p][leg];
            if (k == 0) break;
            int l = grp.lines[leg];
            L.b[l][k - 1][group_board_stop(inst, grp, (int)leg) - 1] += grp.size;
            L.c[l][k - 1][group_alight_stop(inst, grp, (int)leg) - 1] += grp.size;
        }
    }
    for (int l = 0; l < inst.num_lines(); ++l)
        for (int k = 0; k < inst.num_trips(l); ++k) {
            long long run = 0;
            for (int i = 0; i < inst.eptn.lines[l].num_stops(); ++i) {
                run += L.b[l][k][i] - L.c[l][k][i];
                L.v[l][k][i] = run;
            }
        }
    return L;
}

double origin_wait_cost(const Instance& inst, const FixedFirstStage& fixed, int w) {
    const auto& sc = inst.scenarios[w];
    double total = 0.0;
    for (size_t p = 0; p < sc.groups.size(); ++p) {
        const auto& grp = sc.groups[p];
        int k = fixed.boarded[w][p][0];
        if (k == 0) continue;
        double eps = grp.transfer_carry ? inst.costs.eps2 : inst.costs.eps1;
        Minutes wait = fixed.depart[grp.lines[0]][k - 1][grp.origin_stop - 1] - grp.arrival_time;
        total += inst.costs.phi1 * eps * inst.costs.wait_value *
                 static_cast<double>(grp.size) * static_cast<double>(wait);
    }
    return total;
}

// Transfer waits for one scenario given the set of active moves.
double transfer_wait_cost(const Instance& inst, const FixedFirstStage& fixed, int w,
                          const std::set<std::tuple<int, int, int>>& moves) {
    const auto& sc = inst.scenarios[w];
    double total = 0.0;
    for (size_t p = 0; p < sc.groups.size(); ++p) {
        const auto& grp = sc.groups[p];
        for (size_t leg = 0; leg + 1 < grp.lines.size(); ++leg) {
            int k = fixed.boarded[w][p][leg];
            int k2 = fixed.boarded[w][p][leg + 1];
            if (k == 0 || k2 == 0) break;
            int g = grp.corridors[leg];
            if (moves.count({g, k, k2})) continue;  // in-vehicle transfer
            const auto& co = inst.eptn.corridors[g];
            Minutes wait = fixed.depart[co.to_line][k2 - 1][co.to_stop - 1] -
                           fixed.arrive[co.from_line][k - 1][co.from_stop - 1];
            total += inst.costs.phi1 * inst.costs.eps2 * inst.costs.wait_value *
                     static_cast<double>(grp.size) * static_cast<double>(wait);
        }
    }
    return total;
}

// Minimal-cost formation trajectory of one trip given the net unit change at
// each of its stops and per-stop load minimums. Returns -1 when infeasible.
double best_trip_formation(const Instance& inst, int l, int k,
                           const std::vector<long long>& delta,
                           const std::vector<long long>& minload,
                           std::vector<long long>* chosen) {
    int S = inst.eptn.lines[l].num_stops();
    int Q = inst.costs.max_formation;
    double best = -1.0;
    std::vector<long long> traj(S);
    for (int x1 = 1; x1 <= Q; ++x1) {
        long long x = x1;
        bool ok = true;
        double cost = 0.0;
        for (int i = 0; i < S && ok; ++i) {
            x += delta[i];
            long long need =
                (minload[i] + inst.costs.cap_per_unit - 1) / inst.costs.cap_per_unit;
            if (x < 1 || x > Q || x < need) ok = false;
            if (ok) {
                traj[i] = x;
                cost += inst.costs.vartheta(l, i + 1, static_cast<int>(x));
            }
        }
        if (ok && (best < 0 || cost < best)) {
            best = cost;
            if (chosen) *chosen = traj;
        }
    }
    return best;
}

std::vector<long long> kappa_need_for(const Instance& inst, const FixedFirstStage& fixed,
                                      const std::vector<std::vector<std::vector<long long>>>& x,
                                      int w) {
    const Minutes D = inst.grid.delta;
    int T = inst.grid.horizon;
    std::vector<long long> need(inst.eptn.depots.size(), 0);
    for (size_t m = 0; m < inst.eptn.depots.size(); ++m) {
        const auto& dep = inst.eptn.depots[m];
        int prep = static_cast<int>(dep.prep_time / D);
        for (int t = 1; t <= T; ++t) {
            double in = inst.stage.inflow_const.empty() ? 0.0 : inst.stage.inflow_const[w][m][t - 1];
            double out_c =
                inst.stage.outflow_const.empty() ? 0.0 : inst.stage.outflow_const[w][m][t - 1];
            long long av = static_cast<long long>(std::llround(in));
            long long dv = static_cast<long long>(std::llround(out_c));
            for (int l : dep.ll_lines)
                for (int k = 1; k <= inst.num_trips(l); ++k) {
                    int S = inst.eptn.lines[l].num_stops();
                    if (fixed.depart[l][k - 1][S - 1] <= D * (t - prep))
                        av += x[l][k - 1][S - 1];
                }
            for (int l : dep.fl_lines)
                for (int k = 1; k <= inst.num_trips(l); ++k)
                    if (fixed.depart[l][k - 1][0] <= D * t) dv += x[l][k - 1][0];
            need[m] = std::max(need[m], dv - av);
        }
    }
    return need;
}

}  // namespace

long long brute_force_estimate(const Instance& inst) {
    const Minutes D = inst.grid.delta;
    double timetables = 1;
    for (int l = 0; l < inst.num_lines(); ++l)
        for (const auto& tt : inst.trips[l]) {
            double opts = static_cast<double>((tt.shift_max - tt.shift_min) / D + 1);
            for (size_t i = 0; i < tt.dwell_min.size(); ++i)
                opts *= static_cast<double>((tt.dwell_max[i] - tt.dwell_min[i]) / D + 1);
            timetables *= std::max(1.0, opts);
            if (timetables > 1e18) return std::numeric_limits<long long>::max();
        }
    // Second-stage work per timetable: move subsets (each eligible corridor
    // trip pair is off or moves 1..Q-1 units) times a per-trip formation scan.
    double pairs = 0;
    for (const auto& co : inst.eptn.corridors)
        if (co.from_stop >= 2 && co.to_stop >= 2)
            pairs += static_cast<double>(inst.num_trips(co.from_line)) *
                     static_cast<double>(inst.num_trips(co.to_line));
    double movesets = std::pow(static_cast<double>(inst.costs.max_formation), std::min(pairs, 60.0));
    double per_scenario = movesets * inst.total_trips() * inst.costs.max_formation;
    double est = timetables * std::max(1.0, static_cast<double>(inst.scenarios.size()) *
                                                std::max(1.0, per_scenario));
    return est > 1e18 ? std::numeric_limits<long long>::max() : static_cast<long long>(est);
}

void enumerate_timetables(const Instance& inst,
                          const std::function<bool(const Timetable&)>& visit, long long guard) {
    DepartureWindows win = compute_departure_windows(inst);
    const Minutes D = inst.grid.delta;
    if (brute_force_estimate(inst) > guard)
        throw SearchSpaceTooLarge("timetable enumeration estimate exceeds guard " +
                                  std::to_string(guard));
    Timetable tt;
    tt.depart.resize(inst.num_lines());
    for (int l = 0; l < inst.num_lines(); ++l) {
        tt.depart[l].resize(inst.num_trips(l));
        for (auto& v : tt.depart[l]) v.assign(inst.eptn.lines[l].num_stops(), 0);
    }
    bool stop = false;

    // DFS over (line, trip, stop) choosing grid departures inside the window
    // subject to dwell chaining and headway against the previous trip.
    std::function<void(int, int, int)> rec = [&](int l, int k, int i) {
        if (stop) return;
        if (l == inst.num_lines()) {
            if (!visit(tt)) stop = true;
            return;
        }
        if (k > inst.num_trips(l)) {
            rec(l + 1, 1, 1);
            return;
        }
        int S = inst.eptn.lines[l].num_stops();
        if (i > S) {
            rec(l, k + 1, 1);
            return;
        }
        const auto& tpl = inst.trips[l][k - 1];
        Minutes lo, hi;
        if (i == 1) {
            lo = tpl.origin_time + tpl.shift_min + tpl.dwell_min[0];
            hi = tpl.origin_time + tpl.shift_max + tpl.dwell_max[0];
        } else {
            Minutes a = tt.depart[l][k - 1][i - 2] + tpl.run_times[i - 2];
            lo = a + tpl.dwell_min[i - 1];
            hi = a + tpl.dwell_max[i - 1];
        }
        if (k >= 2) {
            Minutes prev = tt.depart[l][k - 2][i - 1];
            lo = std::max(lo, prev + inst.headways[l].min);
            hi = std::min(hi, prev + inst.headways[l].max);
        }
        if (!inst.stage.prev_trip_depart.empty() && k == 1 &&
            !inst.stage.prev_trip_depart[l].empty()) {
            Minutes prev = inst.stage.prev_trip_depart[l][i - 1];
            lo = std::max(lo, prev + inst.headways[l].min);
            hi = std::min(hi, prev + inst.headways[l].max);
        }
        for (Minutes d = lo; d <= hi && !stop; d += D) {
            tt.depart[l][k - 1][i - 1] = d;
            rec(l, k, i + 1);
        }
    };
    rec(0, 1, 1);
}

SecondStageResult oracle_second_stage(const Instance& inst, const FixedFirstStage& fixed,
                                      int w, Strategy strategy, bool collect_all) {
    SecondStageResult res;
    Loads loads = compute_loads(inst, fixed, w);
    int Q = inst.costs.max_formation;

    std::vector<MoveCandidate> cands =
        strategy == Strategy::CompletelyFlexible ? eligible_moves(inst, fixed)
                                                 : std::vector<MoveCandidate>{};

    // Enumerate move subsets forming a matching over (trip, stop) slots with
    // one direction per corridor pair, then amounts, then per-trip formations.
    std::vector<int> selected;
    auto slot_of_sender = [&](const MoveCandidate& mc) {
        const auto& co = inst.eptn.corridors[mc.corridor];
        return std::tuple(co.from_line, mc.from_trip, co.from_stop);
    };
    auto slot_of_receiver = [&](const MoveCandidate& mc) {
        const auto& co = inst.eptn.corridors[mc.corridor];
        return std::tuple(co.to_line, mc.to_trip, co.to_stop);
    };

    auto evaluate_selection = [&](const std::vector<std::pair<int, long long>>& moveset) {
        // Net unit change per (line, trip, stop).
        std::vector<std::vector<std::vector<long long>>> delta(inst.num_lines());
        for (int l = 0; l < inst.num_lines(); ++l)
            delta[l].assign(inst.num_trips(l),
                            std::vector<long long>(inst.eptn.lines[l].num_stops(), 0));
        std::set<std::tuple<int, int, int>> active;
        for (const auto& [ci, amount] : moveset) {
            const auto& mc = cands[ci];
            const auto& co = inst.eptn.corridors[mc.corridor];
            delta[co.from_line][mc.from_trip - 1][co.from_stop - 1] -= amount;
            delta[co.to_line][mc.to_trip - 1][co.to_stop - 1] += amount;
            active.insert({mc.corridor, mc.from_trip, mc.to_trip});
        }
        double oper = 0.0;
        std::vector<std::vector<std::vector<long long>>> xs(inst.num_lines());
        for (int l = 0; l < inst.num_lines(); ++l) {
            xs[l].assign(inst.num_trips(l), {});
            for (int k = 1; k <= inst.num_trips(l); ++k) {
                std::vector<long long> chosen;
                double c;
                if (strategy == Strategy::Fixed) {
                    chosen.assign(inst.eptn.lines[l].num_stops(), Q);
                    c = 0.0;
                    bool ok = true;
                    for (int i = 0; i < inst.eptn.lines[l].num_stops(); ++i) {
                        long long need = (loads.v[l][k - 1][i] + inst.costs.cap_per_unit - 1) /
                                         inst.costs.cap_per_unit;
                        if (need > Q) ok = false;
                        c += inst.costs.vartheta(l, i + 1, Q);
                    }
                    if (!ok) return;
                } else {
                    c = best_trip_formation(inst, l, k, delta[l][k - 1], loads.v[l][k - 1],
                                            &chosen);
                    if (c < 0) return;
                }
                oper += c;
                xs[l][k - 1] = chosen;
            }
        }
        // Senders must actually shrink (amount >= 1 checked by construction).
        double waits = transfer_wait_cost(inst, fixed, w, active);
        double cost = inst.costs.phi2 * oper + waits;
        CapacityPlan plan;
        plan.scenario = w;
        plan.formation = xs;
        for (const auto& [ci, amount] : moveset)
            plan.moves.push_back({cands[ci].corridor, cands[ci].from_trip, cands[ci].to_trip,
                                  amount});
        plan.kappa = kappa_need_for(inst, fixed, xs, w);
        long long total_kappa = 0;
        for (long long kk : plan.kappa) total_kappa += kk;
        if (total_kappa > inst.costs.max_units) return;
        plan.oper_cost = inst.costs.phi2 * oper;
        plan.transfer_wait_cost = waits;
        SecondStagePlanOption opt{cost, std::move(plan)};
        if (!res.feasible || cost < res.best.cost) {
            res.best = opt;
            res.feasible = true;
        }
        if (collect_all) res.options.push_back(std::move(opt));
    };

    std::vector<std::pair<int, long long>> moveset;
    // Slot disjointness also covers unidirectionality: a reverse move reuses
    // both endpoints' trip-stop slots.
    std::set<std::tuple<int, int, int>> used_slots;

    std::function<void(int)> rec = [&](int idx) {
        if (idx == static_cast<int>(cands.size())) {
            evaluate_selection(moveset);
            return;
        }
        rec(idx + 1);  // skip this candidate
        const auto& mc = cands[idx];
        auto s1 = slot_of_sender(mc);
        auto s2 = slot_of_receiver(mc);
        if (used_slots.count(s1) || used_slots.count(s2)) return;
        used_slots.insert(s1);
        used_slots.insert(s2);
        for (long long amount = 1; amount < inst.costs.max_formation; ++amount) {
            moveset.emplace_back(idx, amount);
            rec(idx + 1);
            moveset.pop_back();
        }
        used_slots.erase(s1);
        used_slots.erase(s2);
    };
    rec(0);
    if (collect_all)
        std::sort(res.options.begin(), res.options.end(),
                  [](const auto& a, const auto& b) { return a.cost < b.cost; });
    return res;
}

OracleSolution brute_force_solve(const Instance& inst, Strategy strategy, long long guard) {
    OracleSolution best;
    long long est = brute_force_estimate(inst);
    if (est > guard)
        throw SearchSpaceTooLarge("search-space estimate " + std::to_string(est) +
                                  " exceeds guard " + std::to_string(guard));
    int W = static_cast<int>(inst.scenarios.size());
    enumerate_timetables(inst, [&](const Timetable& tt) {
        FixedFirstStage fixed = make_first_stage(inst, tt.depart);
        double first_stage_cost = 0.0;
        for (int w = 0; w < W; ++w)
            first_stage_cost += inst.scenarios[w].probability * origin_wait_cost(inst, fixed, w);
        if (best.feasible && first_stage_cost >= best.objective) return true;

        std::vector<SecondStageResult> ss(W);
        double second = 0.0;
        bool ok = true;
        for (int w = 0; w < W && ok; ++w) {
            ss[w] = oracle_second_stage(inst, fixed, w, strategy, false);
            if (!ss[w].feasible)
                ok = false;
            else
                second += inst.scenarios[w].probability * ss[w].best.cost;
        }
        if (!ok) return true;

        // Shared-fleet check: depot stocks must be simultaneously coverable.
        std::vector<long long> shared(inst.eptn.depots.size(), 0);
        for (int w = 0; w < W; ++w)
            for (size_t m = 0; m < shared.size(); ++m)
                shared[m] = std::max(shared[m], ss[w].best.plan.kappa[m]);
        long long total = 0;
        for (long long v : shared) total += v;
        if (total > inst.costs.max_units) {
            // Joint selection across scenarios under the shared budget.
            std::vector<SecondStageResult> full(W);
            for (int w = 0; w < W; ++w) {
                full[w] = oracle_second_stage(inst, fixed, w, strategy, true);
                if (!full[w].feasible) return true;
            }
            double best_joint = -1.0;
            std::vector<int> pick(W, -1), cur(W, -1);
            std::vector<long long> acc(inst.eptn.depots.size(), 0);
            std::function<void(int, double, std::vector<long long>&)> walk =
                [&](int w, double cost, std::vector<long long>& maxk) {
                    if (best_joint >= 0 && cost >= best_joint) return;
                    if (w == W) {
                        long long s = 0;
                        for (long long v : maxk) s += v;
                        if (s <= inst.costs.max_units) {
                            best_joint = cost;
                            pick = cur;
                        }
                        return;
                    }
                    for (size_t oi = 0; oi < full[w].options.size(); ++oi) {
                        const auto& opt = full[w].options[oi];
                        std::vector<long long> nk = maxk;
                        for (size_t m = 0; m < nk.size(); ++m)
                            nk[m] = std::max(nk[m], opt.plan.kappa[m]);
                        long long s = 0;
                        for (long long v : nk) s += v;
                        if (s > inst.costs.max_units) continue;
                        cur[w] = static_cast<int>(oi);
                        walk(w + 1, cost + inst.scenarios[w].probability * opt.cost, nk);
                        cur[w] = -1;
                    }
                };
            walk(0, 0.0, acc);
            if (best_joint < 0) return true;  // no joint plan fits the budget
            second = best_joint;
            double obj = first_stage_cost + second;
            if (!best.feasible || obj < best.objective) {
                best.feasible = true;
                best.objective = obj;
                best.timetable = tt;
                best.plans.clear();
                for (int w = 0; w < W; ++w) best.plans.push_back(full[w].options[pick[w]].plan);
            }
            return true;
        }

        double obj = first_stage_cost + second;
        if (!best.feasible || obj < best.objective) {
            best.feasible = true;
            best.objective = obj;
            best.timetable = tt;
            best.plans.clear();
            for (int w = 0; w < W; ++w) best.plans.push_back(ss[w].best.plan);
        }
        return true;
    }, guard);
    if (best.feasible) {
        FixedFirstStage fixed = make_first_stage(inst, best.timetable.depart);
        best.timetable.arrive = fixed.arrive;
        best.costs = evaluate_solution_costs(inst, fixed, best.plans);
    }
    return best;
}

std::vector<long long> depot_needs(const Instance& inst, const FixedFirstStage& fixed,
                                   const CapacityPlan& plan, int scenario) {
    return kappa_need_for(inst, fixed, plan.formation, scenario);
}

CostBreakdown evaluate_solution_costs(const Instance& inst, const FixedFirstStage& fixed,
                                      const std::vector<CapacityPlan>& plans) {
    CostBreakdown out;
    for (size_t w = 0; w < inst.scenarios.size(); ++w) {
        double rho = inst.scenarios[w].probability;
        out.origin_wait += rho * origin_wait_cost(inst, fixed, static_cast<int>(w));
        std::set<std::tuple<int, int, int>> active;
        for (const auto& mv : plans[w].moves) active.insert({mv.corridor, mv.from_trip, mv.to_trip});
        out.transfer_wait += rho * transfer_wait_cost(inst, fixed, static_cast<int>(w), active);
        double oper = 0.0;
        for (int l = 0; l < inst.num_lines(); ++l)
            for (int k = 1; k <= inst.num_trips(l); ++k)
                for (int i = 1; i <= inst.eptn.lines[l].num_stops(); ++i)
                    oper += inst.costs.vartheta(
                        l, i, static_cast<int>(plans[w].formation[l][k - 1][i - 1]));
        out.oper += rho * inst.costs.phi2 * oper;
    }
    return out;
}

FlowResult simulate_flow(const Instance& inst, const Timetable& tt, const CapacityPlan& plan,
                         int w) {
    FlowResult res;
    const Minutes D = inst.grid.delta;
    DepartureWindows win = compute_departure_windows(inst);

    // Timetable checks: grid alignment, windows, dwell chain, headways.
    for (int l = 0; l < inst.num_lines(); ++l) {
        for (int k = 1; k <= inst.num_trips(l); ++k) {
            const auto& tpl = inst.trips[l][k - 1];
            for (int i = 1; i <= inst.eptn.lines[l].num_stops(); ++i) {
                Minutes d = tt.depart[l][k - 1][i - 1];
                if (d % D != 0) {
                    res.violation = "departure off the grid";
                    return res;
                }
                if (d < win.depart_lo(l, k, i) || d > win.depart_hi(l, k, i)) {
                    res.violation = "departure outside its window";
                    return res;
                }
                Minutes a = i == 1 ? 0 : tt.depart[l][k - 1][i - 2] + tpl.run_times[i - 2];
                if (i >= 2 && (d - a < tpl.dwell_min[i - 1] || d - a > tpl.dwell_max[i - 1])) {
                    res.violation = "dwell bound violated";
                    return res;
                }
                if (k >= 2) {
                    Minutes gap = d - tt.depart[l][k - 2][i - 1];
                    if (gap < inst.headways[l].min || gap > inst.headways[l].max) {
                        res.violation = "headway bound violated";
                        return res;
                    }
                }
            }
        }
    }

    FixedFirstStage fixed = make_first_stage(inst, tt.depart);
    Loads loads = compute_loads(inst, fixed, w);
    int Q = inst.costs.max_formation;

    // Plan checks: formation domain, balance at transfer stops, moves.
    std::set<std::tuple<int, int, int>> slots;
    std::set<std::tuple<int, int, int>> active;
    for (const auto& mv : plan.moves) {
        const auto& co = inst.eptn.corridors[mv.corridor];
        if (co.from_stop < 2 || co.to_stop < 2) {
            res.violation = "move over a non-reroutable corridor";
            return res;
        }
        Minutes gap = tt.depart[co.to_line][mv.to_trip - 1][co.to_stop - 1] -
                      fixed.arrive[co.from_line][mv.from_trip - 1][co.from_stop - 1];
        if (gap < co.theta_min || gap > co.theta_max) {
            res.violation = "move outside the coupling window";
            return res;
        }
        if (mv.units < 1) {
            res.violation = "move of fewer than one unit";
            return res;
        }
        if (!slots.insert({co.from_line, mv.from_trip, co.from_stop}).second ||
            !slots.insert({co.to_line, mv.to_trip, co.to_stop}).second) {
            res.violation = "two moves share a trip-stop slot";
            return res;
        }
        if (active.count({inst.eptn.reverse_corridor(mv.corridor), mv.to_trip, mv.from_trip})) {
            res.violation = "bidirectional move between the same trips";
            return res;
        }
        active.insert({mv.corridor, mv.from_trip, mv.to_trip});
    }
    for (int l = 0; l < inst.num_lines(); ++l)
        for (int k = 1; k <= inst.num_trips(l); ++k)
            for (int i = 1; i <= inst.eptn.lines[l].num_stops(); ++i) {
                long long x = plan.formation[l][k - 1][i - 1];
                if (x < 1 || x > Q) {
                    res.violation = "formation outside 1..Q";
                    return res;
                }
                if (i >= 2) {
                    long long expect = plan.formation[l][k - 1][i - 2];
                    for (const auto& mv : plan.moves) {
                        const auto& co = inst.eptn.corridors[mv.corridor];
                        if (co.from_line == l && mv.from_trip == k && co.from_stop == i)
                            expect -= mv.units;
                        if (co.to_line == l && mv.to_trip == k && co.to_stop == i)
                            expect += mv.units;
                    }
                    if (x != expect) {
                        res.violation = "formation balance broken at a stop";
                        return res;
                    }
                }
                if (loads.v[l][k - 1][i - 1] > inst.costs.cap_per_unit * x) {
                    res.violation = "capacity exceeded";
                    return res;
                }
            }

    auto need = kappa_need_for(inst, fixed, plan.formation, w);
    long long total = 0;
    for (size_t m = 0; m < need.size(); ++m) {
        if (need[m] > plan.kappa[m]) {
            res.violation = "depot stock underflow";
            return res;
        }
        total += plan.kappa[m];
    }
    if (total > inst.costs.max_units) {
        res.violation = "fleet budget exceeded";
        return res;
    }

    FlowTrace trace;
    const auto& sc = inst.scenarios[w];
    trace.legs.resize(sc.groups.size());
    for (size_t p = 0; p < sc.groups.size(); ++p) {
        const auto& grp = sc.groups[p];
        for (size_t leg = 0; leg < grp.lines.size(); ++leg) {
            int k = fixed.boarded[w][p][leg];
            FlowTrace::Leg lg;
            lg.trip = k;
            if (k != 0) {
                if (leg == 0) {
                    lg.wait = fixed.depart[grp.lines[0]][k - 1][grp.origin_stop - 1] -
                              grp.arrival_time;
                } else {
                    const auto& co = inst.eptn.corridors[grp.corridors[leg - 1]];
                    int kprev = fixed.boarded[w][p][leg - 1];
                    lg.in_vehicle = active.count({grp.corridors[leg - 1], kprev, k}) > 0;
                    lg.wait = lg.in_vehicle
                                  ? 0
                                  : tt.depart[co.to_line][k - 1][co.to_stop - 1] -
                                        fixed.arrive[co.from_line][kprev - 1][co.from_stop - 1];
                }
            }
            trace.legs[p].push_back(lg);
            if (k == 0) break;
        }
    }
    trace.board = loads.b;
    trace.alight = loads.c;
    trace.load = loads.v;
    trace.kappa_need = need;
    trace.depot_out.assign(inst.eptn.depots.size(),
                           std::vector<long long>(inst.grid.horizon, 0));
    for (size_t m = 0; m < inst.eptn.depots.size(); ++m) {
        const auto& dep = inst.eptn.depots[m];
        int prep = static_cast<int>(dep.prep_time / D);
        for (int t = 1; t <= inst.grid.horizon; ++t) {
            long long av = 0, dv = 0;
            for (int l : dep.ll_lines)
                for (int k = 1; k <= inst.num_trips(l); ++k) {
                    int S = inst.eptn.lines[l].num_stops();
                    if (fixed.depart[l][k - 1][S - 1] <= D * (t - prep))
                        av += plan.formation[l][k - 1][S - 1];
                }
            for (int l : dep.fl_lines)
                for (int k = 1; k <= inst.num_trips(l); ++k)
                    if (fixed.depart[l][k - 1][0] <= D * t) dv += plan.formation[l][k - 1][0];
            trace.depot_out[m][t - 1] = dv - av;
        }
    }
    trace.origin_wait_cost = origin_wait_cost(inst, fixed, w);
    trace.transfer_wait_cost = transfer_wait_cost(inst, fixed, w, active);
    double oper = 0.0;
    for (int l = 0; l < inst.num_lines(); ++l)
        for (int k = 1; k <= inst.num_trips(l); ++k)
            for (int i = 1; i <= inst.eptn.lines[l].num_stops(); ++i)
                oper += inst.costs.vartheta(l, i,
                                            static_cast<int>(plan.formation[l][k - 1][i - 1]));
    trace.oper_cost = inst.costs.phi2 * oper;
    res.trace = std::move(trace);
    return res;
}

}  // namespace mav

#include "mav/strategies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace mav {

namespace {

long long fleet_of(const Instance& inst, const std::vector<CapacityPlan>& plans) {
    std::vector<long long> agg(inst.eptn.depots.size(), 0);
    for (const auto& plan : plans)
        for (size_t m = 0; m < agg.size(); ++m) agg[m] = std::max(agg[m], plan.kappa[m]);
    long long total = 0;
    for (long long v : agg) total += v;
    return total;
}

}  // namespace

MonoResult solve_monolithic(const Instance& inst, Strategy strategy, bool vi,
                            const MilpLimits& limits, bool minimize_fleet) {
    auto t0 = std::chrono::steady_clock::now();
    MonoResult out;
    BuiltModel m = build_monolithic(inst, strategy, vi);
    MilpOptions opts;
    WatchedSet ws = watched_monolithic(m);
    opts.watched = ws.vars;
    opts.watched_levels = ws.levels;
    opts.limits = limits;
    MilpSolution ms = solve_milp(m.ir, opts);
    out.status = ms.status;
    out.nodes = ms.node_count;
    if (ms.x.empty()) {
        out.wall_sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }
    std::vector<double> exact = reconstruct_solution(inst, m, ms.x);

    if (minimize_fleet) {
        // Secondary pass: among plans of equal objective, use as few units as
        // possible; the fleet count is what strategy tables report.
        double opt = evaluate_objective(m.ir, exact);
        ModelIr ir2 = m.ir;
        Row cap;
        cap.terms = ir2.objective.terms;
        cap.sense = Sense::Le;
        cap.rhs = opt - ir2.objective.constant + 1e-7;
        cap.label = "objective_cap";
        ir2.rows.push_back(cap);
        ir2.objective = LinExpr{};
        for (const auto& [kk, kv] : m.h.kappa.all()) ir2.objective.add(kv, 1.0);
        MilpOptions o2 = opts;
        o2.limits.gap = 0.0;
        MilpSolution ms2 = solve_milp(ir2, o2);
        if (!ms2.x.empty()) exact = reconstruct_solution(inst, m, ms2.x);
    }

    out.timetable = decode_timetable(inst, m, exact);
    out.first_stage = make_first_stage(inst, out.timetable.depart);
    for (size_t w = 0; w < inst.scenarios.size(); ++w)
        out.plans.push_back(decode_plan(inst, m, exact, static_cast<int>(w)));
    out.costs = evaluate_solution_costs(inst, out.first_stage, out.plans);
    out.objective = out.costs.total();
    out.gap = ms.gap;
    out.used_maus = fleet_of(inst, out.plans);
    out.wall_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::vector<StrategyReport> compare_strategies(const Instance& inst, const MilpLimits& limits) {
    std::vector<StrategyReport> out;
    for (Strategy s :
         {Strategy::Fixed, Strategy::PartiallyFlexible, Strategy::CompletelyFlexible}) {
        MonoResult r = solve_monolithic(inst, s, true, limits);
        StrategyReport rep;
        rep.strategy = s;
        rep.status = r.status;
        rep.passenger_cost = r.costs.origin_wait + r.costs.transfer_wait;
        rep.oper_cost = r.costs.oper;
        rep.objective = r.objective;
        rep.used_maus = r.used_maus;
        rep.wall_sec = r.wall_sec;
        out.push_back(rep);
    }
    return out;
}

SequentialReport solve_sequential(const Instance& inst, const MilpLimits& limits) {
    SequentialReport rep;
    // Step 1: timetable from the wait-only master (no recourse estimate).
    BuiltModel master = build_master(inst, 0.0, true, /*include_eta=*/false);
    MilpOptions o1;
    WatchedSet ws1 = watched_master(master);
    o1.watched = ws1.vars;
    o1.watched_levels = ws1.levels;
    o1.limits = limits;
    MilpSolution m1 = solve_milp(master.ir, o1);
    if (m1.x.empty()) return rep;
    std::vector<double> exact1 = reconstruct_solution(inst, master, m1.x);
    rep.step1_objective = evaluate_objective(master.ir, exact1);
    Timetable tt = decode_timetable(inst, master, exact1);
    FixedFirstStage fixed = make_first_stage(inst, tt.depart);

    // Step 2: the full model with the first stage pinned; shared depot stocks
    // and the fleet budget stay binding.
    BuiltModel mono = build_monolithic(inst, Strategy::CompletelyFlexible, true);
    for (const auto& [kk, v] : mono.h.z.all()) {
        Minutes d = fixed.depart[kk[0]][kk[1] - 1][kk[2] - 1];
        double val = kk[3] <= d / inst.grid.delta - 1 ? 1.0 : 0.0;
        mono.ir.vars[v].lo = mono.ir.vars[v].up = val;
    }
    for (const auto& [kk, v] : mono.h.chi.all()) {
        double val = fixed.boarded[kk[0]][kk[1]][kk[2]] == kk[3] ? 1.0 : 0.0;
        mono.ir.vars[v].lo = mono.ir.vars[v].up = val;
    }
    for (const auto& [kk, v] : mono.h.zeta.all()) {
        const auto& legs = fixed.boarded[kk[0]][kk[1]];
        double val = legs[kk[2]] == kk[3] && legs[kk[2] + 1] == kk[4] ? 1.0 : 0.0;
        mono.ir.vars[v].lo = mono.ir.vars[v].up = val;
    }
    MilpOptions o2;
    WatchedSet ws2 = watched_monolithic(mono);
    o2.watched = ws2.vars;
    o2.watched_levels = ws2.levels;
    o2.limits = limits;
    MilpSolution m2 = solve_milp(mono.ir, o2);
    if (m2.status == MilpStatus::Infeasible || m2.x.empty()) return rep;  // step 2 failed
    rep.feasible = true;
    std::vector<double> exact2 = reconstruct_solution(inst, mono, m2.x);
    rep.timetable = decode_timetable(inst, mono, exact2);
    FixedFirstStage f2 = make_first_stage(inst, rep.timetable.depart);
    for (size_t w = 0; w < inst.scenarios.size(); ++w)
        rep.plans.push_back(decode_plan(inst, mono, exact2, static_cast<int>(w)));
    CostBreakdown cb = evaluate_solution_costs(inst, f2, rep.plans);
    rep.objective = cb.total();
    rep.passenger_cost = cb.origin_wait + cb.transfer_wait;
    rep.oper_cost = cb.oper;
    rep.used_maus = fleet_of(inst, rep.plans);
    return rep;
}

std::vector<ScenarioStudyRow> scenario_count_study(const Instance& base,
                                                   const std::vector<int>& counts, uint64_t seed,
                                                   const MilpLimits& limits) {
    std::vector<ScenarioStudyRow> rows;
    std::mt19937_64 rng(seed);
    int W = static_cast<int>(base.scenarios.size());
    for (int count : counts) {
        if (count > W) throw SemanticError("sample count exceeds the scenario pool");
        auto t0 = std::chrono::steady_clock::now();
        std::vector<int> idx(W);
        for (int i = 0; i < W; ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(count);
        std::sort(idx.begin(), idx.end());

        Instance train = base;
        train.scenarios.clear();
        double mass = 0.0;
        for (int i : idx) mass += base.scenarios[i].probability;
        for (int i : idx) {
            Scenario sc = base.scenarios[i];
            sc.scenario_id = static_cast<int>(train.scenarios.size());
            sc.probability = base.scenarios[i].probability / mass;  // renormalized
            train.scenarios.push_back(std::move(sc));
        }
        MonoResult r = solve_monolithic(train, Strategy::CompletelyFlexible, true, limits, false);
        ScenarioStudyRow row;
        row.count = count;
        row.train_objective = r.objective;
        if (r.status != MilpStatus::Infeasible) {
            // Feed the fixed timetable to every scenario of the full pool:
            // flow simulation plus second-stage re-optimization.
            FixedFirstStage fixed = make_first_stage(base, r.timetable.depart);
            double eval = 0.0;
            bool ok = true;
            for (int w = 0; w < W && ok; ++w) {
                SecondStageResult ss =
                    oracle_second_stage(base, fixed, w, Strategy::CompletelyFlexible);
                if (!ss.feasible) {
                    ok = false;
                    break;
                }
                // origin waits of scenario w under this timetable
                double origin = 0.0;
                const auto& sc = base.scenarios[w];
                for (size_t p = 0; p < sc.groups.size(); ++p) {
                    const auto& grp = sc.groups[p];
                    int k = fixed.boarded[w][p][0];
                    if (k == 0) continue;
                    double eps = grp.transfer_carry ? base.costs.eps2 : base.costs.eps1;
                    Minutes wait =
                        fixed.depart[grp.lines[0]][k - 1][grp.origin_stop - 1] - grp.arrival_time;
                    origin += base.costs.phi1 * eps * base.costs.wait_value *
                              static_cast<double>(grp.size) * static_cast<double>(wait);
                }
                eval += base.scenarios[w].probability * (origin + ss.best.cost);
            }
            row.eval_objective = ok ? eval : std::numeric_limits<double>::infinity();
        } else {
            row.eval_objective = std::numeric_limits<double>::infinity();
        }
        row.wall_sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(row);
    }
    return rows;
}

ParetoBounds pareto_bounds(const Instance& inst) {
    ParetoBounds b;
    DepartureWindows win = compute_departure_windows(inst);
    // Worst-case waits from maximum headways plus the before-first-trip edge.
    for (size_t w = 0; w < inst.scenarios.size(); ++w) {
        double rho = inst.scenarios[w].probability;
        for (const auto& grp : inst.scenarios[w].groups) {
            int l0 = grp.lines[0];
            double origin_bound = static_cast<double>(inst.headways[l0].max);
            if (inst.num_trips(l0) >= 1)
                origin_bound =
                    std::max(origin_bound,
                             static_cast<double>(win.depart_hi(l0, 1, grp.origin_stop) -
                                                 grp.arrival_time));
            double eps0 = grp.transfer_carry ? inst.costs.eps2 : inst.costs.eps1;
            double sum = eps0 * std::max(0.0, origin_bound);
            for (size_t leg = 0; leg + 1 < grp.lines.size(); ++leg) {
                const auto& co = inst.eptn.corridors[grp.corridors[leg]];
                double tb = static_cast<double>(inst.headways[co.to_line].max + co.theta_min);
                if (inst.num_trips(co.to_line) >= 1 && inst.num_trips(co.from_line) >= 1) {
                    double a_min = static_cast<double>(
                        win.arrive_lo(inst, co.from_line, 1, co.from_stop));
                    tb = std::max(tb, static_cast<double>(win.depart_hi(
                                          co.to_line, inst.num_trips(co.to_line), co.to_stop)) -
                                          a_min);
                }
                sum += inst.costs.eps2 * std::max(0.0, tb);
            }
            b.pass_hi += rho * inst.costs.wait_value * static_cast<double>(grp.size) * sum;
        }
    }
    for (int l = 0; l < inst.num_lines(); ++l)
        for (int k = 1; k <= inst.num_trips(l); ++k)
            for (int i = 1; i <= inst.eptn.lines[l].num_stops(); ++i) {
                b.oper_lo += inst.costs.vartheta(l, i, 1);
                b.oper_hi += inst.costs.vartheta(l, i, inst.costs.max_formation);
            }
    return b;
}

std::vector<ParetoPoint> pareto_sweep(const Instance& inst, int steps, const MilpLimits& limits) {
    ParetoBounds b = pareto_bounds(inst);
    double pass_range = std::max(b.pass_hi - b.pass_lo, 0.0);
    double oper_range = std::max(b.oper_hi - b.oper_lo, 0.0);
    std::vector<ParetoPoint> points;
    for (int s = 0; s < steps; ++s) {
        double w1 = steps == 1 ? 1.0 : static_cast<double>(s) / (steps - 1);
        double w2 = 1.0 - w1;
        Instance scaled = inst;
        scaled.costs.phi1 = pass_range > 0 ? w1 / pass_range : 0.0;
        scaled.costs.phi2 = oper_range > 0 ? w2 / oper_range : 0.0;
        MonoResult r =
            solve_monolithic(scaled, Strategy::CompletelyFlexible, true, limits, false);
        ParetoPoint pt;
        pt.w1 = w1;
        pt.w2 = w2;
        if (r.status != MilpStatus::Infeasible) {
            Instance unit = inst;
            unit.costs.phi1 = 1.0;
            unit.costs.phi2 = 1.0;
            CostBreakdown raw = evaluate_solution_costs(unit, r.first_stage, r.plans);
            pt.raw_passenger = raw.origin_wait + raw.transfer_wait;
            pt.raw_oper = raw.oper;
            pt.normalized =
                (pass_range > 0 ? w1 * (pt.raw_passenger - b.pass_lo) / pass_range : 0.0) +
                (oper_range > 0 ? w2 * (pt.raw_oper - b.oper_lo) / oper_range : 0.0);
        }
        points.push_back(pt);
    }
    for (auto& p : points)
        for (const auto& q : points)
            if (&p != &q && q.raw_passenger <= p.raw_passenger && q.raw_oper <= p.raw_oper &&
                (q.raw_passenger < p.raw_passenger || q.raw_oper < p.raw_oper))
                p.dominated = true;
    return points;
}

}  // namespace mav

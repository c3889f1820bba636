#include "mav/lshaped.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

namespace mav {

double lower_bound_L(const Instance& inst) {
    double sum = 0.0;
    for (int l = 0; l < inst.num_lines(); ++l)
        for (int k = 1; k <= inst.num_trips(l); ++k)
            for (int i = 1; i <= inst.eptn.lines[l].num_stops(); ++i)
                sum += inst.costs.vartheta(l, i, 1);
    return inst.costs.phi2 * sum;
}

FirstStageSnapshot snapshot_from_candidate(const Instance& inst, const BuiltModel& master,
                                           const std::vector<double>& x) {
    FirstStageSnapshot snap;
    Timetable tt = decode_timetable(inst, master, x);
    snap.fixed = make_first_stage(inst, tt.depart);
    for (const auto& [k, v] : master.h.z.all()) snap.bits.emplace_back(v, std::round(x[v]));
    for (const auto& [k, v] : master.h.chi.all()) snap.bits.emplace_back(v, std::round(x[v]));
    for (const auto& [k, v] : master.h.zeta.all()) snap.bits.emplace_back(v, std::round(x[v]));
    return snap;
}

namespace {

// Master-consistency screen: a snapshot whose assignments contradict its own
// timetable has no second stage; it is excluded by a feasibility cut.
bool snapshot_consistent(const Instance& inst, const FixedFirstStage& fixed) {
    FixedFirstStage derived = make_first_stage(inst, fixed.depart);
    return derived.boarded == fixed.boarded;
}

ScenarioEval eval_one(const Instance& inst, const FixedFirstStage& fixed, int w, EvalMode mode,
                      bool vi) {
    ScenarioEval ev;
    SubproblemBuild sub = build_subproblem(
        inst, w, fixed,
        mode == EvalMode::Integer ? SubproblemMode::Integer : SubproblemMode::LpRelaxed, vi);
    if (mode == EvalMode::LpRelaxed) {
        LpSolution lp = solve_lp(lp_from_model(sub.model.ir));
        if (lp.status != LpStatus::Optimal) return ev;  // infeasible (bounds are finite)
        ev.feasible = true;
        double obj = sub.model.ir.objective.constant;
        for (const auto& [j, c] : sub.model.ir.objective.terms) obj += c * lp.x[j];
        ev.value = obj;
        for (const auto& [row, key] : sub.pin_z_rows) ev.z_duals.emplace_back(key, lp.duals[row]);
        for (const auto& [row, key] : sub.pin_chi_rows)
            ev.chi_duals.emplace_back(key, lp.duals[row]);
        for (const auto& [row, key] : sub.pin_zeta_rows)
            ev.zeta_duals.emplace_back(key, lp.duals[row]);
        return ev;
    }
    MilpOptions opts;
    WatchedSet ws = watched_subproblem(sub.model);
    opts.watched = ws.vars;
    opts.watched_levels = ws.levels;
    MilpSolution ms = solve_milp(sub.model.ir, opts);
    if (ms.status != MilpStatus::Optimal) return ev;
    ev.feasible = true;
    std::vector<double> exact = reconstruct_solution(inst, sub.model, ms.x);
    ev.value = evaluate_objective(sub.model.ir, exact);
    ev.x = std::move(exact);
    return ev;
}

}  // namespace

SecondStageEval evaluate_second_stage(const Instance& inst, const FixedFirstStage& fixed,
                                      EvalMode mode, bool vi, int threads) {
    SecondStageEval out;
    int W = static_cast<int>(inst.scenarios.size());
    out.per_scenario.resize(W);
    if (!snapshot_consistent(inst, fixed)) {
        out.all_feasible = false;
        return out;
    }
    if (threads <= 1 || W <= 1) {
        for (int w = 0; w < W; ++w) out.per_scenario[w] = eval_one(inst, fixed, w, mode, vi);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        int nt = std::min(threads, W);
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&] {
                for (int w = next.fetch_add(1); w < W; w = next.fetch_add(1))
                    out.per_scenario[w] = eval_one(inst, fixed, w, mode, vi);
            });
        for (auto& th : pool) th.join();
    }
    out.all_feasible = true;
    out.total = 0.0;
    for (int w = 0; w < W; ++w) {  // deterministic ordered reduction
        if (!out.per_scenario[w].feasible) {
            out.all_feasible = false;
            return out;
        }
        out.total += inst.scenarios[w].probability * out.per_scenario[w].value;
    }
    return out;
}

CutRow make_optimality_cut(const FirstStageSnapshot& snap, int eta_var, double f_value,
                           double L) {
    // eta >= (F-L) * (sum_on x - sum_off x - |on|) + F
    CutRow cut;
    cut.sense = Sense::Ge;
    cut.label = "cut_optimality";
    double slope = f_value - L;
    cut.terms.emplace_back(eta_var, 1.0);
    long long on_count = 0;
    for (const auto& [v, val] : snap.bits) {
        if (val > 0.5) {
            cut.terms.emplace_back(v, -slope);
            ++on_count;
        } else {
            cut.terms.emplace_back(v, slope);
        }
    }
    cut.rhs = f_value - slope * static_cast<double>(on_count);
    return cut;
}

CutRow make_feasibility_cut(const FirstStageSnapshot& snap) {
    // sum_on (1 - x) + sum_off x >= 1
    CutRow cut;
    cut.sense = Sense::Ge;
    cut.label = "cut_feasibility";
    long long on_count = 0;
    for (const auto& [v, val] : snap.bits) {
        if (val > 0.5) {
            cut.terms.emplace_back(v, -1.0);
            ++on_count;
        } else {
            cut.terms.emplace_back(v, 1.0);
        }
    }
    cut.rhs = 1.0 - static_cast<double>(on_count);
    return cut;
}

CutRow make_subgradient_cut(const Instance& inst, const BuiltModel& master,
                            const FirstStageSnapshot& snap, int eta_var,
                            const SecondStageEval& lp_eval) {
    // eta >= sum_v iota_v (x_v - x*_v) + F_LP
    CutRow cut;
    cut.sense = Sense::Ge;
    cut.label = "cut_subgradient";
    std::map<int, double> iota;
    for (size_t w = 0; w < inst.scenarios.size(); ++w) {
        double rho = inst.scenarios[w].probability;
        const auto& ev = lp_eval.per_scenario[w];
        for (const auto& [k, d] : ev.z_duals) {
            int v = master.h.z.get(k);
            if (v >= 0) iota[v] += rho * d;
        }
        for (const auto& [k, d] : ev.chi_duals) {
            int v = master.h.chi.get(k);
            if (v >= 0) iota[v] += rho * d;
        }
        for (const auto& [k, d] : ev.zeta_duals) {
            int v = master.h.zeta.get(k);
            if (v >= 0) iota[v] += rho * d;
        }
    }
    std::map<int, double> snap_val;
    for (const auto& [v, val] : snap.bits) snap_val[v] = val;
    cut.terms.emplace_back(eta_var, 1.0);
    double rhs = lp_eval.total;
    for (const auto& [v, g] : iota) {
        if (g == 0.0) continue;
        cut.terms.emplace_back(v, -g);
        rhs -= g * snap_val[v];
    }
    cut.rhs = rhs;
    return cut;
}

LShapedSolution run_integer_lshaped(const Instance& inst, const LShapedConfig& config) {
    auto t0 = std::chrono::steady_clock::now();
    LShapedSolution sol;
    double L = lower_bound_L(inst);
    BuiltModel master = build_master(inst, L, config.use_valid_inequalities);

    double upper = std::numeric_limits<double>::infinity();
    std::optional<FirstStageSnapshot> best_snap;
    std::vector<ScenarioEval> best_evals;
    long long snapshot_seq = 0;

    MilpOptions opts;
    WatchedSet ws = watched_master(master);
    opts.watched = ws.vars;
    opts.watched_levels = ws.levels;
    opts.limits.gap = config.gap;
    opts.limits.time_sec = config.time_sec;
    opts.node_log = config.node_log;
    opts.callback = [&](const CandidateView& cand) -> std::vector<CutRow> {
        if (!cand.integral) return {};
        FirstStageSnapshot snap = snapshot_from_candidate(inst, master, cand.x);
        snap.id = snapshot_seq++;
        double eta_star = cand.x[master.h.eta];
        double psi1 = cand.objective - eta_star;

        SecondStageEval lp_eval = evaluate_second_stage(inst, snap.fixed, EvalMode::LpRelaxed,
                                                        config.use_valid_inequalities,
                                                        config.threads);
        if (!lp_eval.all_feasible) {
            CutRow cut = make_feasibility_cut(snap);
            sol.cuts.feasibility++;
            sol.cut_log.push_back({CutKind::Feasibility, cut, snap.id, snap.bits, 0.0});
            return {cut};
        }
        if (config.subgradient_cuts && lp_eval.total > eta_star + 1e-7) {
            CutRow cut = make_subgradient_cut(inst, master, snap, master.h.eta, lp_eval);
            sol.cuts.subgradient++;
            sol.cut_log.push_back(
                {CutKind::Subgradient, cut, snap.id, snap.bits, lp_eval.total});
            return {cut};
        }
        SecondStageEval ip_eval = evaluate_second_stage(inst, snap.fixed, EvalMode::Integer,
                                                        config.use_valid_inequalities,
                                                        config.threads);
        if (!ip_eval.all_feasible) {
            CutRow cut = make_feasibility_cut(snap);
            sol.cuts.feasibility++;
            sol.cut_log.push_back({CutKind::Feasibility, cut, snap.id, snap.bits, 0.0});
            return {cut};
        }
        double f0 = ip_eval.total;
        if (psi1 + f0 < upper - 1e-12) {
            upper = psi1 + f0;
            best_snap = snap;
            best_evals = ip_eval.per_scenario;
        }
        sol.bound_trace.push_back({upper, std::min(cand.bound, upper)});
        if (f0 > eta_star + 1e-7) {
            CutRow cut = make_optimality_cut(snap, master.h.eta, f0, L);
            sol.cuts.optimality++;
            sol.cut_log.push_back({CutKind::Optimality, cut, snap.id, snap.bits, f0});
            return {cut};
        }
        return {};
    };

    MilpSolution ms = solve_milp(master.ir, opts);
    sol.status = ms.status;
    sol.nodes = ms.node_count;
    sol.wall_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!best_snap.has_value()) {
        sol.status = ms.status == MilpStatus::TimeLimit ? MilpStatus::TimeLimit
                                                        : MilpStatus::Infeasible;
        return sol;
    }
    sol.first_stage = best_snap->fixed;
    sol.timetable.depart = sol.first_stage.depart;
    sol.timetable.arrive = sol.first_stage.arrive;
    for (size_t w = 0; w < inst.scenarios.size(); ++w) {
        // Decode each scenario plan from its integer subproblem solution.
        SubproblemBuild sub = build_subproblem(inst, static_cast<int>(w), sol.first_stage,
                                               SubproblemMode::Integer,
                                               config.use_valid_inequalities);
        sol.plans.push_back(decode_plan(inst, sub.model, best_evals[w].x, static_cast<int>(w)));
    }
    sol.costs = evaluate_solution_costs(inst, sol.first_stage, sol.plans);
    sol.objective = sol.costs.total();
    double lb = std::min(ms.bound, sol.objective);
    sol.gap = sol.objective != 0.0 ? (sol.objective - lb) / std::abs(sol.objective) : 0.0;
    // Aggregated fleet report: per-depot max over scenarios.
    std::vector<long long> agg(inst.eptn.depots.size(), 0);
    for (const auto& plan : sol.plans)
        for (size_t m = 0; m < agg.size(); ++m) agg[m] = std::max(agg[m], plan.kappa[m]);
    sol.used_maus = 0;
    for (long long v : agg) sol.used_maus += v;
    return sol;
}

}  // namespace mav

// Command-line driver: instance generation/validation, the solve modes, the
// strategy/method comparisons, Pareto sweeps and oracle cross-checks.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mav/report.hpp"

using namespace mav;

namespace {

int log_level() {
    const char* v = std::getenv("TTVS_LOG");
    return v ? std::atoi(v) : 0;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw MavError("cannot write output file: " + path);
    out << content;
}

Strategy parse_strategy(const std::string& s) {
    if (s == "fixed") return Strategy::Fixed;
    if (s == "partial") return Strategy::PartiallyFlexible;
    if (s == "complete") return Strategy::CompletelyFlexible;
    throw MavError("unknown strategy: " + s);
}

int exit_code_for(MilpStatus st, bool have_solution) {
    switch (st) {
        case MilpStatus::Optimal:
        case MilpStatus::GapLimit:
        case MilpStatus::Feasible: return 0;
        case MilpStatus::Infeasible: return 2;
        case MilpStatus::TimeLimit: return have_solution ? 0 : 3;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"timetabling, vehicle scheduling and dynamic capacity allocation "
                 "for modular-bus networks under stochastic demand"};
    app.require_subcommand(1);

    // ---- generate ----------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "generate a random instance");
    GeneratorSpec gspec;
    uint64_t seed = 1;
    std::string out_path = "-";
    gen->add_option("--lines", gspec.lines);
    gen->add_option("--stops", gspec.stops_per_line);
    gen->add_option("--trips", gspec.trips_per_line);
    gen->add_option("--horizon", gspec.horizon);
    gen->add_option("--delta", gspec.delta);
    gen->add_option("--scenarios", gspec.scenarios);
    gen->add_option("--groups", gspec.groups_per_scenario);
    gen->add_option("--transfer-fraction", gspec.transfer_fraction);
    gen->add_option("--formations", gspec.max_formation);
    gen->add_option("--cap", gspec.cap_per_unit);
    gen->add_option("--budget", gspec.max_units);
    gen->add_option("--phi1", gspec.phi1);
    gen->add_option("--phi2", gspec.phi2);
    gen->add_option("--slack", gspec.window_slack);
    gen->add_option("--flex-stops", gspec.flex_stops);
    gen->add_option("--seed", seed);
    gen->add_option("-o,--out", out_path);

    // ---- validate ----------------------------------------------------------
    auto* val = app.add_subcommand("validate", "validate an instance file");
    std::string val_path;
    val->add_option("instance", val_path)->required();

    // ---- solve -------------------------------------------------------------
    auto* solve = app.add_subcommand("solve", "solve an instance");
    std::string solve_path, method = "il", strategy_str = "complete", solve_out = "-";
    double gap = 0.0, time_limit = 1e18;
    long long ch = 0, ph = 0;
    int threads = 1;
    bool no_timestamp = false, no_vi = false, no_subgradient = false;
    solve->add_option("instance", solve_path)->required();
    solve->add_option("--method", method)->check(CLI::IsMember({"monolithic", "il", "rh-il", "rh-monolithic", "sequential"}));
    solve->add_option("--strategy", strategy_str)->check(CLI::IsMember({"fixed", "partial", "complete"}));
    solve->add_option("--gap", gap);
    solve->add_option("--time", time_limit);
    solve->add_option("--ch", ch);
    solve->add_option("--ph", ph);
    solve->add_option("--threads", threads);
    solve->add_flag("--no-timestamp", no_timestamp);
    solve->add_flag("--no-valid-inequalities", no_vi);
    solve->add_flag("--no-subgradient-cuts", no_subgradient);
    solve->add_option("-o,--out", solve_out);

    // ---- compare -----------------------------------------------------------
    auto* cmp = app.add_subcommand("compare", "strategy / method / solver comparisons");
    std::string cmp_path, what = "strategies", cmp_out = "-", cmp_format = "csv";
    double cmp_gap = 0.0, cmp_time = 1e18;
    cmp->add_option("instance", cmp_path)->required();
    cmp->add_option("--what", what)->check(CLI::IsMember({"strategies", "methods", "solvers"}));
    cmp->add_option("--gap", cmp_gap);
    cmp->add_option("--time", cmp_time);
    cmp->add_option("--format", cmp_format)->check(CLI::IsMember({"csv", "json"}));
    cmp->add_option("-o,--out", cmp_out);

    // ---- pareto ------------------------------------------------------------
    auto* par = app.add_subcommand("pareto", "normalized weighted-sum sweep");
    std::string par_path, par_out = "-";
    int pareto_steps = 11;
    double par_time = 1e18;
    par->add_option("instance", par_path)->required();
    par->add_option("--pareto-steps", pareto_steps);
    par->add_option("--time", par_time);
    par->add_option("-o,--out", par_out);

    // ---- scenario-study ----------------------------------------------------
    auto* stu = app.add_subcommand("scenario-study", "scenario-count value study");
    std::string stu_path, stu_out = "-";
    std::vector<int> counts{1, 2, 4};
    uint64_t stu_seed = 1;
    double stu_time = 1e18;
    stu->add_option("instance", stu_path)->required();
    stu->add_option("--scenarios-sample", counts);
    stu->add_option("--seed", stu_seed);
    stu->add_option("--time", stu_time);
    stu->add_option("-o,--out", stu_out);

    // ---- oracle-check ------------------------------------------------------
    auto* orc = app.add_subcommand("oracle-check", "brute-force cross-check of all solve modes");
    std::string orc_path;
    long long orc_guard = 10'000'000;
    bool corrupt = false;  // test hook: perturb the solver objective
    orc->add_option("instance", orc_path)->required();
    orc->add_option("--guard", orc_guard);
    orc->add_flag("--corrupt-solver", corrupt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            Instance inst = generate_random_instance(gspec, seed);
            write_output(out_path, serialize_instance(inst));
            return 0;
        }
        if (*val) {
            Instance inst = load_instance(val_path);
            auto violations = validate_eptn(inst.eptn);
            for (const auto& v : violations)
                std::cout << v.entity << ": " << v.rule << "\n";
            std::cout << "instance ok: " << inst.num_lines() << " lines, "
                      << inst.total_trips() << " trips, " << inst.scenarios.size()
                      << " scenarios\n";
            return violations.empty() ? 0 : 2;
        }
        if (*solve) {
            Instance inst = load_instance(solve_path);
            Strategy strat = parse_strategy(strategy_str);
            MilpLimits limits{gap, time_limit, -1};
            if (method == "monolithic") {
                MonoResult r = solve_monolithic(inst, strat, !no_vi, limits);
                write_output(solve_out,
                             solution_report_json(inst, method, status_name(r.status),
                                                  r.objective, r.timetable, r.plans, r.costs,
                                                  r.gap, r.wall_sec, r.used_maus, nullptr,
                                                  !no_timestamp));
                return exit_code_for(r.status, !r.plans.empty());
            }
            if (method == "il") {
                LShapedConfig cfg;
                cfg.gap = gap;
                cfg.time_sec = time_limit;
                cfg.subgradient_cuts = !no_subgradient;
                cfg.use_valid_inequalities = !no_vi;
                cfg.threads = threads;
                if (log_level() > 1) cfg.node_log = &std::cerr;
                LShapedSolution s = run_integer_lshaped(inst, cfg);
                write_output(solve_out,
                             solution_report_json(inst, method, status_name(s.status),
                                                  s.objective, s.timetable, s.plans, s.costs,
                                                  s.gap, s.wall_sec, s.used_maus, &s.cuts,
                                                  !no_timestamp));
                return exit_code_for(s.status, !s.plans.empty());
            }
            if (method == "rh-il" || method == "rh-monolithic") {
                if (ch <= 0 || ph <= 0) throw MavError("rolling horizon needs --ch and --ph");
                RollingConfig cfg;
                cfg.inner = method == "rh-il" ? InnerSolver::IntegerLShaped
                                              : InnerSolver::Monolithic;
                cfg.il.gap = gap;
                cfg.il.time_sec = time_limit;
                cfg.il.threads = threads;
                cfg.strategy = strat;
                if (log_level() > 0) cfg.stage_log = &std::cerr;
                RollingSolution s = run_rolling_horizon(inst, {ch, ph}, cfg);
                write_output(solve_out,
                             solution_report_json(inst, method, status_name(s.status),
                                                  s.objective, s.timetable, s.plans, s.costs,
                                                  0.0, s.wall_sec, s.used_maus, nullptr,
                                                  !no_timestamp));
                return exit_code_for(s.status, !s.plans.empty());
            }
            if (method == "sequential") {
                SequentialReport r = solve_sequential(inst, limits);
                if (!r.feasible) {
                    std::cout << "{\"method\":\"sequential\",\"status\":\"Infeasible\"}\n";
                    return 2;
                }
                CostBreakdown cb;
                cb.origin_wait = r.passenger_cost;
                cb.oper = r.oper_cost;
                write_output(solve_out,
                             solution_report_json(inst, method, "Optimal", r.objective,
                                                  r.timetable, r.plans, cb, 0.0, 0.0,
                                                  r.used_maus, nullptr, !no_timestamp));
                return 0;
            }
        }
        if (*cmp) {
            Instance inst = load_instance(cmp_path);
            MilpLimits limits{cmp_gap, cmp_time, -1};
            if (what == "strategies") {
                auto reports = compare_strategies(inst, limits);
                write_output(cmp_out, cmp_format == "json" ? strategy_table_json(reports)
                                                           : strategy_table_csv(reports));
                return 0;
            }
            if (what == "methods") {
                MonoResult integrated =
                    solve_monolithic(inst, Strategy::CompletelyFlexible, true, limits);
                SequentialReport seq = solve_sequential(inst, limits);
                std::ostringstream os;
                os << "method,status,objective,used_maus\n";
                os << "integrated," << status_name(integrated.status) << ","
                   << integrated.objective << "," << integrated.used_maus << "\n";
                if (seq.feasible)
                    os << "sequential,Optimal," << seq.objective << "," << seq.used_maus << "\n";
                else
                    os << "sequential,INFEASIBLE,-,-\n";
                write_output(cmp_out, os.str());
                return 0;
            }
            if (what == "solvers") {
                MonoResult mono =
                    solve_monolithic(inst, Strategy::CompletelyFlexible, true, limits);
                LShapedConfig cfg;
                cfg.gap = cmp_gap;
                cfg.time_sec = cmp_time;
                LShapedSolution il = run_integer_lshaped(inst, cfg);
                std::ostringstream os;
                os << "solver,status,objective,nodes,wall_sec\n";
                os << "monolithic," << status_name(mono.status) << "," << mono.objective << ","
                   << mono.nodes << "," << mono.wall_sec << "\n";
                os << "il," << status_name(il.status) << "," << il.objective << "," << il.nodes
                   << "," << il.wall_sec << "\n";
                write_output(cmp_out, os.str());
                double delta = std::abs(mono.objective - il.objective);
                return delta <= 1e-6 ? 0 : 2;
            }
        }
        if (*par) {
            Instance inst = load_instance(par_path);
            auto points = pareto_sweep(inst, pareto_steps, {0.0, par_time, -1});
            write_output(par_out, pareto_csv(points));
            return 0;
        }
        if (*stu) {
            Instance inst = load_instance(stu_path);
            auto rows = scenario_count_study(inst, counts, stu_seed, {0.0, stu_time, -1});
            write_output(stu_out, scenario_study_csv(rows));
            return 0;
        }
        if (*orc) {
            Instance inst = load_instance(orc_path);
            OracleSolution oracle =
                brute_force_solve(inst, Strategy::CompletelyFlexible, orc_guard);
            MonoResult mono = solve_monolithic(inst, Strategy::CompletelyFlexible, true, {});
            LShapedConfig cfg;
            LShapedSolution il = run_integer_lshaped(inst, cfg);
            RollingConfig rcfg;
            rcfg.inner = InnerSolver::IntegerLShaped;
            RollingSolution rh =
                run_rolling_horizon(inst, {inst.grid.span(), inst.grid.span()}, rcfg);
            double mono_obj = mono.objective + (corrupt ? 1.0 : 0.0);
            bool all_ok = true;
            auto line = [&](const std::string& name, double obj, bool feasible) {
                double delta = feasible && oracle.feasible ? obj - oracle.objective : 0.0;
                bool ok = feasible == oracle.feasible && std::abs(delta) <= 1e-9;
                all_ok &= ok;
                std::cout << name << ": objective " << obj << " delta " << delta << " "
                          << (ok ? "OK" : "MISMATCH") << "\n";
            };
            std::cout << "oracle: objective " << oracle.objective
                      << (oracle.feasible ? "" : " (infeasible)") << "\n";
            line("monolithic", mono_obj, mono.status != MilpStatus::Infeasible);
            line("il", il.objective, il.status != MilpStatus::Infeasible);
            line("rh-il", rh.objective, rh.status != MilpStatus::Infeasible);
            return all_ok ? 0 : 2;
        }
    } catch (const SearchSpaceTooLarge& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const MavError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

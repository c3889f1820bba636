#include "mav/report.hpp"

#include <chrono>
#include <sstream>

#include <json.hpp>

namespace mav {

using nlohmann::json;

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Fixed: return "fixed";
        case Strategy::PartiallyFlexible: return "partial";
        case Strategy::CompletelyFlexible: return "complete";
    }
    return "?";
}

const char* status_name(MilpStatus s) {
    switch (s) {
        case MilpStatus::Optimal: return "Optimal";
        case MilpStatus::Feasible: return "Feasible";
        case MilpStatus::Infeasible: return "Infeasible";
        case MilpStatus::GapLimit: return "GapLimit";
        case MilpStatus::TimeLimit: return "TimeLimit";
    }
    return "?";
}

std::string solution_report_json(const Instance& inst, const std::string& method,
                                 const std::string& status, double objective,
                                 const Timetable& tt, const std::vector<CapacityPlan>& plans,
                                 const CostBreakdown& costs, double gap, double wall_sec,
                                 long long used_maus, const CutCounts* cuts,
                                 bool with_timestamp) {
    json j;
    j["method"] = method;
    j["status"] = status;
    j["objective"] = objective;
    j["costs"] = json{{"origin_wait", costs.origin_wait},
                      {"transfer_wait", costs.transfer_wait},
                      {"operational", costs.oper}};
    j["gap"] = gap;
    j["used_maus"] = used_maus;
    if (with_timestamp) {
        j["wall_sec"] = wall_sec;
        j["timestamp"] =
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
    }
    if (cuts)
        j["cuts"] = json{{"optimality", cuts->optimality},
                         {"subgradient", cuts->subgradient},
                         {"feasibility", cuts->feasibility}};
    json lines = json::array();
    bool have_tt = static_cast<int>(tt.depart.size()) == inst.num_lines();
    for (int l = 0; have_tt && l < inst.num_lines(); ++l) {
        json trips = json::array();
        for (int k = 1; k <= static_cast<int>(tt.depart[l].size()); ++k) {
            json trip;
            trip["trip"] = k;
            trip["depart"] = tt.depart[l][k - 1];
            if (static_cast<int>(tt.arrive.size()) == inst.num_lines() &&
                tt.arrive[l].size() == tt.depart[l].size())
                trip["arrive"] = tt.arrive[l][k - 1];
            trips.push_back(trip);
        }
        lines.push_back(json{{"line", inst.eptn.lines[l].line_id}, {"trips", trips}});
    }
    j["timetable"] = lines;
    json scenarios = json::array();
    for (const auto& plan : plans) {
        json p;
        p["scenario"] = plan.scenario;
        json formations = json::array();
        for (int l = 0; l < inst.num_lines(); ++l)
            formations.push_back(json{{"line", inst.eptn.lines[l].line_id},
                                      {"formation", plan.formation[l]}});
        p["formations"] = formations;
        json moves = json::array();
        for (const auto& mv : plan.moves) {
            const auto& co = inst.eptn.corridors[mv.corridor];
            moves.push_back(json{{"from_line", inst.eptn.lines[co.from_line].line_id},
                                 {"from_trip", mv.from_trip},
                                 {"from_stop", co.from_stop},
                                 {"to_line", inst.eptn.lines[co.to_line].line_id},
                                 {"to_trip", mv.to_trip},
                                 {"to_stop", co.to_stop},
                                 {"units", mv.units}});
        }
        p["reroutings"] = moves;
        p["kappa"] = plan.kappa;
        scenarios.push_back(p);
    }
    j["plans"] = scenarios;
    return j.dump(2) + "\n";
}

std::string strategy_table_csv(const std::vector<StrategyReport>& reports) {
    std::ostringstream os;
    os << "strategy,status,passenger_cost,operational_cost,used_maus,objective\n";
    for (const auto& r : reports)
        os << strategy_name(r.strategy) << "," << status_name(r.status) << ","
           << r.passenger_cost << "," << r.oper_cost << "," << r.used_maus << "," << r.objective
           << "\n";
    return os.str();
}

std::string strategy_table_json(const std::vector<StrategyReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports)
        arr.push_back(json{{"strategy", strategy_name(r.strategy)},
                           {"status", status_name(r.status)},
                           {"passenger_cost", r.passenger_cost},
                           {"operational_cost", r.oper_cost},
                           {"used_maus", r.used_maus},
                           {"objective", r.objective}});
    return arr.dump(2) + "\n";
}

std::string pareto_csv(const std::vector<ParetoPoint>& points) {
    std::ostringstream os;
    os << "w1,w2,normalized_objective,passenger_cost,operational_cost,dominated\n";
    for (const auto& p : points)
        os << p.w1 << "," << p.w2 << "," << p.normalized << "," << p.raw_passenger << ","
           << p.raw_oper << "," << (p.dominated ? 1 : 0) << "\n";
    return os.str();
}

std::string scenario_study_csv(const std::vector<ScenarioStudyRow>& rows) {
    std::ostringstream os;
    os << "scenarios,train_objective,eval_objective,wall_sec\n";
    for (const auto& r : rows)
        os << r.count << "," << r.train_objective << "," << r.eval_objective << "," << r.wall_sec
           << "\n";
    return os.str();
}

}  // namespace mav

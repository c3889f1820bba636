#pragma once

#include <string>

#include "mav/strategies.hpp"

namespace mav {

// JSON solution report: timetable, per-scenario formations and reroutings,
// depot stocks, cost breakdown, fleet count, solver statistics.
std::string solution_report_json(const Instance& inst, const std::string& method,
                                 const std::string& status, double objective,
                                 const Timetable& tt, const std::vector<CapacityPlan>& plans,
                                 const CostBreakdown& costs, double gap, double wall_sec,
                                 long long used_maus, const CutCounts* cuts,
                                 bool with_timestamp);

std::string strategy_table_csv(const std::vector<StrategyReport>& reports);
std::string strategy_table_json(const std::vector<StrategyReport>& reports);
std::string pareto_csv(const std::vector<ParetoPoint>& points);
std::string scenario_study_csv(const std::vector<ScenarioStudyRow>& rows);

const char* strategy_name(Strategy s);
const char* status_name(MilpStatus s);

}  // namespace mav

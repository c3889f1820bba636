#pragma once

#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "mav/model_ir.hpp"
#include "mav/simplex.hpp"

namespace mav {

enum class MilpStatus { Optimal, Feasible, Infeasible, GapLimit, TimeLimit };

struct MilpSolution {
    MilpStatus status = MilpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    double bound = -std::numeric_limits<double>::infinity();
    double gap = 0.0;  // (objective - bound) / max(|objective|, 1)
    long long node_count = 0;
    long long cuts_added = 0;
    double wall_sec = 0.0;
};

struct CutRow {
    std::vector<std::pair<int, double>> terms;
    Sense sense = Sense::Ge;
    double rhs = 0.0;
    std::string label;
};

struct CandidateView {
    const std::vector<double>& x;
    double objective;
    bool integral;  // all watched binaries integral
    double bound;   // global best bound at callback time
};

// Lazy-cut contract: invoked at nodes whose LP optimum is integral in the
// watched binaries (and optionally at fractional optima). Returned cuts are
// appended globally and the node LP is re-solved before the incumbent is
// accepted.
using CutCallback = std::function<std::vector<CutRow>(const CandidateView&)>;

struct MilpLimits {
    double gap = 0.0;
    double time_sec = std::numeric_limits<double>::infinity();
    long long nodes = -1;  // <0: unlimited
};

struct MilpOptions {
    std::vector<int> watched;  // binary variables driving branching
    // Optional branching class per watched variable (lower class first);
    // empty means one class. Most-fractional within the class, ties by index.
    std::vector<int> watched_levels;
    CutCallback callback;
    bool callback_on_fractional = false;
    MilpLimits limits;
    std::ostream* node_log = nullptr;
};

MilpSolution solve_milp(const ModelIr& ir, const MilpOptions& opts);

// Floor/ceil split of a fractional variable; exposed for testing.
struct BranchBounds {
    int var;
    double le_up;  // upper bound of the "down" child
    double ge_lo;  // lower bound of the "up" child
};
BranchBounds branch_bounds(int var, double value);

}  // namespace mav

#pragma once

#include <vector>

#include "mav/model_ir.hpp"

namespace mav {

struct LpRow {
    std::vector<std::pair<int, double>> terms;
    Sense sense = Sense::Le;
    double rhs = 0.0;
};

struct LpProblem {
    int num_vars = 0;
    std::vector<double> obj, lo, up;  // finite bounds on structural variables
    std::vector<LpRow> rows;

    int add_var(double l, double u, double c) {
        obj.push_back(c);
        lo.push_back(l);
        up.push_back(u);
        return num_vars++;
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

// Restartable basis snapshot: basic variable per row plus the bound status of
// every structural and logical variable.
struct LpBasis {
    std::vector<int> basic;
    std::vector<char> stat;  // 0 at lower, 1 at upper, 2 basic

    bool empty() const { return basic.empty(); }
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;        // structural values
    std::vector<double> duals;    // one per row
    std::vector<double> reduced;  // reduced costs per structural variable
    long long iterations = 0;
    LpBasis basis;
};

// Bounded-variable revised simplex with sparse LU basis factorization and
// product-form updates. Bland's rule engages after a degeneracy threshold.
// A warm-start basis (possibly from a problem with fewer rows) shortcuts the
// crash phase.
LpSolution solve_lp(const LpProblem& lp, const LpBasis* warm = nullptr);

LpProblem lp_from_model(const ModelIr& ir, bool relax_integrality = true);

}  // namespace mav

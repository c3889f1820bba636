#pragma once

#include <array>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mav/common.hpp"

namespace mav {

enum class VarType { Continuous, Binary, Integer };

struct VarRef {
    std::string name;
    double lo = 0.0;
    double up = 0.0;
    VarType type = VarType::Continuous;
};

enum class Sense : char { Le = '<', Ge = '>', Eq = '=' };

struct Row {
    std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
    Sense sense = Sense::Le;
    double rhs = 0.0;
    std::string label;  // constraint family
};

struct LinExpr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    void add(int var, double coef) {
        if (coef != 0.0) terms.emplace_back(var, coef);
    }
};

// Solver-agnostic MILP: variables with bounds and integrality, labeled sparse
// linear constraints, and a minimization objective.
struct ModelIr {
    std::vector<VarRef> vars;
    std::vector<Row> rows;
    LinExpr objective;
    // Constraint families realized as variable bounds rather than rows
    // (shift/dwell bounds, window fixings).
    std::vector<std::string> bound_families;

    int add_var(std::string name, double lo, double up, VarType type) {
        vars.push_back({std::move(name), lo, up, type});
        return static_cast<int>(vars.size()) - 1;
    }
    void add_row(std::vector<std::pair<int, double>> terms, Sense sense, double rhs,
                 std::string label) {
        rows.push_back({std::move(terms), sense, rhs, std::move(label)});
    }
    int num_vars() const { return static_cast<int>(vars.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
};

struct RowViolation {
    int row = -1;           // -1 for bound/integrality violations
    int var = -1;
    double amount = 0.0;
    std::string what;
};

double evaluate_objective(const ModelIr& ir, const std::vector<double>& x);
double evaluate_row_lhs(const Row& row, const std::vector<double>& x);
std::vector<RowViolation> check_solution(const ModelIr& ir, const std::vector<double>& x,
                                         double tol = 1e-6);

// LP-format text export with family labels as comments.
std::string export_lp(const ModelIr& ir);

}  // namespace mav

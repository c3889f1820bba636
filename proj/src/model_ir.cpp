#include "mav/model_ir.hpp"

#include <cmath>
#include <sstream>

namespace mav {

double evaluate_objective(const ModelIr& ir, const std::vector<double>& x) {
    double v = ir.objective.constant;
    for (const auto& [j, c] : ir.objective.terms) v += c * x.at(j);
    return v;
}

double evaluate_row_lhs(const Row& row, const std::vector<double>& x) {
    double v = 0.0;
    for (const auto& [j, c] : row.terms) v += c * x.at(j);
    return v;
}

std::vector<RowViolation> check_solution(const ModelIr& ir, const std::vector<double>& x,
                                         double tol) {
    std::vector<RowViolation> out;
    for (int j = 0; j < ir.num_vars(); ++j) {
        const auto& v = ir.vars[j];
        if (x[j] < v.lo - tol || x[j] > v.up + tol)
            out.push_back({-1, j, 0.0, "bound violation on " + v.name});
        if (v.type != VarType::Continuous && std::abs(x[j] - std::round(x[j])) > tol)
            out.push_back({-1, j, 0.0, "integrality violation on " + v.name});
    }
    for (int r = 0; r < ir.num_rows(); ++r) {
        const auto& row = ir.rows[r];
        double lhs = evaluate_row_lhs(row, x);
        double slack = row.rhs - lhs;
        bool bad = (row.sense == Sense::Le && slack < -tol) ||
                   (row.sense == Sense::Ge && slack > tol) ||
                   (row.sense == Sense::Eq && std::abs(slack) > tol);
        if (bad) out.push_back({r, -1, slack, row.label});
    }
    return out;
}

std::string export_lp(const ModelIr& ir) {
    std::ostringstream os;
    auto term = [&](double c, const std::string& n, bool first) {
        if (c >= 0 && !first) os << " + ";
        if (c < 0) os << (first ? "- " : " - ");
        os << std::abs(c) << " " << n;
    };
    os << "\\ exported model\nMinimize\n obj:";
    bool first = true;
    for (const auto& [j, c] : ir.objective.terms) {
        os << (first ? " " : "");
        term(c, ir.vars[j].name, first);
        first = false;
    }
    if (ir.objective.constant != 0.0) os << " + " << ir.objective.constant;
    os << "\nSubject To\n";
    for (int r = 0; r < ir.num_rows(); ++r) {
        const auto& row = ir.rows[r];
        os << "\\ " << row.label << "\n r" << r << ":";
        first = true;
        for (const auto& [j, c] : row.terms) {
            os << (first ? " " : "");
            term(c, ir.vars[j].name, first);
            first = false;
        }
        os << (row.sense == Sense::Le ? " <= " : row.sense == Sense::Ge ? " >= " : " = ")
           << row.rhs << "\n";
    }
    os << "Bounds\n";
    for (const auto& v : ir.vars) os << " " << v.lo << " <= " << v.name << " <= " << v.up << "\n";
    os << "Generals\n";
    for (const auto& v : ir.vars)
        if (v.type != VarType::Continuous) os << " " << v.name << "\n";
    os << "End\n";
    return os.str();
}

}  // namespace mav

#pragma once

// Test-only oracle: a dense textbook two-phase tableau simplex, written
// independently of the production kernel. Bounds are handled by explicit
// rows, artificials by a phase-1 objective.

#include <cmath>
#include <vector>

#include "mav/simplex.hpp"

namespace tsup {

struct DenseResult {
    mav::LpStatus status = mav::LpStatus::Infeasible;
    double objective = 0.0;
};

inline DenseResult dense_simplex(const mav::LpProblem& lp) {
    using mav::Sense;
    // Shift x = x' + lo, x' in [0, up-lo]; upper bounds become rows.
    int n = lp.num_vars;
    std::vector<std::vector<double>> rows;  // coefficients over x'
    std::vector<double> rhs;
    std::vector<int> kind;  // 0: <=, 1: >=, 2: ==
    for (const auto& r : lp.rows) {
        std::vector<double> a(n, 0.0);
        double b = r.rhs;
        for (auto [j, c] : r.terms) {
            a[j] += c;
            b -= c * lp.lo[j];
        }
        rows.push_back(a);
        rhs.push_back(b);
        kind.push_back(r.sense == Sense::Le ? 0 : r.sense == Sense::Ge ? 1 : 2);
    }
    for (int j = 0; j < n; ++j) {
        double range = lp.up[j] - lp.lo[j];
        std::vector<double> a(n, 0.0);
        a[j] = 1.0;
        rows.push_back(a);
        rhs.push_back(range);
        kind.push_back(0);
    }
    int m = static_cast<int>(rows.size());
    // Flip rows to rhs >= 0.
    for (int i = 0; i < m; ++i)
        if (rhs[i] < 0) {
            for (double& c : rows[i]) c = -c;
            rhs[i] = -rhs[i];
            if (kind[i] == 0)
                kind[i] = 1;
            else if (kind[i] == 1)
                kind[i] = 0;
        }
    // Columns: x' | slacks (<=) | surplus (>=) | artificials (>= and ==).
    int slacks = 0, surplus = 0, artificials = 0;
    for (int k : kind) {
        if (k == 0) slacks++;
        if (k == 1) surplus++;
        if (k == 1 || k == 2) artificials++;
    }
    int total = n + slacks + surplus + artificials;
    std::vector<std::vector<double>> T(m + 1, std::vector<double>(total + 1, 0.0));
    std::vector<int> basis(m, -1);
    int scol = n, pcol = n + slacks, acol = n + slacks + surplus;
    std::vector<int> art_rows;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) T[i][j] = rows[i][j];
        T[i][total] = rhs[i];
        if (kind[i] == 0) {
            T[i][scol] = 1.0;
            basis[i] = scol++;
        } else {
            if (kind[i] == 1) T[i][pcol++] = -1.0;
            T[i][acol] = 1.0;
            basis[i] = acol;
            art_rows.push_back(i);
            acol++;
        }
    }
    auto pivot = [&](int pr, int pc) {
        double pv = T[pr][pc];
        for (double& v : T[pr]) v /= pv;
        for (int i = 0; i <= m; ++i) {
            if (i == pr || T[i][pc] == 0.0) continue;
            double f = T[i][pc];
            for (int j = 0; j <= total; ++j) T[i][j] -= f * T[pr][j];
        }
        if (pr < m) basis[pr] = pc;
    };
    auto run = [&](int phase_cols) -> bool {
        for (long long iter = 0; iter < 200000; ++iter) {
            int pc = -1;
            double best = -1e-9;
            for (int j = 0; j < phase_cols; ++j)
                if (T[m][j] < best) {
                    best = T[m][j];
                    pc = j;
                }
            if (pc < 0) return true;
            int pr = -1;
            double ratio = 0;
            for (int i = 0; i < m; ++i)
                if (T[i][pc] > 1e-9) {
                    double r = T[i][total] / T[i][pc];
                    if (pr < 0 || r < ratio - 1e-12 ||
                        (std::abs(r - ratio) <= 1e-12 && basis[i] < basis[pr])) {
                        pr = i;
                        ratio = r;
                    }
                }
            if (pr < 0) return false;  // unbounded
            pivot(pr, pc);
        }
        return true;
    };

    DenseResult out;
    if (artificials > 0) {
        // Phase 1: minimize artificial sum.
        for (int i : art_rows)
            for (int j = 0; j <= total; ++j) T[m][j] -= T[i][j];
        run(n + slacks + surplus);
        double inf = -T[m][total];
        if (inf > 1e-7) {
            out.status = mav::LpStatus::Infeasible;
            return out;
        }
        // Drive leftover artificials out of the basis.
        for (int i = 0; i < m; ++i)
            if (basis[i] >= n + slacks + surplus) {
                for (int j = 0; j < n + slacks + surplus; ++j)
                    if (std::abs(T[i][j]) > 1e-9) {
                        pivot(i, j);
                        break;
                    }
            }
        for (int j = 0; j <= total; ++j) T[m][j] = 0.0;
    }
    // Phase 2 objective over shifted vars.
    double shift_const = 0.0;
    for (int j = 0; j < n; ++j) {
        T[m][j] = lp.obj[j];
        shift_const += lp.obj[j] * lp.lo[j];
    }
    for (int i = 0; i < m; ++i)
        if (basis[i] < n && T[m][basis[i]] != 0.0) {
            double f = T[m][basis[i]];
            for (int j = 0; j <= total; ++j) T[m][j] -= f * T[i][j];
        }
    // Keep artificials out of phase 2 pricing.
    if (!run(n + slacks + surplus)) {
        out.status = mav::LpStatus::Unbounded;
        return out;
    }
    out.status = mav::LpStatus::Optimal;
    out.objective = -T[m][total] + shift_const;
    return out;
}

}  // namespace tsup

#include "mav/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mav {

namespace {

constexpr double kInf = 1e30;
constexpr double kFeasTol = 1e-7;
constexpr double kDualTol = 1e-7;
constexpr double kPivotTol = 1e-8;
constexpr int kRefactorEvery = 60;
constexpr int kDegenerateLimit = 1000;
constexpr long long kMaxIter = 500000;

struct SparseLU {
    int m = 0;
    std::vector<std::vector<std::pair<int, double>>> lcols, ucols;  // by pivot order
    std::vector<double> diag;
    std::vector<int> prow;  // pivot order -> row
    std::vector<int> pinv;  // row -> pivot order

    // Gilbert-Peierls left-looking factorization of the given columns.
    bool factor(const std::vector<std::vector<std::pair<int, double>>>& cols) {
        m = static_cast<int>(cols.size());
        lcols.assign(m, {});
        ucols.assign(m, {});
        diag.assign(m, 0.0);
        prow.assign(m, -1);
        pinv.assign(m, -1);
        std::vector<double> work(m, 0.0);
        std::vector<char> visited(m, 0);
        std::vector<int> order, stack, touched;
        for (int j = 0; j < m; ++j) {
            order.clear();
            touched.clear();
            // DFS over already-built L columns to get elimination order.
            for (const auto& [r, v] : cols[j]) {
                if (visited[r]) continue;
                stack.clear();
                stack.push_back(r);
                std::vector<size_t> pos{0};
                visited[r] = 1;
                while (!stack.empty()) {
                    int row = stack.back();
                    bool descended = false;
                    if (pinv[row] >= 0) {
                        auto& lc = lcols[pinv[row]];
                        while (pos.back() < lc.size()) {
                            int next = lc[pos.back()].first;
                            ++pos.back();
                            if (!visited[next]) {
                                visited[next] = 1;
                                stack.push_back(next);
                                pos.push_back(0);
                                descended = true;
                                break;
                            }
                        }
                    }
                    if (!descended) {
                        order.push_back(row);
                        stack.pop_back();
                        pos.pop_back();
                    }
                }
            }
            for (const auto& [r, v] : cols[j]) work[r] += v;
            for (int r : order) touched.push_back(r), visited[r] = 0;
            // Eliminate in topological order (reverse of post-order).
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                int r = *it;
                if (pinv[r] < 0) continue;
                double v = work[r];
                if (v == 0.0) continue;
                for (const auto& [rr, lv] : lcols[pinv[r]]) {
                    if (work[rr] == 0.0) touched.push_back(rr);
                    work[rr] -= lv * v;
                }
            }
            // Pivot: largest magnitude among unassigned rows.
            int pivot = -1;
            double best = 0.0;
            for (int r : touched)
                if (pinv[r] < 0 && std::abs(work[r]) > best) {
                    best = std::abs(work[r]);
                    pivot = r;
                }
            if (pivot < 0 || best < kPivotTol) {
                for (int r : touched) work[r] = 0.0;
                return false;
            }
            double pv = work[pivot];
            for (int r : touched) {
                double v = work[r];
                work[r] = 0.0;
                if (v == 0.0 || r == pivot) continue;
                if (pinv[r] >= 0)
                    ucols[j].emplace_back(pinv[r], v);
                else
                    lcols[j].emplace_back(r, v / pv);
            }
            diag[j] = pv;
            prow[j] = pivot;
            pinv[pivot] = j;
        }
        return true;
    }

    // In-place solve of B x = b; b indexed by row, result by pivot order
    // mapped back through prow into basis-position coordinates.
    void ftran(std::vector<double>& b, std::vector<double>& out) const {
        for (int t = 0; t < m; ++t) {
            double v = b[prow[t]];
            if (v == 0.0) continue;
            for (const auto& [r, lv] : lcols[t]) b[r] -= lv * v;
        }
        for (int t = m - 1; t >= 0; --t) {
            double v = b[prow[t]] / diag[t];
            out[t] = v;
            b[prow[t]] = 0.0;
            if (v == 0.0) continue;
            for (const auto& [t2, u] : ucols[t]) b[prow[t2]] -= u * v;
        }
    }

    // Solve B^T y = c; c indexed by basis position, result by row.
    void btran(const std::vector<double>& c, std::vector<double>& yrow,
               std::vector<double>& z) const {
        for (int t = 0; t < m; ++t) {
            double v = c[t];
            for (const auto& [t2, u] : ucols[t]) v -= u * z[t2];
            z[t] = v / diag[t];
        }
        for (int t = m - 1; t >= 0; --t) {
            double v = z[t];
            for (const auto& [r, lv] : lcols[t]) v -= lv * yrow[r];
            yrow[prow[t]] = v;
        }
    }
};

struct Eta {
    int pos;
    std::vector<std::pair<int, double>> col;  // sparse alpha, includes pos entry
    double apos;
};

enum VStat : char { AtLo, AtUp, Basic };

struct Simplex {
    const LpProblem& lp;
    int n, m, N;
    std::vector<std::vector<std::pair<int, double>>> col;  // per variable, rows
    std::vector<double> lo, up, cost;
    std::vector<double> xval;
    std::vector<VStat> stat;
    std::vector<int> basic;     // basis position -> var
    std::vector<int> basicpos;  // var -> basis position or -1
    SparseLU lu;
    std::vector<Eta> etas;
    std::vector<double> work, ftmp, alpha, yrow, ztmp, cb;
    bool bland = false;
    int degenerate_run = 0;
    long long iters = 0;

    explicit Simplex(const LpProblem& p) : lp(p) {
        n = lp.num_vars;
        m = static_cast<int>(lp.rows.size());
        N = n + m;
        col.resize(N);
        lo.resize(N);
        up.resize(N);
        cost.assign(N, 0.0);
        for (int j = 0; j < n; ++j) {
            lo[j] = lp.lo[j];
            up[j] = lp.up[j];
            cost[j] = lp.obj[j];
        }
        for (int i = 0; i < m; ++i) {
            for (const auto& [j, c] : lp.rows[i].terms)
                if (c != 0.0) col[j].emplace_back(i, c);
            int s = n + i;
            col[s].emplace_back(i, 1.0);
            switch (lp.rows[i].sense) {
                case Sense::Le: lo[s] = 0.0; up[s] = kInf; break;
                case Sense::Ge: lo[s] = -kInf; up[s] = 0.0; break;
                case Sense::Eq: lo[s] = 0.0; up[s] = 0.0; break;
            }
        }
        xval.assign(N, 0.0);
        stat.assign(N, AtLo);
        basic.resize(m);
        basicpos.assign(N, -1);
        for (int j = 0; j < n; ++j) {
            stat[j] = std::abs(lo[j]) <= std::abs(up[j]) ? AtLo : AtUp;
            if (lo[j] <= -kInf) stat[j] = AtUp;
            if (up[j] >= kInf) stat[j] = AtLo;
            xval[j] = stat[j] == AtLo ? lo[j] : up[j];
        }
        for (int i = 0; i < m; ++i) {
            int s = n + i;
            basic[i] = s;
            basicpos[s] = i;
            stat[s] = Basic;
        }
        work.assign(m, 0.0);
        ftmp.assign(m, 0.0);
        alpha.assign(m, 0.0);
        yrow.assign(m, 0.0);
        ztmp.assign(m, 0.0);
        cb.assign(m, 0.0);
    }

    // Adopts a basis from an earlier solve; extra rows keep their slacks
    // basic. Falls back to the all-slack basis when inconsistent.
    bool adopt(const LpBasis& warm) {
        if (warm.basic.size() > static_cast<size_t>(m) ||
            warm.stat.size() > static_cast<size_t>(N))
            return false;
        std::vector<char> used(N, 0);
        for (int v : warm.basic) {
            if (v < 0 || v >= N || used[v]) return false;
            used[v] = 1;
        }
        for (int j = 0; j < N; ++j) {
            char s = j < static_cast<int>(warm.stat.size()) ? warm.stat[j] : -1;
            if (s == 2) continue;
            VStat st;
            if (s == 0 && lo[j] > -kInf)
                st = AtLo;
            else if (s == 1 && up[j] < kInf)
                st = AtUp;
            else
                st = lo[j] > -kInf ? AtLo : AtUp;
            stat[j] = st;
            xval[j] = st == AtLo ? lo[j] : up[j];
            basicpos[j] = -1;
        }
        for (size_t i = 0; i < warm.basic.size(); ++i) {
            basic[i] = warm.basic[i];
            stat[warm.basic[i]] = Basic;
            basicpos[warm.basic[i]] = static_cast<int>(i);
        }
        for (int i = static_cast<int>(warm.basic.size()); i < m; ++i) {
            int s = n + i;
            if (used[s]) return false;  // slack already basic elsewhere
            basic[i] = s;
            stat[s] = Basic;
            basicpos[s] = i;
        }
        return refactor();
    }

    bool refactor() {
        std::vector<std::vector<std::pair<int, double>>> cols(m);
        for (int i = 0; i < m; ++i) cols[i] = col[basic[i]];
        etas.clear();
        return lu.factor(cols);
    }

    void ftran(std::vector<double>& rhs_row, std::vector<double>& out_pos) {
        lu.ftran(rhs_row, out_pos);
        for (const auto& e : etas) {
            double v = out_pos[e.pos] / e.apos;
            if (v != 0.0)
                for (const auto& [i, a] : e.col)
                    if (i != e.pos) out_pos[i] -= a * v;
            out_pos[e.pos] = v;
        }
    }

    void btran(std::vector<double>& c_pos, std::vector<double>& out_row) {
        for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
            double v = c_pos[it->pos];
            for (const auto& [i, a] : it->col)
                if (i != it->pos) v -= a * c_pos[i];
            c_pos[it->pos] = v / it->apos;
        }
        std::fill(ztmp.begin(), ztmp.end(), 0.0);
        lu.btran(c_pos, out_row, ztmp);
    }

    void compute_basics() {
        std::fill(work.begin(), work.end(), 0.0);
        for (int i = 0; i < m; ++i) work[i] = lp.rows[i].rhs;
        for (int j = 0; j < N; ++j) {
            if (stat[j] == Basic || xval[j] == 0.0) continue;
            for (const auto& [i, c] : col[j]) work[i] -= c * xval[j];
        }
        ftran(work, ftmp);
        for (int i = 0; i < m; ++i) xval[basic[i]] = ftmp[i];
    }

    double infeasibility() const {
        double s = 0.0;
        for (int i = 0; i < m; ++i) {
            int j = basic[i];
            if (xval[j] < lo[j] - kFeasTol) s += lo[j] - xval[j];
            if (xval[j] > up[j] + kFeasTol) s += xval[j] - up[j];
        }
        return s;
    }

    // One pass of primal simplex with the given cost vector. Returns false
    // when no improving entering variable exists.
    bool iterate(bool phase1) {
        // Phase-1 costs: push violated basics toward their bounds.
        for (int i = 0; i < m; ++i) {
            int j = basic[i];
            if (!phase1) {
                cb[i] = cost[j];
                continue;
            }
            if (xval[j] < lo[j] - kFeasTol)
                cb[i] = -1.0;
            else if (xval[j] > up[j] + kFeasTol)
                cb[i] = 1.0;
            else
                cb[i] = 0.0;
        }
        std::vector<double> cpos = cb;
        btran(cpos, yrow);

        int enter = -1;
        double best = bland ? std::numeric_limits<double>::max() : kDualTol;
        int dir = 0;
        for (int j = 0; j < N; ++j) {
            if (stat[j] == Basic || up[j] - lo[j] < 1e-14) continue;
            double cj = phase1 ? 0.0 : cost[j];
            double d = cj;
            for (const auto& [i, c] : col[j]) d -= yrow[i] * c;
            int want = 0;
            if (stat[j] == AtLo && d < -kDualTol) want = 1;
            if (stat[j] == AtUp && d > kDualTol) want = -1;
            if (!want) continue;
            if (bland) {
                enter = j;
                dir = want;
                break;
            }
            if (std::abs(d) > best) {
                best = std::abs(d);
                enter = j;
                dir = want;
            }
        }
        if (enter < 0) return false;

        std::fill(work.begin(), work.end(), 0.0);
        for (const auto& [i, c] : col[enter]) work[i] = c;
        ftran(work, alpha);

        // Ratio test. Basic variable at position i moves by -dir*alpha[i]*t.
        double tmax = up[enter] - lo[enter];  // bound flip
        int leave_pos = -1;
        double leave_to = 0.0;
        double best_pivot = 0.0;
        for (int i = 0; i < m; ++i) {
            double a = alpha[i];
            if (std::abs(a) < kPivotTol) continue;
            int j = basic[i];
            double move = -static_cast<double>(dir) * a;  // d x_j / d t
            double limit = kInf;
            double target = 0.0;
            if (move > 0) {
                // increasing: a below-lo basic blocks at lo (cost breakpoint);
                // an above-up basic worsens without a breakpoint.
                if (xval[j] < lo[j] - kFeasTol)
                    target = lo[j];
                else if (xval[j] > up[j] + kFeasTol)
                    continue;
                else if (up[j] >= kInf)
                    continue;
                else
                    target = up[j];
                limit = (target - xval[j]) / move;
            } else {
                if (xval[j] > up[j] + kFeasTol)
                    target = up[j];
                else if (xval[j] < lo[j] - kFeasTol)
                    continue;
                else if (lo[j] <= -kInf)
                    continue;
                else
                    target = lo[j];
                limit = (target - xval[j]) / move;
            }
            if (limit < 0) limit = 0.0;
            bool better;
            if (limit < tmax - 1e-9)
                better = true;
            else if (limit > tmax + 1e-9)
                better = false;
            else if (leave_pos < 0)
                better = true;
            else if (bland)
                better = basic[i] < basic[leave_pos];
            else
                better = std::abs(a) > best_pivot;
            if (better) {
                tmax = std::min(tmax, std::max(limit, 0.0));
                leave_pos = i;
                leave_to = target;
                best_pivot = std::abs(a);
            }
        }
        if (tmax >= kInf) {
            if (phase1) throw NumericalFailure("phase-1 ray");
            phase2_ray = true;
            return true;
        }
        degenerate_run = tmax < 1e-9 ? degenerate_run + 1 : 0;
        if (degenerate_run > kDegenerateLimit) bland = true;

        double t = tmax;
        if (leave_pos < 0) {
            // bound flip: basics move along alpha, the entering var crosses
            double flip_to = stat[enter] == AtLo ? up[enter] : lo[enter];
            for (int i = 0; i < m; ++i)
                if (alpha[i] != 0.0) xval[basic[i]] -= static_cast<double>(dir) * alpha[i] * t;
            xval[enter] = flip_to;
            stat[enter] = stat[enter] == AtLo ? AtUp : AtLo;
            return true;
        }
        int leave = basic[leave_pos];
        double enter_val = xval[enter] + dir * t;
        for (int i = 0; i < m; ++i)
            if (alpha[i] != 0.0) xval[basic[i]] -= static_cast<double>(dir) * alpha[i] * t;
        // pivot
        basic[leave_pos] = enter;
        basicpos[enter] = leave_pos;
        basicpos[leave] = -1;
        stat[enter] = Basic;
        stat[leave] = leave_to == lo[leave] ? AtLo : AtUp;
        xval[leave] = leave_to;
        xval[enter] = enter_val;

        if (std::abs(alpha[leave_pos]) < kPivotTol ||
            static_cast<int>(etas.size()) >= kRefactorEvery) {
            if (!refactor()) throw NumericalFailure("singular basis after pivot");
            compute_basics();
        } else {
            Eta e;
            e.pos = leave_pos;
            e.apos = alpha[leave_pos];
            for (int i = 0; i < m; ++i)
                if (alpha[i] != 0.0) e.col.emplace_back(i, alpha[i]);
            etas.push_back(std::move(e));
        }
        return true;
    }

    // Confirms a stall verdict on freshly factored, exactly recomputed basics.
    bool refresh() {
        if (!refactor()) throw NumericalFailure("singular basis on refresh");
        compute_basics();
        return true;
    }

    LpSolution run(const LpBasis* warm) {
        bool warmed = false;
        if (warm && !warm->empty()) {
            try {
                warmed = adopt(*warm);
            } catch (const NumericalFailure&) {
                warmed = false;
            }
        }
        if (!warmed) {
            // reset to the all-slack basis
            for (int j = 0; j < n; ++j) {
                stat[j] = std::abs(lo[j]) <= std::abs(up[j]) ? AtLo : AtUp;
                if (lo[j] <= -kInf) stat[j] = AtUp;
                if (up[j] >= kInf) stat[j] = AtLo;
                xval[j] = stat[j] == AtLo ? lo[j] : up[j];
                basicpos[j] = -1;
            }
            for (int i = 0; i < m; ++i) {
                int s = n + i;
                basic[i] = s;
                basicpos[s] = i;
                stat[s] = Basic;
            }
            etas.clear();
            if (!refactor()) throw NumericalFailure("singular initial basis");
        }
        compute_basics();
        LpSolution sol;
        // Phase 1: iterate to feasibility; a stall only counts after a refresh.
        int stalls = 0;
        while (true) {
            while (infeasibility() > kFeasTol) {
                if (++iters > kMaxIter) throw NumericalFailure("iteration limit (phase 1)");
                if (!iterate(true)) break;
            }
            refresh();
            if (infeasibility() <= kFeasTol) break;
            if (++iters > kMaxIter) throw NumericalFailure("iteration limit (phase 1)");
            if (!iterate(true)) {
                if (++stalls >= 2) {
                    sol.iterations = iters;
                    sol.status = LpStatus::Infeasible;
                    return sol;
                }
            } else {
                stalls = 0;
            }
        }
        // Phase 2
        bool unbounded = false;
        stalls = 0;
        while (true) {
            if (++iters > kMaxIter) throw NumericalFailure("iteration limit (phase 2)");
            bool moved = iterate(false);
            if (phase2_ray) {
                unbounded = true;
                break;
            }
            if (!moved) {
                refresh();
                if (infeasibility() > kFeasTol) {
                    // drift revealed: repair feasibility and resume
                    while (infeasibility() > kFeasTol) {
                        if (++iters > kMaxIter)
                            throw NumericalFailure("iteration limit (repair)");
                        if (!iterate(true)) throw NumericalFailure("lost primal feasibility");
                    }
                    continue;
                }
                if (!iterate(false)) break;  // optimal, confirmed on fresh values
                if (phase2_ray) {
                    unbounded = true;
                    break;
                }
            }
        }
        sol.iterations = iters;
        if (unbounded) {
            sol.status = LpStatus::Unbounded;
            return sol;
        }
        sol.status = LpStatus::Optimal;
        sol.x.assign(n, 0.0);
        for (int j = 0; j < n; ++j) sol.x[j] = xval[j];
        sol.objective = 0.0;
        for (int j = 0; j < n; ++j) sol.objective += cost[j] * xval[j];
        for (int i = 0; i < m; ++i) cb[i] = cost[basic[i]];
        std::vector<double> cpos = cb;
        btran(cpos, yrow);
        sol.duals.assign(m, 0.0);
        for (int i = 0; i < m; ++i) sol.duals[i] = yrow[i];
        sol.reduced.assign(n, 0.0);
        for (int j = 0; j < n; ++j) {
            double d = cost[j];
            for (const auto& [i, c] : col[j]) d -= yrow[i] * c;
            sol.reduced[j] = d;
        }
        sol.basis.basic = basic;
        sol.basis.stat.assign(N, 0);
        for (int j = 0; j < N; ++j)
            sol.basis.stat[j] = stat[j] == Basic ? 2 : (stat[j] == AtUp ? 1 : 0);
        return sol;
    }

    bool phase2_ray = false;
};

}  // namespace

LpSolution solve_lp(const LpProblem& lp, const LpBasis* warm) {
    Simplex s(lp);
    return s.run(warm);
}

LpProblem lp_from_model(const ModelIr& ir, bool) {
    LpProblem lp;
    for (const auto& v : ir.vars) lp.add_var(v.lo, v.up, 0.0);
    for (const auto& [j, c] : ir.objective.terms) lp.obj[j] += c;
    for (const auto& r : ir.rows) lp.rows.push_back({r.terms, r.sense, r.rhs});
    return lp;
}

}  // namespace mav

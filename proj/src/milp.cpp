#include "mav/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <queue>

namespace mav {

namespace {

constexpr double kIntTol = 1e-6;

struct Node {
    long long id = 0;
    double bound = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, std::pair<double, double>>> bound_changes;  // var -> (lo,up)
    std::shared_ptr<const LpBasis> warm;  // parent's optimal basis
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
        return a.id < b.id;  // dive on bound plateaus
    }
};

}  // namespace

BranchBounds branch_bounds(int var, double value) {
    return {var, std::floor(value), std::floor(value) + 1.0};
}

MilpSolution solve_milp(const ModelIr& ir, const MilpOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    LpProblem base = lp_from_model(ir);
    std::vector<CutRow> pool;

    MilpSolution best;
    best.status = MilpStatus::Infeasible;
    bool have_incumbent = false;
    double incumbent = std::numeric_limits<double>::infinity();

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long long next_id = 0;
    open.push({next_id++, -std::numeric_limits<double>::infinity(), {}, nullptr});
    long long nodes_processed = 0;
    std::optional<Node> carry;        // plunge child processed ahead of the queue
    std::vector<Node> dive_siblings;  // depth-first backtrack stack until an incumbent exists

    auto global_bound = [&](const std::priority_queue<Node, std::vector<Node>, NodeOrder>& q) {
        double b = have_incumbent ? incumbent : std::numeric_limits<double>::infinity();
        if (!q.empty()) b = std::min(b, q.top().bound);
        if (carry) b = std::min(b, carry->bound);
        for (const auto& nd : dive_siblings) b = std::min(b, nd.bound);
        return b;
    };
    auto rel_gap = [&](double obj, double bnd) {
        return (obj - bnd) / std::max(std::abs(obj), 1.0);
    };

    bool hit_time = false, hit_nodes = false;
    while (carry || !dive_siblings.empty() || !open.empty()) {
        if (elapsed() > opts.limits.time_sec) {
            hit_time = true;
            break;
        }
        if (opts.limits.nodes >= 0 && nodes_processed >= opts.limits.nodes) {
            hit_nodes = true;
            break;
        }
        if (have_incumbent) {
            double g = rel_gap(incumbent, global_bound(open));
            if (g <= opts.limits.gap + 1e-12 && opts.limits.gap > 0) break;
        }
        if (have_incumbent && !dive_siblings.empty()) {
            // First incumbent found: hand the backtrack stack to best-bound.
            for (auto& nd : dive_siblings) open.push(std::move(nd));
            dive_siblings.clear();
        }
        Node node;
        if (carry) {
            node = std::move(*carry);
            carry.reset();
        } else if (!dive_siblings.empty()) {
            node = std::move(dive_siblings.back());
            dive_siblings.pop_back();
        } else {
            node = open.top();
            open.pop();
        }
        if (have_incumbent && node.bound >= incumbent - 1e-9) continue;
        ++nodes_processed;

        LpProblem lp = base;
        for (const auto& cut : pool) lp.rows.push_back({cut.terms, cut.sense, cut.rhs});
        for (const auto& [v, b] : node.bound_changes) {
            lp.lo[v] = std::max(lp.lo[v], b.first);
            lp.up[v] = std::min(lp.up[v], b.second);
        }

        auto pick_fractional = [&](const std::vector<double>& x) {
            int var = -1;
            double score = -1.0;
            int level = std::numeric_limits<int>::max();
            for (size_t wi = 0; wi < opts.watched.size(); ++wi) {
                int v = opts.watched[wi];
                double f = x[v] - std::floor(x[v]);
                double dist = std::min(f, 1.0 - f);
                if (dist <= kIntTol) continue;
                int lvl = opts.watched_levels.empty() ? 0 : opts.watched_levels[wi];
                if (lvl < level || (lvl == level && dist > score + 1e-12)) {
                    level = lvl;
                    score = dist;
                    var = v;
                }
            }
            return var;
        };

        // Cut loop: re-solve the same node until the callback is silent.
        LpSolution sol;
        bool pruned = false;
        for (int round = 0;; ++round) {
            if (round > 1000) throw NumericalFailure("cut loop did not settle");
            sol = solve_lp(lp, round == 0 ? node.warm.get() : &sol.basis);
            if (sol.status == LpStatus::Unbounded)
                throw NumericalFailure("unbounded node relaxation (bounds must be finite)");
            if (sol.status == LpStatus::Infeasible) {
                pruned = true;
                break;
            }
            if (have_incumbent && sol.objective >= incumbent - 1e-9) {
                pruned = true;
                break;
            }
            bool integral = pick_fractional(sol.x) < 0;
            if (!integral && !opts.callback_on_fractional) break;
            if (!opts.callback) break;
            double gbound = std::min(global_bound(open), sol.objective);
            auto cuts = opts.callback({sol.x, sol.objective, integral, gbound});
            best.cuts_added += static_cast<long long>(cuts.size());
            if (cuts.empty()) break;
            for (auto& c : cuts) {
                pool.push_back(c);
                lp.rows.push_back({c.terms, c.sense, c.rhs});
            }
        }
        if (pruned) {
            if (opts.node_log)
                (*opts.node_log) << "node " << node.id << " pruned depth "
                                 << node.bound_changes.size() << "\n";
            continue;
        }

        int frac_var = pick_fractional(sol.x);
        if (opts.node_log)
            (*opts.node_log) << "node " << node.id << " bound " << sol.objective << " depth "
                             << node.bound_changes.size() << " branch "
                             << (frac_var < 0 ? -1 : frac_var) << " open " << open.size()
                             << "\n";
        if (frac_var < 0) {
            // integral in all watched binaries: new incumbent
            if (sol.objective < incumbent - 1e-9) {
                incumbent = sol.objective;
                best.x = sol.x;
                have_incumbent = true;
            }
            continue;
        }
        auto bb = branch_bounds(frac_var, sol.x[frac_var]);
        auto warm = std::make_shared<LpBasis>(std::move(sol.basis));
        Node down{next_id++, sol.objective, node.bound_changes, warm};
        down.bound_changes.emplace_back(frac_var,
                                        std::make_pair(-std::numeric_limits<double>::infinity(),
                                                       bb.le_up));
        Node upn{next_id++, sol.objective, node.bound_changes, warm};
        upn.bound_changes.emplace_back(
            frac_var, std::make_pair(bb.ge_lo, std::numeric_limits<double>::infinity()));
        // Plunge into one child; queue the sibling (on the backtrack stack
        // while hunting the first incumbent). Second-stage binaries dive on
        // their "inactive" side first: that branch is always consistent.
        double frac = sol.x[frac_var] - std::floor(sol.x[frac_var]);
        int lvl = 0;
        for (size_t wi = 0; wi < opts.watched.size(); ++wi)
            if (opts.watched[wi] == frac_var && !opts.watched_levels.empty())
                lvl = opts.watched_levels[wi];
        bool take_down = lvl >= 3 || frac < 0.5;
        Node& taken = take_down ? down : upn;
        Node& other = take_down ? upn : down;
        carry = std::move(taken);
        if (have_incumbent)
            open.push(std::move(other));
        else
            dive_siblings.push_back(std::move(other));
    }

    best.node_count = nodes_processed;
    best.wall_sec = elapsed();
    double bnd = global_bound(open);
    if (have_incumbent) {
        best.objective = incumbent;
        best.bound = std::min(bnd, incumbent);
        best.gap = std::max(0.0, rel_gap(incumbent, best.bound));
        if (open.empty())
            best.status = MilpStatus::Optimal;
        else if (hit_time)
            best.status = MilpStatus::TimeLimit;
        else if (hit_nodes)
            best.status = MilpStatus::Feasible;
        else
            best.status = best.gap <= opts.limits.gap + 1e-12 ? MilpStatus::GapLimit
                                                              : MilpStatus::Feasible;
    } else {
        best.status = (hit_time || hit_nodes) ? MilpStatus::TimeLimit : MilpStatus::Infeasible;
        best.bound = bnd;
    }
    return best;
}

}  // namespace mav

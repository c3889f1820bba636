#include "mav/model_build.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace mav {

namespace {

std::string sub(const std::string& base, std::initializer_list<int> idx) {
    std::ostringstream os;
    os << base << "[";
    bool first = true;
    for (int v : idx) {
        if (!first) os << ",";
        os << v;
        first = false;
    }
    os << "]";
    return os.str();
}

}  // namespace

Minutes DepartureWindows::arrive_lo(const Instance& inst, int l, int k1, int i1) const {
    const auto& tt = inst.trips[l][k1 - 1];
    return depart_lo(l, k1, i1) - tt.dwell_min[i1 - 1];
}

Minutes DepartureWindows::arrive_hi(const Instance& inst, int l, int k1, int i1) const {
    const auto& tt = inst.trips[l][k1 - 1];
    return depart_hi(l, k1, i1) - tt.dwell_min[i1 - 1];
}

DepartureWindows compute_departure_windows(const Instance& inst) {
    DepartureWindows w;
    const Minutes D = inst.grid.delta;
    w.lo.resize(inst.num_lines());
    w.hi.resize(inst.num_lines());
    for (int l = 0; l < inst.num_lines(); ++l) {
        const auto& lg = inst.eptn.lines[l];
        w.lo[l].resize(inst.num_trips(l));
        w.hi[l].resize(inst.num_trips(l));
        for (int k = 1; k <= inst.num_trips(l); ++k) {
            const auto& tt = inst.trips[l][k - 1];
            Minutes lo = tt.origin_time + tt.shift_min;
            Minutes hi = tt.origin_time + tt.shift_max;
            w.lo[l][k - 1].resize(lg.num_stops());
            w.hi[l][k - 1].resize(lg.num_stops());
            for (int i = 1; i <= lg.num_stops(); ++i) {
                lo += tt.dwell_min[i - 1];
                hi += tt.dwell_max[i - 1];
                if (i >= 2) {
                    lo += tt.run_times[i - 2];
                    hi += tt.run_times[i - 2];
                }
                if (lo % D != 0 || hi % D != 0)
                    throw SemanticError("departure window off the grid on line " + lg.line_id);
                w.lo[l][k - 1][i - 1] = lo;
                w.hi[l][k - 1][i - 1] = hi;
                if (lo < D || hi > inst.grid.span())
                    throw InfeasibleHorizonError(
                        "departure window [" + std::to_string(lo) + "," + std::to_string(hi) +
                        "] of line " + lg.line_id + " trip " + std::to_string(k) + " stop " +
                        std::to_string(i) + " leaves the horizon");
            }
        }
    }
    return w;
}

FixedFirstStage make_first_stage(const Instance& inst,
                                 const std::vector<std::vector<std::vector<Minutes>>>& depart) {
    FixedFirstStage f;
    f.depart = depart;
    f.arrive.resize(inst.num_lines());
    for (int l = 0; l < inst.num_lines(); ++l) {
        f.arrive[l].resize(inst.num_trips(l));
        for (int k = 1; k <= inst.num_trips(l); ++k) {
            const auto& tt = inst.trips[l][k - 1];
            const auto& d = depart[l][k - 1];
            auto& a = f.arrive[l][k - 1];
            a.resize(d.size());
            // Normalize the split of d1 into shift + dwell deterministically.
            Minutes alpha = std::max(tt.shift_min, d[0] - tt.origin_time - tt.dwell_max[0]);
            a[0] = tt.origin_time + alpha;
            for (size_t i = 1; i < d.size(); ++i) a[i] = d[i - 1] + tt.run_times[i - 1];
        }
    }
    f.boarded.resize(inst.scenarios.size());
    for (size_t w = 0; w < inst.scenarios.size(); ++w) {
        const auto& sc = inst.scenarios[w];
        f.boarded[w].resize(sc.groups.size());
        for (size_t p = 0; p < sc.groups.size(); ++p) {
            const auto& g = sc.groups[p];
            auto& legs = f.boarded[w][p];
            legs.assign(g.lines.size(), 0);
            // First leg: first trip departing the origin at or after the
            // boarding threshold (u_p, or the carry-over readiness time).
            int l0 = g.lines[0];
            int taken = 0;
            for (int k = 1; k <= inst.num_trips(l0); ++k)
                if (f.depart[l0][k - 1][g.origin_stop - 1] >= g.board_threshold()) {
                    taken = k;
                    break;
                }
            legs[0] = taken;
            for (size_t leg = 1; leg < g.lines.size() && legs[leg - 1] != 0; ++leg) {
                const auto& cor = inst.eptn.corridors[g.corridors[leg - 1]];
                Minutes ready =
                    f.arrive[cor.from_line][legs[leg - 1] - 1][cor.from_stop - 1] + cor.theta_min;
                int next = 0;
                for (int k = 1; k <= inst.num_trips(cor.to_line); ++k)
                    if (f.depart[cor.to_line][k - 1][cor.to_stop - 1] >= ready) {
                        next = k;
                        break;
                    }
                legs[leg] = next;
            }
        }
    }
    return f;
}

// ---------------------------------------------------------------------------

namespace {

enum class BuildKind { Monolithic, Master, Subproblem };

struct Builder {
    const Instance& inst;
    BuildKind kind;
    Strategy strategy = Strategy::CompletelyFlexible;
    bool vi = true;
    int only_scenario = -1;                 // subproblem scenario
    const FixedFirstStage* fixed = nullptr; // subproblem snapshot
    SubproblemMode sub_mode = SubproblemMode::Integer;
    double eta_lb = 0.0;
    bool include_eta = true;

    DepartureWindows win;
    BuiltModel out;
    SubproblemBuild* sub_out = nullptr;

    int T = 0;
    Minutes D = 1;
    double m_time = 0.0;
    double eps = 0.0;
    int Q = 1;
    std::set<int> passenger_corridors;  // corridors on some group path
    std::vector<char> reroutable;       // per corridor

    Builder(const Instance& i, BuildKind k) : inst(i), kind(k), win(compute_departure_windows(i)) {
        T = inst.grid.horizon;
        D = inst.grid.delta;
        Q = inst.costs.max_formation;
        Minutes theta_max = 0, run_max = 0;
        for (const auto& c : inst.eptn.corridors) theta_max = std::max(theta_max, c.theta_max);
        for (int l = 0; l < inst.num_lines(); ++l)
            for (const auto& tt : inst.trips[l]) {
                Minutes s = 0;
                for (Minutes r : tt.run_times) s += r;
                run_max = std::max(run_max, s);
            }
        m_time = static_cast<double>(D * (T + 1) + run_max + theta_max + D);
        eps = static_cast<double>(D);
        out.big_m_time = m_time;
        for (const auto& sc : inst.scenarios)
            for (const auto& g : sc.groups)
                for (int c : g.corridors) passenger_corridors.insert(c);
        reroutable.resize(inst.eptn.corridors.size(), 0);
        for (size_t c = 0; c < inst.eptn.corridors.size(); ++c) {
            const auto& co = inst.eptn.corridors[c];
            reroutable[c] = co.from_stop >= 2 && co.to_stop >= 2;
        }
    }

    ModelIr& ir() { return out.ir; }
    Handles& H() { return out.h; }

    int trips(int l) const { return inst.num_trips(l); }
    int stops(int l) const { return inst.eptn.lines[l].num_stops(); }

    // Window of free z intervals for (l,k,i): [wlo, whi]. Outside it, z is
    // fixed (1 before, 0 after) when window fixing applies.
    std::pair<int, int> free_range(int l, int k, int i) const {
        if (!z_fixing()) return {1, T};
        int wlo = static_cast<int>(win.depart_lo(l, k, i) / D);
        int whi = static_cast<int>(win.depart_hi(l, k, i) / D) - 1;
        return {wlo, whi};
    }
    bool z_fixing() const { return vi || kind == BuildKind::Subproblem; }
    bool z_is_fixed(int l, int k, int i, int t, double* value) const {
        auto [lo, hi] = free_range(l, k, i);
        if (t < lo) {
            *value = 1.0;
            return true;
        }
        if (t > hi) {
            *value = 0.0;
            return true;
        }
        return false;
    }

    double rho(int w) const { return inst.scenarios[w].probability; }
    std::vector<int> scenario_list() const {
        if (kind == BuildKind::Subproblem) return {only_scenario};
        std::vector<int> all;
        for (size_t w = 0; w < inst.scenarios.size(); ++w) all.push_back(static_cast<int>(w));
        return all;
    }

    // ---- first stage -----------------------------------------------------

    void add_timetable_vars() {
        for (int l = 0; l < inst.num_lines(); ++l)
            for (int k = 1; k <= trips(l); ++k)
                for (int i = 1; i <= stops(l); ++i) {
                    auto [lo, hi] = free_range(l, k, i);
                    for (int t = lo; t <= hi; ++t) {
                        int v = ir().add_var(sub("z", {l, k, i, t}), 0, 1, VarType::Binary);
                        H().z.put(key(l, k, i, t), v);
                        out.free_z.push_back({l, k, i, t});
                    }
                    double dlo = static_cast<double>(D), dhi = static_cast<double>(D) * (T + 1);
                    if (z_fixing()) {
                        dlo = static_cast<double>(win.depart_lo(l, k, i));
                        dhi = static_cast<double>(win.depart_hi(l, k, i));
                    }
                    int dv = ir().add_var(sub("d", {l, k, i}), dlo, dhi, VarType::Continuous);
                    H().depart.put(key(l, k, i), dv);
                    // d = delta * (1 + sum_t z)
                    std::vector<std::pair<int, double>> terms{{dv, 1.0}};
                    double rhs = static_cast<double>(D);
                    for (int t = 1; t <= T; ++t) {
                        double fv;
                        if (z_is_fixed(l, k, i, t, &fv))
                            rhs += static_cast<double>(D) * fv;
                        else
                            terms.emplace_back(H().z.get(key(l, k, i, t)), -static_cast<double>(D));
                    }
                    ir().add_row(std::move(terms), Sense::Eq, rhs, "depart_def");
                    auto [flo, fhi] = free_range(l, k, i);
                    for (int t = flo; t < fhi; ++t)
                        ir().add_row({{H().z.get(key(l, k, i, t + 1)), 1.0},
                                      {H().z.get(key(l, k, i, t)), -1.0}},
                                     Sense::Le, 0.0, "z_monotone");
                }
        ir().bound_families.push_back("z_domain");

        bool master_side = kind != BuildKind::Subproblem;
        for (int l = 0; l < inst.num_lines(); ++l) {
            for (int k = 1; k <= trips(l); ++k) {
                const auto& tt = inst.trips[l][k - 1];
                if (master_side) {
                    int av = ir().add_var(sub("alpha", {l, k}), static_cast<double>(tt.shift_min),
                                          static_cast<double>(tt.shift_max), VarType::Continuous);
                    H().shift.put(key(l, k), av);
                }
                for (int i = 1; i <= stops(l); ++i) {
                    if (kind == BuildKind::Subproblem && i == 1) continue;  // a1 is never used
                    double alo = 0.0, ahi = m_time;
                    int a = ir().add_var(sub("a", {l, k, i}), alo, ahi, VarType::Continuous);
                    H().arrive.put(key(l, k, i), a);
                    if (i == 1) {
                        ir().add_row({{a, 1.0}, {H().shift.get(key(l, k)), -1.0}}, Sense::Eq,
                                     static_cast<double>(tt.origin_time), "arrive_first");
                    } else {
                        ir().add_row({{a, 1.0}, {H().depart.get(key(l, k, i - 1)), -1.0}}, Sense::Eq,
                                     static_cast<double>(tt.run_times[i - 2]), "arrive_chain");
                    }
                    if (master_side) {
                        int b = ir().add_var(sub("beta", {l, k, i}),
                                             static_cast<double>(tt.dwell_min[i - 1]),
                                             static_cast<double>(tt.dwell_max[i - 1]),
                                             VarType::Continuous);
                        H().dwell.put(key(l, k, i), b);
                        ir().add_row({{b, 1.0},
                                      {H().depart.get(key(l, k, i)), -1.0},
                                      {a, 1.0}},
                                     Sense::Eq, 0.0, "dwell_def");
                    }
                }
            }
            if (master_side) {
                for (int k = 1; k < trips(l); ++k)
                    for (int i = 1; i <= stops(l); ++i) {
                        int d2 = H().depart.get(key(l, k + 1, i));
                        int d1 = H().depart.get(key(l, k, i));
                        ir().add_row({{d2, 1.0}, {d1, -1.0}}, Sense::Ge,
                                     static_cast<double>(inst.headways[l].min), "headway");
                        ir().add_row({{d2, 1.0}, {d1, -1.0}}, Sense::Le,
                                     static_cast<double>(inst.headways[l].max), "headway");
                    }
                // Stage boundary: trip 1 keeps headway against the last
                // committed trip of the previous stage.
                if (!inst.stage.prev_trip_depart.empty() &&
                    !inst.stage.prev_trip_depart[l].empty() && trips(l) >= 1) {
                    for (int i = 1; i <= stops(l); ++i) {
                        double anchor =
                            static_cast<double>(inst.stage.prev_trip_depart[l][i - 1]);
                        int d1 = H().depart.get(key(l, 1, i));
                        ir().add_row({{d1, 1.0}}, Sense::Ge,
                                     anchor + static_cast<double>(inst.headways[l].min),
                                     "headway");
                        ir().add_row({{d1, 1.0}}, Sense::Le,
                                     anchor + static_cast<double>(inst.headways[l].max),
                                     "headway");
                    }
                }
            }
        }
        if (master_side) {
            ir().bound_families.push_back("shift_bounds");
            ir().bound_families.push_back("dwell_bounds");
        }
    }

    // Passenger eligibility, boarding chain and origin-wait linearization
    // (master-side families only).
    void add_passenger_first_stage() {
        // pi / gamma per passenger-active corridor.
        for (int g : passenger_corridors) {
            const auto& co = inst.eptn.corridors[g];
            for (int k = 1; k <= trips(co.from_line); ++k)
                for (int k2 = 1; k2 <= trips(co.to_line); ++k2) {
                    int pv = ir().add_var(sub("pi", {g, k, k2}), 0, 1, VarType::Binary);
                    H().pi.put(key(g, k, k2), pv);
                    int gv = ir().add_var(sub("gamma", {g, k, k2}), 0, 1, VarType::Continuous);
                    H().gamma.put(key(g, k, k2), gv);
                    int dto = H().depart.get(key(co.to_line, k2, co.to_stop));
                    int afrom = H().arrive.get(key(co.from_line, k, co.from_stop));
                    double th = static_cast<double>(co.theta_min);
                    // M2(pi-1) <= d' - a - theta <= M2 pi - eps
                    ir().add_row({{dto, -1.0}, {afrom, 1.0}, {pv, m_time}}, Sense::Le, m_time - th,
                                 "transfer_eligibility");
                    ir().add_row({{dto, 1.0}, {afrom, -1.0}, {pv, -m_time}}, Sense::Le, th - eps,
                                 "transfer_eligibility");
                    std::vector<std::pair<int, double>> gd{{gv, 1.0}, {pv, -1.0}};
                    if (k2 >= 2) gd.emplace_back(H().pi.get(key(g, k, k2 - 1)), 1.0);
                    ir().add_row(std::move(gd), Sense::Eq, 0.0, "gamma_def");
                    link_shift_indicator(
                        pv, co.from_line, k, co.from_stop - 1, co.to_line, k2, co.to_stop,
                        inst.trips[co.from_line][k - 1].run_times[co.from_stop - 2] +
                            co.theta_min);
                }
        }

        for (int w : scenario_list()) {
            const auto& sc = inst.scenarios[w];
            for (size_t p = 0; p < sc.groups.size(); ++p) {
                const auto& grp = sc.groups[p];
                int l0 = grp.lines[0];
                for (int k = 1; k <= trips(l0); ++k) {
                    int xv = ir().add_var(sub("xi", {w, (int)p, k}), 0, 1, VarType::Binary);
                    H().xi.put(key(w, (int)p, k), xv);
                    int d0 = H().depart.get(key(l0, k, grp.origin_stop));
                    double u = static_cast<double>(grp.board_threshold());
                    // M1(xi-1) <= d - u <= M1 xi - eps
                    ir().add_row({{d0, -1.0}, {xv, m_time}}, Sense::Le, m_time - u,
                                 "board_eligibility");
                    ir().add_row({{d0, 1.0}, {xv, -m_time}}, Sense::Le, u - eps,
                                 "board_eligibility");
                    // With z monotone and grid-aligned data, the eligibility
                    // indicator is literally a z entry: xi = [d >= u] = z at
                    // interval u/delta - 1. Tightens the relaxation exactly.
                    long long tu = grp.board_threshold() / D - 1;
                    if (tu <= 0) {
                        ir().vars[xv].lo = 1.0;
                    } else if (tu > T) {
                        ir().vars[xv].up = 0.0;
                    } else {
                        double fv;
                        if (z_is_fixed(l0, k, grp.origin_stop, static_cast<int>(tu), &fv)) {
                            ir().vars[xv].lo = ir().vars[xv].up = fv;
                        } else {
                            int zv = H().z.get(key(l0, k, grp.origin_stop, static_cast<int>(tu)));
                            ir().add_row({{xv, 1.0}, {zv, -1.0}}, Sense::Eq, 0.0, "plumbing");
                        }
                    }
                }
                for (size_t leg = 0; leg < grp.lines.size(); ++leg) {
                    int ll = grp.lines[leg];
                    for (int k = 1; k <= trips(ll); ++k) {
                        int cv =
                            ir().add_var(sub("chi", {w, (int)p, (int)leg, k}), 0, 1, VarType::Binary);
                        H().chi.put(key(w, (int)p, (int)leg, k), cv);
                    }
                }
                // chi chain: first leg telescopes xi, later legs sum zeta of the
                // previous corridor.
                for (int k = 1; k <= trips(l0); ++k) {
                    std::vector<std::pair<int, double>> t{
                        {H().chi.get(key(w, (int)p, 0, k)), 1.0},
                        {H().xi.get(key(w, (int)p, k)), -1.0}};
                    if (k >= 2) t.emplace_back(H().xi.get(key(w, (int)p, k - 1)), 1.0);
                    ir().add_row(std::move(t), Sense::Eq, 0.0, "board_chain_first");
                }
                for (size_t leg = 0; leg + 1 < grp.lines.size(); ++leg) {
                    int g = grp.corridors[leg];
                    const auto& co = inst.eptn.corridors[g];
                    for (int k = 1; k <= trips(co.from_line); ++k)
                        for (int k2 = 1; k2 <= trips(co.to_line); ++k2) {
                            int zv = ir().add_var(sub("zeta", {w, (int)p, (int)leg, k, k2}), 0, 1,
                                                  VarType::Binary);
                            H().zeta.put(key(w, (int)p, (int)leg, k, k2), zv);
                            int cv = H().chi.get(key(w, (int)p, (int)leg, k));
                            int gv = H().gamma.get(key(g, k, k2));
                            ir().add_row({{zv, 1.0}, {cv, -1.0}}, Sense::Le, 0.0, "transfer_link");
                            ir().add_row({{zv, 1.0}, {gv, -1.0}}, Sense::Le, 0.0, "transfer_link");
                            ir().add_row({{zv, 1.0}, {cv, -1.0}, {gv, -1.0}}, Sense::Ge, -1.0,
                                         "transfer_link");
                        }
                    for (int k2 = 1; k2 <= trips(co.to_line); ++k2) {
                        std::vector<std::pair<int, double>> t{
                            {H().chi.get(key(w, (int)p, (int)(leg + 1), k2)), 1.0}};
                        for (int k = 1; k <= trips(co.from_line); ++k)
                            t.emplace_back(H().zeta.get(key(w, (int)p, (int)leg, k, k2)), -1.0);
                        ir().add_row(std::move(t), Sense::Eq, 0.0, "board_chain_transfer");
                    }
                }
                // Origin-wait linearization: lambda = chi * d at the origin stop.
                for (int k = 1; k <= trips(l0); ++k) {
                    int lv = ir().add_var(sub("lambda", {w, (int)p, k}), 0, m_time,
                                          VarType::Continuous);
                    H().lambda_hat.put(key(w, (int)p, k), lv);
                    int cv = H().chi.get(key(w, (int)p, 0, k));
                    int d0 = H().depart.get(key(l0, k, grp.origin_stop));
                    ir().add_row({{lv, 1.0}, {cv, -m_time}}, Sense::Le, 0.0, "wait_origin_linear");
                    ir().add_row({{lv, 1.0}, {d0, -1.0}}, Sense::Le, 0.0, "wait_origin_linear");
                    ir().add_row({{lv, 1.0}, {d0, -1.0}, {cv, -m_time}}, Sense::Ge, -m_time,
                                 "wait_origin_linear");
                    // A boarded trip departs no earlier than the group: the
                    // wait term lambda - u*chi is non-negative on the hull.
                    ir().add_row({{lv, 1.0},
                                  {cv, -static_cast<double>(grp.board_threshold())}},
                                 Sense::Ge, 0.0, "plumbing");
                }
            }
        }
    }

    // ---- second stage ----------------------------------------------------

    void add_formation_vars(int w) {
        double coef_oper = inst.costs.phi2 * (kind == BuildKind::Subproblem ? 1.0 : rho(w));
        for (int l = 0; l < inst.num_lines(); ++l)
            for (int k = 1; k <= trips(l); ++k)
                for (int i = 1; i <= stops(l); ++i) {
                    int xv = ir().add_var(sub("x", {w, l, k, i}), 0, Q, VarType::Continuous);
                    H().x.put(key(w, l, k, i), xv);
                    std::vector<std::pair<int, double>> fromy{{xv, 1.0}};
                    std::vector<std::pair<int, double>> choice;
                    for (int q = 1; q <= Q; ++q) {
                        int yv =
                            ir().add_var(sub("y", {w, l, k, i, q}), 0, 1, VarType::Binary);
                        H().y.put(key(w, l, k, i, q), yv);
                        fromy.emplace_back(yv, -static_cast<double>(q));
                        choice.emplace_back(yv, 1.0);
                        ir().objective.add(yv, coef_oper * inst.costs.vartheta(l, i, q));
                    }
                    ir().add_row(std::move(fromy), Sense::Eq, 0.0, "formation_from_y");
                    ir().add_row(std::move(choice), Sense::Eq, 1.0, "formation_choice");
                }
    }

    void add_strategy_fixings(int w) {
        if (kind == BuildKind::Subproblem) return;
        if (strategy == Strategy::Fixed) {
            for (int l = 0; l < inst.num_lines(); ++l)
                for (int k = 1; k <= trips(l); ++k)
                    for (int i = 1; i <= stops(l); ++i)
                        for (int q = 1; q <= Q; ++q) {
                            int yv = H().y.get(key(w, l, k, i, q));
                            double v = q == Q ? 1.0 : 0.0;
                            ir().vars[yv].lo = ir().vars[yv].up = v;
                        }
        }
        if (strategy != Strategy::CompletelyFlexible) {
            for (const auto& [hk, hv] : H().h.all())
                if (hk[0] == w) ir().vars[hv].lo = ir().vars[hv].up = 0.0;
        }
    }

    void add_coupling_windows() {
        // e / edot / ehat are timetable-determined and scenario-free.
        for (size_t g = 0; g < inst.eptn.corridors.size(); ++g) {
            if (!reroutable[g]) continue;
            const auto& co = inst.eptn.corridors[g];
            for (int k = 1; k <= trips(co.from_line); ++k)
                for (int k2 = 1; k2 <= trips(co.to_line); ++k2) {
                    int ev = ir().add_var(sub("e", {(int)g, k, k2}), 0, 1, VarType::Binary);
                    int edv = ir().add_var(sub("edot", {(int)g, k, k2}), 0, 1, VarType::Binary);
                    int ehv = ir().add_var(sub("ehat", {(int)g, k, k2}), 0, 1, VarType::Binary);
                    H().e.put(key((int)g, k, k2), ev);
                    H().edot.put(key((int)g, k, k2), edv);
                    H().ehat.put(key((int)g, k, k2), ehv);
                    int dto = H().depart.get(key(co.to_line, k2, co.to_stop));
                    int afrom = H().arrive.get(key(co.from_line, k, co.from_stop));
                    double tlo = static_cast<double>(co.theta_min);
                    double thi = static_cast<double>(co.theta_max);
                    // M7(edot-1) <= d'-a-tlo <= M7 edot - eps
                    ir().add_row({{dto, -1.0}, {afrom, 1.0}, {edv, m_time}}, Sense::Le,
                                 m_time - tlo, "couple_window");
                    ir().add_row({{dto, 1.0}, {afrom, -1.0}, {edv, -m_time}}, Sense::Le,
                                 tlo - eps, "couple_window");
                    // M7(ehat-1) <= thi - d' + a <= M7 ehat - eps
                    ir().add_row({{dto, 1.0}, {afrom, -1.0}, {ehv, m_time}}, Sense::Le,
                                 m_time + thi, "couple_window");
                    ir().add_row({{dto, -1.0}, {afrom, 1.0}, {ehv, -m_time}}, Sense::Le,
                                 -thi - eps, "couple_window");
                    ir().add_row({{ev, 1.0}, {edv, -1.0}}, Sense::Le, 0.0, "couple_window_link");
                    ir().add_row({{ev, 1.0}, {ehv, -1.0}}, Sense::Le, 0.0, "couple_window_link");
                    ir().add_row({{ev, 1.0}, {edv, -1.0}, {ehv, -1.0}}, Sense::Ge, -1.0,
                                 "couple_window_link");
                }
        }
    }

    void add_reroutes(int w) {
        for (size_t g = 0; g < inst.eptn.corridors.size(); ++g) {
            if (!reroutable[g]) continue;
            const auto& co = inst.eptn.corridors[g];
            for (int k = 1; k <= trips(co.from_line); ++k)
                for (int k2 = 1; k2 <= trips(co.to_line); ++k2) {
                    int hv = ir().add_var(sub("h", {w, (int)g, k, k2}), 0, 1, VarType::Binary);
                    H().h.put(key(w, (int)g, k, k2), hv);
                    // Moves must not straddle a stage commit boundary.
                    if (!inst.stage.commits_now.empty() &&
                        inst.stage.commits_now[co.from_line][k - 1] !=
                            inst.stage.commits_now[co.to_line][k2 - 1])
                        ir().vars[hv].up = 0.0;
                    ir().add_row({{hv, 1.0}, {H().e.get(key((int)g, k, k2)), -1.0}}, Sense::Le,
                                 0.0, "reroute_gate");
                    // Decoupling strictly shrinks the sender's formation.
                    int xi = H().x.get(key(w, co.from_line, k, co.from_stop));
                    int xim1 = H().x.get(key(w, co.from_line, k, co.from_stop - 1));
                    ir().add_row({{xi, 1.0}, {xim1, -1.0}, {hv, static_cast<double>(Q)}},
                                 Sense::Le, static_cast<double>(Q) - 1.0, "decouple_link");
                }
        }
        for (size_t g = 0; g < inst.eptn.corridors.size(); ++g) {
            if (!reroutable[g]) continue;
            int grev = inst.eptn.reverse_corridor(static_cast<int>(g));
            if (grev < 0 || static_cast<int>(g) > grev) continue;
            const auto& co = inst.eptn.corridors[g];
            for (int k = 1; k <= trips(co.from_line); ++k)
                for (int k2 = 1; k2 <= trips(co.to_line); ++k2)
                    ir().add_row({{H().h.get(key(w, (int)g, k, k2)), 1.0},
                                  {H().h.get(key(w, grev, k2, k)), 1.0}},
                                 Sense::Le, 1.0, "reroute_unidir");
        }
    }

    // Exact z-level link of an indicator b = [d(l2,k2,i2) - d(l1,k1,i1) >= c]
    // for grid-aligned c: shift implications valid on the hull that force b
    // once z is integral, replacing most branching on the indicator.
    void link_shift_indicator(int bvar, int l1, int k1, int i1, int l2, int k2, int i2,
                              Minutes c) {
        int s = static_cast<int>(c / D);
        auto zterm = [&](int l, int k, int i, int t, double* fixed) {
            if (t < 1) {
                *fixed = 1.0;
                return -1;
            }
            if (t > T) {
                *fixed = 0.0;
                return -1;
            }
            double fv;
            if (z_is_fixed(l, k, i, t, &fv)) {
                *fixed = fv;
                return -1;
            }
            return H().z.get(key(l, k, i, t));
        };
        auto [lo1, hi1] = free_range(l1, k1, i1);
        for (int t = lo1 - 1; t <= hi1 + 1; ++t) {
            double f1 = 0, f2a = 0, f2b = 0;
            int z1 = zterm(l1, k1, i1, t, &f1);
            int z2a = zterm(l2, k2, i2, t + s, &f2a);
            int z2b = zterm(l2, k2, i2, t + s - 1, &f2b);
            {
                // b=1 and z1_t=1 imply z2_{t+s}=1:  z2a - z1 - b >= -1
                std::vector<std::pair<int, double>> row;
                double rhs = -1.0;
                if (z2a >= 0)
                    row.emplace_back(z2a, 1.0);
                else
                    rhs -= f2a;
                if (z1 >= 0)
                    row.emplace_back(z1, -1.0);
                else
                    rhs += f1;
                row.emplace_back(bvar, -1.0);
                ir().add_row(std::move(row), Sense::Ge, rhs, "plumbing");
            }
            {
                // b=0 and z2_{t+s-1}=1 imply z1_t=1:  z1 - z2b + b >= 0
                std::vector<std::pair<int, double>> row;
                double rhs = 0.0;
                if (z1 >= 0)
                    row.emplace_back(z1, 1.0);
                else
                    rhs -= f1;
                if (z2b >= 0)
                    row.emplace_back(z2b, -1.0);
                else
                    rhs += f2b;
                row.emplace_back(bvar, 1.0);
                ir().add_row(std::move(row), Sense::Ge, rhs, "plumbing");
            }
        }
    }

    void mccormick_product(int prod, int bin, int cont, const std::string& label) {
        // prod = bin * cont with cont in [0, Q]
        double M = static_cast<double>(Q);
        ir().add_row({{prod, 1.0}, {bin, -M}}, Sense::Le, 0.0, label);
        ir().add_row({{prod, 1.0}, {cont, -1.0}}, Sense::Le, 0.0, label);
        ir().add_row({{prod, 1.0}, {cont, -1.0}, {bin, -M}}, Sense::Ge, -M, label);
    }

    void add_formation_flow(int w) {
        for (int l = 0; l < inst.num_lines(); ++l) {
            const auto& lg = inst.eptn.lines[l];
            for (int k = 1; k <= trips(l); ++k)
                for (int i = 2; i <= stops(l); ++i) {
                    int xi = H().x.get(key(w, l, k, i));
                    int xim1 = H().x.get(key(w, l, k, i - 1));
                    if (!lg.is_transfer(i)) {
                        ir().add_row({{xi, 1.0}, {xim1, -1.0}}, Sense::Eq, 0.0, "formation_const");
                        continue;
                    }
                    std::vector<std::pair<int, double>> bal{{xi, 1.0}, {xim1, -1.0}};
                    for (size_t g = 0; g < inst.eptn.corridors.size(); ++g) {
                        const auto& co = inst.eptn.corridors[g];
                        if (!reroutable[g] || co.from_line != l || co.from_stop != i) continue;
                        int grev = inst.eptn.reverse_corridor(static_cast<int>(g));
                        for (int k2 = 1; k2 <= trips(co.to_line); ++k2) {
                            int hfwd = H().h.get(key(w, (int)g, k, k2));
                            int hrev = H().h.get(key(w, grev, k2, k));
                            int xpPrev = H().x.get(key(w, co.to_line, k2, co.to_stop - 1));
                            int xpCur = H().x.get(key(w, co.to_line, k2, co.to_stop));
                            int h1 = ir().add_var(sub("hh1", {w, (int)g, k, k2}), 0, Q,
                                                  VarType::Continuous);
                            int h2 = ir().add_var(sub("hh2", {w, (int)g, k, k2}), 0, Q,
                                                  VarType::Continuous);
                            int h3 = ir().add_var(sub("hh3", {w, (int)g, k, k2}), 0, Q,
                                                  VarType::Continuous);
                            int h4 = ir().add_var(sub("hh4", {w, (int)g, k, k2}), 0, Q,
                                                  VarType::Continuous);
                            H().hh1.put(key(w, (int)g, k, k2), h1);
                            H().hh2.put(key(w, (int)g, k, k2), h2);
                            H().hh3.put(key(w, (int)g, k, k2), h3);
                            H().hh4.put(key(w, (int)g, k, k2), h4);
                            mccormick_product(h1, hrev, xpPrev, "hh_linear");
                            mccormick_product(h2, hrev, xpCur, "hh_linear");
                            mccormick_product(h3, hfwd, xpCur, "hh_linear");
                            mccormick_product(h4, hfwd, xpPrev, "hh_linear");
                            // x_i = x_{i-1} + (h1 - h2 - h3 + h4)
                            bal.emplace_back(h1, -1.0);
                            bal.emplace_back(h2, 1.0);
                            bal.emplace_back(h3, 1.0);
                            bal.emplace_back(h4, -1.0);
                        }
                    }
                    ir().add_row(std::move(bal), Sense::Eq, 0.0, "formation_balance");
                }
        }
    }

    void add_passenger_counts(int w) {
        const auto& sc = inst.scenarios[w];
        double nmax = 0;
        for (const auto& g : sc.groups) nmax += static_cast<double>(g.size);
        // (line, stop) -> (group, leg) boarding / alighting there
        std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> on, off;
        for (size_t p = 0; p < sc.groups.size(); ++p) {
            const auto& g = sc.groups[p];
            for (size_t leg = 0; leg < g.lines.size(); ++leg) {
                on[{g.lines[leg], group_board_stop(inst, g, (int)leg)}].emplace_back((int)p, (int)leg);
                off[{g.lines[leg], group_alight_stop(inst, g, (int)leg)}].emplace_back((int)p,
                                                                                       (int)leg);
            }
        }
        for (int l = 0; l < inst.num_lines(); ++l)
            for (int k = 1; k <= trips(l); ++k)
                for (int i = 1; i <= stops(l); ++i) {
                    int bv = ir().add_var(sub("b", {w, l, k, i}), 0, nmax, VarType::Continuous);
                    int cv = ir().add_var(sub("c", {w, l, k, i}), 0, nmax, VarType::Continuous);
                    int vv = ir().add_var(sub("v", {w, l, k, i}), 0, nmax, VarType::Continuous);
                    H().board.put(key(w, l, k, i), bv);
                    H().alight.put(key(w, l, k, i), cv);
                    H().load.put(key(w, l, k, i), vv);
                    std::vector<std::pair<int, double>> bt{{bv, 1.0}};
                    if (auto it = on.find({l, i}); it != on.end())
                        for (auto [p, leg] : it->second)
                            bt.emplace_back(H().chi.get(key(w, p, leg, k)),
                                            -static_cast<double>(sc.groups[p].size));
                    ir().add_row(std::move(bt), Sense::Eq, 0.0, "board_count");
                    std::vector<std::pair<int, double>> ct{{cv, 1.0}};
                    if (auto it = off.find({l, i}); it != off.end())
                        for (auto [p, leg] : it->second)
                            ct.emplace_back(H().chi.get(key(w, p, leg, k)),
                                            -static_cast<double>(sc.groups[p].size));
                    ir().add_row(std::move(ct), Sense::Eq, 0.0, "alight_count");
                    std::vector<std::pair<int, double>> vt{{vv, 1.0}, {bv, -1.0}, {cv, 1.0}};
                    if (i >= 2) vt.emplace_back(H().load.get(key(w, l, k, i - 1)), -1.0);
                    ir().add_row(std::move(vt), Sense::Eq, 0.0, "load_def");
                    ir().add_row({{vv, 1.0},
                                  {H().x.get(key(w, l, k, i)),
                                   -static_cast<double>(inst.costs.cap_per_unit)}},
                                 Sense::Le, 0.0, "capacity");
                }
    }

    void add_transfer_waits(int w) {
        const auto& sc = inst.scenarios[w];
        double coef = inst.costs.phi1 * inst.costs.eps2 * inst.costs.wait_value *
                      (kind == BuildKind::Subproblem ? 1.0 : rho(w));
        for (size_t p = 0; p < sc.groups.size(); ++p) {
            const auto& grp = sc.groups[p];
            for (size_t leg = 0; leg + 1 < grp.lines.size(); ++leg) {
                int g = grp.corridors[leg];
                const auto& co = inst.eptn.corridors[g];
                for (int k = 1; k <= trips(co.from_line); ++k)
                    for (int k2 = 1; k2 <= trips(co.to_line); ++k2) {
                        int zv = H().zeta.get(key(w, (int)p, (int)leg, k, k2));
                        int hv = reroutable[g] ? H().h.get(key(w, (int)g, k, k2)) : -1;
                        int pt = ir().add_var(sub("psit", {w, (int)p, (int)leg, k, k2}), 0, 1,
                                              VarType::Continuous);
                        int pd = ir().add_var(sub("psid", {w, (int)p, (int)leg, k, k2}), 0,
                                              m_time, VarType::Continuous);
                        int pa = ir().add_var(sub("psia", {w, (int)p, (int)leg, k, k2}), 0,
                                              m_time, VarType::Continuous);
                        H().psi_tilde.put(key(w, (int)p, (int)leg, k, k2), pt);
                        H().psi_dot.put(key(w, (int)p, (int)leg, k, k2), pd);
                        H().psi_hat.put(key(w, (int)p, (int)leg, k, k2), pa);
                        // psit = zeta * (1 - h)
                        ir().add_row({{pt, 1.0}, {zv, -1.0}}, Sense::Le, 0.0,
                                     "wait_transfer_linear");
                        if (hv >= 0) {
                            ir().add_row({{pt, 1.0}, {hv, 1.0}}, Sense::Le, 1.0,
                                         "wait_transfer_linear");
                            ir().add_row({{pt, 1.0}, {zv, -1.0}, {hv, 1.0}}, Sense::Ge, 0.0,
                                         "wait_transfer_linear");
                        } else {
                            ir().add_row({{pt, 1.0}, {zv, -1.0}}, Sense::Ge, 0.0,
                                         "wait_transfer_linear");
                        }
                        int dto = H().depart.get(key(co.to_line, k2, co.to_stop));
                        int afrom = H().arrive.get(key(co.from_line, k, co.from_stop));
                        // psid = psit * d', psia = psit * a
                        ir().add_row({{pd, 1.0}, {pt, -m_time}}, Sense::Le, 0.0,
                                     "wait_transfer_linear");
                        ir().add_row({{pd, 1.0}, {dto, -1.0}}, Sense::Le, 0.0,
                                     "wait_transfer_linear");
                        ir().add_row({{pd, 1.0}, {dto, -1.0}, {pt, -m_time}}, Sense::Ge, -m_time,
                                     "wait_transfer_linear");
                        ir().add_row({{pa, 1.0}, {pt, -m_time}}, Sense::Le, 0.0,
                                     "wait_transfer_linear");
                        ir().add_row({{pa, 1.0}, {afrom, -1.0}}, Sense::Le, 0.0,
                                     "wait_transfer_linear");
                        ir().add_row({{pa, 1.0}, {afrom, -1.0}, {pt, -m_time}}, Sense::Ge,
                                     -m_time, "wait_transfer_linear");
                        // A taken transfer respects the corridor minimum, so
                        // its wait term is at least theta_min * psit.
                        ir().add_row({{pd, 1.0},
                                      {pa, -1.0},
                                      {pt, -static_cast<double>(co.theta_min)}},
                                     Sense::Ge, 0.0, "plumbing");
                        double c = coef * static_cast<double>(grp.size);
                        ir().objective.add(pd, c);
                        ir().objective.add(pa, -c);
                    }
            }
        }
    }

    // Depot stock and in/outflow accounting with mu = z * x.
    void add_vehicle_scheduling(int w, int kappa_scenario_key) {
        double fleet_cap = 0;
        for (int l = 0; l < inst.num_lines(); ++l) fleet_cap += trips(l) * Q;

        std::vector<int> kappa_vars;
        for (size_t m = 0; m < inst.eptn.depots.size(); ++m) {
            int kv = H().kappa.get(key(kappa_scenario_key, (int)m));
            if (kv < 0) {
                kv = ir().add_var(sub("kappa", {kappa_scenario_key, (int)m}), 0,
                                  static_cast<double>(inst.costs.max_units), VarType::Continuous);
                H().kappa.put(key(kappa_scenario_key, (int)m), kv);
            }
            kappa_vars.push_back(kv);
        }
        if (kind == BuildKind::Subproblem || w == scenario_list().front()) {
            std::vector<std::pair<int, double>> bt;
            for (int kv : kappa_vars) bt.emplace_back(kv, 1.0);
            ir().add_row(std::move(bt), Sense::Le, static_cast<double>(inst.costs.max_units),
                         "fleet_budget");
        }

        auto mu_var = [&](int l, int k, int i, int t) {
            int v = H().mu.get(key(w, l, k, i, t));
            if (v >= 0) return v;
            v = ir().add_var(sub("mu", {w, l, k, i, t}), 0, Q, VarType::Continuous);
            H().mu.put(key(w, l, k, i, t), v);
            int zv = H().z.get(key(l, k, i, t));
            int xv = H().x.get(key(w, l, k, i));
            double M = static_cast<double>(Q);
            ir().add_row({{v, 1.0}, {xv, -1.0}}, Sense::Le, 0.0, "mu_link");
            ir().add_row({{v, 1.0}, {zv, -M}}, Sense::Le, 0.0, "mu_link");
            ir().add_row({{v, 1.0}, {xv, -1.0}, {zv, -M}}, Sense::Ge, -M, "mu_link");
            return v;
        };
        // Appends the (x - mu_{t'}) contribution of trip (l,k) at stop i for
        // shifted interval t'; drops it when z is fixed to 1 (not yet departed).
        auto contribution = [&](std::vector<std::pair<int, double>>& terms, int l, int k, int i,
                                int t_shift) {
            if (t_shift < 1) return;  // before the horizon: certainly not departed
            int xv = H().x.get(key(w, l, k, i));
            double fv;
            if (t_shift > T || z_is_fixed(l, k, i, t_shift, &fv)) {
                double zval = t_shift > T ? 0.0 : fv;
                if (zval == 0.0) terms.emplace_back(xv, -1.0);
                return;  // z = 1 contributes x - x = 0
            }
            terms.emplace_back(xv, -1.0);
            terms.emplace_back(mu_var(l, k, i, t_shift), 1.0);
        };

        bool external = !inst.stage.inflow_const.empty();
        for (size_t m = 0; m < inst.eptn.depots.size(); ++m) {
            const auto& dep = inst.eptn.depots[m];
            int prep = static_cast<int>(dep.prep_time / D);
            double cap = fleet_cap + static_cast<double>(inst.costs.max_units);
            for (int t = 1; t <= T; ++t) {
                int avv = ir().add_var(sub("AV", {w, (int)m, t}), 0, cap, VarType::Continuous);
                int dvv = ir().add_var(sub("DV", {w, (int)m, t}), 0, cap, VarType::Continuous);
                H().av.put(key(w, (int)m, t), avv);
                H().dv.put(key(w, (int)m, t), dvv);
                double av_rhs = external ? inst.stage.inflow_const[w][m][t - 1] : 0.0;
                double dv_rhs = external ? inst.stage.outflow_const[w][m][t - 1] : 0.0;
                std::vector<std::pair<int, double>> at{{avv, 1.0}};
                for (int l : dep.ll_lines)
                    for (int k = 1; k <= trips(l); ++k)
                        contribution(at, l, k, stops(l), t - prep);
                ir().add_row(std::move(at), Sense::Eq, av_rhs, "depot_inflow");
                std::vector<std::pair<int, double>> dt{{dvv, 1.0}};
                for (int l : dep.fl_lines)
                    for (int k = 1; k <= trips(l); ++k) contribution(dt, l, k, 1, t);
                ir().add_row(std::move(dt), Sense::Eq, dv_rhs, "depot_outflow");
                ir().add_row({{dvv, 1.0}, {avv, -1.0}, {kappa_vars[m], -1.0}}, Sense::Le, 0.0,
                             "depot_stock");
            }
        }
    }

    void add_objective_origin_waits() {
        for (int w : scenario_list()) {
            const auto& sc = inst.scenarios[w];
            for (size_t p = 0; p < sc.groups.size(); ++p) {
                const auto& grp = sc.groups[p];
                double coef = inst.costs.phi1 *
                              (grp.transfer_carry ? inst.costs.eps2 : inst.costs.eps1) *
                              inst.costs.wait_value *
                              (kind == BuildKind::Subproblem ? 1.0 : rho(w));
                int l0 = grp.lines[0];
                double c = coef * static_cast<double>(grp.size);
                for (int k = 1; k <= trips(l0); ++k) {
                    ir().objective.add(H().lambda_hat.get(key(w, (int)p, k)), c);
                    ir().objective.add(H().chi.get(key(w, (int)p, 0, k)),
                                       -c * static_cast<double>(grp.arrival_time));
                }
            }
        }
    }

    // Proposition rows over departure windows.
    void add_prop2_prop3() {
        for (int w : scenario_list()) {
            const auto& sc = inst.scenarios[w];
            for (size_t p = 0; p < sc.groups.size(); ++p) {
                const auto& grp = sc.groups[p];
                int l0 = grp.lines[0];
                for (int k = 1; k <= trips(l0); ++k) {
                    double hi = static_cast<double>(win.depart_hi(l0, k, grp.origin_stop));
                    std::vector<std::pair<int, double>> t{
                        {H().xi.get(key(w, (int)p, k)), m_time}};
                    if (k >= 2) t.emplace_back(H().xi.get(key(w, (int)p, k - 1)), -m_time);
                    ir().add_row(std::move(t), Sense::Le,
                                 m_time + hi - static_cast<double>(grp.board_threshold()),
                                 "prop2_boarding");
                }
            }
        }
        for (int g : passenger_corridors) {
            const auto& co = inst.eptn.corridors[g];
            for (int k = 1; k <= trips(co.from_line); ++k) {
                const auto& tt = inst.trips[co.from_line][k - 1];
                double from_lo = static_cast<double>(win.depart_lo(co.from_line, k, co.from_stop));
                double bmin = static_cast<double>(tt.dwell_min[co.from_stop - 1]);
                for (int k2 = 1; k2 <= trips(co.to_line); ++k2) {
                    double to_hi = static_cast<double>(win.depart_hi(co.to_line, k2, co.to_stop));
                    double c = to_hi - from_lo + bmin - static_cast<double>(co.theta_min);
                    std::vector<std::pair<int, double>> t{{H().pi.get(key(g, k, k2)), m_time}};
                    if (k2 >= 2) t.emplace_back(H().pi.get(key(g, k, k2 - 1)), -m_time);
                    ir().add_row(std::move(t), Sense::Le, m_time + c, "prop3_transfer");
                }
            }
        }
    }

    void add_prop4() {
        for (size_t g = 0; g < inst.eptn.corridors.size(); ++g) {
            if (!reroutable[g]) continue;
            const auto& co = inst.eptn.corridors[g];
            for (int k = 1; k <= trips(co.from_line); ++k) {
                const auto& tt = inst.trips[co.from_line][k - 1];
                double from_lo = static_cast<double>(win.depart_lo(co.from_line, k, co.from_stop));
                double from_hi = static_cast<double>(win.depart_hi(co.from_line, k, co.from_stop));
                double bmin = static_cast<double>(tt.dwell_min[co.from_stop - 1]);
                double bmax = static_cast<double>(tt.dwell_max[co.from_stop - 1]);
                for (int k2 = 1; k2 <= trips(co.to_line); ++k2) {
                    int ev = H().e.get(key((int)g, k, k2));
                    if (ev < 0) continue;
                    double to_lo = static_cast<double>(win.depart_lo(co.to_line, k2, co.to_stop));
                    double to_hi = static_cast<double>(win.depart_hi(co.to_line, k2, co.to_stop));
                    double c1 = to_hi - from_lo + bmin - static_cast<double>(co.theta_min);
                    double c2 = static_cast<double>(co.theta_max) - to_lo + from_hi - bmax;
                    ir().add_row({{ev, m_time}}, Sense::Le, m_time + c1, "prop4_coupling");
                    ir().add_row({{ev, m_time}}, Sense::Le, m_time + c2, "prop4_coupling");
                }
            }
        }
    }

    // ---- subproblem pinning ----------------------------------------------

    void pin_first_stage() {
        const auto& f = *fixed;
        int w = only_scenario;
        for (int l = 0; l < inst.num_lines(); ++l)
            for (int k = 1; k <= trips(l); ++k)
                for (int i = 1; i <= stops(l); ++i) {
                    auto [lo, hi] = free_range(l, k, i);
                    Minutes d = f.depart[l][k - 1][i - 1];
                    for (int t = lo; t <= hi; ++t) {
                        double val = t <= d / D - 1 ? 1.0 : 0.0;
                        int zv = H().z.get(key(l, k, i, t));
                        int row = ir().num_rows();
                        ir().add_row({{zv, 1.0}}, Sense::Eq, val, "pin_z");
                        sub_out->pin_z_rows.push_back({row, key(l, k, i, t)});
                    }
                }
        const auto& sc = inst.scenarios[w];
        for (size_t p = 0; p < sc.groups.size(); ++p) {
            const auto& grp = sc.groups[p];
            const auto& legs = f.boarded[w][p];
            for (size_t leg = 0; leg < grp.lines.size(); ++leg)
                for (int k = 1; k <= trips(grp.lines[leg]); ++k) {
                    int cv = ir().add_var(sub("chi", {w, (int)p, (int)leg, k}), 0, 1,
                                          VarType::Continuous);
                    H().chi.put(key(w, (int)p, (int)leg, k), cv);
                    int row = ir().num_rows();
                    ir().add_row({{cv, 1.0}}, Sense::Eq, legs[leg] == k ? 1.0 : 0.0, "pin_chi");
                    sub_out->pin_chi_rows.push_back({row, key(w, (int)p, (int)leg, k)});
                }
            for (size_t leg = 0; leg + 1 < grp.lines.size(); ++leg) {
                const auto& co = inst.eptn.corridors[grp.corridors[leg]];
                for (int k = 1; k <= trips(co.from_line); ++k)
                    for (int k2 = 1; k2 <= trips(co.to_line); ++k2) {
                        int zv = ir().add_var(sub("zeta", {w, (int)p, (int)leg, k, k2}), 0, 1,
                                              VarType::Continuous);
                        H().zeta.put(key(w, (int)p, (int)leg, k, k2), zv);
                        double val = legs[leg] == k && legs[leg + 1] == k2 ? 1.0 : 0.0;
                        int row = ir().num_rows();
                        ir().add_row({{zv, 1.0}}, Sense::Eq, val, "pin_zeta");
                        sub_out->pin_zeta_rows.push_back({row, key(w, (int)p, (int)leg, k, k2)});
                    }
            }
        }
    }

    void relax_everything() {
        for (auto& v : ir().vars) v.type = VarType::Continuous;
    }

    void build() {
        add_timetable_vars();
        if (kind != BuildKind::Subproblem) add_passenger_first_stage();
        if (kind == BuildKind::Subproblem) pin_first_stage();

        if (kind != BuildKind::Master) {
            add_coupling_windows();
            int shared_key = kind == BuildKind::Subproblem ? only_scenario : -1;
            for (int w : scenario_list()) {
                add_formation_vars(w);
                add_reroutes(w);
                add_formation_flow(w);
                add_passenger_counts(w);
                add_transfer_waits(w);
                add_vehicle_scheduling(w, shared_key);
                add_strategy_fixings(w);
            }
        }
        if (kind != BuildKind::Subproblem) add_objective_origin_waits();

        if (kind == BuildKind::Master && include_eta) {
            // Bounds kept finite for the LP kernel.
            out.h.eta = ir().add_var("eta", eta_lb, eta_ub_estimate(), VarType::Continuous);
            ir().objective.add(out.h.eta, 1.0);
            ir().bound_families.push_back("eta_lower_bound");
        }

        if (vi) {
            ir().bound_families.push_back("prop1_window_fix");
            if (kind != BuildKind::Subproblem) add_prop2_prop3();
            if (kind != BuildKind::Master) add_prop4();
        }
        if (kind == BuildKind::Subproblem && sub_mode == SubproblemMode::LpRelaxed)
            relax_everything();
        out.z_window_fixed = z_fixing();
    }

    double eta_ub_estimate() const {
        double oper = 0.0;
        for (int l = 0; l < inst.num_lines(); ++l)
            for (int k = 1; k <= trips(l); ++k)
                for (int i = 1; i <= stops(l); ++i)
                    oper += inst.costs.vartheta(l, i, Q);
        double waits = 0.0;
        for (const auto& sc : inst.scenarios)
            for (const auto& g : sc.groups)
                waits += sc.probability * static_cast<double>(g.size) *
                         static_cast<double>(g.lines.size()) * m_time;
        return inst.costs.phi2 * oper +
               inst.costs.phi1 * inst.costs.wait_value *
                   std::max(inst.costs.eps1, inst.costs.eps2) * waits +
               1.0;
    }
};

std::vector<int> collect(const VarMap& m) {
    std::vector<int> out;
    for (const auto& [k, v] : m.all()) out.push_back(v);
    return out;
}

}  // namespace

BuiltModel build_monolithic(const Instance& inst, Strategy strategy, bool valid_inequalities) {
    Builder b(inst, BuildKind::Monolithic);
    b.strategy = strategy;
    b.vi = valid_inequalities;
    b.build();
    return std::move(b.out);
}

BuiltModel build_master(const Instance& inst, double eta_lower_bound, bool valid_inequalities,
                        bool include_eta) {
    Builder b(inst, BuildKind::Master);
    b.vi = valid_inequalities;
    b.eta_lb = eta_lower_bound;
    b.include_eta = include_eta;
    b.build();
    return std::move(b.out);
}

SubproblemBuild build_subproblem(const Instance& inst, int scenario, const FixedFirstStage& fixed,
                                 SubproblemMode mode, bool valid_inequalities) {
    SubproblemBuild result;
    Builder b(inst, BuildKind::Subproblem);
    b.only_scenario = scenario;
    b.fixed = &fixed;
    b.sub_mode = mode;
    b.vi = valid_inequalities;
    b.sub_out = &result;
    b.build();
    result.model = std::move(b.out);
    return result;
}

WatchedSet watched_master(const BuiltModel& m) {
    WatchedSet out;
    auto push = [&](const VarMap& vm, int level) {
        for (int v : collect(vm)) {
            out.vars.push_back(v);
            out.levels.push_back(level);
        }
    };
    push(m.h.z, 0);
    push(m.h.xi, 1);
    push(m.h.pi, 1);
    push(m.h.chi, 2);
    push(m.h.zeta, 2);
    return out;
}

WatchedSet watched_monolithic(const BuiltModel& m) {
    WatchedSet out = watched_master(m);
    auto push = [&](const VarMap& vm, int level) {
        for (int v : collect(vm)) {
            out.vars.push_back(v);
            out.levels.push_back(level);
        }
    };
    push(m.h.h, 3);
    push(m.h.y, 4);
    return out;
}

WatchedSet watched_subproblem(const BuiltModel& m) {
    WatchedSet out;
    auto push = [&](const VarMap& vm, int level) {
        for (int v : collect(vm)) {
            out.vars.push_back(v);
            out.levels.push_back(level);
        }
    };
    push(m.h.h, 0);
    push(m.h.y, 1);
    return out;
}

std::vector<int> watched_binaries_master(const BuiltModel& m) { return watched_master(m).vars; }

std::vector<int> watched_binaries_monolithic(const BuiltModel& m) {
    return watched_monolithic(m).vars;
}

std::vector<int> watched_binaries_subproblem(const BuiltModel& m) {
    return watched_subproblem(m).vars;
}

// ---------------------------------------------------------------------------

Timetable decode_timetable(const Instance& inst, const BuiltModel& m,
                           const std::vector<double>& x) {
    Timetable tt;
    const Minutes D = inst.grid.delta;
    tt.depart.resize(inst.num_lines());
    for (int l = 0; l < inst.num_lines(); ++l) {
        tt.depart[l].resize(inst.num_trips(l));
        for (int k = 1; k <= inst.num_trips(l); ++k) {
            tt.depart[l][k - 1].resize(inst.eptn.lines[l].num_stops());
            for (int i = 1; i <= inst.eptn.lines[l].num_stops(); ++i) {
                double d = x.at(m.h.depart.get(key(l, k, i)));
                tt.depart[l][k - 1][i - 1] = D * static_cast<Minutes>(std::llround(d / D));
            }
        }
    }
    FixedFirstStage f = make_first_stage(inst, tt.depart);
    tt.arrive = f.arrive;
    return tt;
}

CapacityPlan decode_plan(const Instance& inst, const BuiltModel& m, const std::vector<double>& x,
                         int scenario) {
    CapacityPlan plan;
    plan.scenario = scenario;
    plan.formation.resize(inst.num_lines());
    for (int l = 0; l < inst.num_lines(); ++l) {
        plan.formation[l].resize(inst.num_trips(l));
        for (int k = 1; k <= inst.num_trips(l); ++k) {
            plan.formation[l][k - 1].resize(inst.eptn.lines[l].num_stops());
            for (int i = 1; i <= inst.eptn.lines[l].num_stops(); ++i) {
                long long q = 0;
                for (int qq = 1; qq <= inst.costs.max_formation; ++qq) {
                    int yv = m.h.y.get(key(scenario, l, k, i, qq));
                    if (yv >= 0 && x[yv] > 0.5) q = qq;
                }
                plan.formation[l][k - 1][i - 1] = q;
            }
        }
    }
    for (const auto& [hk, hv] : m.h.h.all()) {
        if (hk[0] != scenario || x[hv] < 0.5) continue;
        int g = hk[1], k = hk[2], k2 = hk[3];
        const auto& co = inst.eptn.corridors[g];
        long long units = plan.formation[co.to_line][k2 - 1][co.to_stop - 1] -
                          plan.formation[co.to_line][k2 - 1][co.to_stop - 2];
        plan.moves.push_back({g, k, k2, units});
    }
    // Minimal depot stocks implied by the decoded flows.
    plan.kappa.assign(inst.eptn.depots.size(), 0);
    for (size_t mm = 0; mm < inst.eptn.depots.size(); ++mm) {
        long long need = 0;
        for (int t = 1; t <= inst.grid.horizon; ++t) {
            int dvv = m.h.dv.get(key(scenario, (int)mm, t));
            int avv = m.h.av.get(key(scenario, (int)mm, t));
            if (dvv < 0 || avv < 0) continue;
            need = std::max(need, static_cast<long long>(std::llround(x[dvv] - x[avv])));
        }
        plan.kappa[mm] = need;
    }
    return plan;
}

void add_valid_inequalities(BuiltModel& model, const DepartureWindows& win,
                            const Instance& inst) {
    ModelIr& ir = model.ir;
    const Minutes D = inst.grid.delta;
    double M = model.big_m_time;
    // Window fixings on z (and therefore on the departure bounds).
    for (const auto& [kk, v] : model.h.z.all()) {
        int l = kk[0], k = kk[1], i = kk[2], t = kk[3];
        if (t <= win.depart_lo(l, k, i) / D - 1)
            ir.vars[v].lo = 1.0;
        else if (t >= win.depart_hi(l, k, i) / D)
            ir.vars[v].up = 0.0;
    }
    ir.bound_families.push_back("prop1_window_fix");
    // Boarding inequality per (scenario, group, trip).
    for (const auto& [kk, xv] : model.h.xi.all()) {
        int w = kk[0], p = kk[1], k = kk[2];
        const auto& grp = inst.scenarios[w].groups[p];
        double hi = static_cast<double>(win.depart_hi(grp.lines[0], k, grp.origin_stop));
        std::vector<std::pair<int, double>> t{{xv, M}};
        if (k >= 2) t.emplace_back(model.h.xi.get(key(w, p, k - 1)), -M);
        ir.add_row(std::move(t), Sense::Le, M + hi - static_cast<double>(grp.board_threshold()),
                   "prop2_boarding");
    }
    // Transfer inequality per corridor trip pair.
    for (const auto& [kk, pv] : model.h.pi.all()) {
        int g = kk[0], k = kk[1], k2 = kk[2];
        const auto& co = inst.eptn.corridors[g];
        const auto& tt = inst.trips[co.from_line][k - 1];
        double c = static_cast<double>(win.depart_hi(co.to_line, k2, co.to_stop)) -
                   static_cast<double>(win.depart_lo(co.from_line, k, co.from_stop)) +
                   static_cast<double>(tt.dwell_min[co.from_stop - 1]) -
                   static_cast<double>(co.theta_min);
        std::vector<std::pair<int, double>> t{{pv, M}};
        if (k2 >= 2) t.emplace_back(model.h.pi.get(key(g, k, k2 - 1)), -M);
        ir.add_row(std::move(t), Sense::Le, M + c, "prop3_transfer");
    }
    // Two-sided coupling inequality on e.
    for (const auto& [kk, ev] : model.h.e.all()) {
        int g = kk[0], k = kk[1], k2 = kk[2];
        const auto& co = inst.eptn.corridors[g];
        const auto& tt = inst.trips[co.from_line][k - 1];
        double bmin = static_cast<double>(tt.dwell_min[co.from_stop - 1]);
        double bmax = static_cast<double>(tt.dwell_max[co.from_stop - 1]);
        double c1 = static_cast<double>(win.depart_hi(co.to_line, k2, co.to_stop)) -
                    static_cast<double>(win.depart_lo(co.from_line, k, co.from_stop)) + bmin -
                    static_cast<double>(co.theta_min);
        double c2 = static_cast<double>(co.theta_max) -
                    static_cast<double>(win.depart_lo(co.to_line, k2, co.to_stop)) +
                    static_cast<double>(win.depart_hi(co.from_line, k, co.from_stop)) - bmax;
        ir.add_row({{ev, M}}, Sense::Le, M + c1, "prop4_coupling");
        ir.add_row({{ev, M}}, Sense::Le, M + c2, "prop4_coupling");
    }
}

std::vector<double> vectorize_solution(const Instance& inst, const BuiltModel& m,
                                       const FixedFirstStage& fixed,
                                       const std::vector<CapacityPlan>& plans) {
    std::vector<double> x(m.ir.num_vars(), 0.0);
    const Minutes D = inst.grid.delta;
    for (const auto& [kk, v] : m.h.z.all()) {
        Minutes d = fixed.depart[kk[0]][kk[1] - 1][kk[2] - 1];
        x[v] = kk[3] <= d / D - 1 ? 1.0 : 0.0;
    }
    for (const auto& [kk, v] : m.h.xi.all()) {
        const auto& grp = inst.scenarios[kk[0]].groups[kk[1]];
        Minutes d = fixed.depart[grp.lines[0]][kk[2] - 1][grp.origin_stop - 1];
        x[v] = d >= grp.board_threshold() ? 1.0 : 0.0;
    }
    for (const auto& [kk, v] : m.h.pi.all()) {
        const auto& co = inst.eptn.corridors[kk[0]];
        Minutes gap = fixed.depart[co.to_line][kk[2] - 1][co.to_stop - 1] -
                      fixed.arrive[co.from_line][kk[1] - 1][co.from_stop - 1];
        x[v] = gap >= co.theta_min ? 1.0 : 0.0;
    }
    for (const auto& [kk, v] : m.h.chi.all())
        x[v] = fixed.boarded[kk[0]][kk[1]][kk[2]] == kk[3] ? 1.0 : 0.0;
    for (const auto& [kk, v] : m.h.zeta.all()) {
        const auto& legs = fixed.boarded[kk[0]][kk[1]];
        x[v] = legs[kk[2]] == kk[3] && legs[kk[2] + 1] == kk[4] ? 1.0 : 0.0;
    }
    for (const auto& [kk, v] : m.h.y.all()) {
        int w = kk[0];
        long long q = plans.at(w).formation[kk[1]][kk[2] - 1][kk[3] - 1];
        x[v] = q == kk[4] ? 1.0 : 0.0;
    }
    for (const auto& [kk, v] : m.h.h.all()) {
        for (const auto& mv : plans.at(kk[0]).moves)
            if (mv.corridor == kk[1] && mv.from_trip == kk[2] && mv.to_trip == kk[3]) x[v] = 1.0;
    }
    return reconstruct_solution(inst, m, x);
}

// Rebuilds every derived quantity exactly from the rounded watched binaries,
// so objective values are exact dyadic rationals and feasibility checks are
// noise-free.
std::vector<double> reconstruct_solution(const Instance& inst, const BuiltModel& m,
                                         const std::vector<double>& x) {
    std::vector<double> out = x;
    const Minutes D = inst.grid.delta;
    const int T = inst.grid.horizon;
    DepartureWindows win = compute_departure_windows(inst);

    for (const auto& [k, v] : m.h.z.all()) out[v] = std::round(out[v]);
    for (const auto* vm : {&m.h.xi, &m.h.pi, &m.h.chi, &m.h.zeta, &m.h.y, &m.h.h})
        for (const auto& [k, v] : vm->all()) out[v] = std::round(out[v]);

    auto zval = [&](int l, int k, int i, int t) -> double {
        int v = m.h.z.get(key(l, k, i, t));
        if (v >= 0) return out[v];
        if (!m.z_window_fixed) return 0.0;
        return t <= win.depart_lo(l, k, i) / D - 1 ? 1.0 : 0.0;
    };

    // Timetable chain.
    std::vector<std::vector<std::vector<Minutes>>> dep(inst.num_lines());
    for (int l = 0; l < inst.num_lines(); ++l) {
        dep[l].resize(inst.num_trips(l));
        for (int k = 1; k <= inst.num_trips(l); ++k) {
            const auto& tt = inst.trips[l][k - 1];
            dep[l][k - 1].resize(inst.eptn.lines[l].num_stops());
            for (int i = 1; i <= inst.eptn.lines[l].num_stops(); ++i) {
                long long ones = 0;
                for (int t = 1; t <= T; ++t) ones += zval(l, k, i, t) > 0.5 ? 1 : 0;
                Minutes d = D * (1 + ones);
                dep[l][k - 1][i - 1] = d;
                if (int dv = m.h.depart.get(key(l, k, i)); dv >= 0)
                    out[dv] = static_cast<double>(d);
            }
            Minutes alpha =
                std::max(tt.shift_min, dep[l][k - 1][0] - tt.origin_time - tt.dwell_max[0]);
            Minutes a = tt.origin_time + alpha;
            if (int av = m.h.shift.get(key(l, k)); av >= 0) out[av] = static_cast<double>(alpha);
            for (int i = 1; i <= inst.eptn.lines[l].num_stops(); ++i) {
                if (i >= 2) a = dep[l][k - 1][i - 2] + tt.run_times[i - 2];
                if (int avv = m.h.arrive.get(key(l, k, i)); avv >= 0)
                    out[avv] = static_cast<double>(a);
                if (int bv = m.h.dwell.get(key(l, k, i)); bv >= 0)
                    out[bv] = static_cast<double>(dep[l][k - 1][i - 1] - a);
            }
        }
    }
    auto arrive_of = [&](int l, int k, int i) -> Minutes {
        const auto& tt = inst.trips[l][k - 1];
        if (i >= 2) return dep[l][k - 1][i - 2] + tt.run_times[i - 2];
        Minutes alpha = std::max(tt.shift_min, dep[l][k - 1][0] - tt.origin_time - tt.dwell_max[0]);
        return tt.origin_time + alpha;
    };

    // gamma from pi; lambda from chi * d.
    for (const auto& [kk, gv] : m.h.gamma.all()) {
        int g = kk[0], k = kk[1], k2 = kk[2];
        double prev = k2 >= 2 ? out[m.h.pi.get(key(g, k, k2 - 1))] : 0.0;
        out[gv] = out[m.h.pi.get(key(g, k, k2))] - prev;
    }
    for (const auto& [kk, lv] : m.h.lambda_hat.all()) {
        int w = kk[0], p = kk[1], k = kk[2];
        const auto& grp = inst.scenarios[w].groups[p];
        double chi = out[m.h.chi.get(key(w, p, 0, k))];
        out[lv] = chi * static_cast<double>(dep[grp.lines[0]][k - 1][grp.origin_stop - 1]);
    }

    // Second stage: x from y, coupling windows from the timetable, products.
    for (const auto& [kk, xv] : m.h.x.all()) {
        int w = kk[0], l = kk[1], k = kk[2], i = kk[3];
        double q = 0;
        for (int qq = 1; qq <= inst.costs.max_formation; ++qq)
            if (out[m.h.y.get(key(w, l, k, i, qq))] > 0.5) q = qq;
        out[xv] = q;
    }
    for (const auto& [kk, ev] : m.h.e.all()) {
        int g = kk[0], k = kk[1], k2 = kk[2];
        const auto& co = inst.eptn.corridors[g];
        Minutes gap = dep[co.to_line][k2 - 1][co.to_stop - 1] -
                      arrive_of(co.from_line, k, co.from_stop);
        double ed = gap >= co.theta_min ? 1.0 : 0.0;
        double eh = gap <= co.theta_max ? 1.0 : 0.0;
        out[m.h.edot.get(key(g, k, k2))] = ed;
        out[m.h.ehat.get(key(g, k, k2))] = eh;
        out[ev] = ed * eh;
    }
    auto product4 = [&](const VarMap& dst, const VarMap& hsrc, bool reverse_h, bool prev_stop) {
        for (const auto& [kk, pv] : dst.all()) {
            int w = kk[0], g = kk[1], k = kk[2], k2 = kk[3];
            const auto& co = inst.eptn.corridors[g];
            int grev = inst.eptn.reverse_corridor(g);
            double hval = reverse_h ? out[hsrc.get(key(w, grev, k2, k))]
                                    : out[hsrc.get(key(w, g, k, k2))];
            int stop = prev_stop ? co.to_stop - 1 : co.to_stop;
            double xval = out[m.h.x.get(key(w, co.to_line, k2, stop))];
            out[pv] = hval * xval;
        }
    };
    product4(m.h.hh1, m.h.h, true, true);
    product4(m.h.hh2, m.h.h, true, false);
    product4(m.h.hh3, m.h.h, false, false);
    product4(m.h.hh4, m.h.h, false, true);
    for (const auto& [kk, mv] : m.h.mu.all()) {
        int w = kk[0], l = kk[1], k = kk[2], i = kk[3], t = kk[4];
        out[mv] = zval(l, k, i, t) * out[m.h.x.get(key(w, l, k, i))];
    }

    // Passenger counts from chi.
    for (const auto& [kk, bv] : m.h.board.all()) {
        int w = kk[0], l = kk[1], k = kk[2], i = kk[3];
        const auto& sc = inst.scenarios[w];
        double b = 0, c = 0;
        for (size_t p = 0; p < sc.groups.size(); ++p) {
            const auto& grp = sc.groups[p];
            for (size_t leg = 0; leg < grp.lines.size(); ++leg) {
                if (grp.lines[leg] != l) continue;
                double chi = out[m.h.chi.get(key(w, (int)p, (int)leg, k))];
                if (group_board_stop(inst, grp, (int)leg) == i)
                    b += chi * static_cast<double>(grp.size);
                if (group_alight_stop(inst, grp, (int)leg) == i)
                    c += chi * static_cast<double>(grp.size);
            }
        }
        out[bv] = b;
        out[m.h.alight.get(key(w, l, k, i))] = c;
        double prev = i >= 2 ? out[m.h.load.get(key(w, l, k, i - 1))] : 0.0;
        out[m.h.load.get(key(w, l, k, i))] = prev + b - c;
    }

    // Transfer wait products.
    for (const auto& [kk, pv] : m.h.psi_tilde.all()) {
        int w = kk[0], p = kk[1], leg = kk[2], k = kk[3], k2 = kk[4];
        const auto& grp = inst.scenarios[w].groups[p];
        int g = grp.corridors[leg];
        const auto& co = inst.eptn.corridors[g];
        double zeta = out[m.h.zeta.get(key(w, p, leg, k, k2))];
        int hv = m.h.h.get(key(w, g, k, k2));
        double hval = hv >= 0 ? out[hv] : 0.0;
        double pt = zeta * (1.0 - hval);
        out[pv] = pt;
        out[m.h.psi_dot.get(key(w, p, leg, k, k2))] =
            pt * static_cast<double>(dep[co.to_line][k2 - 1][co.to_stop - 1]);
        out[m.h.psi_hat.get(key(w, p, leg, k, k2))] =
            pt * static_cast<double>(arrive_of(co.from_line, k, co.from_stop));
    }

    // Depot flows and minimal stocks.
    for (const auto& [kk, avv] : m.h.av.all()) {
        int w = kk[0], mm = kk[1], t = kk[2];
        const auto& depo = inst.eptn.depots[mm];
        int prep = static_cast<int>(depo.prep_time / D);
        double av = inst.stage.inflow_const.empty() ? 0.0 : inst.stage.inflow_const[w][mm][t - 1];
        for (int l : depo.ll_lines)
            for (int k = 1; k <= inst.num_trips(l); ++k) {
                int tp = t - prep;
                if (tp < 1) continue;  // certainly not returned yet
                int i = inst.eptn.lines[l].num_stops();
                double z = tp > T ? 0.0 : zval(l, k, i, tp);
                if (z < 0.5) av += out[m.h.x.get(key(w, l, k, i))];
            }
        out[avv] = av;
        double dv =
            inst.stage.outflow_const.empty() ? 0.0 : inst.stage.outflow_const[w][mm][t - 1];
        for (int l : depo.fl_lines)
            for (int k = 1; k <= inst.num_trips(l); ++k)
                if (zval(l, k, 1, t) < 0.5) dv += out[m.h.x.get(key(w, l, k, 1))];
        out[m.h.dv.get(key(w, mm, t))] = dv;
    }
    std::map<int, std::map<int, double>> kappa_need;  // kappa key -> depot -> need
    for (const auto& [kk, kv] : m.h.kappa.all()) kappa_need[kk[0]][kk[1]] = 0.0;
    for (const auto& [kk, avv] : m.h.av.all()) {
        int w = kk[0], mm = kk[1], t = kk[2];
        double need = out[m.h.dv.get(key(w, mm, t))] - out[avv];
        for (auto& [shared, per_depot] : kappa_need)
            if (shared == w || shared == -1)
                per_depot[mm] = std::max(per_depot[mm], need);
    }
    for (const auto& [kk, kv] : m.h.kappa.all()) out[kv] = kappa_need[kk[0]][kk[1]];
    return out;
}

}  // namespace mav

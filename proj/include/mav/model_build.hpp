#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "mav/instance.hpp"
#include "mav/model_ir.hpp"

namespace mav {

enum class Strategy { Fixed, PartiallyFlexible, CompletelyFlexible };

// Earliest / latest departure minute per (line, trip, stop), accumulated from
// shift, dwell and run-time bounds.
struct DepartureWindows {
    // [line][trip][stop-1] -> minutes
    std::vector<std::vector<std::vector<Minutes>>> lo, hi;

    Minutes depart_lo(int l, int k1, int i1) const { return lo[l][k1 - 1][i1 - 1]; }
    Minutes depart_hi(int l, int k1, int i1) const { return hi[l][k1 - 1][i1 - 1]; }
    // Arrival extremes: departure window shifted by the dwell bound at the stop.
    Minutes arrive_lo(const Instance& inst, int l, int k1, int i1) const;
    Minutes arrive_hi(const Instance& inst, int l, int k1, int i1) const;
};

DepartureWindows compute_departure_windows(const Instance& inst);

// First-stage candidate: timetable plus the derived passenger assignment.
struct FixedFirstStage {
    // [line][trip][stop-1] -> departure / arrival minute
    std::vector<std::vector<std::vector<Minutes>>> depart, arrive;
    // boarded[w][p][leg] = trip index (1-based) on that leg's line, or 0 when
    // the group never boards that leg (stranded from there on).
    std::vector<std::vector<std::vector<int>>> boarded;
};

// Derives arrivals and the forced first-available assignment from departures.
FixedFirstStage make_first_stage(const Instance& inst,
                                 const std::vector<std::vector<std::vector<Minutes>>>& depart);

// Semantic handle table: maps subscripted paper-style variables to IR indices.
struct VarKey : std::array<int, 6> {};

class VarMap {
  public:
    void put(VarKey k, int idx) { m_[k] = idx; }
    int get(VarKey k) const {
        auto it = m_.find(k);
        return it == m_.end() ? -1 : it->second;
    }
    const std::map<VarKey, int>& all() const { return m_; }

  private:
    std::map<VarKey, int> m_;
};

inline VarKey key(int a = -1, int b = -1, int c = -1, int d = -1, int e = -1, int f = -1) {
    return VarKey{{a, b, c, d, e, f}};
}

struct Handles {
    VarMap z;                   // (l,k,i,t)
    VarMap depart, arrive;      // (l,k,i)
    VarMap shift;               // (l,k)
    VarMap dwell;               // (l,k,i)
    VarMap xi;                  // (w,p,k)
    VarMap pi, gamma;           // (g,k,k2)
    VarMap chi;                 // (w,p,leg,k)
    VarMap zeta;                // (w,p,leg,k,k2)  leg indexes the corridor in the path
    VarMap lambda_hat;          // (w,p,k)
    VarMap x;                   // (w,l,k,i)
    VarMap y;                   // (w,l,k,i,q)
    VarMap h;                   // (w,g,k,k2)
    VarMap kappa;               // (w,m); w = -1 when shared across scenarios
    VarMap e, edot, ehat;       // (g,k,k2)
    VarMap mu;                  // (w,l,k,i,t)
    VarMap av, dv;              // (w,m,t)
    VarMap board, alight, load; // (w,l,k,i)
    VarMap psi_tilde, psi_dot, psi_hat;  // (w,p,leg,k,k2)
    VarMap hh1, hh2, hh3, hh4;  // (w,g,k,k2)
    int eta = -1;
};

struct BuiltModel {
    ModelIr ir;
    Handles h;
    // Free z positions (window interior) when window fixing is applied; the
    // full t-range otherwise. Used for snapshots and cut construction.
    std::vector<std::array<int, 4>> free_z;  // (l,k,i,t)
    double big_m_time = 0.0;
    bool z_window_fixed = false;
};

struct BuildOptions {
    bool valid_inequalities = true;
    Strategy strategy = Strategy::CompletelyFlexible;
};

BuiltModel build_monolithic(const Instance& inst, Strategy strategy,
                            bool valid_inequalities = true);
// `include_eta = false` yields the wait-only timetabling model used as the
// first step of the sequential baseline.
BuiltModel build_master(const Instance& inst, double eta_lower_bound,
                        bool valid_inequalities = true, bool include_eta = true);

enum class SubproblemMode { Integer, LpRelaxed };

struct SubproblemBuild {
    BuiltModel model;
    // Pin rows (z, chi, zeta) whose duals form the subgradient, keyed by the
    // master variable they pin.
    std::vector<std::pair<int, VarKey>> pin_z_rows;      // row -> (l,k,i,t)
    std::vector<std::pair<int, VarKey>> pin_chi_rows;    // row -> (w,p,leg,k)
    std::vector<std::pair<int, VarKey>> pin_zeta_rows;   // row -> (w,p,leg,k,k2)
};

SubproblemBuild build_subproblem(const Instance& inst, int scenario, const FixedFirstStage& fixed,
                                 SubproblemMode mode, bool valid_inequalities = true);

// Applies the window fixings plus the boarding / transfer / coupling
// inequalities to an already-built model (normally the builder emits them
// with `valid_inequalities = true`; this is the standalone route).
void add_valid_inequalities(BuiltModel& model, const DepartureWindows& windows,
                            const Instance& inst);

// Watched binaries for branch and cut, in deterministic order, with
// branching classes (timetable first, then eligibility, then assignment,
// then second-stage binaries).
struct WatchedSet {
    std::vector<int> vars;
    std::vector<int> levels;
};
WatchedSet watched_master(const BuiltModel& m);
WatchedSet watched_monolithic(const BuiltModel& m);
WatchedSet watched_subproblem(const BuiltModel& m);
std::vector<int> watched_binaries_master(const BuiltModel& m);
std::vector<int> watched_binaries_monolithic(const BuiltModel& m);
std::vector<int> watched_binaries_subproblem(const BuiltModel& m);

// Decoded artifacts -------------------------------------------------------

struct Timetable {
    // [line][trip][stop-1]
    std::vector<std::vector<std::vector<Minutes>>> depart, arrive;
};

struct MoveOp {
    int corridor = -1;
    int from_trip = 0, to_trip = 0;  // 1-based
    long long units = 0;
};

struct CapacityPlan {
    int scenario = -1;
    std::vector<std::vector<std::vector<long long>>> formation;  // [line][trip][stop-1]
    std::vector<MoveOp> moves;
    std::vector<long long> kappa;  // per depot
    double transfer_wait_cost = 0.0;  // weighted, scenario-local (no probability)
    double oper_cost = 0.0;           // weighted, scenario-local (no probability)
};

Timetable decode_timetable(const Instance& inst, const BuiltModel& m,
                           const std::vector<double>& x);
CapacityPlan decode_plan(const Instance& inst, const BuiltModel& m, const std::vector<double>& x,
                         int scenario);

// Reconstructs every derived variable exactly from the decoded binaries so the
// resulting vector satisfies the model rows at rational-grid precision.
std::vector<double> reconstruct_solution(const Instance& inst, const BuiltModel& m,
                                         const std::vector<double>& x);

// Encodes a (timetable, per-scenario plans) pair as a full model vector; used
// to re-evaluate stitched or externally built plans against every family.
std::vector<double> vectorize_solution(const Instance& inst, const BuiltModel& m,
                                       const FixedFirstStage& fixed,
                                       const std::vector<CapacityPlan>& plans);

// Cost pieces of a (timetable, plans) pair, evaluated from first principles.
struct CostBreakdown {
    double origin_wait = 0.0;     // weighted by phi1*eps1*theta_T and probabilities
    double transfer_wait = 0.0;   // weighted by phi1*eps2*theta_T and probabilities
    double oper = 0.0;            // weighted by phi2 and probabilities
    double total() const { return origin_wait + transfer_wait + oper; }
};

}  // namespace mav

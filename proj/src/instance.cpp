#include "mav/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace mav {

using nlohmann::json;

int Instance::total_trips() const {
    int n = 0;
    for (const auto& t : trips) n += static_cast<int>(t.size());
    return n;
}

int group_board_stop(const Instance& inst, const PassengerGroup& p, int leg) {
    if (leg == 0) return p.origin_stop;
    return inst.eptn.corridors.at(p.corridors.at(leg - 1)).to_stop;
}

int group_alight_stop(const Instance& inst, const PassengerGroup& p, int leg) {
    if (leg + 1 == static_cast<int>(p.lines.size())) return p.dest_stop;
    return inst.eptn.corridors.at(p.corridors.at(leg)).from_stop;
}

namespace {

void check(bool cond, const std::string& what) {
    if (!cond) throw SemanticError(what);
}

void validate_group(const Instance& inst, int w, const PassengerGroup& p) {
    const std::string tag = "scenario " + std::to_string(w) + " group " + std::to_string(p.group_id);
    check(p.size >= 1, tag + ": size must be >= 1");
    check(p.arrival_time >= 0 && p.arrival_time <= inst.grid.span(),
          tag + ": arrival time outside horizon");
    check(p.arrival_time % inst.grid.delta == 0, tag + ": arrival time off the grid");
    check(p.board_threshold() % inst.grid.delta == 0, tag + ": boarding threshold off the grid");
    check(!p.lines.empty(), tag + ": empty line sequence");
    check(p.corridors.size() + 1 == p.lines.size(),
          tag + ": corridor sequence must link consecutive lines of the line sequence");
    for (int leg = 0; leg + 1 < static_cast<int>(p.lines.size()); ++leg) {
        const auto& c = inst.eptn.corridors.at(p.corridors[leg]);
        check(c.from_line == p.lines[leg] && c.to_line == p.lines[leg + 1],
              tag + ": corridor " + std::to_string(p.corridors[leg]) +
                  " does not connect consecutive lines of the path");
    }
    for (size_t leg = 0; leg < p.lines.size(); ++leg) {
        int board = group_board_stop(inst, p, static_cast<int>(leg));
        int alight = group_alight_stop(inst, p, static_cast<int>(leg));
        const auto& lg = inst.eptn.lines.at(p.lines[leg]);
        check(board >= 1 && board <= lg.num_stops(), tag + ": board stop off line");
        check(alight >= 1 && alight <= lg.num_stops(), tag + ": alight stop off line");
        check(board < alight, tag + ": leg must board strictly before alighting");
    }
}

}  // namespace

void validate_instance(const Instance& inst) {
    check(inst.grid.delta > 0, "grid delta must be positive");
    check(inst.grid.horizon >= 1, "grid horizon must be >= 1");
    check(static_cast<int>(inst.trips.size()) == inst.num_lines(), "trip lists per line mismatch");
    check(static_cast<int>(inst.headways.size()) == inst.num_lines(), "headways per line mismatch");
    check(inst.costs.cap_per_unit > 0, "CAP must be positive");
    check(inst.costs.max_formation >= 1, "formation set must be 1..Q with Q >= 1");
    check(inst.costs.max_units >= inst.total_trips(),
          "budget B must cover at least one unit per trip");
    check(!inst.scenarios.empty(), "at least one scenario required");
    check(static_cast<int>(inst.costs.unit_cost.size()) == inst.num_lines(),
          "unit cost table per line mismatch");

    const Minutes D = inst.grid.delta;
    for (const auto& c : inst.eptn.corridors)
        check(c.theta_min % D == 0 && c.theta_max % D == 0, "corridor window off the grid");
    for (const auto& d : inst.eptn.depots)
        check(d.prep_time % D == 0, "depot preparation time off the grid");
    for (int l = 0; l < inst.num_lines(); ++l) {
        const auto& lg = inst.eptn.lines[l];
        check(inst.headways[l].min <= inst.headways[l].max, "headway min > max on line " + lg.line_id);
        check(inst.headways[l].min % D == 0 && inst.headways[l].max % D == 0,
              "headway off the grid on line " + lg.line_id);
        check(static_cast<int>(inst.costs.unit_cost[l].size()) == lg.num_stops(),
              "unit cost table stop count mismatch on line " + lg.line_id);
        for (const auto& per_stop : inst.costs.unit_cost[l]) {
            check(static_cast<int>(per_stop.size()) == inst.costs.max_formation,
                  "unit cost table formation count mismatch on line " + lg.line_id);
            for (size_t q = 0; q < per_stop.size(); ++q) {
                check(per_stop[q] >= 0, "unit costs must be non-negative");
                if (q > 0)
                    check(per_stop[q] >= per_stop[q - 1],
                          "unit costs must be non-decreasing in the formation size");
            }
        }
        Minutes prev_latest = -1;
        for (size_t k = 0; k < inst.trips[l].size(); ++k) {
            const auto& tt = inst.trips[l][k];
            const std::string tag = "line " + lg.line_id + " trip " + std::to_string(k + 1);
            check(static_cast<int>(tt.run_times.size()) == lg.num_sections(),
                  tag + ": run time per section mismatch");
            for (Minutes r : tt.run_times)
                check(r > 0 && r % D == 0, tag + ": run times must be positive grid multiples");
            check(tt.shift_min <= tt.shift_max, tag + ": shift bounds inverted");
            check(tt.shift_min % D == 0 && tt.shift_max % D == 0,
                  tag + ": shift bounds off the grid");
            check(static_cast<int>(tt.dwell_min.size()) == lg.num_stops() &&
                      static_cast<int>(tt.dwell_max.size()) == lg.num_stops(),
                  tag + ": dwell bounds per stop mismatch");
            for (int i = 0; i < lg.num_stops(); ++i) {
                check(tt.dwell_min[i] >= 0 && tt.dwell_min[i] <= tt.dwell_max[i],
                      tag + ": dwell bounds inverted");
                check(tt.dwell_min[i] % D == 0 && tt.dwell_max[i] % D == 0,
                      tag + ": dwell bounds off the grid");
            }
            check(tt.origin_time % inst.grid.delta == 0, tag + ": origin time off the grid");
            Minutes latest = tt.origin_time + tt.shift_max;
            for (int i = 0; i < lg.num_stops(); ++i) latest += tt.dwell_max[i];
            for (Minutes r : tt.run_times) latest += r;
            check(prev_latest <= latest, tag + ": latest departures must be non-decreasing in k");
            prev_latest = latest;
        }
    }

    double prob_sum = 0.0;
    for (const auto& sc : inst.scenarios) {
        check(sc.probability > 0.0 && sc.probability <= 1.0,
              "scenario " + std::to_string(sc.scenario_id) + ": probability outside (0,1]");
        prob_sum += sc.probability;
        for (const auto& g : sc.groups) validate_group(inst, sc.scenario_id, g);
    }
    if (!inst.scenarios.empty())
        check(std::abs(prob_sum - 1.0) <= 1e-9, "scenario probabilities sum to " +
                                                    std::to_string(prob_sum) + ", expected 1");

    auto violations = validate_eptn(inst.eptn);
    if (!violations.empty())
        throw SemanticError("network invalid: " + violations.front().entity + ": " +
                            violations.front().rule);
}

// ---------------------------------------------------------------------------
// JSON serialization. Keys are emitted sorted (nlohmann objects are ordered
// maps), arrays in declaration order, so serialization is canonical.

namespace {

json corridor_to_json(const Instance& inst, int g) {
    const auto& c = inst.eptn.corridors.at(g);
    return json::array({inst.eptn.lines[c.from_line].line_id, c.from_stop,
                        inst.eptn.lines[c.to_line].line_id, c.to_stop});
}

int corridor_from_json(const Instance& inst, const json& j) {
    int fl = inst.eptn.line_index(j.at(0).get<std::string>());
    int tl = inst.eptn.line_index(j.at(2).get<std::string>());
    int g = inst.eptn.corridor_index(fl, j.at(1).get<int>(), tl, j.at(3).get<int>());
    if (g < 0) throw ParseError("unknown corridor " + j.dump());
    return g;
}

}  // namespace

std::string serialize_instance(const Instance& inst) {
    json j;
    json net;
    net["nodes"] = inst.ptn.nodes;
    json edges = json::array();
    for (const auto& [a, b] : inst.ptn.edges) edges.push_back(json::array({a, b}));
    net["edges"] = edges;
    json paths = json::array();
    for (const auto& [name, stops] : inst.ptn.line_paths)
        paths.push_back(json{{"name", name}, {"stops", stops}});
    net["line_paths"] = paths;
    json cw;
    if (inst.corridor_windows.default_window)
        cw["default"] = json::array({inst.corridor_windows.default_window->first,
                                     inst.corridor_windows.default_window->second});
    json overrides = json::object();
    for (const auto& [node, win] : inst.corridor_windows.per_node)
        overrides[node] = json::array({win.first, win.second});
    cw["per_node"] = overrides;
    net["corridor_windows"] = cw;
    json prep;
    prep["default"] = inst.depot_prep.default_prep;
    json prep_nodes = json::object();
    for (const auto& [node, t] : inst.depot_prep.per_node) prep_nodes[node] = t;
    prep["per_node"] = prep_nodes;
    net["prep_times"] = prep;
    j["network"] = net;

    j["grid"] = json{{"delta", inst.grid.delta}, {"horizon", inst.grid.horizon}};

    json trips = json::array();
    for (int l = 0; l < inst.num_lines(); ++l) {
        json per_line = json::array();
        for (const auto& tt : inst.trips[l]) {
            per_line.push_back(json{{"origin_time", tt.origin_time},
                                    {"run_times", tt.run_times},
                                    {"shift_min", tt.shift_min},
                                    {"shift_max", tt.shift_max},
                                    {"dwell_min", tt.dwell_min},
                                    {"dwell_max", tt.dwell_max}});
        }
        trips.push_back(json{{"line", inst.eptn.lines[l].line_id}, {"trips", per_line}});
    }
    j["trips"] = trips;

    json headways = json::array();
    for (int l = 0; l < inst.num_lines(); ++l)
        headways.push_back(json{{"line", inst.eptn.lines[l].line_id},
                                {"min", inst.headways[l].min},
                                {"max", inst.headways[l].max}});
    j["headways"] = headways;

    json costs;
    costs["cap"] = inst.costs.cap_per_unit;
    costs["B"] = inst.costs.max_units;
    costs["Q"] = inst.costs.max_formation;
    costs["theta_T"] = inst.costs.wait_value;
    costs["weights"] = json{{"eps1", inst.costs.eps1},
                            {"eps2", inst.costs.eps2},
                            {"phi1", inst.costs.phi1},
                            {"phi2", inst.costs.phi2}};
    costs["vartheta_table"] = inst.costs.unit_cost;
    j["costs"] = costs;

    json scenarios = json::array();
    for (const auto& sc : inst.scenarios) {
        json groups = json::array();
        for (const auto& g : sc.groups) {
            json lines = json::array();
            for (int l : g.lines) lines.push_back(inst.eptn.lines[l].line_id);
            json corrs = json::array();
            for (int c : g.corridors) corrs.push_back(corridor_to_json(inst, c));
            groups.push_back(json{{"size", g.size},
                                  {"arrival", g.arrival_time},
                                  {"origin_stop", g.origin_stop},
                                  {"dest_stop", g.dest_stop},
                                  {"lines", lines},
                                  {"corridors", corrs}});
        }
        scenarios.push_back(json{{"probability", sc.probability}, {"groups", groups}});
    }
    j["scenarios"] = scenarios;
    return j.dump(2) + "\n";
}

Instance parse_instance(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    Instance inst;
    try {
        const auto& net = j.at("network");
        inst.ptn.nodes = net.at("nodes").get<std::vector<std::string>>();
        for (const auto& e : net.at("edges"))
            inst.ptn.add_edge(e.at(0).get<std::string>(), e.at(1).get<std::string>());
        for (const auto& p : net.at("line_paths"))
            inst.ptn.line_paths.emplace_back(p.at("name").get<std::string>(),
                                             p.at("stops").get<std::vector<std::string>>());
        const auto& cw = net.at("corridor_windows");
        if (cw.contains("default"))
            inst.corridor_windows.default_window = {cw.at("default").at(0).get<Minutes>(),
                                                    cw.at("default").at(1).get<Minutes>()};
        if (cw.contains("per_node"))
            for (auto it = cw.at("per_node").begin(); it != cw.at("per_node").end(); ++it)
                inst.corridor_windows.per_node[it.key()] = {it.value().at(0).get<Minutes>(),
                                                            it.value().at(1).get<Minutes>()};
        if (net.contains("prep_times")) {
            const auto& pt = net.at("prep_times");
            inst.depot_prep.default_prep = pt.value("default", Minutes{0});
            if (pt.contains("per_node"))
                for (auto it = pt.at("per_node").begin(); it != pt.at("per_node").end(); ++it)
                    inst.depot_prep.per_node[it.key()] = it.value().get<Minutes>();
        }
        inst.eptn = build_eptn(inst.ptn, inst.corridor_windows, inst.depot_prep);

        inst.grid.delta = j.at("grid").at("delta").get<Minutes>();
        inst.grid.horizon = j.at("grid").at("horizon").get<int>();

        inst.trips.resize(inst.num_lines());
        for (const auto& per_line : j.at("trips")) {
            int l = inst.eptn.line_index(per_line.at("line").get<std::string>());
            if (l < 0) throw ParseError("trips reference unknown line " + per_line.at("line").dump());
            for (const auto& t : per_line.at("trips")) {
                TripTemplate tt;
                tt.origin_time = t.at("origin_time").get<Minutes>();
                tt.run_times = t.at("run_times").get<std::vector<Minutes>>();
                tt.shift_min = t.at("shift_min").get<Minutes>();
                tt.shift_max = t.at("shift_max").get<Minutes>();
                tt.dwell_min = t.at("dwell_min").get<std::vector<Minutes>>();
                tt.dwell_max = t.at("dwell_max").get<std::vector<Minutes>>();
                inst.trips[l].push_back(std::move(tt));
            }
        }

        inst.headways.resize(inst.num_lines());
        for (const auto& h : j.at("headways")) {
            int l = inst.eptn.line_index(h.at("line").get<std::string>());
            if (l < 0) throw ParseError("headways reference unknown line");
            inst.headways[l] = {h.at("min").get<Minutes>(), h.at("max").get<Minutes>()};
        }

        const auto& costs = j.at("costs");
        inst.costs.cap_per_unit = costs.at("cap").get<long long>();
        inst.costs.max_units = costs.at("B").get<long long>();
        inst.costs.max_formation = costs.at("Q").get<int>();
        inst.costs.wait_value = costs.at("theta_T").get<double>();
        const auto& w = costs.at("weights");
        inst.costs.eps1 = w.at("eps1").get<double>();
        inst.costs.eps2 = w.at("eps2").get<double>();
        inst.costs.phi1 = w.at("phi1").get<double>();
        inst.costs.phi2 = w.at("phi2").get<double>();
        inst.costs.unit_cost =
            costs.at("vartheta_table").get<std::vector<std::vector<std::vector<double>>>>();

        int w_id = 0;
        for (const auto& sc_j : j.at("scenarios")) {
            Scenario sc;
            sc.scenario_id = w_id++;
            sc.probability = sc_j.at("probability").get<double>();
            int g_id = 0;
            for (const auto& g_j : sc_j.at("groups")) {
                PassengerGroup g;
                g.group_id = g_id++;
                g.size = g_j.at("size").get<long long>();
                g.arrival_time = g_j.at("arrival").get<Minutes>();
                g.origin_stop = g_j.at("origin_stop").get<int>();
                g.dest_stop = g_j.at("dest_stop").get<int>();
                for (const auto& lid : g_j.at("lines")) {
                    int l = inst.eptn.line_index(lid.get<std::string>());
                    if (l < 0) throw ParseError("group references unknown line " + lid.dump());
                    g.lines.push_back(l);
                }
                for (const auto& c : g_j.at("corridors"))
                    g.corridors.push_back(corridor_from_json(inst, c));
                sc.groups.push_back(std::move(g));
            }
            inst.scenarios.push_back(std::move(sc));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("instance schema violation: ") + e.what());
    }
    validate_instance(inst);
    return inst;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MavError("cannot write instance file: " + path);
    out << serialize_instance(inst);
}

// ---------------------------------------------------------------------------
// Random generator. All times are multiples of delta and probabilities are
// dyadic, so objectives stay exactly representable.

Instance generate_random_instance(const GeneratorSpec& spec, uint64_t seed) {
    if (spec.lines < 1 || spec.stops_per_line < 2 || spec.trips_per_line < 1 ||
        spec.horizon < 2 || spec.delta < 1 || spec.scenarios < 0)
        throw InfeasibleSpecError("generator spec out of range");
    std::mt19937_64 rng(seed);
    auto rnd = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };

    Instance inst;
    const Minutes D = spec.delta;

    // Topology: line 0 is a simple path; later lines branch off a hub node of
    // line 0 so that every extra line crosses it at one transfer node.
    auto node_name = [](int line, int idx) {
        return "L" + std::to_string(line) + "S" + std::to_string(idx);
    };
    std::vector<std::vector<std::string>> paths(spec.lines);
    for (int i = 0; i < spec.stops_per_line; ++i) paths[0].push_back(node_name(0, i));
    int hub = spec.stops_per_line >= 3 ? 1 : 0;  // 0-based index of the shared node on line 0
    for (int l = 1; l < spec.lines; ++l) {
        int cross_pos = std::min(hub + (l - 1), spec.stops_per_line - 2);
        for (int i = 0; i < spec.stops_per_line; ++i) {
            if (i == 1)
                paths[l].push_back(paths[0][cross_pos]);
            else
                paths[l].push_back(node_name(l, i));
        }
    }
    for (int l = 0; l < spec.lines; ++l) {
        for (const auto& n : paths[l])
            if (!inst.ptn.has_node(n)) inst.ptn.nodes.push_back(n);
        for (size_t i = 0; i + 1 < paths[l].size(); ++i)
            inst.ptn.add_edge(paths[l][i], paths[l][i + 1]);
        inst.ptn.line_paths.emplace_back(std::string(1, static_cast<char>('a' + l)), paths[l]);
    }
    inst.corridor_windows.default_window = {D, 6 * D};
    inst.depot_prep.default_prep = D;
    inst.eptn = build_eptn(inst.ptn, inst.corridor_windows, inst.depot_prep);

    inst.grid.delta = D;
    inst.grid.horizon = spec.horizon;

    // Trips: spaced origins, unit run times, small shift/dwell windows.
    inst.trips.resize(inst.num_lines());
    inst.headways.resize(inst.num_lines());
    const int S = spec.stops_per_line;
    for (int l = 0; l < inst.num_lines(); ++l) {
        const auto& lg = inst.eptn.lines[l];
        inst.headways[l] = {D, inst.grid.span()};
        bool forward = inst.eptn.lines[l].line_id.back() != '\'';
        if (!spec.trips_both_directions && !forward) continue;
        Minutes slack = spec.window_slack * D;
        int flex = std::min(spec.flex_stops, S);
        Minutes spacing = std::max<Minutes>(2 * D, slack + 2 * D);
        Minutes last_origin = D + spacing * (spec.trips_per_line - 1);
        Minutes latest_end = last_origin + slack + D * S + slack * flex + D * (S - 1);
        if (latest_end > inst.grid.span())
            throw InfeasibleSpecError(
                "horizon too short for the requested trips: latest departure window reaches " +
                std::to_string(latest_end) + " of " + std::to_string(inst.grid.span()) +
                " minutes");
        for (int k = 0; k < spec.trips_per_line; ++k) {
            TripTemplate tt;
            tt.origin_time = D + spacing * k;
            tt.run_times.assign(lg.num_sections(), D);
            tt.shift_min = 0;
            tt.shift_max = slack;
            tt.dwell_min.assign(lg.num_stops(), D);
            tt.dwell_max.assign(lg.num_stops(), D);
            for (int i = 0; i < flex; ++i) tt.dwell_max[i] = D + slack;
            inst.trips[l].push_back(std::move(tt));
        }
    }

    // Costs: per-section unit cost proportional to the formation size.
    inst.costs.cap_per_unit = spec.cap_per_unit;
    inst.costs.max_formation = spec.max_formation;
    inst.costs.wait_value = spec.wait_value;
    inst.costs.phi1 = spec.phi1;
    inst.costs.phi2 = spec.phi2;
    inst.costs.eps1 = 1.0;
    inst.costs.eps2 = 1.0;
    inst.costs.unit_cost.resize(inst.num_lines());
    for (int l = 0; l < inst.num_lines(); ++l) {
        inst.costs.unit_cost[l].resize(inst.eptn.lines[l].num_stops());
        for (auto& per_stop : inst.costs.unit_cost[l]) {
            per_stop.resize(spec.max_formation);
            for (int q = 1; q <= spec.max_formation; ++q) per_stop[q - 1] = q;
        }
    }
    inst.costs.max_units =
        spec.max_units > 0 ? spec.max_units
                           : static_cast<long long>(inst.total_trips()) * spec.max_formation + 4;

    // Scenarios: dyadic probabilities (integer weights over a power-of-two total).
    int denom = 1;
    while (denom < spec.scenarios) denom *= 2;
    denom *= 4;
    std::vector<int> weights(spec.scenarios, 1);
    for (int r = spec.scenarios; r < denom; ++r) weights[rnd(0, spec.scenarios - 1)]++;

    for (int w = 0; w < spec.scenarios; ++w) {
        Scenario sc;
        sc.scenario_id = w;
        sc.probability = static_cast<double>(weights[w]) / denom;
        for (int gi = 0; gi < spec.groups_per_scenario; ++gi) {
            PassengerGroup g;
            g.group_id = gi;
            g.size = rnd(1, static_cast<int>(spec.cap_per_unit));
            bool transfer = !inst.eptn.corridors.empty() &&
                            std::uniform_real_distribution<double>(0, 1)(rng) < spec.transfer_fraction;
            if (transfer) {
                // Pick a corridor usable by passengers: board strictly before the
                // transfer-out stop, alight strictly after the transfer-in stop,
                // both lines actually running trips.
                std::vector<int> usable;
                for (int c = 0; c < static_cast<int>(inst.eptn.corridors.size()); ++c) {
                    const auto& co = inst.eptn.corridors[c];
                    if (co.from_stop >= 2 &&
                        co.to_stop < inst.eptn.lines[co.to_line].num_stops() &&
                        !inst.trips[co.from_line].empty() && !inst.trips[co.to_line].empty())
                        usable.push_back(c);
                }
                if (!usable.empty()) {
                    int c = usable[rnd(0, static_cast<int>(usable.size()) - 1)];
                    const auto& co = inst.eptn.corridors[c];
                    g.lines = {co.from_line, co.to_line};
                    g.corridors = {c};
                    g.origin_stop = rnd(1, co.from_stop - 1);
                    g.dest_stop = rnd(co.to_stop + 1, inst.eptn.lines[co.to_line].num_stops());
                } else {
                    transfer = false;
                }
            }
            if (!transfer) {
                std::vector<int> with_trips;
                for (int l = 0; l < inst.num_lines(); ++l)
                    if (!inst.trips[l].empty()) with_trips.push_back(l);
                int l = with_trips[rnd(0, static_cast<int>(with_trips.size()) - 1)];
                int stops = inst.eptn.lines[l].num_stops();
                g.lines = {l};
                g.origin_stop = rnd(1, stops - 1);
                g.dest_stop = rnd(g.origin_stop + 1, stops);
            }
            // Arrive inside the first line's service span so the group is servable.
            const auto& first_trips = inst.trips[g.lines[0]];
            Minutes lo = 0;
            Minutes hi = first_trips.back().origin_time + first_trips.back().shift_max;
            for (int i = 0; i < g.origin_stop; ++i) hi += first_trips.back().dwell_min[i];
            for (int i = 0; i + 1 < g.origin_stop; ++i) hi += first_trips.back().run_times[i];
            g.arrival_time = D * rnd(static_cast<int>(lo / D), std::max(0, static_cast<int>(hi / D)));
            sc.groups.push_back(std::move(g));
        }
        inst.scenarios.push_back(std::move(sc));
    }

    validate_instance(inst);
    return inst;
}

std::vector<const PassengerGroup*> passengers_by_origin(const Instance& inst, int scenario,
                                                        int line, int stop1) {
    if (line < 0 || line >= inst.num_lines() || stop1 < 1 ||
        stop1 > inst.eptn.lines[line].num_stops())
        throw UnknownStopError("no stop " + std::to_string(stop1) + " on line index " +
                               std::to_string(line));
    std::vector<const PassengerGroup*> out;
    for (const auto& g : inst.scenarios.at(scenario).groups)
        for (size_t leg = 0; leg < g.lines.size(); ++leg)
            if (g.lines[leg] == line && group_board_stop(inst, g, static_cast<int>(leg)) == stop1)
                out.push_back(&g);
    return out;
}

std::vector<const PassengerGroup*> passengers_by_destination(const Instance& inst, int scenario,
                                                             int line, int stop1) {
    if (line < 0 || line >= inst.num_lines() || stop1 < 1 ||
        stop1 > inst.eptn.lines[line].num_stops())
        throw UnknownStopError("no stop " + std::to_string(stop1) + " on line index " +
                               std::to_string(line));
    std::vector<const PassengerGroup*> out;
    for (const auto& g : inst.scenarios.at(scenario).groups)
        for (size_t leg = 0; leg < g.lines.size(); ++leg)
            if (g.lines[leg] == line && group_alight_stop(inst, g, static_cast<int>(leg)) == stop1)
                out.push_back(&g);
    return out;
}

}  // namespace mav

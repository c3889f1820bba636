#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace mav;
using namespace tsup;

TEST_CASE("serialize/load round-trips byte-identically") {
    Instance inst = generate_random_instance(suite_spec(2, 1), 99);
    std::string a = serialize_instance(inst);
    Instance back = parse_instance(a);
    CHECK(serialize_instance(back) == a);
}

TEST_CASE("generator is deterministic per seed") {
    GeneratorSpec spec = suite_spec(2, 0);
    CHECK(serialize_instance(generate_random_instance(spec, 7)) ==
          serialize_instance(generate_random_instance(spec, 7)));
    CHECK(serialize_instance(generate_random_instance(spec, 7)) !=
          serialize_instance(generate_random_instance(spec, 8)));
}

TEST_CASE("generated instances always validate and probabilities sum to one") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Instance inst = generate_random_instance(suite_spec(1 + seed % 2, (int)seed), seed);
        CHECK_NOTHROW(validate_instance(inst));
        double sum = 0;
        for (const auto& sc : inst.scenarios) sum += sc.probability;
        CHECK(sum == 1.0);  // dyadic weights make this exact
    }
}

TEST_CASE("table-shaped generator spec reproduces the reference cardinalities") {
    // 3 undirected lines x 8 stops -> 48 directed stops, 18 trips, 60
    // intervals, 8 scenarios.
    GeneratorSpec spec;
    spec.lines = 3;
    spec.stops_per_line = 8;
    spec.trips_per_line = 3;
    spec.horizon = 60;
    spec.scenarios = 8;
    spec.groups_per_scenario = 6;
    spec.transfer_fraction = 0.3;
    Instance inst = generate_random_instance(spec, 1);
    int stop_count = 0;
    for (const auto& lg : inst.eptn.lines) stop_count += lg.num_stops();
    CHECK(stop_count == 48);
    CHECK(inst.total_trips() == 18);
    CHECK(inst.grid.horizon == 60);
    CHECK(inst.scenarios.size() == 8);

    // The same cardinalities survive a save/load cycle.
    std::string path = "/tmp/mav_test_g1.json";
    save_instance(inst, path);
    Instance loaded = load_instance(path);
    CHECK(loaded.total_trips() == 18);
    CHECK(loaded.scenarios.size() == 8);
}

TEST_CASE("probability sum violations are named") {
    Instance inst = one_line(3, 1, 12);
    inst.scenarios[0].probability = 0.9;
    try {
        validate_instance(inst);
        FAIL("expected SemanticError");
    } catch (const SemanticError& e) {
        CHECK(std::string(e.what()).find("probabilit") != std::string::npos);
    }
}

TEST_CASE("a corridor sequence skipping a line is rejected naming the group") {
    Instance inst = two_line(3, 1, 12);
    int la = inst.eptn.line_index("a"), lb = inst.eptn.line_index("b");
    PassengerGroup g;
    g.group_id = 0;
    g.size = 1;
    g.arrival_time = 2;
    g.origin_stop = 1;
    g.dest_stop = 3;
    g.lines = {la, lb};
    g.corridors = {};  // skips the corridor linking a to b
    inst.scenarios[0].groups.push_back(g);
    try {
        validate_instance(inst);
        FAIL("expected SemanticError");
    } catch (const SemanticError& e) {
        CHECK(std::string(e.what()).find("group 0") != std::string::npos);
    }
}

TEST_CASE("zero demand intensity gives empty scenarios") {
    GeneratorSpec spec = suite_spec(1, 0);
    spec.groups_per_scenario = 0;
    Instance inst = generate_random_instance(spec, 3);
    for (const auto& sc : inst.scenarios) CHECK(sc.groups.empty());
}

TEST_CASE("too-short horizons are rejected as infeasible specs") {
    GeneratorSpec spec = suite_spec(1, 0);
    spec.horizon = 4;
    CHECK_THROWS_AS(generate_random_instance(spec, 1), InfeasibleSpecError);
}

TEST_CASE("origin and destination buckets partition boarding and alighting legs") {
    Instance inst = generate_random_instance(suite_spec(2, 2), 11);
    for (size_t w = 0; w < inst.scenarios.size(); ++w) {
        long long legs = 0;
        for (const auto& g : inst.scenarios[w].groups) legs += (long long)g.lines.size();
        long long origin_total = 0, dest_total = 0;
        for (int l = 0; l < inst.num_lines(); ++l)
            for (int i = 1; i <= inst.eptn.lines[l].num_stops(); ++i) {
                origin_total += (long long)passengers_by_origin(inst, (int)w, l, i).size();
                dest_total += (long long)passengers_by_destination(inst, (int)w, l, i).size();
            }
        CHECK(origin_total == legs);
        CHECK(dest_total == legs);
    }
}

TEST_CASE("buckets on an empty scenario are empty and unknown stops throw") {
    Instance inst = one_line(3, 1, 12);
    CHECK(passengers_by_origin(inst, 0, 0, 1).empty());
    CHECK_THROWS_AS(passengers_by_origin(inst, 0, 0, 9), UnknownStopError);
    CHECK_THROWS_AS(passengers_by_destination(inst, 0, 99, 1), UnknownStopError);
}

TEST_CASE("a transfer group lands in the right buckets along its path") {
    Instance inst = two_line(3, 1, 12);
    int la = inst.eptn.line_index("a"), lb = inst.eptn.line_index("b");
    int g = inst.eptn.corridor_index(la, 2, lb, 2);
    REQUIRE(g >= 0);
    add_transfer_group(inst, 0, g, 1, 3, 2);
    const auto& co = inst.eptn.corridors[g];
    auto od = passengers_by_destination(inst, 0, co.from_line, co.from_stop);
    auto ob = passengers_by_origin(inst, 0, co.to_line, co.to_stop);
    REQUIRE(od.size() == 1);
    REQUIRE(ob.size() == 1);
    CHECK(od[0]->group_id == 0);
    CHECK(ob[0]->group_id == 0);
}

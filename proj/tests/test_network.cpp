#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace mav;

namespace {

// Six-node network: three undirected lines a: 1-2-3, b: 5-2-4, c: 5-6 with
// transfer nodes 2 and 5.
Ptn six_node_ptn() {
    Ptn ptn;
    ptn.nodes = {"1", "2", "3", "4", "5", "6"};
    ptn.add_edge("1", "2");
    ptn.add_edge("2", "3");
    ptn.add_edge("2", "4");
    ptn.add_edge("2", "5");
    ptn.add_edge("5", "6");
    ptn.line_paths = {{"a", {"1", "2", "3"}}, {"b", {"5", "2", "4"}}, {"c", {"5", "6"}}};
    return ptn;
}

}  // namespace

TEST_CASE("six-node network expands to six directed lines and the listed corridors") {
    CorridorWindows win;
    win.default_window = {2, 8};
    Eptn e = build_eptn(six_node_ptn(), win);
    CHECK(e.num_lines() == 6);

    // Both directions are present per undirected line.
    for (const char* id : {"a", "a'", "b", "b'", "c", "c'"}) CHECK(e.line_index(id) >= 0);

    // The eight corridors of the worked example exist, each with its
    // reverse-direction counterpart; corridors never pair a line with its own
    // reverse.
    auto has = [&](const char* fl, int fs, const char* tl, int ts) {
        return e.corridor_index(e.line_index(fl), fs, e.line_index(tl), ts) >= 0;
    };
    CHECK(has("a", 2, "b", 2));
    CHECK(has("a", 2, "b'", 2));
    CHECK(has("a'", 2, "b", 2));
    CHECK(has("a'", 2, "b'", 2));
    CHECK(has("b", 1, "c", 1));
    CHECK(has("b", 1, "c'", 2));
    CHECK(has("b'", 3, "c", 1));
    CHECK(has("b'", 3, "c'", 2));
    for (const auto& c : e.corridors) {
        CHECK(e.lines[c.from_line].parent_line != e.lines[c.to_line].parent_line);
        CHECK(e.reverse_corridor(e.corridor_index(c.from_line, c.from_stop, c.to_line,
                                                   c.to_stop)) >= 0);
        CHECK(c.theta_min == 2);
        CHECK(c.theta_max == 8);
    }
    // 8 listed pairs, ordered both ways.
    CHECK(e.corridors.size() == 16);
    CHECK(validate_eptn(e).empty());
}

TEST_CASE("single two-stop line yields two directed lines and no corridors") {
    Ptn ptn;
    ptn.nodes = {"x", "y"};
    ptn.add_edge("x", "y");
    ptn.line_paths = {{"a", {"x", "y"}}};
    Eptn e = build_eptn(ptn, CorridorWindows{});  // no default window needed: no transfers
    CHECK(e.num_lines() == 2);
    CHECK(e.corridors.empty());
    CHECK(validate_eptn(e).empty());
}

TEST_CASE("corridor count at a crossing matches exhaustive pair enumeration") {
    // Two lines crossing at one node. Independent oracle: enumerate ordered
    // pairs of co-located transfer stops over directed lines with distinct
    // parents.
    Ptn ptn;
    ptn.nodes = {"a0", "c", "a2", "b0", "b2"};
    ptn.add_edge("a0", "c");
    ptn.add_edge("c", "a2");
    ptn.add_edge("b0", "c");
    ptn.add_edge("c", "b2");
    ptn.line_paths = {{"a", {"a0", "c", "a2"}}, {"b", {"b0", "c", "b2"}}};
    CorridorWindows win;
    win.default_window = {1, 5};
    Eptn e = build_eptn(ptn, win);
    CHECK(e.num_lines() == 4);

    long long expected = 0;
    for (int la = 0; la < e.num_lines(); ++la)
        for (int lb = 0; lb < e.num_lines(); ++lb) {
            if (la == lb || e.lines[la].parent_line == e.lines[lb].parent_line) continue;
            for (int ia = 1; ia <= e.lines[la].num_stops(); ++ia)
                for (int ib = 1; ib <= e.lines[lb].num_stops(); ++ib)
                    if (e.lines[la].is_transfer(ia) && e.lines[lb].is_transfer(ib) &&
                        e.lines[la].node_at(ia) == e.lines[lb].node_at(ib))
                        ++expected;
        }
    CHECK(static_cast<long long>(e.corridors.size()) == expected);
    CHECK(expected == 8);  // 2x2 directed pairs, both orders
}

TEST_CASE("build_eptn is deterministic") {
    CorridorWindows win;
    win.default_window = {2, 8};
    Eptn e1 = build_eptn(six_node_ptn(), win);
    Eptn e2 = build_eptn(six_node_ptn(), win);
    REQUIRE(e1.num_lines() == e2.num_lines());
    for (int l = 0; l < e1.num_lines(); ++l) {
        CHECK(e1.lines[l].line_id == e2.lines[l].line_id);
        CHECK(e1.lines[l].stop_nodes == e2.lines[l].stop_nodes);
    }
    REQUIRE(e1.corridors.size() == e2.corridors.size());
    for (size_t g = 0; g < e1.corridors.size(); ++g) CHECK(e1.corridors[g] == e2.corridors[g]);
}

TEST_CASE("transfer and non-transfer stops partition every line's stop set") {
    CorridorWindows win;
    win.default_window = {2, 8};
    Eptn e = build_eptn(six_node_ptn(), win);
    for (const auto& lg : e.lines) {
        int transfer = 0, non_transfer = 0;
        for (int i = 1; i <= lg.num_stops(); ++i) (lg.is_transfer(i) ? transfer : non_transfer)++;
        CHECK(transfer + non_transfer == lg.num_stops());
    }
}

TEST_CASE("validate_eptn flags inverted windows and missing depots") {
    CorridorWindows win;
    win.default_window = {2, 8};
    Eptn e = build_eptn(six_node_ptn(), win);

    Eptn bad = e;
    bad.corridors[0].theta_min = 9;  // above theta_max
    auto v1 = validate_eptn(bad);
    REQUIRE(v1.size() == 1);
    CHECK(v1[0].entity == "corridor #0");
    CHECK(v1[0].rule.find("window") != std::string::npos);

    Eptn nodep = e;
    nodep.depots.clear();
    auto v2 = validate_eptn(nodep);
    CHECK(v2.size() >= 2);  // every line reports missing first/last depot
    bool names_line = false;
    for (const auto& v : v2) names_line |= v.rule.find("depot") != std::string::npos;
    CHECK(names_line);
}

TEST_CASE("invalid PTNs are rejected with the violated rule") {
    Ptn ptn;
    ptn.nodes = {"x", "y"};
    ptn.add_edge("x", "y");
    ptn.line_paths = {{"a", {"x", "z"}}};  // z not a node
    CHECK_THROWS_AS(build_eptn(ptn, CorridorWindows{}), InvalidPtnError);

    Ptn nopath;
    nopath.nodes = {"x", "y", "w"};
    nopath.add_edge("x", "y");
    nopath.line_paths = {{"a", {"x", "w"}}};  // missing edge
    CHECK_THROWS_AS(build_eptn(nopath, CorridorWindows{}), InvalidPtnError);
}

TEST_CASE("missing corridor window raises MissingWindow") {
    Ptn ptn = six_node_ptn();
    CorridorWindows none;  // no default, nothing per node
    CHECK_THROWS_AS(build_eptn(ptn, none), MissingWindowError);
    CorridorWindows partial;
    partial.per_node["2"] = {1, 4};
    CHECK_THROWS_AS(build_eptn(ptn, partial), MissingWindowError);  // node 5 uncovered
    partial.per_node["5"] = {2, 6};
    Eptn e = build_eptn(ptn, partial);
    CHECK(validate_eptn(e).empty());
}

TEST_CASE("depots merge line endpoints sharing a node") {
    CorridorWindows win;
    win.default_window = {2, 8};
    DepotPrep prep;
    prep.default_prep = 3;
    Eptn e = build_eptn(six_node_ptn(), win, prep);
    // Endpoints: 1,3 (line a), 4,5 (line b), 5,6 (line c) -> depot at 5 shared.
    int five = -1;
    for (const auto& d : e.depots)
        if (d.node == "5") five = d.depot_id;
    REQUIRE(five >= 0);
    const auto& d5 = e.depots[five];
    CHECK(d5.fl_lines.size() + d5.ll_lines.size() == 4);  // b', c start; b, c' end
    CHECK(d5.prep_time == 3);
    for (int l = 0; l < e.num_lines(); ++l) {
        CHECK(e.depot_of_first_stop(l) >= 0);
        CHECK(e.depot_of_last_stop(l) >= 0);
    }
}

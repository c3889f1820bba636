#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mav/common.hpp"

namespace mav {

// Undirected physical network: stops, physical connections, and the stop
// sequence of every (undirected) service line.
struct Ptn {
    std::vector<std::string> nodes;
    std::set<std::pair<std::string, std::string>> edges;  // stored with first < second
    // line name -> ordered stop sequence
    std::vector<std::pair<std::string, std::vector<std::string>>> line_paths;

    void add_edge(const std::string& a, const std::string& b);
    bool has_node(const std::string& n) const;
    bool has_edge(const std::string& a, const std::string& b) const;
};

// One directed line of the expanded network. Stops are indexed 1..size().
struct LineGraph {
    std::string line_id;          // "a" or "a'" for the reverse direction
    std::string parent_line;      // undirected line this direction belongs to
    std::vector<std::string> stop_nodes;  // physical node per stop index (0-based storage)
    std::vector<bool> transfer_flag;      // per stop index

    int num_stops() const { return static_cast<int>(stop_nodes.size()); }
    int num_sections() const { return num_stops() - 1; }
    const std::string& node_at(int stop_index1) const { return stop_nodes.at(stop_index1 - 1); }
    bool is_transfer(int stop_index1) const { return transfer_flag.at(stop_index1 - 1); }
};

// Ordered transfer corridor between co-located transfer stops of two
// directed lines, with its re-coupling / transfer time window.
struct TransferCorridor {
    int from_line = -1;  // index into Eptn::lines
    int from_stop = -1;  // 1-based stop index on from_line
    int to_line = -1;
    int to_stop = -1;
    Minutes theta_min = 0;
    Minutes theta_max = 0;

    auto key() const { return std::tuple(from_line, from_stop, to_line, to_stop); }
    bool operator<(const TransferCorridor& o) const { return key() < o.key(); }
    bool operator==(const TransferCorridor& o) const { return key() == o.key(); }
};

struct Depot {
    int depot_id = -1;
    std::string node;              // physical node the depot sits at
    std::vector<int> fl_lines;     // directed lines starting here
    std::vector<int> ll_lines;     // directed lines ending here
    Minutes prep_time = 0;
};

struct Eptn {
    std::vector<LineGraph> lines;
    std::vector<TransferCorridor> corridors;
    std::vector<Depot> depots;

    int line_index(const std::string& id) const;
    int num_lines() const { return static_cast<int>(lines.size()); }
    // Corridor lookup by (from_line, from_stop, to_line, to_stop); -1 if absent.
    int corridor_index(int fl, int fs, int tl, int ts) const;
    int reverse_corridor(int corridor) const;
    int depot_of_first_stop(int line) const;
    int depot_of_last_stop(int line) const;
};

struct CorridorWindows {
    std::optional<std::pair<Minutes, Minutes>> default_window;
    std::map<std::string, std::pair<Minutes, Minutes>> per_node;  // physical node -> window

    std::pair<Minutes, Minutes> window_for(const std::string& node) const;
};

struct DepotPrep {
    Minutes default_prep = 0;
    std::map<std::string, Minutes> per_node;

    Minutes prep_for(const std::string& node) const;
};

// Expands the undirected network: each line is copied twice with opposite
// directions, corridors are created for every ordered pair of co-located
// transfer stops on directed lines of distinct parent lines, and depots are
// derived from line endpoints (merged per physical node).
Eptn build_eptn(const Ptn& ptn, const CorridorWindows& windows, const DepotPrep& prep = {});

struct Violation {
    std::string entity;
    std::string rule;
};

// Empty result iff all structural invariants of the expanded network hold.
std::vector<Violation> validate_eptn(const Eptn& eptn);

void validate_ptn_or_throw(const Ptn& ptn);

}  // namespace mav

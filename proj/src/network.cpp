#include "mav/network.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mav {

void Ptn::add_edge(const std::string& a, const std::string& b) {
    edges.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
}

bool Ptn::has_node(const std::string& n) const {
    return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

bool Ptn::has_edge(const std::string& a, const std::string& b) const {
    return edges.count(a < b ? std::make_pair(a, b) : std::make_pair(b, a)) > 0;
}

std::pair<Minutes, Minutes> CorridorWindows::window_for(const std::string& node) const {
    auto it = per_node.find(node);
    if (it != per_node.end()) return it->second;
    if (default_window) return *default_window;
    throw MissingWindowError("no transfer window for node '" + node + "' and no default");
}

Minutes DepotPrep::prep_for(const std::string& node) const {
    auto it = per_node.find(node);
    return it != per_node.end() ? it->second : default_prep;
}

int Eptn::line_index(const std::string& id) const {
    for (int i = 0; i < num_lines(); ++i)
        if (lines[i].line_id == id) return i;
    return -1;
}

int Eptn::corridor_index(int fl, int fs, int tl, int ts) const {
    for (int g = 0; g < static_cast<int>(corridors.size()); ++g) {
        const auto& c = corridors[g];
        if (c.from_line == fl && c.from_stop == fs && c.to_line == tl && c.to_stop == ts) return g;
    }
    return -1;
}

int Eptn::reverse_corridor(int corridor) const {
    const auto& c = corridors.at(corridor);
    return corridor_index(c.to_line, c.to_stop, c.from_line, c.from_stop);
}

int Eptn::depot_of_first_stop(int line) const {
    for (const auto& d : depots)
        if (std::find(d.fl_lines.begin(), d.fl_lines.end(), line) != d.fl_lines.end())
            return d.depot_id;
    return -1;
}

int Eptn::depot_of_last_stop(int line) const {
    for (const auto& d : depots)
        if (std::find(d.ll_lines.begin(), d.ll_lines.end(), line) != d.ll_lines.end())
            return d.depot_id;
    return -1;
}

void validate_ptn_or_throw(const Ptn& ptn) {
    if (ptn.nodes.empty()) throw InvalidPtnError("PTN has no nodes");
    if (ptn.edges.empty()) throw InvalidPtnError("PTN has no edges");
    std::set<std::string> node_set(ptn.nodes.begin(), ptn.nodes.end());
    if (node_set.size() != ptn.nodes.size()) throw InvalidPtnError("duplicate node id");
    for (const auto& [a, b] : ptn.edges) {
        if (!node_set.count(a) || !node_set.count(b))
            throw InvalidPtnError("edge endpoint not a node: (" + a + "," + b + ")");
        if (a == b) throw InvalidPtnError("self-loop edge at " + a);
    }
    if (ptn.line_paths.empty()) throw InvalidPtnError("PTN has no lines");
    std::set<std::string> line_names;
    for (const auto& [name, path] : ptn.line_paths) {
        if (!line_names.insert(name).second) throw InvalidPtnError("duplicate line name " + name);
        if (path.size() < 2) throw InvalidPtnError("line " + name + " has fewer than 2 stops");
        std::set<std::string> seen;
        for (size_t i = 0; i < path.size(); ++i) {
            if (!node_set.count(path[i]))
                throw InvalidPtnError("line " + name + " visits unknown node " + path[i]);
            if (!seen.insert(path[i]).second)
                throw InvalidPtnError("line " + name + " is not a simple path (repeats " + path[i] + ")");
            if (i + 1 < path.size() && !ptn.has_edge(path[i], path[i + 1]))
                throw InvalidPtnError("line " + name + " uses missing edge (" + path[i] + "," +
                                      path[i + 1] + ")");
        }
    }
}

Eptn build_eptn(const Ptn& ptn, const CorridorWindows& windows, const DepotPrep& prep) {
    validate_ptn_or_throw(ptn);

    // A node is a transfer node when it lies on more than one undirected line.
    std::map<std::string, int> lines_through;
    for (const auto& [name, path] : ptn.line_paths)
        for (const auto& n : path) lines_through[n]++;

    Eptn eptn;
    for (const auto& [name, path] : ptn.line_paths) {
        LineGraph fwd;
        fwd.line_id = name;
        fwd.parent_line = name;
        fwd.stop_nodes = path;
        LineGraph rev;
        rev.line_id = name + "'";
        rev.parent_line = name;
        rev.stop_nodes = std::vector<std::string>(path.rbegin(), path.rend());
        for (auto* lg : {&fwd, &rev}) {
            lg->transfer_flag.resize(lg->stop_nodes.size());
            for (size_t i = 0; i < lg->stop_nodes.size(); ++i)
                lg->transfer_flag[i] = lines_through[lg->stop_nodes[i]] > 1;
        }
        eptn.lines.push_back(std::move(fwd));
        eptn.lines.push_back(std::move(rev));
    }

    // Ordered corridors between co-located transfer stops of directed lines
    // with distinct parents.
    for (int la = 0; la < eptn.num_lines(); ++la) {
        for (int lb = 0; lb < eptn.num_lines(); ++lb) {
            if (la == lb) continue;
            const auto& A = eptn.lines[la];
            const auto& B = eptn.lines[lb];
            if (A.parent_line == B.parent_line) continue;
            for (int ia = 1; ia <= A.num_stops(); ++ia) {
                if (!A.is_transfer(ia)) continue;
                for (int ib = 1; ib <= B.num_stops(); ++ib) {
                    if (!B.is_transfer(ib)) continue;
                    if (A.node_at(ia) != B.node_at(ib)) continue;
                    auto [tmin, tmax] = windows.window_for(A.node_at(ia));
                    eptn.corridors.push_back({la, ia, lb, ib, tmin, tmax});
                }
            }
        }
    }
    std::sort(eptn.corridors.begin(), eptn.corridors.end());

    // Depots sit at line endpoints; endpoints sharing a physical node share a depot.
    std::map<std::string, Depot> by_node;
    for (int l = 0; l < eptn.num_lines(); ++l) {
        const auto& lg = eptn.lines[l];
        by_node[lg.node_at(1)].fl_lines.push_back(l);
        by_node[lg.node_at(lg.num_stops())].ll_lines.push_back(l);
    }
    for (auto& [node, depot] : by_node) {
        depot.depot_id = static_cast<int>(eptn.depots.size());
        depot.node = node;
        depot.prep_time = prep.prep_for(node);
        eptn.depots.push_back(depot);
    }
    return eptn;
}

std::vector<Violation> validate_eptn(const Eptn& eptn) {
    std::vector<Violation> out;
    std::map<std::string, int> per_parent;
    for (const auto& lg : eptn.lines) per_parent[lg.parent_line]++;
    for (const auto& [parent, count] : per_parent)
        if (count != 2)
            out.push_back({"line " + parent, "undirected line must yield exactly two directed lines"});

    for (int l = 0; l < eptn.num_lines(); ++l) {
        const auto& lg = eptn.lines[l];
        if (lg.num_stops() < 2) out.push_back({"line " + lg.line_id, "fewer than 2 stops"});
        if (lg.transfer_flag.size() != lg.stop_nodes.size())
            out.push_back({"line " + lg.line_id, "transfer flags do not partition the stop set"});
        if (eptn.depot_of_first_stop(l) < 0)
            out.push_back({"line " + lg.line_id, "first stop maps to no depot"});
        if (eptn.depot_of_last_stop(l) < 0)
            out.push_back({"line " + lg.line_id, "last stop maps to no depot"});
    }

    for (size_t g = 0; g < eptn.corridors.size(); ++g) {
        const auto& c = eptn.corridors[g];
        std::string tag = "corridor #" + std::to_string(g);
        if (c.from_line < 0 || c.from_line >= eptn.num_lines() || c.to_line < 0 ||
            c.to_line >= eptn.num_lines()) {
            out.push_back({tag, "line index out of range"});
            continue;
        }
        if (c.from_line == c.to_line) out.push_back({tag, "corridor endpoints on the same line"});
        const auto& A = eptn.lines[c.from_line];
        const auto& B = eptn.lines[c.to_line];
        if (c.from_stop < 1 || c.from_stop > A.num_stops() || c.to_stop < 1 ||
            c.to_stop > B.num_stops()) {
            out.push_back({tag, "stop index out of range"});
            continue;
        }
        if (!A.is_transfer(c.from_stop) || !B.is_transfer(c.to_stop))
            out.push_back({tag, "endpoint is not a transfer stop"});
        if (c.theta_min < 0 || c.theta_min > c.theta_max)
            out.push_back({tag, "inverted or negative transfer window"});
    }

    for (const auto& d : eptn.depots)
        if (d.fl_lines.empty() && d.ll_lines.empty())
            out.push_back({"depot " + std::to_string(d.depot_id), "serves no line endpoint"});
    return out;
}

}  // namespace mav

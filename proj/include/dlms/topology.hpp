#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace dlms {

/// Undirected network graph. Every node is adjacent to itself; the
/// neighborhood of node k is the set of adjacent nodes including k.
/// Nodes are 0-indexed internally (the edge-list file format is 1-indexed).
struct Topology {
    int node_count = 0;
    std::vector<std::vector<std::uint8_t>> adjacency;  // symmetric, true diagonal
    std::vector<std::vector<int>> neighborhoods;       // sorted, includes self

    bool adjacent(int l, int k) const { return adjacency[l][k] != 0; }
    int degree(int k) const { return static_cast<int>(neighborhoods[k].size()); }

    /// Build from a symmetric adjacency relation; fills neighborhoods and
    /// forces the diagonal. Throws ConfigError on asymmetry or bad size.
    static Topology from_adjacency(std::vector<std::vector<std::uint8_t>> adjacency);
};

Topology fully_connected(int n);
Topology ring(int n);

/// n nodes placed uniformly in the unit square by the seeded generator;
/// edge iff Euclidean distance <= radius. Pure function of its arguments.
Topology random_geometric_topology(int n, double radius, std::uint64_t seed);

/// Connected components (each component is a sorted node list).
std::vector<std::vector<int>> connected_components(const Topology& t);
bool is_connected(const Topology& t);

/// Plain-text edge list: first line "N <count>", then one "l k" pair per
/// undirected edge, 1-indexed; self-loops are omitted and implied.
void write_edge_list(std::ostream& out, const Topology& t);
Topology read_edge_list(std::istream& in);
void save_edge_list(const std::string& path, const Topology& t);
Topology load_edge_list(const std::string& path);

} // namespace dlms

#include "dlms/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dlms/errors.hpp"
#include "dlms/rng.hpp"

namespace dlms {

namespace {

void rebuild_neighborhoods(Topology& t) {
    t.neighborhoods.assign(t.node_count, {});
    for (int k = 0; k < t.node_count; ++k) {
        for (int l = 0; l < t.node_count; ++l) {
            if (t.adjacency[l][k]) t.neighborhoods[k].push_back(l);
        }
    }
}

} // namespace

Topology Topology::from_adjacency(std::vector<std::vector<std::uint8_t>> adjacency) {
    Topology t;
    t.node_count = static_cast<int>(adjacency.size());
    if (t.node_count == 0) throw ConfigError("topology must have at least one node");
    for (const auto& row : adjacency) {
        if (static_cast<int>(row.size()) != t.node_count)
            throw ConfigError("adjacency matrix is not square");
    }
    for (int i = 0; i < t.node_count; ++i) {
        adjacency[i][i] = 1;
        for (int j = i + 1; j < t.node_count; ++j) {
            if ((adjacency[i][j] != 0) != (adjacency[j][i] != 0))
                throw ConfigError("adjacency matrix is not symmetric");
        }
    }
    t.adjacency = std::move(adjacency);
    rebuild_neighborhoods(t);
    return t;
}

Topology fully_connected(int n) {
    if (n < 1) throw ConfigError("node count must be positive");
    return Topology::from_adjacency(
        std::vector<std::vector<std::uint8_t>>(n, std::vector<std::uint8_t>(n, 1)));
}

Topology ring(int n) {
    if (n < 1) throw ConfigError("node count must be positive");
    std::vector<std::vector<std::uint8_t>> adj(n, std::vector<std::uint8_t>(n, 0));
    for (int i = 0; i < n; ++i) {
        adj[i][i] = 1;
        adj[i][(i + 1) % n] = 1;
        adj[(i + 1) % n][i] = 1;
    }
    return Topology::from_adjacency(std::move(adj));
}

Topology random_geometric_topology(int n, double radius, std::uint64_t seed) {
    if (n < 1) throw ConfigError("node count must be positive");
    if (!(radius > 0.0)) throw ConfigError("radius must be positive");
    rng::Xoshiro256pp gen(rng::derive_key(seed, {0x6e6f646573ULL}));
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = gen.uniform01();
        y[i] = gen.uniform01();
    }
    std::vector<std::vector<std::uint8_t>> adj(n, std::vector<std::uint8_t>(n, 0));
    const double r2 = radius * radius;
    for (int i = 0; i < n; ++i) {
        adj[i][i] = 1;
        for (int j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx * dx + dy * dy <= r2) adj[i][j] = adj[j][i] = 1;
        }
    }
    return Topology::from_adjacency(std::move(adj));
}

std::vector<std::vector<int>> connected_components(const Topology& t) {
    std::vector<std::vector<int>> components;
    std::vector<char> seen(t.node_count, 0);
    for (int start = 0; start < t.node_count; ++start) {
        if (seen[start]) continue;
        std::vector<int> component;
        std::vector<int> stack{start};
        seen[start] = 1;
        while (!stack.empty()) {
            const int k = stack.back();
            stack.pop_back();
            component.push_back(k);
            for (int l : t.neighborhoods[k]) {
                if (!seen[l]) {
                    seen[l] = 1;
                    stack.push_back(l);
                }
            }
        }
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
    }
    return components;
}

bool is_connected(const Topology& t) { return connected_components(t).size() == 1; }

void write_edge_list(std::ostream& out, const Topology& t) {
    out << "N " << t.node_count << "\n";
    for (int l = 0; l < t.node_count; ++l) {
        for (int k = l + 1; k < t.node_count; ++k) {
            if (t.adjacency[l][k]) out << (l + 1) << " " << (k + 1) << "\n";
        }
    }
}

Topology read_edge_list(std::istream& in) {
    std::string tag;
    int n = 0;
    if (!(in >> tag >> n) || tag != "N" || n < 1)
        throw ConfigError("edge list must start with 'N <count>'");
    std::vector<std::vector<std::uint8_t>> adj(n, std::vector<std::uint8_t>(n, 0));
    for (int i = 0; i < n; ++i) adj[i][i] = 1;
    int l = 0, k = 0;
    while (in >> l >> k) {
        if (l < 1 || l > n || k < 1 || k > n) {
            std::ostringstream msg;
            msg << "edge (" << l << ", " << k << ") out of range 1.." << n;
            throw ConfigError(msg.str());
        }
        adj[l - 1][k - 1] = adj[k - 1][l - 1] = 1;
    }
    if (!in.eof() && in.fail()) throw ConfigError("malformed edge list");
    return Topology::from_adjacency(std::move(adj));
}

void save_edge_list(const std::string& path, const Topology& t) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_edge_list(out, t);
    if (!out) throw IoError("failed writing '" + path + "'");
}

Topology load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_edge_list(in);
}

} // namespace dlms

#ifndef NMC_GRAPH_HPP
#define NMC_GRAPH_HPP

#include <algorithm>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nmc/errors.hpp"

namespace nmc {

// Undirected edge stored canonically as (a < b), 0-based.
struct Edge {
    int a;
    int b;
    Edge(int i, int j) : a(std::min(i, j)), b(std::max(i, j)) {}
    bool operator==(const Edge& o) const { return a == o.a && b == o.b; }
    bool operator<(const Edge& o) const { return a != o.a ? a < o.a : b < o.b; }
};

// Simple undirected graph over variable indices 0..n-1. Immutable after
// construction; edges kept sorted so iteration order is reproducible.
class Graph {
public:
    Graph() = default;

    Graph(int n, std::vector<Edge> edges) : n_(n) {
        if (n < 0) throw invalid_input("graph: negative vertex count");
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        for (const Edge& e : edges) {
            if (e.a == e.b) throw invalid_input("graph: self-loop at vertex " + std::to_string(e.a + 1));
            if (e.a < 0 || e.b >= n)
                throw invalid_input("graph: edge (" + std::to_string(e.a + 1) + "," +
                                    std::to_string(e.b + 1) + ") out of range for n=" + std::to_string(n));
        }
        edges_ = std::move(edges);
        adj_.assign(n_, {});
        for (int k = 0; k < static_cast<int>(edges_.size()); ++k) {
            adj_[edges_[k].a].push_back({edges_[k].b, k});
            adj_[edges_[k].b].push_back({edges_[k].a, k});
        }
    }

    int n() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    // (neighbor, edge index) pairs in ascending neighbor order.
    const std::vector<std::pair<int, int>>& neighbors(int v) const { return adj_[v]; }

    int degree(int v) const { return static_cast<int>(adj_[v].size()); }

    // Edge index of (i,j), or -1.
    int edge_index(int i, int j) const {
        Edge e(i, j);
        auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
        if (it != edges_.end() && *it == e) return static_cast<int>(it - edges_.begin());
        return -1;
    }

    bool has_edge(int i, int j) const { return edge_index(i, j) >= 0; }

    static Graph complete(int n) {
        std::vector<Edge> es;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) es.emplace_back(i, j);
        return Graph(n, std::move(es));
    }

    static Graph path(int n) {
        std::vector<Edge> es;
        for (int i = 0; i + 1 < n; ++i) es.emplace_back(i, i + 1);
        return Graph(n, std::move(es));
    }

    static Graph cycle(int n) {
        std::vector<Edge> es;
        for (int i = 0; i + 1 < n; ++i) es.emplace_back(i, i + 1);
        if (n > 2) es.emplace_back(n - 1, 0);
        return Graph(n, std::move(es));
    }

    static Graph grid(int rows, int cols) {
        std::vector<Edge> es;
        auto id = [cols](int r, int c) { return r * cols + c; };
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                if (c + 1 < cols) es.emplace_back(id(r, c), id(r, c + 1));
                if (r + 1 < rows) es.emplace_back(id(r, c), id(r + 1, c));
            }
        return Graph(rows * cols, std::move(es));
    }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
};

// Edge-list text format: one "i j" pair per line, 1-based; '#' starts a comment
// line; blank lines ignored. If n == 0 the vertex count is the largest index seen.
inline Graph read_edge_list(std::istream& in, int n = 0) {
    std::vector<Edge> es;
    int max_seen = 0;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        long i = 0, j = 0;
        if (!(ls >> i >> j))
            throw invalid_input("edge list: malformed line " + std::to_string(lineno));
        std::string rest;
        if (ls >> rest)
            throw invalid_input("edge list: trailing tokens on line " + std::to_string(lineno));
        if (i < 1 || j < 1)
            throw invalid_input("edge list: indices are 1-based, line " + std::to_string(lineno));
        max_seen = std::max(max_seen, static_cast<int>(std::max(i, j)));
        es.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1));
    }
    if (n == 0) n = max_seen;
    return Graph(n, std::move(es));
}

// Disjoint vertex blocks covering 0..n-1.
struct Partition {
    std::vector<std::vector<int>> blocks;

    // Throws unless the blocks are disjoint and cover exactly [0, n).
    void validate(int n) const {
        std::vector<int> seen(n, 0);
        for (const auto& blk : blocks) {
            if (blk.empty()) throw invalid_input("partition: empty block");
            for (int v : blk) {
                if (v < 0 || v >= n) throw invalid_input("partition: vertex out of range");
                if (seen[v]++) throw invalid_input("partition: vertex " + std::to_string(v + 1) + " in two blocks");
            }
        }
        for (int v = 0; v < n; ++v)
            if (!seen[v]) throw invalid_input("partition: vertex " + std::to_string(v + 1) + " not covered");
    }

    // block index per vertex.
    std::vector<int> block_of(int n) const {
        std::vector<int> owner(n, -1);
        for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
            for (int v : blocks[b]) owner[v] = b;
        return owner;
    }

    int max_block_size() const {
        int m = 0;
        for (const auto& blk : blocks) m = std::max(m, static_cast<int>(blk.size()));
        return m;
    }
};

// Edges with both endpoints in one block.
inline std::vector<Edge> internal_edges(const Graph& g, const Partition& p) {
    p.validate(g.n());
    std::vector<int> owner = p.block_of(g.n());
    std::vector<Edge> out;
    for (const Edge& e : g.edges())
        if (owner[e.a] == owner[e.b]) out.push_back(e);
    return out;
}

// Complement of internal_edges: the cut-edge set E^c.
inline std::vector<Edge> cut_edges(const Graph& g, const Partition& p) {
    p.validate(g.n());
    std::vector<int> owner = p.block_of(g.n());
    std::vector<Edge> out;
    for (const Edge& e : g.edges())
        if (owner[e.a] != owner[e.b]) out.push_back(e);
    return out;
}

} // namespace nmc

#endif

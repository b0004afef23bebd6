#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "streamflow/ingest.hpp"
#include "streamflow/types.hpp"

namespace streamflow {

// All windows [start, start + w - 1] with start = min_year + k*dt that fit
// entirely inside [min_year, max_year]. A range shorter than w yields none.
inline std::vector<Window> enumerate_windows(int min_year, int max_year,
                                             const WindowConfig& config) {
    config.validate();
    if (min_year > max_year)
        throw ConfigError("min_year " + std::to_string(min_year) + " > max_year " +
                          std::to_string(max_year));
    std::vector<Window> out;
    for (int index = 0;; ++index) {
        int start = min_year + index * config.step;
        int end = start + config.width - 1;
        if (end > max_year) break;
        out.push_back({index, start, end});
    }
    return out;
}

// Weighted coupling graph of one window. Nodes are corpus article indexes
// (hence sorted by article id); isolated nodes are kept.
struct SliceGraph {
    Window window;
    std::vector<std::uint32_t> nodes; // sorted corpus indexes
    struct Edge {
        std::uint32_t a, b; // corpus indexes, a < b
        double weight;
    };
    std::vector<Edge> edges;

    // CSR adjacency over local node positions.
    std::vector<std::size_t> adj_offsets;
    std::vector<std::pair<std::uint32_t, double>> adj; // (local index, weight)
    std::vector<double> strength;                      // weighted degree per local node
    double total_weight = 0;                           // sum of edge weights

    std::size_t size() const { return nodes.size(); }

    std::uint32_t local_of(std::uint32_t article) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), article);
        return static_cast<std::uint32_t>(it - nodes.begin());
    }

    bool contains(std::uint32_t article) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), article);
        return it != nodes.end() && *it == article;
    }

    void build_adjacency() {
        adj_offsets.assign(nodes.size() + 1, 0);
        strength.assign(nodes.size(), 0.0);
        total_weight = 0;
        std::vector<std::size_t> deg(nodes.size(), 0);
        for (const Edge& e : edges) {
            ++deg[local_of(e.a)];
            ++deg[local_of(e.b)];
        }
        for (std::size_t i = 0; i < nodes.size(); ++i)
            adj_offsets[i + 1] = adj_offsets[i] + deg[i];
        adj.resize(adj_offsets.back());
        std::vector<std::size_t> cursor(adj_offsets.begin(), adj_offsets.end() - 1);
        for (const Edge& e : edges) {
            std::uint32_t la = local_of(e.a), lb = local_of(e.b);
            adj[cursor[la]++] = {lb, e.weight};
            adj[cursor[lb]++] = {la, e.weight};
            strength[la] += e.weight;
            strength[lb] += e.weight;
            total_weight += e.weight;
        }
    }
};

// Materialize the coupling graph of one window. Edge weights are shared
// reference counts, or 1 when binarize is set.
inline SliceGraph slice_graph(const Corpus& corpus, const Window& window,
                              std::uint32_t min_shared, bool binarize = false) {
    SliceGraph g;
    g.window = window;
    for (std::uint32_t i = 0; i < corpus.size(); ++i)
        if (window.contains(corpus.article(i).year)) g.nodes.push_back(i);

    std::vector<std::vector<std::uint32_t>> refs(g.nodes.size());
    for (std::size_t k = 0; k < g.nodes.size(); ++k) refs[k] = corpus.refs_of(g.nodes[k]);

    for (const auto& [i, j, w] : detail::count_shared_refs(refs, min_shared))
        g.edges.push_back({g.nodes[i], g.nodes[j], binarize ? 1.0 : static_cast<double>(w)});

    g.build_adjacency();
    return g;
}

inline std::vector<SliceGraph> slice_all(const Corpus& corpus,
                                         const std::vector<Window>& windows,
                                         std::uint32_t min_shared, bool binarize = false) {
    std::vector<SliceGraph> out;
    out.reserve(windows.size());
    for (const Window& w : windows) out.push_back(slice_graph(corpus, w, min_shared, binarize));
    return out;
}

} // namespace streamflow

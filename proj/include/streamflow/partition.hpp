#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "streamflow/rng.hpp"
#include "streamflow/slicer.hpp"
#include "streamflow/types.hpp"

namespace streamflow {

// Community assignment of one window. Communities are canonical: members
// sorted, communities ordered by smallest member, ids dense from 0.
struct Partition {
    int window = -1;
    std::vector<std::vector<std::uint32_t>> communities; // cid -> sorted corpus indexes

    std::size_t n_nodes() const {
        std::size_t n = 0;
        for (const auto& c : communities) n += c.size();
        return n;
    }

    int cid_of(std::uint32_t article) const {
        auto it = assign_.find(article);
        return it == assign_.end() ? -1 : it->second;
    }

    void canonicalize() {
        for (auto& c : communities) std::sort(c.begin(), c.end());
        communities.erase(std::remove_if(communities.begin(), communities.end(),
                                         [](const auto& c) { return c.empty(); }),
                          communities.end());
        std::sort(communities.begin(), communities.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
        assign_.clear();
        for (int cid = 0; cid < static_cast<int>(communities.size()); ++cid)
            for (std::uint32_t a : communities[cid]) assign_.emplace(a, cid);
    }

private:
    std::unordered_map<std::uint32_t, int> assign_;
};

// Newman-Girvan modularity of a partition on a weighted slice graph,
// Q = sum_c (intra_c / m - resolution * (strength_c / 2m)^2).
// Q of an edgeless graph is defined as 0.
inline double modularity(const SliceGraph& graph, const Partition& partition,
                         double resolution = 1.0) {
    if (partition.n_nodes() != graph.size())
        throw CoverageError("partition covers " + std::to_string(partition.n_nodes()) +
                            " nodes, graph has " + std::to_string(graph.size()));
    for (std::uint32_t node : graph.nodes)
        if (partition.cid_of(node) < 0)
            throw CoverageError("graph node " + std::to_string(node) +
                                " missing from partition");

    double m = graph.total_weight;
    if (m <= 0) return 0.0;

    std::vector<double> intra(partition.communities.size(), 0.0);
    std::vector<double> strength(partition.communities.size(), 0.0);
    for (const SliceGraph::Edge& e : graph.edges) {
        int ca = partition.cid_of(e.a), cb = partition.cid_of(e.b);
        if (ca == cb) intra[ca] += e.weight;
    }
    for (std::size_t i = 0; i < graph.size(); ++i)
        strength[partition.cid_of(graph.nodes[i])] += graph.strength[i];

    double q = 0.0;
    for (std::size_t c = 0; c < intra.size(); ++c) {
        double frac = strength[c] / (2.0 * m);
        q += intra[c] / m - resolution * frac * frac;
    }
    return q;
}

namespace detail {

// Working graph for the multi-level loop. Undirected; each edge appears in
// both endpoint lists, a self-loop appears once carrying twice the internal
// weight so that node strength is preserved by aggregation.
struct LevelGraph {
    std::size_t n = 0;
    std::vector<std::size_t> offsets;
    std::vector<std::pair<std::uint32_t, double>> adj;
    std::vector<double> self_loop; // list weight of the node's own loop
    std::vector<double> strength;  // includes self-loop weight
    double m = 0;                  // half of total strength
};

inline LevelGraph level_graph_of(const SliceGraph& g) {
    LevelGraph lg;
    lg.n = g.size();
    lg.offsets = g.adj_offsets;
    lg.adj = g.adj;
    lg.self_loop.assign(lg.n, 0.0);
    lg.strength = g.strength;
    lg.m = g.total_weight;
    return lg;
}

// One pass of greedy local moves; returns number of moves. Node visit
// order is the caller's (seeded) order. Ties between equally good target
// communities go to the smaller community id.
inline std::size_t local_moving(const LevelGraph& g, std::vector<int>& comm,
                                std::vector<double>& comm_strength,
                                const std::vector<std::uint32_t>& order,
                                double resolution) {
    if (g.m <= 0) return 0;
    std::size_t moves = 0;
    std::vector<double> weight_to(g.n, 0.0);
    std::vector<int> touched;
    touched.reserve(64);

    for (std::uint32_t node : order) {
        int home = comm[node];
        double k = g.strength[node];

        touched.clear();
        for (std::size_t e = g.offsets[node]; e < g.offsets[node + 1]; ++e) {
            auto [nbr, w] = g.adj[e];
            if (nbr == node) continue;
            int c = comm[nbr];
            if (weight_to[c] == 0.0) touched.push_back(c);
            weight_to[c] += w;
        }

        comm_strength[home] -= k;
        double best_gain = weight_to[home] - resolution * comm_strength[home] * k / (2.0 * g.m);
        int best = home;
        for (int c : touched) {
            if (c == home) continue;
            double gain = weight_to[c] - resolution * comm_strength[c] * k / (2.0 * g.m);
            bool better = gain > best_gain + 1e-12;
            bool tied = !better && gain > best_gain - 1e-12;
            // Staying put wins ties against moving; between two moves the
            // smaller community id wins.
            if (better || (tied && best != home && c < best)) {
                best_gain = std::max(best_gain, gain);
                best = c;
            }
        }
        comm_strength[best] += k;
        if (best != home) {
            comm[node] = best;
            ++moves;
        }
        for (int c : touched) weight_to[c] = 0.0;
    }
    return moves;
}

// Contract communities into supernodes. `comm` is renumbered densely in
// order of first appearance over ascending node index.
inline LevelGraph aggregate(const LevelGraph& g, std::vector<int>& comm) {
    std::vector<int> renumber(g.n, -1);
    int next = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
        if (renumber[comm[i]] < 0) renumber[comm[i]] = next++;
        comm[i] = renumber[comm[i]];
    }

    LevelGraph out;
    out.n = static_cast<std::size_t>(next);
    out.self_loop.assign(out.n, 0.0);
    out.strength.assign(out.n, 0.0);
    out.m = g.m;

    // Intra-community edges are seen from both endpoints, so accumulating
    // w per sighting yields exactly the doubled self-loop list weight.
    std::vector<std::unordered_map<int, double>> between(out.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        int ci = comm[i];
        out.self_loop[ci] += g.self_loop[i];
        for (std::size_t e = g.offsets[i]; e < g.offsets[i + 1]; ++e) {
            auto [nbr, w] = g.adj[e];
            if (nbr == i) continue;
            int cj = comm[nbr];
            if (cj == ci)
                out.self_loop[ci] += w;
            else
                between[ci][cj] += w;
        }
    }

    out.offsets.assign(out.n + 1, 0);
    for (std::size_t c = 0; c < out.n; ++c)
        out.offsets[c + 1] = out.offsets[c] + between[c].size() + (out.self_loop[c] > 0 ? 1 : 0);
    out.adj.resize(out.offsets.back());
    for (std::size_t c = 0; c < out.n; ++c) {
        std::size_t pos = out.offsets[c];
        if (out.self_loop[c] > 0)
            out.adj[pos++] = {static_cast<std::uint32_t>(c), out.self_loop[c]};
        std::vector<std::pair<int, double>> nb(between[c].begin(), between[c].end());
        std::sort(nb.begin(), nb.end());
        out.strength[c] = out.self_loop[c];
        for (const auto& [cj, w] : nb) {
            out.adj[pos++] = {static_cast<std::uint32_t>(cj), w};
            out.strength[c] += w;
        }
    }
    return out;
}

// One full multi-level Louvain pass with a given shuffle stream.
inline Partition louvain_once(const SliceGraph& graph, Rng& rng, double resolution) {
    LevelGraph lg = level_graph_of(graph);
    std::vector<int> membership(graph.size());
    for (std::size_t i = 0; i < membership.size(); ++i) membership[i] = static_cast<int>(i);

    for (int level = 0;; ++level) {
        std::vector<int> comm(lg.n);
        std::vector<double> comm_strength(lg.n);
        for (std::size_t i = 0; i < lg.n; ++i) {
            comm[i] = static_cast<int>(i);
            comm_strength[i] = lg.strength[i];
        }

        std::vector<std::uint32_t> order(lg.n);
        for (std::size_t i = 0; i < lg.n; ++i) order[i] = static_cast<std::uint32_t>(i);
        rng.shuffle(order);

        std::size_t total_moves = 0;
        for (;;) {
            std::size_t moves = local_moving(lg, comm, comm_strength, order, resolution);
            total_moves += moves;
            if (moves == 0) break;
            rng.shuffle(order);
        }
        if (total_moves == 0) break;

        LevelGraph next = aggregate(lg, comm);
        for (int& c : membership) c = comm[c];
        if (next.n == lg.n) break;
        lg = std::move(next);
    }

    Partition p;
    p.window = graph.window.index;
    int n_comms = 0;
    for (int c : membership) n_comms = std::max(n_comms, c + 1);
    p.communities.assign(n_comms, {});
    for (std::size_t i = 0; i < membership.size(); ++i)
        p.communities[membership[i]].push_back(graph.nodes[i]);
    p.canonicalize();
    return p;
}

} // namespace detail

// Louvain-style greedy modularity maximization. Deterministic given the
// seed: node visit orders are seeded shuffles of the (already canonical)
// node order. Small graphs take the best of several seeded restarts, which
// is cheap and escapes the worst local optima. Larger graphs run single
// greedy passes: their residual seed sensitivity is what the downstream
// description selection (one run per master seed, keep the highest
// complexity score) is built to exploit.
inline Partition detect(const SliceGraph& graph, std::uint64_t seed,
                        double resolution = 1.0) {
    Partition p;
    p.window = graph.window.index;
    if (graph.size() == 0) {
        p.canonicalize();
        return p;
    }

    Rng rng(Rng::derive(seed, 0x10c4));
    int restarts = graph.size() <= 32 ? 16 : 1;
    double best_q = 0;
    bool have = false;
    for (int r = 0; r < restarts; ++r) {
        Partition candidate = detail::louvain_once(graph, rng, resolution);
        double q = modularity(graph, candidate, resolution);
        if (!have || q > best_q + 1e-12) {
            p = std::move(candidate);
            best_q = q;
            have = true;
        }
    }

    // Contract guards: never return worse than the trivial partitions.
    Partition all_one;
    all_one.window = p.window;
    all_one.communities.push_back(graph.nodes);
    all_one.canonicalize();
    if (modularity(graph, all_one, resolution) > best_q + 1e-12) return all_one;
    Partition singletons;
    singletons.window = p.window;
    for (std::uint32_t n : graph.nodes) singletons.communities.push_back({n});
    singletons.canonicalize();
    if (modularity(graph, singletons, resolution) > best_q + 1e-12) return singletons;
    return p;
}

// Independent detection per window; window seeds derive deterministically
// from the master seed, so results do not depend on evaluation order.
inline std::vector<Partition> detect_all(const std::vector<SliceGraph>& slices,
                                         std::uint64_t master_seed,
                                         double resolution = 1.0) {
    std::vector<Partition> out;
    out.reserve(slices.size());
    for (const SliceGraph& g : slices)
        out.push_back(detect(g, Rng::derive(master_seed, static_cast<std::uint64_t>(g.window.index)),
                             resolution));
    return out;
}

} // namespace streamflow

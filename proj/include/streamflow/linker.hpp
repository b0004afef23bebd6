#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "streamflow/partition.hpp"
#include "streamflow/types.hpp"

namespace streamflow {

// Jaccard index of two sorted id sets; 0 when both are empty.
inline double jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else { ++inter; ++i; ++j; }
    }
    return static_cast<double>(inter) /
           static_cast<double>(a.size() + b.size() - inter);
}

// Similarity measures are pluggable; Jaccard is the default and the only
// built-in. Inputs are sorted member sets.
using SimilarityFn =
    std::function<double(std::span<const std::uint32_t>, std::span<const std::uint32_t>)>;

inline SimilarityFn similarity_by_name(const std::string& name) {
    if (name == "jaccard")
        return [](std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
            return jaccard(a, b);
        };
    throw ConfigError("unknown similarity measure '" + name + "'");
}

// One directed best-match link; absent when cid < 0. A link is recorded
// only for strictly positive similarity (zero overlap never links).
struct Link {
    int cid = -1;
    double sim = 0.0;

    bool exists() const { return cid >= 0; }
    friend bool operator==(const Link&, const Link&) = default;
};

// Best-similarity links of one community into the four surrounding
// windows: ancestor (t-2), predecessor (t-1), successor (t+1),
// grandchild (t+2).
struct CommunityLinks {
    Link ancestor, predecessor, successor, grandchild;
};

struct TemporalLinks {
    // per window, per community id
    std::vector<std::vector<CommunityLinks>> windows;

    const CommunityLinks& at(const CommunityRef& ref) const {
        return windows[ref.window][ref.cid];
    }

    // Communities at t-1 whose successor is (t, cid), ascending cid order.
    std::vector<int> predecessors_of(int window, int cid) const {
        std::vector<int> out;
        if (window == 0) return out;
        const auto& prev = windows[window - 1];
        for (int p = 0; p < static_cast<int>(prev.size()); ++p)
            if (prev[p].successor.cid == cid) out.push_back(p);
        return out;
    }

    // Communities at t+1 whose predecessor is (t, cid), ascending cid order.
    std::vector<int> continuations_of(int window, int cid) const {
        std::vector<int> out;
        if (window + 1 >= static_cast<int>(windows.size())) return out;
        const auto& next = windows[window + 1];
        for (int s = 0; s < static_cast<int>(next.size()); ++s)
            if (next[s].predecessor.cid == cid) out.push_back(s);
        return out;
    }
};

namespace detail {

// Argmax-similarity community of `members` among `targets`. Ties go to
// the larger target, then the smaller community id.
inline Link best_match(const std::vector<std::uint32_t>& members,
                       const std::vector<std::vector<std::uint32_t>>& targets,
                       const SimilarityFn& sim, double threshold) {
    Link best;
    for (int cid = 0; cid < static_cast<int>(targets.size()); ++cid) {
        double s = sim(members, targets[cid]);
        if (s <= 0.0 || s < threshold) continue;
        if (!best.exists() || s > best.sim ||
            (s == best.sim && targets[cid].size() > targets[best.cid].size()))
            best = {cid, s};
    }
    return best;
}

} // namespace detail

// For every community, its best-similarity counterpart at offsets
// -2, -1, +1, +2 (where those windows exist), subject to the threshold.
inline TemporalLinks link_all(const std::vector<Partition>& partitions,
                              const SimilarityFn& sim, double threshold = 0.0) {
    int n = static_cast<int>(partitions.size());
    TemporalLinks links;
    links.windows.resize(n);
    for (int t = 0; t < n; ++t)
        links.windows[t].resize(partitions[t].communities.size());

    for (int t = 0; t < n; ++t) {
        for (int cid = 0; cid < static_cast<int>(partitions[t].communities.size()); ++cid) {
            const auto& members = partitions[t].communities[cid];
            CommunityLinks& out = links.windows[t][cid];
            if (t - 2 >= 0)
                out.ancestor = detail::best_match(members, partitions[t - 2].communities, sim, threshold);
            if (t - 1 >= 0)
                out.predecessor = detail::best_match(members, partitions[t - 1].communities, sim, threshold);
            if (t + 1 < n)
                out.successor = detail::best_match(members, partitions[t + 1].communities, sim, threshold);
            if (t + 2 < n)
                out.grandchild = detail::best_match(members, partitions[t + 2].communities, sim, threshold);
        }
    }
    return links;
}

inline TemporalLinks link_all(const std::vector<Partition>& partitions, double threshold = 0.0) {
    return link_all(partitions, similarity_by_name("jaccard"), threshold);
}

} // namespace streamflow

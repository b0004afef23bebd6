#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "streamflow/denoise.hpp"
#include "streamflow/ingest.hpp"

namespace streamflow {

struct StreamLabel {
    std::string main_author;
    int start_year = 0;
    int end_year = 0;
};

// A laminar succession of communities, one per consecutive window.
struct Stream {
    int id = -1;
    std::vector<CommunityRef> members;
    StreamLabel label;

    std::size_t article_count(const Description& d) const {
        std::size_t n = 0;
        for (const CommunityRef& r : members)
            n += d.partitions[r.window].communities[r.cid].size();
        return n;
    }
};

namespace detail {

// Mutual +/-1 adjacency: C at t chains to D at t+1 when C's successor is D
// and D's predecessor is C, and neither endpoint is a split/merge junction.
inline std::vector<std::vector<int>> mutual_next(const Description& d) {
    int n = static_cast<int>(d.partitions.size());
    std::vector<std::vector<int>> next(n);
    for (int t = 0; t < n; ++t)
        next[t].assign(d.partitions[t].communities.size(), -1);

    for (int t = 0; t + 1 < n; ++t) {
        for (int c = 0; c < static_cast<int>(d.partitions[t].communities.size()); ++c) {
            const Link& succ = d.links.windows[t][c].successor;
            if (!succ.exists()) continue;
            if (d.links.windows[t + 1][succ.cid].predecessor.cid != c) continue;
            // Junctions terminate streams: a trunk with several branches or
            // a merge target with several predecessors starts fresh lanes.
            bool split_junction = false;
            int fan_out = 0;
            for (const CommunityLinks& l : d.links.windows[t + 1])
                if (l.predecessor.cid == c) ++fan_out;
            split_junction = fan_out >= 2;
            bool merge_junction = d.links.predecessors_of(t + 1, succ.cid).size() >= 2;
            if (split_junction || merge_junction) continue;
            next[t][c] = succ.cid;
        }
    }
    return next;
}

} // namespace detail

// Maximal laminar streams of a fixed-point description: chains of mutually
// +/-1 linked communities, cut wherever an existing +/-2 link inside the
// chain does not land on the chain member two windows away.
inline std::vector<Stream> extract_streams(const Description& d) {
    int n = static_cast<int>(d.partitions.size());
    std::vector<std::vector<int>> next = detail::mutual_next(d);

    std::vector<std::vector<bool>> has_prev(n);
    for (int t = 0; t < n; ++t) has_prev[t].assign(d.partitions[t].communities.size(), false);
    for (int t = 0; t + 1 < n; ++t)
        for (int c = 0; c < static_cast<int>(next[t].size()); ++c)
            if (next[t][c] >= 0) has_prev[t + 1][next[t][c]] = true;

    std::vector<Stream> out;
    for (int t = 0; t < n; ++t) {
        for (int c = 0; c < static_cast<int>(d.partitions[t].communities.size()); ++c) {
            if (has_prev[t][c]) continue; // not a chain head
            std::vector<CommunityRef> chain;
            for (CommunityRef cur{t, c}; cur.cid >= 0;) {
                chain.push_back(cur);
                int nx = next[cur.window][cur.cid];
                cur = (cur.window + 1 < n && nx >= 0) ? CommunityRef{cur.window + 1, nx}
                                                      : CommunityRef{-1, -1};
            }

            // +/-2 consistency pass: start a new stream at the first member
            // whose ancestor link, or whose grandparent's grandchild link,
            // contradicts the chain.
            std::size_t start = 0;
            for (std::size_t j = 0; j < chain.size(); ++j) {
                if (j >= start + 2) {
                    const CommunityRef& lo = chain[j - 2];
                    const Link& grand = d.links.windows[lo.window][lo.cid].grandchild;
                    const Link& anc = d.links.windows[chain[j].window][chain[j].cid].ancestor;
                    bool contradicted = (grand.exists() && grand.cid != chain[j].cid) ||
                                        (anc.exists() && anc.cid != lo.cid);
                    if (contradicted) {
                        Stream s;
                        s.members.assign(chain.begin() + start, chain.begin() + j);
                        out.push_back(std::move(s));
                        start = j;
                    }
                }
            }
            Stream s;
            s.members.assign(chain.begin() + start, chain.end());
            out.push_back(std::move(s));
        }
    }

    std::sort(out.begin(), out.end(), [](const Stream& a, const Stream& b) {
        return a.members.front() < b.members.front();
    });
    for (int i = 0; i < static_cast<int>(out.size()); ++i) out[i].id = i;
    return out;
}

// Main author = the author with the most distinct articles across the
// stream's communities (lexicographic tie-break); years span the first
// member's window start to the last member's window end.
inline StreamLabel label_stream(const Stream& stream, const Description& d,
                                const Corpus& corpus) {
    std::vector<std::uint32_t> articles;
    for (const CommunityRef& r : stream.members) {
        const auto& members = d.partitions[r.window].communities[r.cid];
        articles.insert(articles.end(), members.begin(), members.end());
    }
    std::sort(articles.begin(), articles.end());
    articles.erase(std::unique(articles.begin(), articles.end()), articles.end());

    std::map<std::string, std::size_t> counts;
    for (std::uint32_t a : articles)
        for (const std::string& author : corpus.article(a).authors) ++counts[author];

    StreamLabel label;
    for (const auto& [author, count] : counts)
        if (label.main_author.empty() || count > counts[label.main_author])
            label.main_author = author;

    label.start_year = d.windows[stream.members.front().window].start_year;
    label.end_year = d.windows[stream.members.back().window].end_year;
    return label;
}

inline std::vector<Stream> extract_labeled_streams(const Description& d, const Corpus& corpus) {
    std::vector<Stream> streams = extract_streams(d);
    for (Stream& s : streams) s.label = label_stream(s, d, corpus);
    return streams;
}

// Per-window (initial, final) modularity, computed at fixpoint time on the
// same slice graphs.
inline std::vector<std::pair<double, double>> modularity_series(const Description& d) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t t = 0; t < d.q_initial.size(); ++t)
        out.emplace_back(d.q_initial[t], d.q_final[t]);
    return out;
}

// Stream id per community, -1 for none (never happens on a full description).
inline std::map<std::pair<int, int>, int> stream_of_community(const std::vector<Stream>& streams) {
    std::map<std::pair<int, int>, int> out;
    for (const Stream& s : streams)
        for (const CommunityRef& r : s.members) out[{r.window, r.cid}] = s.id;
    return out;
}

} // namespace streamflow

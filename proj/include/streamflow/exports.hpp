#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamflow/alluvial.hpp"
#include "streamflow/denoise.hpp"
#include "streamflow/streams.hpp"

namespace streamflow {

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw IoError("error while writing '" + path + "'");
}

namespace detail {

inline nlohmann::ordered_json link_json(const Link& l, int window_offset, int t) {
    if (!l.exists()) return nullptr;
    nlohmann::ordered_json j;
    j["window"] = t + window_offset;
    j["cid"] = l.cid;
    j["similarity"] = l.sim;
    return j;
}

inline nlohmann::ordered_json partitions_json(const std::vector<Partition>& partitions,
                                              const Corpus& corpus) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const Partition& p : partitions) {
        nlohmann::ordered_json jw = nlohmann::ordered_json::array();
        for (const auto& community : p.communities) {
            nlohmann::ordered_json jc = nlohmann::ordered_json::array();
            for (std::uint32_t a : community) jc.push_back(corpus.article(a).id);
            jw.push_back(jc);
        }
        out.push_back(jw);
    }
    return out;
}

inline nlohmann::ordered_json ledger_set_json(const std::vector<LedgerEntry>& set) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const LedgerEntry& e : set) {
        nlohmann::ordered_json j;
        j["window"] = e.ref.window;
        j["cid"] = e.ref.cid;
        j["size"] = e.size;
        out.push_back(j);
    }
    return out;
}

} // namespace detail

inline nlohmann::ordered_json event_json(const Event& e) {
    nlohmann::ordered_json j;
    j["window"] = e.window;
    j["kind"] = to_string(e.kind);
    j["classification"] = to_string(e.classification);
    j["corrected"] = e.corrected;
    if (e.forced_structural) j["forced_structural"] = true;
    nlohmann::ordered_json trunk;
    trunk["window"] = e.trunk.window;
    trunk["cid"] = e.trunk.cid;
    trunk["size"] = e.trunk_size;
    j["trunk"] = trunk;
    j["branches"] = nlohmann::ordered_json::array();
    for (int i = 0; i < 2; ++i) {
        nlohmann::ordered_json b;
        b["window"] = e.branches[i].window;
        b["cid"] = e.branches[i].cid;
        b["size"] = e.branch_sizes[i];
        j["branches"].push_back(b);
    }
    return j;
}

inline nlohmann::ordered_json events_json(const Description& d) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const Event& e : d.events) out.push_back(event_json(e));
    return out;
}

struct SeedRun {
    std::uint64_t seed = 0;
    double complexity = 0.0;
    double mean_q_final = 0.0;
};

inline nlohmann::ordered_json description_json(const Description& d, const Corpus& corpus,
                                               const nlohmann::ordered_json& config_echo,
                                               const std::vector<SeedRun>& seed_runs) {
    nlohmann::ordered_json j;
    j["config"] = config_echo;
    nlohmann::ordered_json jc;
    jc["articles"] = corpus.size();
    jc["years"] = {corpus.min_year(), corpus.max_year()};
    jc["references"] = corpus.ref_universe();
    j["corpus"] = jc;

    j["windows"] = nlohmann::ordered_json::array();
    for (const Window& w : d.windows) {
        nlohmann::ordered_json jw;
        jw["index"] = w.index;
        jw["start_year"] = w.start_year;
        jw["end_year"] = w.end_year;
        j["windows"].push_back(jw);
    }

    j["seed"] = d.seed;
    j["complexity"] = d.complexity;
    if (!seed_runs.empty()) {
        j["seed_runs"] = nlohmann::ordered_json::array();
        for (const SeedRun& r : seed_runs) {
            nlohmann::ordered_json jr;
            jr["seed"] = r.seed;
            jr["complexity"] = r.complexity;
            jr["mean_final_modularity"] = r.mean_q_final;
            j["seed_runs"].push_back(jr);
        }
    }

    j["partitions"] = detail::partitions_json(d.partitions, corpus);
    j["initial_partitions"] = detail::partitions_json(d.initial, corpus);

    j["links"] = nlohmann::ordered_json::array();
    for (int t = 0; t < static_cast<int>(d.links.windows.size()); ++t) {
        nlohmann::ordered_json jw = nlohmann::ordered_json::array();
        for (const CommunityLinks& l : d.links.windows[t]) {
            nlohmann::ordered_json jl;
            jl["ancestor"] = detail::link_json(l.ancestor, -2, t);
            jl["predecessor"] = detail::link_json(l.predecessor, -1, t);
            jl["successor"] = detail::link_json(l.successor, +1, t);
            jl["grandchild"] = detail::link_json(l.grandchild, +2, t);
            jw.push_back(jl);
        }
        j["links"].push_back(jw);
    }

    nlohmann::ordered_json jl;
    jl["u_s"] = detail::ledger_set_json(d.ledger.u_s);
    jl["u_m"] = detail::ledger_set_json(d.ledger.u_m);
    jl["u_r"] = detail::ledger_set_json(d.ledger.u_r);
    jl["u_x"] = detail::ledger_set_json(d.ledger.u_x);
    j["ledger"] = jl;

    j["modularity"] = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < d.q_initial.size(); ++t) {
        nlohmann::ordered_json jq;
        jq["window"] = t;
        jq["initial"] = d.q_initial[t];
        jq["final"] = d.q_final[t];
        j["modularity"].push_back(jq);
    }
    return j;
}

inline nlohmann::ordered_json streams_json(const std::vector<Stream>& streams,
                                           const Description& d, const Corpus& corpus) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const Stream& s : streams) {
        nlohmann::ordered_json j;
        j["id"] = s.id;
        nlohmann::ordered_json jl;
        jl["main_author"] = s.label.main_author;
        jl["start_year"] = s.label.start_year;
        jl["end_year"] = s.label.end_year;
        j["label"] = jl;
        j["members"] = nlohmann::ordered_json::array();
        for (const CommunityRef& r : s.members) {
            nlohmann::ordered_json jm;
            jm["window"] = r.window;
            jm["cid"] = r.cid;
            nlohmann::ordered_json arts = nlohmann::ordered_json::array();
            for (std::uint32_t a : d.partitions[r.window].communities[r.cid])
                arts.push_back(corpus.article(a).id);
            jm["articles"] = arts;
            j["members"].push_back(jm);
        }
        out.push_back(j);
    }
    return out;
}

// Community-level stream graph: one node per community, solid edges inside
// streams, dashed edges across them (split/merge fronts).
inline std::string stream_graph_dot(const std::vector<Stream>& streams, const Description& d) {
    auto stream_of = stream_of_community(streams);
    auto node_name = [](int t, int c) {
        return "w" + std::to_string(t) + "c" + std::to_string(c);
    };

    std::string dot;
    dot += "digraph stream_graph {\n";
    dot += "  rankdir=LR;\n";
    dot += "  node [shape=box, fontsize=10, fontname=\"sans-serif\"];\n";
    for (int t = 0; t < static_cast<int>(d.partitions.size()); ++t) {
        for (int c = 0; c < static_cast<int>(d.partitions[t].communities.size()); ++c) {
            const Window& w = d.windows[t];
            dot += "  \"" + node_name(t, c) + "\" [label=\"" + std::to_string(w.start_year) +
                   "-" + std::to_string(w.end_year) + "\\nn=" +
                   std::to_string(d.partitions[t].communities[c].size()) + "\\nstream " +
                   std::to_string(stream_of.at({t, c})) + "\"];\n";
        }
    }
    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> seen;
    auto edge = [&](int t1, int c1, int t2, int c2) {
        if (!seen.insert({{t1, c1}, {t2, c2}}).second) return;
        bool same = stream_of.at({t1, c1}) == stream_of.at({t2, c2});
        dot += "  \"" + node_name(t1, c1) + "\" -> \"" + node_name(t2, c2) + "\"" +
               (same ? ";\n" : " [style=dashed];\n");
    };
    for (int t = 0; t < static_cast<int>(d.partitions.size()); ++t) {
        for (int c = 0; c < static_cast<int>(d.partitions[t].communities.size()); ++c) {
            const CommunityLinks& l = d.links.windows[t][c];
            if (l.successor.exists()) edge(t, c, t + 1, l.successor.cid);
            if (l.predecessor.exists()) edge(t - 1, l.predecessor.cid, t, c);
        }
    }
    dot += "}\n";
    return dot;
}

inline std::string modularity_csv(const Description& d) {
    std::string csv = "window,start_year,end_year,modularity_initial,modularity_final\n";
    for (std::size_t t = 0; t < d.q_initial.size(); ++t) {
        csv += std::to_string(d.windows[t].index) + "," +
               std::to_string(d.windows[t].start_year) + "," +
               std::to_string(d.windows[t].end_year) + "," +
               detail::fmt_fixed(d.q_initial[t], 6) + "," +
               detail::fmt_fixed(d.q_final[t], 6) + "\n";
    }
    return csv;
}

} // namespace streamflow

#pragma once

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "streamflow/streams.hpp"

namespace streamflow {

namespace detail {

// Locale-independent fixed formatting for geometry output.
inline std::string fmt_fixed(double v, int precision = 2) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace detail

struct LayoutBox {
    CommunityRef ref;
    int stream = -1;
    double x = 0, y = 0, width = 0, height = 0; // y is the top edge
};

struct LayoutRibbon {
    CommunityRef from, to;
    double width = 0;
    enum class Kind { laminar, split, merge } kind = Kind::laminar;
};

struct AlluvialLayout {
    std::vector<LayoutBox> boxes;
    std::vector<LayoutRibbon> ribbons;
    std::vector<int> lane_of_stream; // index = stream id
    double width = 0, height = 0;
    double px_per_year = 26.0;
    double lane_pitch = 64.0;
    double box_width = 14.0;
    double margin = 46.0;
};

// One horizontal lane per stream, x positioned by window start year.
// Lanes are assigned greedily in stream birth order (larger streams
// first within a window): forks take the free lane nearest their parent
// stream, fresh streams the lowest free lane.
inline AlluvialLayout layout_alluvial(const std::vector<Stream>& streams,
                                      const Description& d) {
    AlluvialLayout layout;
    layout.lane_of_stream.assign(streams.size(), 0);
    if (streams.empty()) return layout;

    auto stream_of = stream_of_community(streams);

    std::vector<int> order(streams.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::vector<std::size_t> sizes(streams.size());
    for (std::size_t i = 0; i < streams.size(); ++i) sizes[i] = streams[i].article_count(d);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        int wa = streams[a].members.front().window, wb = streams[b].members.front().window;
        if (wa != wb) return wa < wb;
        if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
        return a < b;
    });

    std::set<int> used;
    std::vector<bool> placed(streams.size(), false);
    for (int sid : order) {
        const CommunityRef& head = streams[sid].members.front();
        int parent_lane = -1;
        const Link& pred = d.links.windows[head.window][head.cid].predecessor;
        if (pred.exists()) {
            auto it = stream_of.find({head.window - 1, pred.cid});
            if (it != stream_of.end() && it->second != sid && placed[it->second])
                parent_lane = layout.lane_of_stream[it->second];
        }
        int lane;
        if (parent_lane >= 0) {
            for (int dist = 0;; ++dist) { // nearest free lane, below first
                if (parent_lane + dist >= 0 && !used.count(parent_lane + dist)) { lane = parent_lane + dist; break; }
                if (parent_lane - dist >= 0 && !used.count(parent_lane - dist)) { lane = parent_lane - dist; break; }
            }
        } else {
            lane = 0;
            while (used.count(lane)) ++lane;
        }
        used.insert(lane);
        layout.lane_of_stream[sid] = lane;
        placed[sid] = true;
    }

    // Geometry.
    int min_year = d.windows.front().start_year;
    std::size_t max_size = 1;
    for (const Partition& p : d.partitions)
        for (const auto& c : p.communities) max_size = std::max(max_size, c.size());
    double px_per_article = std::min(1.6, (layout.lane_pitch - 10.0) / static_cast<double>(max_size));

    for (const Stream& s : streams) {
        for (const CommunityRef& r : s.members) {
            LayoutBox box;
            box.ref = r;
            box.stream = s.id;
            std::size_t size = d.partitions[r.window].communities[r.cid].size();
            box.width = layout.box_width;
            box.height = std::max(3.0, static_cast<double>(size) * px_per_article);
            box.x = layout.margin + (d.windows[r.window].start_year - min_year) * layout.px_per_year;
            double lane_center = layout.margin +
                                 layout.lane_of_stream[s.id] * layout.lane_pitch +
                                 layout.lane_pitch / 2.0;
            box.y = lane_center - box.height / 2.0;
            layout.boxes.push_back(box);
            layout.width = std::max(layout.width, box.x + box.width + layout.margin);
            layout.height = std::max(layout.height, box.y + box.height + layout.margin);
        }
    }

    // Ribbons: every predecessor and successor link once, laminar inside a
    // stream, split/merge across streams. Width follows the smaller
    // endpoint's member count.
    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> seen;
    auto add_ribbon = [&](const CommunityRef& from, const CommunityRef& to) {
        if (!seen.insert({{from.window, from.cid}, {to.window, to.cid}}).second) return;
        LayoutRibbon r;
        r.from = from;
        r.to = to;
        std::size_t sf = d.partitions[from.window].communities[from.cid].size();
        std::size_t st = d.partitions[to.window].communities[to.cid].size();
        r.width = std::max(1.0, static_cast<double>(std::min(sf, st)) * px_per_article);
        int stream_from = stream_of.at({from.window, from.cid});
        int stream_to = stream_of.at({to.window, to.cid});
        if (stream_from == stream_to) r.kind = LayoutRibbon::Kind::laminar;
        else if (d.links.predecessors_of(to.window, to.cid).size() >= 2)
            r.kind = LayoutRibbon::Kind::merge;
        else r.kind = LayoutRibbon::Kind::split;
        layout.ribbons.push_back(r);
    };
    int n = static_cast<int>(d.partitions.size());
    for (int t = 0; t < n; ++t) {
        for (int c = 0; c < static_cast<int>(d.partitions[t].communities.size()); ++c) {
            const CommunityLinks& l = d.links.windows[t][c];
            if (l.successor.exists()) add_ribbon({t, c}, {t + 1, l.successor.cid});
            if (l.predecessor.exists()) add_ribbon({t - 1, l.predecessor.cid}, {t, c});
        }
    }
    return layout;
}

// Render the layout as a standalone SVG document; output is byte-stable
// for identical input.
inline std::string write_alluvial_svg(const AlluvialLayout& layout,
                                      const std::vector<Stream>& streams,
                                      const Description& d) {
    using detail::fmt_fixed;
    static const char* palette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
                                    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
    constexpr int n_colors = 10;

    std::map<std::pair<int, int>, const LayoutBox*> box_at;
    for (const LayoutBox& b : layout.boxes) box_at[{b.ref.window, b.ref.cid}] = &b;

    double width = std::max(layout.width, 2 * layout.margin);
    double height = std::max(layout.height, 2 * layout.margin);
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_fixed(width, 0) +
           "\" height=\"" + fmt_fixed(height, 0) + "\" viewBox=\"0 0 " + fmt_fixed(width, 0) +
           " " + fmt_fixed(height, 0) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

    // Year axis.
    if (!d.windows.empty()) {
        int min_year = d.windows.front().start_year;
        int max_year = d.windows.back().start_year;
        for (int y = min_year; y <= max_year; y += (max_year - min_year >= 20 ? 5 : 1)) {
            double x = layout.margin + (y - min_year) * layout.px_per_year;
            svg += "<text x=\"" + fmt_fixed(x) + "\" y=\"" + fmt_fixed(height - 12.0) +
                   "\" font-size=\"9\" fill=\"#555555\" font-family=\"sans-serif\">" +
                   std::to_string(y) + "</text>\n";
        }
    }

    for (const LayoutRibbon& r : layout.ribbons) {
        const LayoutBox* a = box_at.at({r.from.window, r.from.cid});
        const LayoutBox* b = box_at.at({r.to.window, r.to.cid});
        double x1 = a->x + a->width, y1 = a->y + a->height / 2.0;
        double x2 = b->x, y2 = b->y + b->height / 2.0;
        double mid = (x1 + x2) / 2.0;
        const char* color = r.kind == LayoutRibbon::Kind::laminar
                                ? palette[a->stream % n_colors]
                                : (r.kind == LayoutRibbon::Kind::merge ? "#888888" : "#aaaaaa");
        svg += "<path d=\"M " + fmt_fixed(x1) + " " + fmt_fixed(y1) + " C " + fmt_fixed(mid) +
               " " + fmt_fixed(y1) + ", " + fmt_fixed(mid) + " " + fmt_fixed(y2) + ", " +
               fmt_fixed(x2) + " " + fmt_fixed(y2) + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"" + fmt_fixed(r.width) + "\" stroke-opacity=\"0.45\"/>\n";
    }

    for (const LayoutBox& b : layout.boxes) {
        std::size_t size = d.partitions[b.ref.window].communities[b.ref.cid].size();
        svg += "<rect x=\"" + fmt_fixed(b.x) + "\" y=\"" + fmt_fixed(b.y) + "\" width=\"" +
               fmt_fixed(b.width) + "\" height=\"" + fmt_fixed(b.height) + "\" fill=\"" +
               palette[b.stream % n_colors] + "\"><title>window " +
               std::to_string(b.ref.window) + " community " + std::to_string(b.ref.cid) +
               ": " + std::to_string(size) + " articles (stream " + std::to_string(b.stream) +
               ")</title></rect>\n";
    }

    for (const Stream& s : streams) {
        if (s.members.empty()) continue;
        const LayoutBox* head = box_at.at({s.members.front().window, s.members.front().cid});
        std::string text = detail::xml_escape(s.label.main_author) + " (" +
                           std::to_string(s.label.start_year) + "-" +
                           std::to_string(s.label.end_year) + ")";
        svg += "<text x=\"" + fmt_fixed(head->x) + "\" y=\"" + fmt_fixed(head->y - 4.0) +
               "\" font-size=\"9\" fill=\"#333333\" font-family=\"sans-serif\">" + text +
               "</text>\n";
    }

    svg += "</svg>\n";
    return svg;
}

} // namespace streamflow

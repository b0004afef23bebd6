#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "streamflow/linker.hpp"
#include "streamflow/partition.hpp"
#include "streamflow/rng.hpp"
#include "streamflow/slicer.hpp"

namespace streamflow {

enum class EventKind { split, merge };
enum class EventClass { structural, ephemeral };

inline const char* to_string(EventKind k) { return k == EventKind::split ? "split" : "merge"; }
inline const char* to_string(EventClass c) {
    return c == EventClass::structural ? "structural" : "ephemeral";
}

// One classified split/merge occurrence. For a merge the branches live at
// t-1 and the trunk at t; for a split the trunk lives at t-1 and the
// branches at t. `window` is always t. Community refs and sizes are as at
// detection time; corrections renumber ids afterwards.
struct Event {
    EventKind kind = EventKind::merge;
    int window = -1;
    EventClass classification = EventClass::structural;
    CommunityRef trunk;
    std::size_t trunk_size = 0;
    std::array<CommunityRef, 2> branches{};
    std::array<std::size_t, 2> branch_sizes{};
    bool corrected = false;         // ephemeral and the correction was applied
    bool forced_structural = false; // ephemeral pattern held structural (memo/abort)
};

struct LedgerEntry {
    CommunityRef ref;
    std::size_t size = 0;
    std::uint64_t fingerprint = 0; // hash of the member set, stable across renumbering
};

// Eq.-1 bookkeeping: communities resulting from structural splits (u_s),
// structural merges (u_m), ephemeral splits (u_r) and ephemeral merges
// (u_x); the four sets are pairwise disjoint, sizes as at detection.
struct EventLedger {
    std::vector<LedgerEntry> u_s, u_m, u_r, u_x;

    bool empty() const { return u_s.empty() && u_m.empty() && u_r.empty() && u_x.empty(); }
};

// C_S = (sum over u_s+u_m of s_u - sum over u_r+u_x of s_u) / sum over all
// communities of s_u. Undefined when the description has no communities.
inline double complexity_score(const EventLedger& ledger,
                               const std::vector<std::size_t>& all_community_sizes) {
    std::set<std::pair<int, std::uint64_t>> seen;
    auto check_disjoint = [&](const std::vector<LedgerEntry>& set) {
        for (const LedgerEntry& e : set)
            if (!seen.insert({e.ref.window, e.fingerprint}).second)
                throw Error("ledger sets are not pairwise disjoint");
    };
    check_disjoint(ledger.u_s);
    check_disjoint(ledger.u_m);
    check_disjoint(ledger.u_r);
    check_disjoint(ledger.u_x);

    double denom = 0;
    for (std::size_t s : all_community_sizes) denom += static_cast<double>(s);
    if (denom <= 0) throw Error("complexity score undefined: no communities");

    double num = 0;
    for (const LedgerEntry& e : ledger.u_s) num += static_cast<double>(e.size);
    for (const LedgerEntry& e : ledger.u_m) num += static_cast<double>(e.size);
    for (const LedgerEntry& e : ledger.u_r) num -= static_cast<double>(e.size);
    for (const LedgerEntry& e : ledger.u_x) num -= static_cast<double>(e.size);
    return num / denom;
}

namespace detail {

inline std::uint64_t fingerprint(const std::vector<std::uint32_t>& members) {
    // FNV-1a over the sorted member ids.
    std::uint64_t h = 1469598103934665603ULL;
    for (std::uint32_t m : members) {
        for (int b = 0; b < 4; ++b) {
            h ^= (m >> (8 * b)) & 0xffu;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

// Corrections already applied at a window, keyed by the member set of the
// merged side. An event corrected once is never re-corrected in the
// opposite direction; re-splitting a remerge output (or vice versa) would
// oscillate.
struct CorrectionMemo {
    enum Flag : std::uint8_t { resplit_done = 1, remerge_done = 2, forced = 4 };
    std::map<std::pair<int, std::uint64_t>, std::uint8_t> entries;

    void mark(int window, std::uint64_t fp, Flag f) { entries[{window, fp}] |= f; }
    bool blocks_resplit(int window, std::uint64_t fp) const {
        auto it = entries.find({window, fp});
        return it != entries.end() && (it->second & (remerge_done | forced));
    }
    bool blocks_remerge(int window, std::uint64_t fp) const {
        auto it = entries.find({window, fp});
        return it != entries.end() && (it->second & (resplit_done | forced));
    }
};

// Two largest community ids from `cids` (size desc, then cid asc).
inline std::pair<int, int> two_largest(const std::vector<int>& cids,
                                       const std::vector<std::vector<std::uint32_t>>& communities) {
    std::vector<int> sorted = cids;
    std::sort(sorted.begin(), sorted.end(), [&](int x, int y) {
        if (communities[x].size() != communities[y].size())
            return communities[x].size() > communities[y].size();
        return x < y;
    });
    return {sorted[0], sorted[1]};
}

} // namespace detail

enum class MergeClass { not_a_merge, structural, ephemeral };
enum class SplitClass { not_a_split, structural, ephemeral };

struct MergeClassification {
    MergeClass cls = MergeClass::not_a_merge;
    int pred_a = -1, pred_b = -1; // two largest predecessors at t-1
    int cont_a = -1, cont_b = -1; // paired continuations at t+1 (ephemeral only)
};

struct SplitClassification {
    SplitClass cls = SplitClass::not_a_split;
    int branch_a = -1, branch_b = -1; // two largest branches at t
};

// A community M at t is a merge candidate when at least two communities at
// t-1 link to it as successor. The merge is ephemeral when the t+/-2 links
// bypass M coherently: the grandchildren of the two largest predecessors
// exist, differ, and are exactly M's two strongest continuations at t+1.
// Any other candidate pattern is a structural merge.
inline MergeClassification classify_merge(const std::vector<Partition>& partitions,
                                          const TemporalLinks& links, int t, int m_cid) {
    MergeClassification out;
    std::vector<int> preds = links.predecessors_of(t, m_cid);
    if (preds.size() < 2) return out;

    auto [pa, pb] = detail::two_largest(preds, partitions[t - 1].communities);
    out.cls = MergeClass::structural;
    out.pred_a = pa;
    out.pred_b = pb;

    std::vector<int> conts = links.continuations_of(t, m_cid);
    if (conts.size() < 2) return out;
    std::sort(conts.begin(), conts.end(), [&](int x, int y) {
        double sx = links.windows[t + 1][x].predecessor.sim;
        double sy = links.windows[t + 1][y].predecessor.sim;
        if (sx != sy) return sx > sy;
        const auto& cs = partitions[t + 1].communities;
        if (cs[x].size() != cs[y].size()) return cs[x].size() > cs[y].size();
        return x < y;
    });
    int s1 = conts[0], s2 = conts[1];

    const Link& ga = links.windows[t - 1][pa].grandchild;
    const Link& gb = links.windows[t - 1][pb].grandchild;
    if (ga.exists() && gb.exists() && ga.cid != gb.cid &&
        ((ga.cid == s1 && gb.cid == s2) || (ga.cid == s2 && gb.cid == s1))) {
        out.cls = MergeClass::ephemeral;
        out.cont_a = ga.cid;
        out.cont_b = gb.cid;
    }
    return out;
}

// Mirror of classify_merge under time reversal. T at t-1 is a split
// candidate when at least two communities at t link back to it as
// predecessor; the split is ephemeral when both branches continue into the
// same community S at t+1 and T's grandchild link also lands on S.
inline SplitClassification classify_split(const std::vector<Partition>& partitions,
                                          const TemporalLinks& links, int t, int trunk_cid) {
    SplitClassification out;
    std::vector<int> branches;
    const auto& here = links.windows[t];
    for (int c = 0; c < static_cast<int>(here.size()); ++c)
        if (here[c].predecessor.cid == trunk_cid) branches.push_back(c);
    if (branches.size() < 2) return out;

    auto [a, b] = detail::two_largest(branches, partitions[t].communities);
    out.cls = SplitClass::structural;
    out.branch_a = a;
    out.branch_b = b;

    const Link& sa = links.windows[t][a].successor;
    const Link& sb = links.windows[t][b].successor;
    const Link& gt = links.windows[t - 1][trunk_cid].grandchild;
    if (sa.exists() && sb.exists() && sa.cid == sb.cid && gt.exists() && gt.cid == sa.cid)
        out.cls = SplitClass::ephemeral;
    return out;
}

// Split an unduly merged community back into two, preserving continuity:
// members in only U_a (= P_a union S_a) go to the first output, members in
// only U_b to the second, members in both are assigned by seeded coin
// toss, and members in neither follow their heavier edge weight into the
// parts assembled so far (coin on ties). Returns nothing when either part
// would come out empty.
inline std::optional<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>>
resplit(const std::vector<std::uint32_t>& c0, const std::vector<std::uint32_t>& u_a,
        const std::vector<std::uint32_t>& u_b, const SliceGraph& slice, Rng& rng) {
    std::vector<std::uint32_t> c01, c02, ambiguous, stray;
    for (std::uint32_t x : c0) {
        bool in_a = std::binary_search(u_a.begin(), u_a.end(), x);
        bool in_b = std::binary_search(u_b.begin(), u_b.end(), x);
        if (in_a && !in_b) c01.push_back(x);
        else if (in_b && !in_a) c02.push_back(x);
        else if (in_a && in_b) ambiguous.push_back(x);
        else stray.push_back(x);
    }

    std::unordered_set<std::uint32_t> set_a(c01.begin(), c01.end());
    std::unordered_set<std::uint32_t> set_b(c02.begin(), c02.end());
    auto place = [&](std::uint32_t x, bool to_a) {
        if (to_a) { c01.push_back(x); set_a.insert(x); }
        else { c02.push_back(x); set_b.insert(x); }
    };

    for (std::uint32_t x : ambiguous) place(x, rng.coin());
    for (std::uint32_t x : stray) {
        double wa = 0, wb = 0;
        std::uint32_t lx = slice.local_of(x);
        for (std::size_t e = slice.adj_offsets[lx]; e < slice.adj_offsets[lx + 1]; ++e) {
            std::uint32_t nbr = slice.nodes[slice.adj[e].first];
            if (set_a.count(nbr)) wa += slice.adj[e].second;
            else if (set_b.count(nbr)) wb += slice.adj[e].second;
        }
        if (wa != wb) place(x, wa > wb);
        else place(x, rng.coin());
    }

    if (c01.empty() || c02.empty()) return std::nullopt;
    std::sort(c01.begin(), c01.end());
    std::sort(c02.begin(), c02.end());
    return std::make_pair(std::move(c01), std::move(c02));
}

// Union of two branches of an unduly split community.
inline std::vector<std::uint32_t> remerge(const std::vector<std::uint32_t>& a,
                                          const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> merged;
    merged.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return merged;
}

// Complete corrected output of one seed run.
struct Description {
    std::vector<Window> windows;
    std::vector<Partition> initial;    // as detected, before corrections
    std::vector<Partition> partitions; // corrected, the fixed point
    TemporalLinks links;               // recomputed on the corrected partitions
    EventLedger ledger;
    std::vector<Event> events;         // corrections first, then final structural events
    std::vector<double> q_initial;     // per-window modularity before corrections
    std::vector<double> q_final;       // per-window modularity after corrections
    double complexity = 0.0;
    std::uint64_t seed = 0;
    double link_threshold = 0.0;
    double resolution = 1.0;
    // (window, member fingerprint) pairs held structural by the memo; empty
    // in every non-pathological run.
    std::vector<std::pair<int, std::uint64_t>> forced_structural;

    double mean_q_final() const {
        if (q_final.empty()) return 0.0;
        double s = 0;
        for (double q : q_final) s += q;
        return s / static_cast<double>(q_final.size());
    }
    double mean_q_initial() const {
        if (q_initial.empty()) return 0.0;
        double s = 0;
        for (double q : q_initial) s += q;
        return s / static_cast<double>(q_initial.size());
    }

    std::vector<std::size_t> all_community_sizes() const {
        std::vector<std::size_t> out;
        for (const Partition& p : partitions)
            for (const auto& c : p.communities) out.push_back(c.size());
        return out;
    }
};

namespace detail {

struct EphemeralHit {
    Event event;
    // merge correction inputs
    int pred_a = -1, pred_b = -1, cont_a = -1, cont_b = -1;
};

// First correctable ephemeral event in scan order: windows ascending,
// merges before splits within a window, trunks by ascending community id.
inline std::optional<EphemeralHit> find_ephemeral(const std::vector<Partition>& partitions,
                                                  const TemporalLinks& links,
                                                  const CorrectionMemo& memo) {
    int n = static_cast<int>(partitions.size());
    for (int t = 1; t < n; ++t) {
        for (int m = 0; m < static_cast<int>(partitions[t].communities.size()); ++m) {
            MergeClassification c = classify_merge(partitions, links, t, m);
            if (c.cls != MergeClass::ephemeral) continue;
            if (memo.blocks_resplit(t, fingerprint(partitions[t].communities[m]))) continue;
            EphemeralHit hit;
            hit.event.kind = EventKind::merge;
            hit.event.window = t;
            hit.event.classification = EventClass::ephemeral;
            hit.event.trunk = {t, m};
            hit.event.trunk_size = partitions[t].communities[m].size();
            hit.event.branches = {CommunityRef{t - 1, c.pred_a}, CommunityRef{t - 1, c.pred_b}};
            hit.event.branch_sizes = {partitions[t - 1].communities[c.pred_a].size(),
                                      partitions[t - 1].communities[c.pred_b].size()};
            hit.pred_a = c.pred_a;
            hit.pred_b = c.pred_b;
            hit.cont_a = c.cont_a;
            hit.cont_b = c.cont_b;
            return hit;
        }
        for (int trunk = 0; trunk < static_cast<int>(partitions[t - 1].communities.size()); ++trunk) {
            SplitClassification c = classify_split(partitions, links, t, trunk);
            if (c.cls != SplitClass::ephemeral) continue;
            auto merged = remerge(partitions[t].communities[c.branch_a],
                                  partitions[t].communities[c.branch_b]);
            if (memo.blocks_remerge(t, fingerprint(merged))) continue;
            EphemeralHit hit;
            hit.event.kind = EventKind::split;
            hit.event.window = t;
            hit.event.classification = EventClass::ephemeral;
            hit.event.trunk = {t - 1, trunk};
            hit.event.trunk_size = partitions[t - 1].communities[trunk].size();
            hit.event.branches = {CommunityRef{t, c.branch_a}, CommunityRef{t, c.branch_b}};
            hit.event.branch_sizes = {partitions[t].communities[c.branch_a].size(),
                                      partitions[t].communities[c.branch_b].size()};
            return hit;
        }
    }
    return std::nullopt;
}

} // namespace detail

// Iteratively classify split/merge candidates, correct the earliest
// ephemeral one, recompute links and repeat until a scan finds nothing to
// correct. Structural events are recorded from the final scan; corrected
// ones as they happen, with pre-correction sizes.
inline Description denoise_fixpoint(const std::vector<SliceGraph>& slices,
                                    std::vector<Partition> partitions,
                                    const SimilarityFn& sim, double link_threshold,
                                    std::uint64_t seed, double resolution = 1.0,
                                    int max_iterations = 0) {
    int n = static_cast<int>(partitions.size());
    Description d;
    d.initial = partitions;
    d.seed = seed;
    d.link_threshold = link_threshold;
    d.resolution = resolution;
    for (const SliceGraph& g : slices) d.windows.push_back(g.window);

    Rng rng(Rng::derive(seed, 0xde01));
    detail::CorrectionMemo memo;
    int cap = max_iterations > 0 ? max_iterations : 10 * std::max(1, n);
    std::vector<int> recent_windows;

    std::set<std::pair<int, std::uint64_t>> ledgered;
    auto ledger_add = [&](std::vector<LedgerEntry>& set, const CommunityRef& ref,
                          std::size_t size, std::uint64_t fp) {
        if (ledgered.insert({ref.window, fp}).second) set.push_back({ref, size, fp});
    };

    TemporalLinks links = link_all(partitions, sim, link_threshold);
    int iterations = 0;
    for (;;) {
        auto hit = detail::find_ephemeral(partitions, links, memo);
        if (!hit) break;
        if (++iterations > cap) {
            std::string windows;
            for (int w : recent_windows) windows += (windows.empty() ? "" : ", ") + std::to_string(w);
            throw ConvergenceError("no fixed point after " + std::to_string(cap) +
                                   " corrections; recently corrected windows: " + windows);
        }

        int t = hit->event.window;
        Partition& part = partitions[t];
        if (hit->event.kind == EventKind::merge) {
            const auto& trunk_members = part.communities[hit->event.trunk.cid];
            std::uint64_t fp = detail::fingerprint(trunk_members);
            auto u_a = remerge(partitions[t - 1].communities[hit->pred_a],
                               partitions[t + 1].communities[hit->cont_a]);
            auto u_b = remerge(partitions[t - 1].communities[hit->pred_b],
                               partitions[t + 1].communities[hit->cont_b]);
            auto parts = resplit(trunk_members, u_a, u_b, slices[t], rng);
            if (!parts) {
                memo.mark(t, fp, detail::CorrectionMemo::forced);
                continue; // held structural; the final scan records it
            }
            ledger_add(d.ledger.u_x, hit->event.trunk, trunk_members.size(), fp);
            hit->event.corrected = true;
            d.events.push_back(hit->event);

            part.communities[hit->event.trunk.cid] = std::move(parts->first);
            part.communities.push_back(std::move(parts->second));
            part.canonicalize();
            memo.mark(t, fp, detail::CorrectionMemo::resplit_done);
        } else {
            const auto& a = part.communities[hit->event.branches[0].cid];
            const auto& b = part.communities[hit->event.branches[1].cid];
            auto merged = remerge(a, b);
            std::uint64_t fp = detail::fingerprint(merged);
            ledger_add(d.ledger.u_r, hit->event.branches[0], a.size(), detail::fingerprint(a));
            ledger_add(d.ledger.u_r, hit->event.branches[1], b.size(), detail::fingerprint(b));
            hit->event.corrected = true;
            d.events.push_back(hit->event);

            part.communities[hit->event.branches[0].cid] = std::move(merged);
            part.communities[hit->event.branches[1].cid].clear();
            part.canonicalize();
            memo.mark(t, fp, detail::CorrectionMemo::remerge_done);
        }
        recent_windows.push_back(t);
        if (recent_windows.size() > 8) recent_windows.erase(recent_windows.begin());
        links = link_all(partitions, sim, link_threshold);
    }

    // Final scan: everything still classifying as an event is structural.
    for (int t = 1; t < n; ++t) {
        for (int m = 0; m < static_cast<int>(partitions[t].communities.size()); ++m) {
            MergeClassification c = classify_merge(partitions, links, t, m);
            if (c.cls == MergeClass::not_a_merge) continue;
            Event ev;
            ev.kind = EventKind::merge;
            ev.window = t;
            ev.classification = EventClass::structural;
            ev.trunk = {t, m};
            ev.trunk_size = partitions[t].communities[m].size();
            ev.branches = {CommunityRef{t - 1, c.pred_a}, CommunityRef{t - 1, c.pred_b}};
            ev.branch_sizes = {partitions[t - 1].communities[c.pred_a].size(),
                               partitions[t - 1].communities[c.pred_b].size()};
            std::uint64_t fp = detail::fingerprint(partitions[t].communities[m]);
            if (c.cls == MergeClass::ephemeral) {
                ev.forced_structural = true;
                d.forced_structural.push_back({t, fp});
            }
            ledger_add(d.ledger.u_m, ev.trunk, ev.trunk_size, fp);
            d.events.push_back(ev);
        }
        for (int trunk = 0; trunk < static_cast<int>(partitions[t - 1].communities.size()); ++trunk) {
            SplitClassification c = classify_split(partitions, links, t, trunk);
            if (c.cls == SplitClass::not_a_split) continue;
            Event ev;
            ev.kind = EventKind::split;
            ev.window = t;
            ev.classification = EventClass::structural;
            ev.trunk = {t - 1, trunk};
            ev.trunk_size = partitions[t - 1].communities[trunk].size();
            ev.branches = {CommunityRef{t, c.branch_a}, CommunityRef{t, c.branch_b}};
            ev.branch_sizes = {partitions[t].communities[c.branch_a].size(),
                               partitions[t].communities[c.branch_b].size()};
            const auto& a = partitions[t].communities[c.branch_a];
            const auto& b = partitions[t].communities[c.branch_b];
            if (c.cls == SplitClass::ephemeral) {
                ev.forced_structural = true;
                d.forced_structural.push_back({t, detail::fingerprint(remerge(a, b))});
            }
            ledger_add(d.ledger.u_s, ev.branches[0], a.size(), detail::fingerprint(a));
            ledger_add(d.ledger.u_s, ev.branches[1], b.size(), detail::fingerprint(b));
            d.events.push_back(ev);
        }
    }

    d.partitions = std::move(partitions);
    d.links = std::move(links);
    for (int t = 0; t < n; ++t) {
        d.q_initial.push_back(modularity(slices[t], d.initial[t], resolution));
        d.q_final.push_back(modularity(slices[t], d.partitions[t], resolution));
    }
    auto sizes = d.all_community_sizes();
    bool any = false;
    for (std::size_t s : sizes) any = any || s > 0;
    d.complexity = any ? complexity_score(d.ledger, sizes) : 0.0;
    return d;
}

// Number of correctable ephemeral events a fresh classification pass finds
// on a description; zero at a fixed point.
inline std::size_t count_ephemeral(const Description& d) {
    detail::CorrectionMemo memo;
    for (const auto& [w, fp] : d.forced_structural)
        memo.mark(w, fp, detail::CorrectionMemo::forced);
    std::size_t count = 0;
    auto partitions = d.partitions;
    TemporalLinks links = d.links;
    // Count every distinct hit by temporarily marking it, without applying
    // corrections.
    for (;;) {
        auto hit = detail::find_ephemeral(partitions, links, memo);
        if (!hit) break;
        ++count;
        if (hit->event.kind == EventKind::merge) {
            memo.mark(hit->event.window,
                      detail::fingerprint(partitions[hit->event.window].communities[hit->event.trunk.cid]),
                      detail::CorrectionMemo::forced);
        } else {
            auto merged = remerge(partitions[hit->event.window].communities[hit->event.branches[0].cid],
                                  partitions[hit->event.window].communities[hit->event.branches[1].cid]);
            memo.mark(hit->event.window, detail::fingerprint(merged), detail::CorrectionMemo::forced);
        }
    }
    return count;
}

} // namespace streamflow

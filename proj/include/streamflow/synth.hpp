#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "streamflow/denoise.hpp"
#include "streamflow/ingest.hpp"
#include "streamflow/rng.hpp"
#include "streamflow/streams.hpp"

namespace streamflow {

// Synthetic corpus blueprint: planted streams emit articles year by year
// from disjoint reference pools; split/merge events rearrange the pools at
// a given one-year step; `noise` is the probability that a drawn reference
// is borrowed from another active stream's pool.
struct Scenario {
    struct StreamSpec {
        std::string id;
        int pool_size = 0;
        int articles_per_window = 0;
        int refs_per_article = 0;
    };
    struct EventSpec {
        int window = 0; // one-year step index
        EventKind kind = EventKind::split;
        std::vector<std::string> streams; // one id for split, two for merge
    };

    std::string name;
    int n_windows = 0; // number of one-year steps
    int start_year = 1970;
    double noise = 0.0;
    // Steps the noise applies to; empty means every step. A short burst
    // models the locally ambiguous articles that trip the detector without
    // degrading the whole corpus.
    std::vector<int> noise_windows;
    // Streams whose articles borrow references; empty means all. Noisy
    // streams borrow from the other noisy pools (or from all other pools
    // when they are the only one), so a designated pair can blur into each
    // other while bystander streams stay crisp.
    std::vector<std::string> noise_streams;
    std::vector<StreamSpec> streams;
    std::vector<EventSpec> events;

    void validate() const {
        if (n_windows < 1) throw ScenarioError("n_windows must be >= 1");
        if (noise < 0.0 || noise > 1.0) throw ScenarioError("noise must be in [0, 1]");
        for (int w : noise_windows)
            if (w < 0 || w >= n_windows)
                throw ScenarioError("noise window " + std::to_string(w) + " out of range");
        if (streams.empty()) throw ScenarioError("scenario needs at least one stream");
        std::set<std::string> ids;
        for (const StreamSpec& s : streams) {
            if (s.id.empty()) throw ScenarioError("stream id must be non-empty");
            if (!ids.insert(s.id).second) throw ScenarioError("duplicate stream id '" + s.id + "'");
            if (s.pool_size < 1) throw ScenarioError("stream '" + s.id + "': pool_size must be >= 1");
            if (s.articles_per_window < 1)
                throw ScenarioError("stream '" + s.id + "': articles_per_window must be >= 1");
            if (s.refs_per_article < 1)
                throw ScenarioError("stream '" + s.id + "': refs_per_article must be >= 1");
            if (s.pool_size < s.refs_per_article)
                throw ScenarioError("stream '" + s.id + "': pool of " + std::to_string(s.pool_size) +
                                    " is smaller than refs_per_article " +
                                    std::to_string(s.refs_per_article));
        }
        for (const EventSpec& e : events) {
            if (e.window < 1 || e.window >= n_windows)
                throw ScenarioError("event window " + std::to_string(e.window) +
                                    " outside [1, " + std::to_string(n_windows - 1) + ")");
            std::size_t expected = e.kind == EventKind::split ? 1 : 2;
            if (e.streams.size() != expected)
                throw ScenarioError(std::string("a ") + to_string(e.kind) + " event names " +
                                    std::to_string(expected) + " stream(s)");
        }
    }

    static Scenario from_json(const nlohmann::json& j);
    static Scenario from_file(const std::string& path);
};

struct GroundTruth {
    struct TruthEvent {
        EventKind kind;
        int window = 0; // scenario step index
        int year = 0;   // calendar year the new regime starts
        std::vector<std::string> parents;
        std::vector<std::string> children;
    };

    std::string scenario_name;
    std::uint64_t seed = 0;
    std::vector<std::string> stream_ids;
    std::vector<TruthEvent> events;
    std::map<std::string, std::string> article_stream; // article id -> planted stream id

    nlohmann::ordered_json to_json() const;
    static GroundTruth from_json(const nlohmann::json& j);
    static GroundTruth from_file(const std::string& path);
};

namespace detail {

struct LivePool {
    std::string id;
    std::vector<std::string> refs; // sorted
    int articles_per_year = 0;
    int refs_per_article = 0;
    int from = 0, until = 0; // active years [from, until)
    std::string author;
};

inline std::vector<std::string> make_pool(const std::string& stream_id, int size) {
    std::vector<std::string> out;
    out.reserve(size);
    for (int i = 0; i < size; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d", i);
        out.push_back(stream_id + "#r" + buf);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

// Deterministic corpus generation: records come back in emission order
// (ids are zero-padded counters, so id order equals emission order).
inline std::pair<std::vector<ArticleRecord>, GroundTruth> generate(const Scenario& scenario,
                                                                   std::uint64_t seed) {
    scenario.validate();
    Rng rng(Rng::derive(seed, 0x5e17));

    // Build stream lifetimes by replaying the event list. Reserve up front:
    // find_active hands out references into the vector while events append.
    std::vector<detail::LivePool> pools;
    pools.reserve(scenario.streams.size() + 2 * scenario.events.size());
    for (const auto& s : scenario.streams)
        pools.push_back({s.id, detail::make_pool(s.id, s.pool_size), s.articles_per_window,
                         s.refs_per_article, 0, scenario.n_windows, "author-" + s.id});

    GroundTruth truth;
    truth.scenario_name = scenario.name;
    truth.seed = seed;

    std::vector<Scenario::EventSpec> events = scenario.events;
    std::stable_sort(events.begin(), events.end(),
                     [](const auto& a, const auto& b) { return a.window < b.window; });

    auto find_active = [&](const std::string& id, int year) -> detail::LivePool& {
        for (auto& p : pools)
            if (p.id == id && p.from <= year && year < p.until) return p;
        throw ScenarioError("event targets stream '" + id + "' which is not active at step " +
                            std::to_string(year));
    };

    for (const auto& e : events) {
        GroundTruth::TruthEvent te;
        te.kind = e.kind;
        te.window = e.window;
        te.year = scenario.start_year + e.window;
        if (e.kind == EventKind::split) {
            detail::LivePool& parent = find_active(e.streams[0], e.window);
            parent.until = e.window;
            std::size_t half = (parent.refs.size() + 1) / 2;
            detail::LivePool a{parent.id + ".a",
                               {parent.refs.begin(), parent.refs.begin() + half},
                               parent.articles_per_year, parent.refs_per_article,
                               e.window, scenario.n_windows, "author-" + parent.id + ".a"};
            detail::LivePool b{parent.id + ".b",
                               {parent.refs.begin() + half, parent.refs.end()},
                               parent.articles_per_year, parent.refs_per_article,
                               e.window, scenario.n_windows, "author-" + parent.id + ".b"};
            if (static_cast<int>(a.refs.size()) < a.refs_per_article ||
                static_cast<int>(b.refs.size()) < b.refs_per_article)
                throw ScenarioError("split of '" + parent.id + "' leaves a half-pool smaller than refs_per_article");
            te.parents = {parent.id};
            te.children = {a.id, b.id};
            pools.push_back(std::move(a));
            pools.push_back(std::move(b));
        } else {
            detail::LivePool& p1 = find_active(e.streams[0], e.window);
            detail::LivePool& p2 = find_active(e.streams[1], e.window);
            if (&p1 == &p2) throw ScenarioError("merge needs two distinct streams");
            p1.until = e.window;
            p2.until = e.window;
            detail::LivePool merged;
            merged.id = p1.id + "+" + p2.id;
            merged.refs = p1.refs;
            merged.refs.insert(merged.refs.end(), p2.refs.begin(), p2.refs.end());
            std::sort(merged.refs.begin(), merged.refs.end());
            merged.refs.erase(std::unique(merged.refs.begin(), merged.refs.end()), merged.refs.end());
            merged.articles_per_year = std::max(1, (p1.articles_per_year + p2.articles_per_year) / 2);
            merged.refs_per_article = std::max(p1.refs_per_article, p2.refs_per_article);
            merged.from = e.window;
            merged.until = scenario.n_windows;
            merged.author = "author-" + merged.id;
            te.parents = {p1.id, p2.id};
            te.children = {merged.id};
            pools.push_back(std::move(merged));
        }
        truth.events.push_back(std::move(te));
    }
    for (const auto& p : pools) truth.stream_ids.push_back(p.id);

    // Emit articles year by year, streams in id order.
    std::vector<ArticleRecord> records;
    std::size_t counter = 0;
    for (int y = 0; y < scenario.n_windows; ++y) {
        std::vector<const detail::LivePool*> active;
        for (const auto& p : pools)
            if (p.from <= y && y < p.until) active.push_back(&p);
        std::sort(active.begin(), active.end(),
                  [](const auto* a, const auto* b) { return a->id < b->id; });

        bool noisy_year = scenario.noise_windows.empty() ||
                          std::find(scenario.noise_windows.begin(), scenario.noise_windows.end(),
                                    y) != scenario.noise_windows.end();
        auto is_noisy_stream = [&](const std::string& id) {
            return scenario.noise_streams.empty() ||
                   std::find(scenario.noise_streams.begin(), scenario.noise_streams.end(), id) !=
                       scenario.noise_streams.end();
        };
        for (const detail::LivePool* p : active) {
            // Union of the other noisy pools (or all other pools when the
            // stream is the only noisy one), for noise borrowing.
            std::vector<std::string> borrow;
            if (scenario.noise > 0.0 && noisy_year && is_noisy_stream(p->id)) {
                for (const detail::LivePool* q : active)
                    if (q != p && is_noisy_stream(q->id))
                        borrow.insert(borrow.end(), q->refs.begin(), q->refs.end());
                if (borrow.empty()) {
                    for (const detail::LivePool* q : active)
                        if (q != p) borrow.insert(borrow.end(), q->refs.begin(), q->refs.end());
                }
                std::sort(borrow.begin(), borrow.end());
            }

            for (int i = 0; i < p->articles_per_year; ++i) {
                char buf[16];
                std::snprintf(buf, sizeof(buf), "a%06zu", counter++);
                ArticleRecord rec;
                rec.id = buf;
                rec.year = scenario.start_year + y;
                rec.authors = {p->author};
                rec.title = p->id + " y" + std::to_string(rec.year);

                // Draw refs_per_article distinct pool references.
                std::vector<std::uint32_t> pick(p->refs.size());
                for (std::uint32_t k = 0; k < pick.size(); ++k) pick[k] = k;
                for (int k = 0; k < p->refs_per_article; ++k) {
                    std::size_t j = k + static_cast<std::size_t>(rng.below(pick.size() - k));
                    std::swap(pick[k], pick[j]);
                    rec.refs.push_back(p->refs[pick[k]]);
                }
                if (!borrow.empty()) {
                    for (auto& ref : rec.refs) {
                        if (rng.unit() >= scenario.noise) continue;
                        const std::string& candidate = borrow[rng.below(borrow.size())];
                        if (std::find(rec.refs.begin(), rec.refs.end(), candidate) == rec.refs.end())
                            ref = candidate;
                    }
                }
                rec.refs = detail::sorted_unique(std::move(rec.refs));
                truth.article_stream[rec.id] = p->id;
                records.push_back(std::move(rec));
            }
        }
    }
    return {std::move(records), std::move(truth)};
}

struct RecoveryScore {
    double event_precision = 1.0;
    double event_recall = 1.0;
    double membership_agreement = 1.0;
    std::size_t matched_events = 0;
    std::size_t detected_structural = 0;
    std::size_t planted_events = 0;
};

namespace detail {

// Planted stream with the most member articles (lexicographic tie-break).
inline std::string plurality_planted(const std::vector<std::uint32_t>& members,
                                     const Corpus& corpus, const GroundTruth& truth) {
    std::map<std::string, std::size_t> counts;
    for (std::uint32_t m : members) {
        auto it = truth.article_stream.find(corpus.article(m).id);
        if (it != truth.article_stream.end()) ++counts[it->second];
    }
    std::string best;
    for (const auto& [id, n] : counts)
        if (best.empty() || n > counts[best]) best = id;
    return best;
}

} // namespace detail

// Compare a corrected description and its streams against the planted
// truth. An event counts as recovered when a structural event of the same
// kind lands within one window of where the planted regime change first
// fits the sliding windows, with branches plurality-mapped to the planted
// streams. Membership uses each article's community in the latest window
// containing it.
inline RecoveryScore score_recovery(const GroundTruth& truth, const Description& d,
                                    const std::vector<Stream>& streams, const Corpus& corpus) {
    RecoveryScore score;

    // --- events ---
    std::vector<const Event*> detected;
    for (const Event& e : d.events)
        if (e.classification == EventClass::structural) detected.push_back(&e);
    score.detected_structural = detected.size();
    score.planted_events = truth.events.size();

    const WindowConfig wc{d.windows.empty() ? 1 : d.windows.front().end_year -
                                                      d.windows.front().start_year + 1,
                          d.windows.size() > 1
                              ? d.windows[1].start_year - d.windows[0].start_year
                              : 1};
    int min_year = d.windows.empty() ? 0 : d.windows.front().start_year;
    int last = static_cast<int>(d.windows.size()) - 1;
    auto expected_window = [&](const GroundTruth::TruthEvent& te) {
        // A split first shows once a window lies fully past the event year;
        // a merge as soon as a window first contains it.
        int t = te.kind == EventKind::split
                    ? (te.year - min_year + wc.step - 1) / wc.step
                    : (te.year - min_year - (wc.width - 1) + wc.step - 1) / wc.step;
        return std::clamp(t, 0, std::max(0, last));
    };

    std::vector<bool> used(detected.size(), false);
    for (const auto& te : truth.events) {
        int t_exp = expected_window(te);
        const std::vector<std::string>& plural_side =
            te.kind == EventKind::split ? te.children : te.parents;
        for (std::size_t i = 0; i < detected.size(); ++i) {
            if (used[i] || detected[i]->kind != te.kind) continue;
            if (std::abs(detected[i]->window - t_exp) > 1) continue;
            const Event& e = *detected[i];
            int branch_window = e.kind == EventKind::split ? e.window : e.window - 1;
            // Branch refs predate later corrections; skip stale ones.
            const auto& comms = d.partitions[branch_window].communities;
            if (e.branches[0].cid >= static_cast<int>(comms.size()) ||
                e.branches[1].cid >= static_cast<int>(comms.size()))
                continue;
            std::set<std::string> got{
                detail::plurality_planted(comms[e.branches[0].cid], corpus, truth),
                detail::plurality_planted(comms[e.branches[1].cid], corpus, truth)};
            if (got == std::set<std::string>(plural_side.begin(), plural_side.end())) {
                used[i] = true;
                ++score.matched_events;
                break;
            }
        }
    }
    score.event_precision =
        detected.empty() ? 1.0
                         : static_cast<double>(score.matched_events) / detected.size();
    score.event_recall = truth.events.empty()
                             ? 1.0
                             : static_cast<double>(score.matched_events) / truth.events.size();

    // --- membership ---
    auto stream_of = stream_of_community(streams);
    std::vector<int> recovered(corpus.size(), -1);
    for (int t = 0; t < static_cast<int>(d.partitions.size()); ++t)
        for (int c = 0; c < static_cast<int>(d.partitions[t].communities.size()); ++c)
            for (std::uint32_t a : d.partitions[t].communities[c])
                recovered[a] = stream_of.at({t, c}); // later windows overwrite

    std::map<int, std::map<std::string, std::size_t>> votes;
    for (std::uint32_t a = 0; a < corpus.size(); ++a) {
        if (recovered[a] < 0) continue;
        auto it = truth.article_stream.find(corpus.article(a).id);
        if (it != truth.article_stream.end()) ++votes[recovered[a]][it->second];
    }
    std::map<int, std::string> mapped;
    for (const auto& [sid, counts] : votes) {
        std::string best;
        for (const auto& [id, n] : counts)
            if (best.empty() || n > counts.at(best)) best = id;
        mapped[sid] = best;
    }

    std::size_t covered = 0, agree = 0;
    for (std::uint32_t a = 0; a < corpus.size(); ++a) {
        if (recovered[a] < 0) continue;
        auto it = truth.article_stream.find(corpus.article(a).id);
        if (it == truth.article_stream.end()) continue;
        ++covered;
        if (mapped.at(recovered[a]) == it->second) ++agree;
    }
    score.membership_agreement =
        covered == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(covered);
    return score;
}

// --- JSON plumbing ---

inline Scenario Scenario::from_json(const nlohmann::json& j) {
    Scenario s;
    try {
        s.name = j.value("name", "");
        s.n_windows = j.at("n_windows").get<int>();
        s.start_year = j.value("start_year", 1970);
        s.noise = j.value("noise", 0.0);
        if (j.contains("noise_windows"))
            s.noise_windows = j.at("noise_windows").get<std::vector<int>>();
        if (j.contains("noise_streams"))
            s.noise_streams = j.at("noise_streams").get<std::vector<std::string>>();
        for (const auto& js : j.at("streams")) {
            StreamSpec spec;
            spec.id = js.at("id").get<std::string>();
            spec.pool_size = js.at("pool_size").get<int>();
            spec.articles_per_window = js.at("articles_per_window").get<int>();
            spec.refs_per_article = js.at("refs_per_article").get<int>();
            s.streams.push_back(std::move(spec));
        }
        if (j.contains("events")) {
            for (const auto& je : j.at("events")) {
                EventSpec e;
                e.window = je.at("window").get<int>();
                std::string kind = je.at("kind").get<std::string>();
                if (kind == "split") e.kind = EventKind::split;
                else if (kind == "merge") e.kind = EventKind::merge;
                else throw ScenarioError("unknown event kind '" + kind + "'");
                e.streams = je.at("streams").get<std::vector<std::string>>();
                s.events.push_back(std::move(e));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(std::string("bad scenario: ") + e.what());
    }
    s.validate();
    return s;
}

inline Scenario Scenario::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(std::string("bad scenario JSON: ") + e.what());
    }
    return from_json(j);
}

inline nlohmann::ordered_json GroundTruth::to_json() const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario_name;
    j["seed"] = seed;
    j["streams"] = stream_ids;
    j["events"] = nlohmann::ordered_json::array();
    for (const auto& e : events) {
        nlohmann::ordered_json je;
        je["kind"] = to_string(e.kind);
        je["window"] = e.window;
        je["year"] = e.year;
        je["parents"] = e.parents;
        je["children"] = e.children;
        j["events"].push_back(je);
    }
    nlohmann::ordered_json arts = nlohmann::ordered_json::object();
    for (const auto& [id, stream] : article_stream) arts[id] = stream;
    j["articles"] = arts;
    return j;
}

inline GroundTruth GroundTruth::from_json(const nlohmann::json& j) {
    GroundTruth t;
    try {
        t.scenario_name = j.value("scenario", "");
        t.seed = j.value("seed", 0ULL);
        t.stream_ids = j.at("streams").get<std::vector<std::string>>();
        for (const auto& je : j.at("events")) {
            TruthEvent e;
            std::string kind = je.at("kind").get<std::string>();
            e.kind = kind == "split" ? EventKind::split : EventKind::merge;
            e.window = je.at("window").get<int>();
            e.year = je.at("year").get<int>();
            e.parents = je.at("parents").get<std::vector<std::string>>();
            e.children = je.at("children").get<std::vector<std::string>>();
            t.events.push_back(std::move(e));
        }
        for (const auto& [id, stream] : j.at("articles").items())
            t.article_stream[id] = stream.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(std::string("bad truth file: ") + e.what());
    }
    return t;
}

inline GroundTruth GroundTruth::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open truth file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(std::string("bad truth JSON: ") + e.what());
    }
    return from_json(j);
}

} // namespace streamflow

#include <doctest.h>

#include "streamflow/alluvial.hpp"
#include "streamflow/pipeline.hpp"
#include "streamflow/streams.hpp"
#include "streamflow/synth.hpp"

using namespace streamflow;

namespace {

struct Run {
    Corpus corpus;
    Description description;
    std::vector<Stream> streams;
};

Run run_scenario(const Scenario& scenario, std::uint64_t seed = 5, WindowConfig wc = {3, 1}) {
    Run run;
    auto [records, truth] = generate(scenario, 99);
    run.corpus = Corpus(std::move(records));
    auto windows = enumerate_windows(run.corpus.min_year(), run.corpus.max_year(), wc);
    auto slices = slice_all(run.corpus, windows, 2);
    auto partitions = detect_all(slices, seed);
    run.description = denoise_fixpoint(slices, std::move(partitions),
                                       similarity_by_name("jaccard"), 0.0, seed);
    run.streams = extract_labeled_streams(run.description, run.corpus);
    return run;
}

} // namespace

TEST_SUITE("streams") {

TEST_CASE("extract: laminar corpus yields one full-length stream per planted line") {
    Scenario s;
    s.name = "laminar";
    s.n_windows = 14;
    s.streams = {{"s0", 40, 6, 12}, {"s1", 40, 6, 12}};
    Run run = run_scenario(s);

    REQUIRE(run.streams.size() == 2);
    for (const Stream& st : run.streams) {
        CHECK(st.members.size() == run.description.windows.size());
        CHECK(st.members.front().window == 0);
        // members sit in consecutive windows
        for (std::size_t i = 1; i < st.members.size(); ++i)
            CHECK(st.members[i].window == st.members[i - 1].window + 1);
    }

    // labels carry the planted author and the corpus year span
    std::set<std::string> authors;
    for (const Stream& st : run.streams) authors.insert(st.label.main_author);
    CHECK(authors == std::set<std::string>{"author-s0", "author-s1"});
    CHECK(run.streams[0].label.start_year == run.corpus.min_year());
    CHECK(run.streams[0].label.end_year == run.corpus.max_year());
}

TEST_CASE("extract: single-window corpus gives one stream per community") {
    Scenario s;
    s.name = "tiny";
    s.n_windows = 3;
    s.streams = {{"s0", 40, 6, 12}, {"s1", 40, 6, 12}};
    Run run = run_scenario(s, 5, {3, 1}); // exactly one window
    REQUIRE(run.description.windows.size() == 1);
    CHECK(run.streams.size() == run.description.partitions[0].communities.size());
    for (const Stream& st : run.streams) CHECK(st.members.size() == 1);
}

TEST_CASE("extract: structural split ends the trunk and starts two streams") {
    Scenario s;
    s.name = "split";
    s.n_windows = 16;
    s.streams = {{"s0", 40, 6, 12}, {"s1", 40, 6, 12}};
    s.events = {{8, EventKind::split, {"s0"}}};
    Run run = run_scenario(s);

    // the stable companion plus trunk, branch a, branch b
    REQUIRE(run.streams.size() == 4);
    int last = static_cast<int>(run.description.windows.size()) - 1;

    const Stream* trunk = nullptr;
    const Stream* companion = nullptr;
    std::vector<const Stream*> branches;
    for (const Stream& st : run.streams) {
        if (st.label.main_author == "author-s0") trunk = &st;
        else if (st.label.main_author == "author-s1") companion = &st;
        else branches.push_back(&st);
    }
    REQUIRE(trunk != nullptr);
    REQUIRE(companion != nullptr);
    REQUIRE(branches.size() == 2);

    CHECK(trunk->members.front().window == 0);
    CHECK(companion->members.front().window == 0);
    CHECK(companion->members.back().window == last);
    for (const Stream* b : branches) {
        CHECK(b->members.front().window == trunk->members.back().window + 1);
        CHECK(b->members.back().window == last);
    }
    std::set<std::string> branch_authors{branches[0]->label.main_author,
                                         branches[1]->label.main_author};
    CHECK(branch_authors == std::set<std::string>{"author-s0.a", "author-s0.b"});
}

TEST_CASE("every community belongs to exactly one stream; extraction is idempotent") {
    Scenario s;
    s.name = "noisy";
    s.n_windows = 14;
    s.noise = 0.25;
    s.streams = {{"s0", 40, 6, 12}, {"s1", 40, 6, 12}};
    Run run = run_scenario(s, 7);

    std::map<std::pair<int, int>, int> seen;
    for (const Stream& st : run.streams)
        for (const CommunityRef& r : st.members) seen[{r.window, r.cid}]++;
    std::size_t total = 0;
    for (const Partition& p : run.description.partitions) total += p.communities.size();
    CHECK(seen.size() == total);
    for (const auto& [ref, count] : seen) CHECK(count == 1);

    auto again = extract_streams(run.description);
    REQUIRE(again.size() == run.streams.size());
    for (std::size_t i = 0; i < again.size(); ++i)
        CHECK(again[i].members == run.streams[i].members);

    // consecutive members overlap (their link similarity is positive)
    for (const Stream& st : run.streams)
        for (std::size_t i = 1; i < st.members.size(); ++i) {
            const auto& prev =
                run.description.partitions[st.members[i - 1].window].communities[st.members[i - 1].cid];
            const auto& cur =
                run.description.partitions[st.members[i].window].communities[st.members[i].cid];
            CHECK(jaccard(prev, cur) > 0.0);
        }
}

TEST_CASE("label_stream: plurality author with lexicographic ties, window arithmetic") {
    // hand-built description: one window, one community, two articles
    std::vector<ArticleRecord> recs;
    ArticleRecord r1;
    r1.id = "a1";
    r1.year = 1973;
    r1.authors = {"zoe", "abe"};
    ArticleRecord r2;
    r2.id = "a2";
    r2.year = 1974;
    r2.authors = {"abe"};
    ArticleRecord r3;
    r3.id = "a3";
    r3.year = 1975;
    r3.authors = {"zoe"};
    Corpus corpus({r1, r2, r3});

    Description d;
    d.windows = {{3, 1973, 1976}};
    Partition p;
    p.window = 0;
    p.communities = {{0, 1, 2}};
    p.canonicalize();
    d.partitions = {p};
    d.initial = d.partitions;
    d.links.windows.resize(1);
    d.links.windows[0].resize(1);

    Stream st;
    st.id = 0;
    st.members = {{0, 0}};
    StreamLabel label = label_stream(st, d, corpus);
    CHECK(label.main_author == "abe"); // 2 vs 2, lexicographic
    CHECK(label.start_year == 1973);
    CHECK(label.end_year == 1976);
}

TEST_CASE("modularity_series: zero corrections means initial equals final") {
    Scenario s;
    s.name = "laminar";
    s.n_windows = 10;
    s.streams = {{"s0", 40, 6, 12}};
    Run run = run_scenario(s);
    auto series = modularity_series(run.description);
    REQUIRE(series.size() == run.description.windows.size());
    for (const auto& [initial, final_q] : series) CHECK(initial == doctest::Approx(final_q));
}

TEST_CASE("empty middle windows flow through the whole pipeline as (0, 0)") {
    // two populated year clusters with a silent gap in between
    std::vector<ArticleRecord> records;
    Rng rng(8);
    auto emit = [&](int year, int base) {
        for (int i = 0; i < 6; ++i) {
            ArticleRecord r;
            r.id = "a" + std::to_string(base + i);
            r.year = year;
            r.authors = {"solo"};
            for (int j = 0; j < 8; ++j) r.refs.push_back("r" + std::to_string(rng.below(14)));
            std::sort(r.refs.begin(), r.refs.end());
            r.refs.erase(std::unique(r.refs.begin(), r.refs.end()), r.refs.end());
            records.push_back(r);
        }
    };
    emit(1970, 100);
    emit(1971, 200);
    emit(1976, 300);
    emit(1977, 400);
    Corpus corpus(records);
    auto windows = enumerate_windows(corpus.min_year(), corpus.max_year(), {2, 1});
    auto slices = slice_all(corpus, windows, 2);
    auto partitions = detect_all(slices, 5);
    Description d = denoise_fixpoint(slices, std::move(partitions),
                                     similarity_by_name("jaccard"), 0.0, 5);

    bool saw_empty = false;
    auto series = modularity_series(d);
    for (std::size_t t = 0; t < slices.size(); ++t) {
        if (slices[t].size() == 0) {
            saw_empty = true;
            CHECK(series[t].first == 0.0);
            CHECK(series[t].second == 0.0);
        }
    }
    CHECK(saw_empty);

    // streams cannot bridge the gap
    auto streams = extract_streams(d);
    for (const Stream& st : streams)
        for (std::size_t i = 1; i < st.members.size(); ++i)
            CHECK(st.members[i].window == st.members[i - 1].window + 1);
    CHECK(count_ephemeral(d) == 0);
}

TEST_CASE("layout: one lane per stream, constant y, deterministic svg") {
    Scenario s;
    s.name = "split";
    s.n_windows = 16;
    s.streams = {{"s0", 40, 6, 12}};
    s.events = {{8, EventKind::split, {"s0"}}};
    Run run = run_scenario(s);

    AlluvialLayout layout = layout_alluvial(run.streams, run.description);
    REQUIRE(layout.lane_of_stream.size() == run.streams.size());

    // every box of a stream sits at the same vertical center
    std::map<int, std::set<long long>> centers;
    for (const LayoutBox& b : layout.boxes)
        centers[b.stream].insert(std::llround((b.y + b.height / 2.0) * 1000));
    for (const auto& [stream, ys] : centers) CHECK(ys.size() == 1);

    // distinct streams use distinct lanes
    std::set<int> lanes(layout.lane_of_stream.begin(), layout.lane_of_stream.end());
    CHECK(lanes.size() == run.streams.size());

    // x grows with the window's start year
    for (const LayoutBox& b : layout.boxes)
        CHECK(b.x == doctest::Approx(layout.margin +
                                     (run.description.windows[b.ref.window].start_year -
                                      run.description.windows.front().start_year) *
                                         layout.px_per_year));

    // split ribbons exist from the trunk into both branches
    std::size_t cross = 0;
    for (const LayoutRibbon& r : layout.ribbons)
        if (r.kind != LayoutRibbon::Kind::laminar) ++cross;
    CHECK(cross >= 2);

    std::string svg1 = write_alluvial_svg(layout, run.streams, run.description);
    std::string svg2 = write_alluvial_svg(layout_alluvial(run.streams, run.description),
                                          run.streams, run.description);
    CHECK(svg1 == svg2);
    CHECK(svg1.find("<svg") == 0);
    CHECK(svg1.find("</svg>") != std::string::npos);
}

} // TEST_SUITE

#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "streamflow/ingest.hpp"
#include "streamflow/rng.hpp"

using namespace streamflow;

TEST_SUITE("ingest") {

TEST_CASE("parse: well-formed line yields one record") {
    auto recs = parse_corpus(
        R"({"id":"a1","year":1990,"authors":["x"],"refs":["r1","r2","r3"],"title":"t"})" "\n");
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].id == "a1");
    CHECK(recs[0].year == 1990);
    CHECK(recs[0].refs.size() == 3);
    CHECK(recs[0].title == "t");
}

TEST_CASE("parse: empty input, blank lines, optional title") {
    CHECK(parse_corpus("").empty());
    CHECK(parse_corpus("\n  \n").empty());
    auto recs = parse_corpus(R"({"id":"a","year":2000,"authors":[],"refs":[]})" "\n");
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].title.empty());
}

TEST_CASE("parse: refs are set-semantics") {
    auto recs = parse_corpus(R"({"id":"a","year":2000,"authors":[],"refs":["r2","r1","r2"]})" "\n");
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].refs == std::vector<std::string>{"r1", "r2"});
}

TEST_CASE("parse: duplicate id is rejected and named") {
    std::string two = R"({"id":"dup","year":2000,"authors":[],"refs":[]})" "\n"
                      R"({"id":"dup","year":2001,"authors":[],"refs":[]})" "\n";
    CHECK_THROWS_WITH_AS(parse_corpus(two), doctest::Contains("dup"), DuplicateIdError);
}

TEST_CASE("parse: malformed line reports the line number") {
    std::string bad = R"({"id":"a","year":2000,"authors":[],"refs":[]})" "\n"
                      "not json\n";
    CHECK_THROWS_WITH_AS(parse_corpus(bad), doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_AS(parse_corpus(R"({"id":"a","year":"x","authors":[],"refs":[]})"), ParseError);
    CHECK_THROWS_AS(parse_corpus(R"({"id":"","year":1,"authors":[],"refs":[]})"), ParseError);
    CHECK_THROWS_AS(parse_corpus(R"({"year":1,"authors":[],"refs":[]})"), ParseError);
}

static ArticleRecord make(const std::string& id, std::vector<std::string> refs, int year = 2000) {
    ArticleRecord r;
    r.id = id;
    r.year = year;
    r.refs = std::move(refs);
    std::sort(r.refs.begin(), r.refs.end());
    return r;
}

TEST_CASE("coupling: shared-reference weights and the min_shared floor") {
    std::vector<ArticleRecord> articles = {make("a", {"r1", "r2", "r3"}),
                                           make("b", {"r2", "r3", "r4"})};
    auto edges = coupling_edges(articles, 2);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].a == "a");
    CHECK(edges[0].b == "b");
    CHECK(edges[0].weight == 2);

    // one shared reference is below the default threshold
    std::vector<ArticleRecord> weak = {make("a", {"r1"}), make("b", {"r1"})};
    CHECK(coupling_edges(weak, 2).empty());
    CHECK(coupling_edges(weak, 1).size() == 1);

    // disjoint refs couple nothing
    std::vector<ArticleRecord> disjoint = {make("a", {"r1"}), make("b", {"r2"}),
                                           make("c", {"r3"})};
    CHECK(coupling_edges(disjoint, 1).empty());

    CHECK_THROWS_AS(coupling_edges(articles, 0), ConfigError);
}

TEST_CASE("coupling: permutation-invariant, weights match the set oracle, "
          "min_shared=1 is a superset of min_shared=2") {
    Rng rng(20240801);
    std::vector<ArticleRecord> articles;
    for (int i = 0; i < 30; ++i) {
        std::vector<std::string> refs;
        int k = 2 + static_cast<int>(rng.below(6));
        for (int j = 0; j < k; ++j) refs.push_back("r" + std::to_string(rng.below(25)));
        std::sort(refs.begin(), refs.end());
        refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
        articles.push_back(make("a" + std::to_string(100 + i), refs));
    }

    auto edges2 = coupling_edges(articles, 2);
    auto edges1 = coupling_edges(articles, 1);

    std::vector<ArticleRecord> shuffled = articles;
    rng.shuffle(shuffled);
    CHECK(coupling_edges(shuffled, 2) == edges2);

    std::map<std::string, const ArticleRecord*> by_id;
    for (const auto& a : articles) by_id[a.id] = &a;
    for (const auto& e : edges2) {
        CHECK(e.weight == oracles::shared_refs(*by_id[e.a], *by_id[e.b]));
        CHECK(e.weight >= 2);
        CHECK(e.a < e.b);
    }
    // every strong edge appears among the weak ones
    for (const auto& e : edges2)
        CHECK(std::find(edges1.begin(), edges1.end(), e) != edges1.end());

    // exhaustive cross-check: every qualifying pair is present
    std::size_t expected = 0;
    for (std::size_t i = 0; i < articles.size(); ++i)
        for (std::size_t j = i + 1; j < articles.size(); ++j)
            if (oracles::shared_refs(articles[i], articles[j]) >= 2) ++expected;
    CHECK(edges2.size() == expected);
}

TEST_CASE("corpus: canonical order and interning") {
    Corpus corpus(
        {make("b", {"r1", "r2"}, 2001), make("a", {"r2", "r3"}, 1999), make("c", {}, 2005)});
    CHECK(corpus.size() == 3);
    CHECK(corpus.article(0).id == "a");
    CHECK(corpus.article(2).id == "c");
    CHECK(corpus.min_year() == 1999);
    CHECK(corpus.max_year() == 2005);
    CHECK(corpus.index_of("b") == 1);
    CHECK(corpus.ref_universe() == 3);
    CHECK_THROWS_AS(corpus.index_of("nope"), Error);
}

} // TEST_SUITE

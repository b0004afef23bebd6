#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "streamflow/errors.hpp"
#include "streamflow/types.hpp"

namespace streamflow {

namespace detail {

inline std::vector<std::string> sorted_unique(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Pair-count core shared by coupling_edges and the slicer: articles are
// given as sorted integer ref lists, output is (i, j, shared) with i < j
// in index order, sorted.
inline std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>>
count_shared_refs(const std::vector<std::vector<std::uint32_t>>& refs,
                  std::uint32_t min_shared) {
    std::size_t n_refs = 0;
    for (const auto& r : refs)
        for (std::uint32_t x : r) n_refs = std::max<std::size_t>(n_refs, x + 1);

    // Inverted index ref -> articles citing it.
    std::vector<std::vector<std::uint32_t>> citing(n_refs);
    for (std::uint32_t a = 0; a < refs.size(); ++a)
        for (std::uint32_t r : refs[a]) citing[r].push_back(a);

    std::unordered_map<std::uint64_t, std::uint32_t> counts;
    for (const auto& arts : citing) {
        for (std::size_t i = 0; i < arts.size(); ++i)
            for (std::size_t j = i + 1; j < arts.size(); ++j) {
                std::uint64_t key =
                    (static_cast<std::uint64_t>(arts[i]) << 32) | arts[j];
                ++counts[key];
            }
    }

    std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> out;
    out.reserve(counts.size());
    for (const auto& [key, w] : counts) {
        if (w >= min_shared)
            out.emplace_back(static_cast<std::uint32_t>(key >> 32),
                             static_cast<std::uint32_t>(key & 0xffffffffu), w);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

// Parse the JSON Lines corpus format: one object per line with fields
// id (string), year (int), authors ([string]), refs ([string]) and an
// optional title. Records come back in input order; refs are deduplicated.
inline std::vector<ArticleRecord> parse_corpus(std::istream& in) {
    std::vector<ArticleRecord> records;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }

        auto fail = [&](const std::string& what) -> ParseError {
            return ParseError("line " + std::to_string(lineno) + ": " + what);
        };
        if (!j.is_object()) throw fail("expected a JSON object");
        if (!j.contains("id") || !j["id"].is_string()) throw fail("missing string field 'id'");
        if (!j.contains("year") || !j["year"].is_number_integer()) throw fail("missing integer field 'year'");
        if (!j.contains("authors") || !j["authors"].is_array()) throw fail("missing array field 'authors'");
        if (!j.contains("refs") || !j["refs"].is_array()) throw fail("missing array field 'refs'");

        ArticleRecord rec;
        rec.id = j["id"].get<std::string>();
        if (rec.id.empty()) throw fail("empty article id");
        rec.year = j["year"].get<int>();
        for (const auto& a : j["authors"]) {
            if (!a.is_string()) throw fail("'authors' entries must be strings");
            rec.authors.push_back(a.get<std::string>());
        }
        std::vector<std::string> refs;
        for (const auto& r : j["refs"]) {
            if (!r.is_string()) throw fail("'refs' entries must be strings");
            refs.push_back(r.get<std::string>());
        }
        rec.refs = detail::sorted_unique(std::move(refs));
        if (j.contains("title")) {
            if (!j["title"].is_string()) throw fail("'title' must be a string");
            rec.title = j["title"].get<std::string>();
        }

        if (!seen.insert(rec.id).second)
            throw DuplicateIdError("duplicate article id '" + rec.id + "' at line " +
                                   std::to_string(lineno));
        records.push_back(std::move(rec));
    }
    return records;
}

inline std::vector<ArticleRecord> parse_corpus(const std::string& text) {
    std::istringstream in(text);
    return parse_corpus(in);
}

inline std::vector<ArticleRecord> parse_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file '" + path + "'");
    return parse_corpus(in);
}

// Bibliographic coupling: an edge (a, b, w) for every pair sharing
// w >= min_shared references. Output is canonical (a < b, sorted) and
// invariant under permutation of the input.
inline std::vector<CouplingEdge> coupling_edges(std::span<const ArticleRecord> articles,
                                                std::uint32_t min_shared) {
    if (min_shared < 1) throw ConfigError("min_shared must be >= 1");

    // Work in index space sorted by id so the output order is canonical.
    std::vector<std::uint32_t> order(articles.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
        return articles[x].id < articles[y].id;
    });

    std::unordered_map<std::string, std::uint32_t> ref_ids;
    std::vector<std::vector<std::uint32_t>> refs(order.size());
    for (std::uint32_t pos = 0; pos < order.size(); ++pos) {
        for (const auto& r : articles[order[pos]].refs) {
            auto [it, _] = ref_ids.try_emplace(r, static_cast<std::uint32_t>(ref_ids.size()));
            refs[pos].push_back(it->second);
        }
        std::sort(refs[pos].begin(), refs[pos].end());
    }

    std::vector<CouplingEdge> out;
    for (const auto& [i, j, w] : detail::count_shared_refs(refs, min_shared))
        out.push_back({articles[order[i]].id, articles[order[j]].id, w});
    return out;
}

// Corpus with articles sorted by id and references interned to dense
// integers; the uint32 article index used throughout the pipeline is the
// position in this order.
class Corpus {
public:
    Corpus() = default;

    explicit Corpus(std::vector<ArticleRecord> records) {
        articles_ = std::move(records);
        std::sort(articles_.begin(), articles_.end(),
                  [](const ArticleRecord& a, const ArticleRecord& b) { return a.id < b.id; });
        refs_.resize(articles_.size());
        std::unordered_map<std::string, std::uint32_t> ref_ids;
        for (std::uint32_t i = 0; i < articles_.size(); ++i) {
            index_.emplace(articles_[i].id, i);
            for (const auto& r : articles_[i].refs) {
                auto [it, _] = ref_ids.try_emplace(r, static_cast<std::uint32_t>(ref_ids.size()));
                refs_[i].push_back(it->second);
            }
            std::sort(refs_[i].begin(), refs_[i].end());
            if (i == 0 || articles_[i].year < min_year_) min_year_ = articles_[i].year;
            if (i == 0 || articles_[i].year > max_year_) max_year_ = articles_[i].year;
        }
        n_refs_ = ref_ids.size();
    }

    bool empty() const { return articles_.empty(); }
    std::size_t size() const { return articles_.size(); }
    const ArticleRecord& article(std::uint32_t ix) const { return articles_[ix]; }
    const std::vector<ArticleRecord>& articles() const { return articles_; }
    const std::vector<std::uint32_t>& refs_of(std::uint32_t ix) const { return refs_[ix]; }
    std::size_t ref_universe() const { return n_refs_; }
    int min_year() const { return min_year_; }
    int max_year() const { return max_year_; }

    std::uint32_t index_of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw Error("unknown article id '" + id + "'");
        return it->second;
    }

private:
    std::vector<ArticleRecord> articles_;
    std::vector<std::vector<std::uint32_t>> refs_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::size_t n_refs_ = 0;
    int min_year_ = 0;
    int max_year_ = 0;
};

} // namespace streamflow

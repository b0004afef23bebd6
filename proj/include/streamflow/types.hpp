#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "streamflow/errors.hpp"

namespace streamflow {

// One time-stamped document. `refs` is kept sorted and duplicate-free.
struct ArticleRecord {
    std::string id;
    int year = 0;
    std::vector<std::string> authors;
    std::vector<std::string> refs;
    std::string title; // empty when absent
};

// Undirected coupling edge between two articles, weight = number of
// shared references. Canonical orientation a < b.
struct CouplingEdge {
    std::string a;
    std::string b;
    std::uint32_t weight = 0;

    friend bool operator==(const CouplingEdge&, const CouplingEdge&) = default;
};

struct WindowConfig {
    int width = 4; // w, years
    int step = 1;  // dt, years

    void validate() const {
        if (width < 1)
            throw ConfigError("window width must be >= 1, got " + std::to_string(width));
        if (step < 1)
            throw ConfigError("window step must be >= 1, got " + std::to_string(step));
        if (step > width)
            throw ConfigError("window step " + std::to_string(step) +
                              " exceeds width " + std::to_string(width) +
                              "; years between windows would be dropped");
    }
};

struct Window {
    int index = 0;
    int start_year = 0;
    int end_year = 0; // inclusive

    bool contains(int year) const { return year >= start_year && year <= end_year; }
    friend bool operator==(const Window&, const Window&) = default;
};

// (window, community id) address of one community in a description.
struct CommunityRef {
    int window = -1;
    int cid = -1;

    bool valid() const { return window >= 0 && cid >= 0; }
    friend bool operator==(const CommunityRef&, const CommunityRef&) = default;
    friend auto operator<=>(const CommunityRef&, const CommunityRef&) = default;
};

} // namespace streamflow

#pragma once

#include <stdexcept>
#include <string>

namespace streamflow {

// Base class for everything the pipeline can throw. The CLI maps
// subclasses to exit codes; library callers can catch the base.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Corpus file cannot be opened or read.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Malformed corpus line; message carries the 1-based line number.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Two corpus records share an id; message names the id.
class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(const std::string& msg) : Error(msg) {}
};

// Invalid run configuration (window width, step, thresholds, ...).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Invalid synthetic scenario (pool too small, event out of range, ...).
class ScenarioError : public Error {
public:
    explicit ScenarioError(const std::string& msg) : Error(msg) {}
};

// Partition does not cover exactly the nodes of the graph it is scored on.
class CoverageError : public Error {
public:
    explicit CoverageError(const std::string& msg) : Error(msg) {}
};

// Split/merge correction failed to reach a fixed point within the
// iteration cap; message reports the windows still flapping.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

} // namespace streamflow

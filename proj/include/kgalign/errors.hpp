#pragma once
// Error hierarchy shared across the library.
//
// ConfigError: invalid configuration or parameters (CLI exit code 2).
// DataError:   malformed input files or inconsistent data (exit code 3).
// StageError:  a pipeline stage could not run, e.g. missing upstream
//              artifacts or a stale failure marker (exit code 4).

#include <stdexcept>
#include <string>

namespace kgalign {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class StageError : public std::runtime_error {
public:
    explicit StageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Upstream artifact not on disk yet. A precondition, not a failure of the
// stage itself, so it never leaves a failure marker behind.
class MissingArtifact : public StageError {
public:
    explicit MissingArtifact(const std::string& msg) : StageError(msg) {}
};

} // namespace kgalign

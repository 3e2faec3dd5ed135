#pragma once

#include <stdexcept>
#include <string>

namespace proctrace {

// Malformed input data (bad JSONL record, unknown event type, ...).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller violated an operation precondition (bad k, dimension mismatch, ...).
class ParamError : public std::runtime_error {
public:
    explicit ParamError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data is structurally fine but semantically unusable
// (single-class training set, degenerate matrix, alphabet mismatch, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Model file carries an unrecognized format version.
class VersionError : public std::runtime_error {
public:
    explicit VersionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Model file is truncated or its integrity digest does not match.
class CorruptionError : public std::runtime_error {
public:
    explicit CorruptionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace proctrace

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "proctrace/errors.hpp"

namespace proctrace {

enum class EventType { Process, File, ImageLoad, Registry, Network };

const char* to_string(EventType t);
EventType event_type_from_string(const std::string& s);

// One process-OS interaction. The value is a path for the first four event
// types and a byte size for network events.
struct SystemEvent {
    EventType type = EventType::Process;
    int subtype = 0;
    std::variant<std::string, std::int64_t> value;
    std::int64_t ts_ns = 0;

    bool has_path() const { return std::holds_alternative<std::string>(value); }
    const std::string& path() const { return std::get<std::string>(value); }
    std::int64_t size() const { return std::get<std::int64_t>(value); }
};

// Identity of the owning process. pid alone gets reused by the OS, so the
// process start timestamp is part of the key.
struct ProcessKey {
    std::string host;
    std::int64_t pid = 0;
    std::int64_t pstart_ns = 0;
    std::string image;  // full executable path

    auto operator<=>(const ProcessKey&) const = default;
};

struct ParsedRecord {
    ProcessKey key;
    SystemEvent event;
};

struct ProcessTrace {
    std::string trace_id;
    std::string host_id;
    std::string program_name;  // final path component of executable_path, lowercased
    std::string executable_path;
    std::vector<SystemEvent> events;  // non-decreasing by ts_ns
};

struct TraceCorpus {
    std::vector<ProcessTrace> traces;

    std::vector<std::string> label_set() const;  // distinct program names, sorted
};

std::string lowercase(const std::string& s);

// Final path component of a Windows-style (or POSIX) path, lowercased.
std::string program_name_from_path(const std::string& path);

// Parses one JSONL event record. Throws ParseError on malformed input;
// line_no is only used for error messages.
ParsedRecord parse_event_record(const std::string& line, std::size_t line_no = 0);

// Partitions records into one trace per (host, pid, pstart) key and stably
// sorts each trace by timestamp. Traces are ordered by key.
TraceCorpus group_into_traces(const std::vector<ParsedRecord>& records);

// Reads a whole JSONL event log. Empty lines are skipped.
std::vector<ParsedRecord> read_event_log(std::istream& in, const std::string& source_name = "<stream>");
std::vector<ParsedRecord> read_event_log_file(const std::string& path);

// Checks every ProcessTrace invariant and returns all violations found.
std::vector<std::string> validate_trace(const ProcessTrace& trace);

}  // namespace proctrace

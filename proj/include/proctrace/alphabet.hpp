#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "proctrace/trace_model.hpp"

namespace proctrace {

// One event equivalence class: a conjunction of distinction criteria mapped
// to a single character. Unset criteria match anything. Rules for one event
// type are evaluated in order; a well-formed config ends each type with a
// catch-all so the mapping is total.
struct Rule {
    EventType type = EventType::Process;
    std::vector<std::string> path_prefixes;       // lowercase; empty = any path
    std::optional<int> subtype_lo;                // inclusive
    std::optional<int> subtype_hi;                // inclusive
    std::optional<bool> home_dir;                 // path under the executable's directory
    std::optional<std::string> func_group;        // image loads: DLL functionality group
    std::optional<std::int64_t> size_lo;          // network: byte size, inclusive
    std::optional<std::int64_t> size_hi;          // network: byte size, exclusive
    char32_t character = U'?';

    bool matches(const SystemEvent& event, const std::string& exe_dir,
                 const std::map<std::string, std::string>& dll_groups) const;
};

struct TimeEntry {
    char32_t character;
    std::int64_t duration_ns;
};

struct AlphabetConfig {
    int format_version = 1;
    std::vector<Rule> rules;                       // evaluation order
    std::vector<TimeEntry> time_table;             // strictly decreasing durations
    std::map<std::string, std::string> dll_groups; // DLL file name (lowercase) -> group

    // Derived alphabet, sorted by code point. Rebuilt by finalize().
    const std::u32string& alphabet() const { return alphabet_; }
    std::size_t size() const { return alphabet_.size(); }
    int index_of(char32_t c) const;                // -1 if not in the alphabet

    // Recomputes the derived alphabet and checks all config invariants.
    // Throws DataError on violation.
    void finalize();

    bool operator==(const AlphabetConfig& other) const;

private:
    std::u32string alphabet_;
};

// The character range Table-style layouts admit for each event type.
bool character_in_type_range(EventType type, char32_t c);

// Shipped default configuration (also serialized as configs/alphabet.default.json).
AlphabetConfig default_alphabet_config();

std::string alphabet_config_to_json(const AlphabetConfig& config);
AlphabetConfig alphabet_config_from_json(const std::string& text);

// A process execution reduced to a character sequence over the alphabet.
struct EventString {
    std::string trace_id;
    std::string program_name;
    std::u32string chars;
};

// Directory part of an executable path, lowercased, with trailing separator.
std::string directory_of(const std::string& path);

bool path_is_under(const std::string& path_lower, const std::string& dir_lower);

// Maps one event to its equivalence-class character. exe_dir is the
// directory of the owning trace's executable (see directory_of).
char32_t classify_event(const SystemEvent& event, const std::string& exe_dir,
                        const AlphabetConfig& config);

// Greedy largest-unit-first decomposition of an idle gap into time
// characters; remainder below the smallest unit is dropped.
std::u32string encode_idle_gap(std::int64_t delta_ns, const AlphabetConfig& config);

EventString transform_trace(const ProcessTrace& trace, const AlphabetConfig& config);

std::vector<EventString> filter_short_strings(const std::vector<EventString>& strings,
                                              std::size_t min_len = 6);

// Strings file: JSONL with fields trace_id, program, chars (UTF-8).
void write_strings_jsonl(std::ostream& out, const std::vector<EventString>& strings);
void write_strings_file(const std::string& path, const std::vector<EventString>& strings);
std::vector<EventString> read_strings_jsonl(std::istream& in);
std::vector<EventString> read_strings_file(const std::string& path);

}  // namespace proctrace

#include "proctrace/alphabet.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "proctrace/utf8.hpp"

namespace proctrace {

namespace {

constexpr std::int64_t kMillisecondNs = 1'000'000;

// Default path-prefix classes: Windows dir, Program Files, user profile, other.
const std::vector<std::vector<std::string>> kFilePathClasses = {
    {"c:\\windows"},
    {"c:\\program files"},
    {"c:\\users"},
    {},  // catch-all
};

const std::vector<std::vector<std::string>> kRegistryPathClasses = {
    {"hklm\\software"},
    {"hklm\\system"},
    {"hkcu"},
    {},  // catch-all
};

const std::vector<std::string> kFuncGroups = {"file_system", "networking", "io"};

// Clamped subtype buckets 0..4 as explicit ranges; the last bucket is open.
void set_subtype_bucket(Rule& r, int bucket) {
    r.subtype_lo = bucket;
    if (bucket < 4) r.subtype_hi = bucket;
}

}  // namespace

bool Rule::matches(const SystemEvent& event, const std::string& exe_dir,
                   const std::map<std::string, std::string>& dll_groups) const {
    if (event.type != type) return false;
    if (!path_prefixes.empty()) {
        if (!event.has_path()) return false;
        const std::string p = lowercase(event.path());
        const bool any = std::any_of(path_prefixes.begin(), path_prefixes.end(),
                                     [&](const std::string& pre) { return p.rfind(pre, 0) == 0; });
        if (!any) return false;
    }
    if (subtype_lo && event.subtype < *subtype_lo) return false;
    if (subtype_hi && event.subtype > *subtype_hi) return false;
    if (home_dir) {
        if (!event.has_path()) return false;
        if (path_is_under(lowercase(event.path()), exe_dir) != *home_dir) return false;
    }
    if (func_group) {
        if (!event.has_path()) return false;
        const std::string dll = program_name_from_path(event.path());
        const auto it = dll_groups.find(dll);
        const std::string group = (it == dll_groups.end()) ? "other" : it->second;
        if (group != *func_group) return false;
    }
    if (size_lo || size_hi) {
        if (event.has_path()) return false;
        if (size_lo && event.size() < *size_lo) return false;
        if (size_hi && event.size() >= *size_hi) return false;
    }
    return true;
}

bool character_in_type_range(EventType type, char32_t c) {
    switch (type) {
        case EventType::Process:
            return (c >= U'A' && c <= U'D') || (c >= U'a' && c <= U'd');
        case EventType::Registry:
            return c >= 0x170 && c <= 0x183;
        case EventType::ImageLoad:
            return (c >= U'J' && c <= U'L') || (c >= U'j' && c <= U'l') ||
                   (c >= 0xC0 && c <= 0x16D);
        case EventType::File:
            return c >= 0x184 && c <= 0x1CB;
        case EventType::Network:
            return c == U'R' || c == U'r' || (c >= U'u' && c <= U'x');
    }
    return false;
}

int AlphabetConfig::index_of(char32_t c) const {
    const auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), c);
    if (it == alphabet_.end() || *it != c) return -1;
    return static_cast<int>(it - alphabet_.begin());
}

void AlphabetConfig::finalize() {
    std::set<char32_t> rule_chars;
    for (const auto& r : rules) {
        if (!character_in_type_range(r.type, r.character)) {
            throw DataError("rule character U+" + std::to_string(static_cast<unsigned>(r.character)) +
                            " outside the range for event type " + to_string(r.type));
        }
        rule_chars.insert(r.character);
    }
    std::set<char32_t> time_chars;
    for (std::size_t i = 0; i < time_table.size(); ++i) {
        const auto& t = time_table[i];
        if (t.duration_ns <= 0) throw DataError("time character duration must be positive");
        if (i > 0 && time_table[i - 1].duration_ns <= t.duration_ns)
            throw DataError("time table durations must be strictly decreasing");
        if (rule_chars.count(t.character))
            throw DataError("time character collides with a rule character");
        if (!time_chars.insert(t.character).second)
            throw DataError("duplicate time character");
    }
    alphabet_.clear();
    for (char32_t c : rule_chars) alphabet_.push_back(c);
    for (char32_t c : time_chars) alphabet_.push_back(c);
    std::sort(alphabet_.begin(), alphabet_.end());
}

bool AlphabetConfig::operator==(const AlphabetConfig& other) const {
    return alphabet_config_to_json(*this) == alphabet_config_to_json(other);
}

AlphabetConfig default_alphabet_config() {
    AlphabetConfig cfg;

    // Table-2 hierarchy: 1 ms up to 1 day, largest first.
    cfg.time_table = {
        {U'~', 86'400'000'000'000},  // 1 day
        {U'#', 3'600'000'000'000},   // 1 hour
        {U'_', 600'000'000'000},     // 10 minutes
        {U'-', 60'000'000'000},      // 1 minute
        {U'^', 10'000'000'000},      // 10 seconds
        {U':', 1'000'000'000},       // 1 second
        {U'+', 100'000'000},         // 100 milliseconds
        {U',', 10'000'000},          // 10 milliseconds
        {U'.', kMillisecondNs},      // 1 millisecond
    };

    cfg.dll_groups = {
        {"shlwapi.dll", "file_system"}, {"shell32.dll", "file_system"},
        {"fltlib.dll", "file_system"},  {"ws2_32.dll", "networking"},
        {"mswsock.dll", "networking"},  {"wininet.dll", "networking"},
        {"winhttp.dll", "networking"},  {"dnsapi.dll", "networking"},
        {"iphlpapi.dll", "networking"}, {"kernel32.dll", "io"},
        {"kernelbase.dll", "io"},       {"ntdll.dll", "io"},
    };

    // process: path class -> A..D
    for (std::size_t pc = 0; pc < 4; ++pc) {
        Rule r;
        r.type = EventType::Process;
        r.path_prefixes = kFilePathClasses[pc];
        r.character = static_cast<char32_t>(U'A' + pc);
        cfg.rules.push_back(r);
    }

    // registry: path class x subtype bucket -> U+0170..U+0183
    for (std::size_t pc = 0; pc < 4; ++pc) {
        for (int sb = 0; sb < 5; ++sb) {
            Rule r;
            r.type = EventType::Registry;
            r.path_prefixes = kRegistryPathClasses[pc];
            set_subtype_bucket(r, sb);
            r.character = static_cast<char32_t>(0x170 + pc * 5 + sb);
            cfg.rules.push_back(r);
        }
    }

    // image load: path class x home dir x functionality group
    // -> J K L j k l then U+00C0 onwards
    const std::u32string image_head = U"JKLjkl";
    for (std::size_t pc = 0; pc < 4; ++pc) {
        for (int home = 0; home < 2; ++home) {
            for (std::size_t g = 0; g <= kFuncGroups.size(); ++g) {
                Rule r;
                r.type = EventType::ImageLoad;
                r.path_prefixes = kFilePathClasses[pc];
                r.home_dir = (home == 0);
                if (g < kFuncGroups.size()) r.func_group = kFuncGroups[g];
                const std::size_t idx = pc * 8 + static_cast<std::size_t>(home) * 4 + g;
                r.character = idx < image_head.size()
                                  ? image_head[idx]
                                  : static_cast<char32_t>(0xC0 + (idx - image_head.size()));
                cfg.rules.push_back(r);
            }
        }
    }

    // file: path class x subtype bucket x home dir -> U+0184..
    for (std::size_t pc = 0; pc < 4; ++pc) {
        for (int sb = 0; sb < 5; ++sb) {
            for (int home = 0; home < 2; ++home) {
                Rule r;
                r.type = EventType::File;
                r.path_prefixes = kFilePathClasses[pc];
                set_subtype_bucket(r, sb);
                r.home_dir = (home == 0);
                r.character = static_cast<char32_t>(0x184 + pc * 10 + sb * 2 + home);
                cfg.rules.push_back(r);
            }
        }
    }

    // network: subtype bucket x size bucket -> R r u v w x
    const std::u32string net_chars = U"Rruvwx";
    const std::int64_t size_edges[] = {0, 100, 10'000, -1};  // -1: unbounded
    for (int sb = 0; sb < 2; ++sb) {
        for (int sz = 0; sz < 3; ++sz) {
            Rule r;
            r.type = EventType::Network;
            r.subtype_lo = sb;
            if (sb == 0) r.subtype_hi = 0;
            r.size_lo = size_edges[sz];
            if (size_edges[sz + 1] >= 0) r.size_hi = size_edges[sz + 1];
            r.character = net_chars[static_cast<std::size_t>(sb * 3 + sz)];
            cfg.rules.push_back(r);
        }
    }

    cfg.finalize();
    return cfg;
}

std::string directory_of(const std::string& path) {
    const auto pos = path.find_last_of("\\/");
    if (pos == std::string::npos) return "";
    return lowercase(path.substr(0, pos + 1));
}

bool path_is_under(const std::string& path_lower, const std::string& dir_lower) {
    if (dir_lower.empty()) return false;
    return path_lower.rfind(dir_lower, 0) == 0;
}

char32_t classify_event(const SystemEvent& event, const std::string& exe_dir,
                        const AlphabetConfig& config) {
    for (const auto& r : config.rules) {
        if (r.matches(event, exe_dir, config.dll_groups)) return r.character;
    }
    throw DataError(std::string("no rule matched a ") + to_string(event.type) +
                    " event; config lacks a catch-all");
}

std::u32string encode_idle_gap(std::int64_t delta_ns, const AlphabetConfig& config) {
    if (delta_ns < 0) throw ParamError("idle gap must be non-negative");
    std::u32string out;
    std::int64_t remaining = delta_ns;
    for (const auto& t : config.time_table) {
        while (remaining >= t.duration_ns) {
            out.push_back(t.character);
            remaining -= t.duration_ns;
        }
    }
    return out;
}

EventString transform_trace(const ProcessTrace& trace, const AlphabetConfig& config) {
    EventString s;
    s.trace_id = trace.trace_id;
    s.program_name = trace.program_name;
    const std::string exe_dir = directory_of(trace.executable_path);
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        if (i > 0) {
            s.chars += encode_idle_gap(trace.events[i].ts_ns - trace.events[i - 1].ts_ns, config);
        }
        s.chars.push_back(classify_event(trace.events[i], exe_dir, config));
    }
    return s;
}

std::vector<EventString> filter_short_strings(const std::vector<EventString>& strings,
                                              std::size_t min_len) {
    if (min_len < 1) throw ParamError("min_len must be at least 1");
    std::vector<EventString> kept;
    for (const auto& s : strings) {
        if (s.chars.size() >= min_len) kept.push_back(s);
    }
    return kept;
}

namespace {

nlohmann::json rule_to_json(const Rule& r) {
    nlohmann::json j;
    j["type"] = to_string(r.type);
    j["char"] = static_cast<std::uint32_t>(r.character);
    if (!r.path_prefixes.empty()) j["prefixes"] = r.path_prefixes;
    if (r.subtype_lo) j["subtype_lo"] = *r.subtype_lo;
    if (r.subtype_hi) j["subtype_hi"] = *r.subtype_hi;
    if (r.home_dir) j["home"] = *r.home_dir;
    if (r.func_group) j["group"] = *r.func_group;
    if (r.size_lo) j["size_lo"] = *r.size_lo;
    if (r.size_hi) j["size_hi"] = *r.size_hi;
    return j;
}

Rule rule_from_json(const nlohmann::json& j) {
    Rule r;
    r.type = event_type_from_string(j.at("type").get<std::string>());
    r.character = static_cast<char32_t>(j.at("char").get<std::uint32_t>());
    if (j.contains("prefixes")) r.path_prefixes = j.at("prefixes").get<std::vector<std::string>>();
    if (j.contains("subtype_lo")) r.subtype_lo = j.at("subtype_lo").get<int>();
    if (j.contains("subtype_hi")) r.subtype_hi = j.at("subtype_hi").get<int>();
    if (j.contains("home")) r.home_dir = j.at("home").get<bool>();
    if (j.contains("group")) r.func_group = j.at("group").get<std::string>();
    if (j.contains("size_lo")) r.size_lo = j.at("size_lo").get<std::int64_t>();
    if (j.contains("size_hi")) r.size_hi = j.at("size_hi").get<std::int64_t>();
    return r;
}

}  // namespace

std::string alphabet_config_to_json(const AlphabetConfig& config) {
    nlohmann::json j;
    j["format_version"] = config.format_version;
    j["time_table"] = nlohmann::json::array();
    for (const auto& t : config.time_table) {
        j["time_table"].push_back(
            {{"char", static_cast<std::uint32_t>(t.character)}, {"nanos", t.duration_ns}});
    }
    j["dll_groups"] = config.dll_groups;
    j["rules"] = nlohmann::json::array();
    for (const auto& r : config.rules) j["rules"].push_back(rule_to_json(r));
    return j.dump(2) + "\n";
}

AlphabetConfig alphabet_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid alphabet config JSON: ") + e.what());
    }
    AlphabetConfig cfg;
    try {
        cfg.format_version = j.at("format_version").get<int>();
        if (cfg.format_version != 1)
            throw VersionError("unsupported alphabet config version " +
                               std::to_string(cfg.format_version));
        for (const auto& t : j.at("time_table")) {
            cfg.time_table.push_back({static_cast<char32_t>(t.at("char").get<std::uint32_t>()),
                                      t.at("nanos").get<std::int64_t>()});
        }
        cfg.dll_groups = j.at("dll_groups").get<std::map<std::string, std::string>>();
        for (const auto& r : j.at("rules")) cfg.rules.push_back(rule_from_json(r));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad alphabet config field: ") + e.what());
    }
    cfg.finalize();
    return cfg;
}

void write_strings_jsonl(std::ostream& out, const std::vector<EventString>& strings) {
    for (const auto& s : strings) {
        nlohmann::json j;
        j["trace_id"] = s.trace_id;
        j["program"] = s.program_name;
        j["chars"] = to_utf8(s.chars);
        out << j.dump() << "\n";
    }
}

void write_strings_file(const std::string& path, const std::vector<EventString>& strings) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    write_strings_jsonl(out, strings);
}

std::vector<EventString> read_strings_jsonl(std::istream& in) {
    std::vector<EventString> strings;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            EventString s;
            s.trace_id = j.at("trace_id").get<std::string>();
            s.program_name = j.at("program").get<std::string>();
            s.chars = from_utf8(j.at("chars").get<std::string>());
            strings.push_back(std::move(s));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("strings line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return strings;
}

std::vector<EventString> read_strings_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open strings file '" + path + "'");
    return read_strings_jsonl(in);
}

}  // namespace proctrace

#include "proctrace/trace_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace proctrace {

const char* to_string(EventType t) {
    switch (t) {
        case EventType::Process: return "process";
        case EventType::File: return "file";
        case EventType::ImageLoad: return "image_load";
        case EventType::Registry: return "registry";
        case EventType::Network: return "network";
    }
    return "?";
}

EventType event_type_from_string(const std::string& s) {
    if (s == "process") return EventType::Process;
    if (s == "file") return EventType::File;
    if (s == "image_load") return EventType::ImageLoad;
    if (s == "registry") return EventType::Registry;
    if (s == "network") return EventType::Network;
    throw ParseError("unknown event type '" + s + "'");
}

std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string program_name_from_path(const std::string& path) {
    const auto pos = path.find_last_of("\\/");
    const std::string base = (pos == std::string::npos) ? path : path.substr(pos + 1);
    return lowercase(base);
}

ParsedRecord parse_event_record(const std::string& line, std::size_t line_no) {
    const std::string where = "line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + "invalid JSON: " + e.what());
    }
    for (const char* field : {"type", "subtype", "value", "ts", "host", "pid", "pstart", "image"}) {
        if (!j.contains(field)) throw ParseError(where + "missing field '" + std::string(field) + "'");
    }

    ParsedRecord rec;
    try {
        rec.event.type = event_type_from_string(j.at("type").get<std::string>());
        rec.event.subtype = j.at("subtype").get<int>();
        rec.event.ts_ns = j.at("ts").get<std::int64_t>();
        if (rec.event.type == EventType::Network) {
            if (!j.at("value").is_number_integer())
                throw ParseError("network event value must be a byte size");
            rec.event.value = j.at("value").get<std::int64_t>();
        } else {
            if (!j.at("value").is_string())
                throw ParseError("value must be a path for " + std::string(to_string(rec.event.type)) + " events");
            rec.event.value = j.at("value").get<std::string>();
        }
        rec.key.host = j.at("host").get<std::string>();
        rec.key.pid = j.at("pid").get<std::int64_t>();
        rec.key.pstart_ns = j.at("pstart").get<std::int64_t>();
        rec.key.image = j.at("image").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + "bad field type: " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(where + e.what());
    }
    if (rec.event.subtype < 0) throw ParseError(where + "subtype must be non-negative");
    if (rec.event.ts_ns < 0) throw ParseError(where + "ts must be non-negative");
    if (rec.event.type == EventType::Network && rec.event.size() < 0)
        throw ParseError(where + "network size must be non-negative");
    return rec;
}

TraceCorpus group_into_traces(const std::vector<ParsedRecord>& records) {
    std::map<ProcessKey, ProcessTrace> by_key;
    for (const auto& rec : records) {
        auto it = by_key.find(rec.key);
        if (it == by_key.end()) {
            ProcessTrace t;
            t.trace_id = rec.key.host + "/" + std::to_string(rec.key.pid) + "/" +
                         std::to_string(rec.key.pstart_ns);
            t.host_id = rec.key.host;
            t.executable_path = rec.key.image;
            t.program_name = program_name_from_path(rec.key.image);
            it = by_key.emplace(rec.key, std::move(t)).first;
        }
        it->second.events.push_back(rec.event);
    }
    TraceCorpus corpus;
    corpus.traces.reserve(by_key.size());
    for (auto& [key, trace] : by_key) {
        std::stable_sort(trace.events.begin(), trace.events.end(),
                         [](const SystemEvent& a, const SystemEvent& b) { return a.ts_ns < b.ts_ns; });
        corpus.traces.push_back(std::move(trace));
    }
    return corpus;
}

std::vector<std::string> TraceCorpus::label_set() const {
    std::set<std::string> labels;
    for (const auto& t : traces) labels.insert(t.program_name);
    return {labels.begin(), labels.end()};
}

std::vector<ParsedRecord> read_event_log(std::istream& in, const std::string& source_name) {
    std::vector<ParsedRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(parse_event_record(line, line_no));
        } catch (const ParseError& e) {
            throw ParseError(source_name + ": " + e.what());
        }
    }
    return records;
}

std::vector<ParsedRecord> read_event_log_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open event log '" + path + "'");
    return read_event_log(in, path);
}

std::vector<std::string> validate_trace(const ProcessTrace& trace) {
    std::vector<std::string> violations;
    for (std::size_t i = 1; i < trace.events.size(); ++i) {
        if (trace.events[i].ts_ns < trace.events[i - 1].ts_ns) {
            violations.push_back("events out of order at position " + std::to_string(i));
            break;
        }
    }
    if (trace.program_name != program_name_from_path(trace.executable_path)) {
        violations.push_back("program_name '" + trace.program_name +
                             "' does not equal lowercased final component of '" +
                             trace.executable_path + "'");
    }
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const auto& e = trace.events[i];
        const bool want_size = e.type == EventType::Network;
        if (want_size != !e.has_path()) {
            violations.push_back("event " + std::to_string(i) + ": value variant does not match type " +
                                 to_string(e.type));
        }
        if (e.ts_ns < 0) violations.push_back("event " + std::to_string(i) + ": negative timestamp");
    }
    return violations;
}

}  // namespace proctrace

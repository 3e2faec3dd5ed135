#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "proctrace/rng.hpp"
#include "proctrace/trace_model.hpp"

using namespace proctrace;

namespace {

const char* kFileLine =
    R"({"type":"file","subtype":2,"value":"C:\\Windows\\x.dll","ts":17,"host":"h1","pid":4,"pstart":10,"image":"C:\\a\\b.exe"})";

std::string make_line(const std::string& type, int subtype, const nlohmann::json& value,
                      std::int64_t ts, const std::string& host, std::int64_t pid,
                      std::int64_t pstart, const std::string& image) {
    nlohmann::json j{{"type", type}, {"subtype", subtype}, {"value", value}, {"ts", ts},
                     {"host", host}, {"pid", pid},         {"pstart", pstart}, {"image", image}};
    return j.dump();
}

nlohmann::json record_to_json(const ParsedRecord& r) {
    nlohmann::json j;
    j["type"] = to_string(r.event.type);
    j["subtype"] = r.event.subtype;
    if (r.event.has_path()) j["value"] = r.event.path();
    else j["value"] = r.event.size();
    j["ts"] = r.event.ts_ns;
    j["host"] = r.key.host;
    j["pid"] = r.key.pid;
    j["pstart"] = r.key.pstart_ns;
    j["image"] = r.key.image;
    return j;
}

}  // namespace

TEST_CASE("parse_event_record maps all schema fields") {
    const ParsedRecord r = parse_event_record(kFileLine, 1);
    CHECK(r.event.type == EventType::File);
    CHECK(r.event.subtype == 2);
    CHECK(r.event.path() == "C:\\Windows\\x.dll");
    CHECK(r.event.ts_ns == 17);
    CHECK(r.key.host == "h1");
    CHECK(r.key.pid == 4);
    CHECK(r.key.pstart_ns == 10);
    CHECK(r.key.image == "C:\\a\\b.exe");
}

TEST_CASE("parse_event_record network value is a size") {
    const auto r = parse_event_record(
        make_line("network", 1, 1024, 5, "h1", 4, 10, "C:\\a\\b.exe"), 1);
    CHECK(r.event.type == EventType::Network);
    CHECK(r.event.size() == 1024);
}

TEST_CASE("parse_event_record rejects bad records") {
    CHECK_THROWS_AS(parse_event_record("{not json", 3), ParseError);
    // missing ts
    nlohmann::json j = nlohmann::json::parse(kFileLine);
    j.erase("ts");
    CHECK_THROWS_AS(parse_event_record(j.dump(), 4), ParseError);
    CHECK_THROWS_AS(
        parse_event_record(make_line("bogus", 0, "x", 0, "h", 1, 1, "a.exe"), 1), ParseError);
    // network value must be an integer
    CHECK_THROWS_AS(
        parse_event_record(make_line("network", 1, "path", 0, "h", 1, 1, "a.exe"), 1), ParseError);
    // path types must carry a string
    CHECK_THROWS_AS(
        parse_event_record(make_line("file", 1, 7, 0, "h", 1, 1, "a.exe"), 1), ParseError);
    // error message carries the line number
    try {
        parse_event_record("{", 42);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("42") != std::string::npos);
    }
}

TEST_CASE("parse then re-serialize is semantically lossless") {
    for (const char* line :
         {kFileLine,
          R"({"type":"network","subtype":1,"value":9,"ts":3,"host":"h","pid":1,"pstart":2,"image":"x.exe"})",
          R"({"type":"registry","subtype":0,"value":"HKLM\\Software\\K","ts":0,"host":"h","pid":1,"pstart":2,"image":"x.exe","extra":"ignored"})"}) {
        const auto once = parse_event_record(line, 1);
        const auto twice = parse_event_record(record_to_json(once).dump(), 1);
        CHECK(record_to_json(once) == record_to_json(twice));
    }
}

TEST_CASE("group_into_traces partitions by (host, pid, pstart)") {
    std::vector<ParsedRecord> records;
    records.push_back(parse_event_record(make_line("file", 1, "a", 5, "h1", 4, 10, "C:\\x\\p.exe"), 1));
    records.push_back(parse_event_record(make_line("file", 1, "b", 6, "h1", 7, 10, "C:\\x\\q.exe"), 2));
    records.push_back(parse_event_record(make_line("file", 1, "c", 7, "h1", 4, 10, "C:\\x\\p.exe"), 3));
    const auto corpus = group_into_traces(records);
    REQUIRE(corpus.traces.size() == 2);
    CHECK(corpus.traces[0].events.size() == 2);
    CHECK(corpus.traces[0].program_name == "p.exe");
    CHECK(corpus.traces[1].program_name == "q.exe");
}

TEST_CASE("group_into_traces on the empty stream") {
    CHECK(group_into_traces({}).traces.empty());
}

TEST_CASE("group_into_traces sorts events by timestamp") {
    std::vector<ParsedRecord> records;
    records.push_back(parse_event_record(make_line("file", 1, "a", 20, "h1", 4, 10, "p.exe"), 1));
    records.push_back(parse_event_record(make_line("file", 1, "b", 10, "h1", 4, 10, "p.exe"), 2));
    const auto corpus = group_into_traces(records);
    REQUIRE(corpus.traces.size() == 1);
    CHECK(corpus.traces[0].events[0].ts_ns == 10);
    CHECK(corpus.traces[0].events[1].ts_ns == 20);
}

TEST_CASE("equal timestamps keep input file order") {
    std::vector<ParsedRecord> records;
    records.push_back(parse_event_record(make_line("file", 1, "first", 5, "h1", 4, 10, "p.exe"), 1));
    records.push_back(parse_event_record(make_line("file", 2, "second", 5, "h1", 4, 10, "p.exe"), 2));
    const auto corpus = group_into_traces(records);
    CHECK(corpus.traces[0].events[0].path() == "first");
    CHECK(corpus.traces[0].events[1].path() == "second");
}

TEST_CASE("grouping is permutation-invariant and loses no record") {
    Rng rng(7);
    std::vector<ParsedRecord> records;
    for (int i = 0; i < 200; ++i) {
        records.push_back(parse_event_record(
            make_line("file", 1, "v" + std::to_string(i), rng.uniform_int(0, 50),
                      "h" + std::to_string(rng.uniform_int(1, 3)), rng.uniform_int(1, 5), 10,
                      "p.exe"),
            1));
    }
    const auto base = group_into_traces(records);
    std::size_t total = 0;
    for (const auto& t : base.traces) total += t.events.size();
    CHECK(total == records.size());

    auto shuffled = records;
    rng.shuffle(shuffled);
    const auto again = group_into_traces(shuffled);
    REQUIRE(again.traces.size() == base.traces.size());
    for (std::size_t i = 0; i < base.traces.size(); ++i) {
        CHECK(again.traces[i].trace_id == base.traces[i].trace_id);
        REQUIRE(again.traces[i].events.size() == base.traces[i].events.size());
        for (std::size_t e = 0; e < base.traces[i].events.size(); ++e) {
            CHECK(again.traces[i].events[e].ts_ns == base.traces[i].events[e].ts_ns);
        }
    }
}

TEST_CASE("validate_trace reports all violations") {
    ProcessTrace ok;
    ok.trace_id = "t";
    ok.host_id = "h";
    ok.executable_path = "C:\\x\\B.exe";
    ok.program_name = "b.exe";
    CHECK(validate_trace(ok).empty());

    ProcessTrace bad = ok;
    bad.program_name = "B.EXE";
    SystemEvent e1;
    e1.ts_ns = 10;
    e1.value = std::string("p");
    SystemEvent e2 = e1;
    e2.ts_ns = 5;
    bad.events = {e1, e2};
    const auto violations = validate_trace(bad);
    CHECK(violations.size() == 2);
    CHECK(std::any_of(violations.begin(), violations.end(), [](const std::string& v) {
        return v.find("out of order") != std::string::npos;
    }));
}

TEST_CASE("read_event_log skips empty lines and tags the source") {
    std::istringstream in(std::string(kFileLine) + "\n\n" + kFileLine + "\n");
    CHECK(read_event_log(in, "test").size() == 2);
    std::istringstream bad("{broken\n");
    CHECK_THROWS_AS(read_event_log(bad, "test"), ParseError);
}

#include "proctrace/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "proctrace/utf8.hpp"

namespace proctrace {

namespace {

constexpr double kDistTolerance = 1e-12;

void check_distribution(const std::vector<double>& dist, const std::string& what) {
    double sum = 0.0;
    for (double p : dist) {
        if (p < 0.0) throw DataError(what + " has a negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kDistTolerance)
        throw DataError(what + " sums to " + std::to_string(sum) + ", not 1");
}

std::size_t sample_categorical(const std::vector<double>& dist, Rng& rng) {
    const double u = rng.uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        cum += dist[i];
        if (u < cum) return i;
    }
    return dist.size() - 1;  // guard against rounding at the top end
}

}  // namespace

void ProgramProfile::validate() const {
    if (states.empty()) throw DataError("profile '" + name + "' has no states");
    if (initial.size() != states.size() || rows.size() != states.size())
        throw DataError("profile '" + name + "' has misaligned distributions");
    check_distribution(initial, "profile '" + name + "' initial distribution");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != states.size())
            throw DataError("profile '" + name + "' row " + std::to_string(i) + " has wrong width");
        check_distribution(rows[i], "profile '" + name + "' row " + std::to_string(i));
    }
    if (min_len < 1 || max_len < min_len)
        throw DataError("profile '" + name + "' has an invalid length range");
}

std::u32string sample_string(const ProgramProfile& profile, std::size_t length, Rng& rng) {
    if (length < 1) throw ParamError("sample_string: length must be >= 1");
    profile.validate();
    std::u32string out;
    out.reserve(length);
    std::size_t state = sample_categorical(profile.initial, rng);
    out.push_back(profile.states[state]);
    for (std::size_t t = 1; t < length; ++t) {
        state = sample_categorical(profile.rows[state], rng);
        out.push_back(profile.states[state]);
    }
    return out;
}

double profile_separation(const ProgramProfile& a, const ProgramProfile& b) {
    std::map<char32_t, std::size_t> ia, ib;
    for (std::size_t i = 0; i < a.states.size(); ++i) ia[a.states[i]] = i;
    for (std::size_t i = 0; i < b.states.size(); ++i) ib[b.states[i]] = i;

    double max_tv = 0.0;
    std::map<char32_t, bool> all_states;
    for (char32_t c : a.states) all_states[c] = true;
    for (char32_t c : b.states) all_states[c] = true;
    for (const auto& [state, unused] : all_states) {
        const auto it_a = ia.find(state);
        const auto it_b = ib.find(state);
        if (it_a == ia.end() || it_b == ib.end()) {
            max_tv = 1.0;  // a row present in only one profile is maximally different
            continue;
        }
        // total variation over the union of target states
        double tv = 0.0;
        for (const auto& [target, unused2] : all_states) {
            const auto ta = ia.find(target);
            const auto tb = ib.find(target);
            const double pa = ta == ia.end() ? 0.0 : a.rows[it_a->second][ta->second];
            const double pb = tb == ib.end() ? 0.0 : b.rows[it_b->second][tb->second];
            tv += std::abs(pa - pb);
        }
        max_tv = std::max(max_tv, tv / 2.0);
    }
    return max_tv;
}

SimulatedCorpus generate_corpus(const CorpusSpec& spec) {
    for (const auto& p : spec.profiles) p.validate();

    SimulatedCorpus corpus;
    for (std::size_t pi = 0; pi < spec.profiles.size(); ++pi) {
        const auto& profile = spec.profiles[pi];
        for (std::size_t ti = 0; ti < spec.traces_per_profile; ++ti) {
            Rng rng(mix_seed(spec.seed, pi, ti));
            const auto length = static_cast<std::size_t>(
                rng.uniform_int(static_cast<std::int64_t>(profile.min_len),
                                static_cast<std::int64_t>(profile.max_len)));
            EventString s;
            s.trace_id = profile.name + "#" + std::to_string(ti);
            s.program_name = profile.name;
            s.chars = sample_string(profile, length, rng);
            corpus.strings.push_back(std::move(s));
        }
    }

    corpus.realized_separation = spec.profiles.size() < 2 ? 0.0 : 2.0;
    for (std::size_t i = 0; i + 1 < spec.profiles.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.profiles.size(); ++j) {
            corpus.realized_separation = std::min(
                corpus.realized_separation, profile_separation(spec.profiles[i], spec.profiles[j]));
        }
    }
    if (spec.min_separation_floor >= 0.0 &&
        corpus.realized_separation < spec.min_separation_floor) {
        throw DataError("realized profile separation " +
                        std::to_string(corpus.realized_separation) + " is below the requested floor " +
                        std::to_string(spec.min_separation_floor));
    }
    return corpus;
}

CorpusSpec corpus_spec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid corpus spec JSON: ") + e.what());
    }
    CorpusSpec spec;
    try {
        spec.seed = j.at("seed").get<std::uint64_t>();
        spec.traces_per_profile = j.at("traces_per_profile").get<std::size_t>();
        if (j.contains("min_separation_floor"))
            spec.min_separation_floor = j.at("min_separation_floor").get<double>();
        for (const auto& pj : j.at("profiles")) {
            ProgramProfile p;
            p.name = pj.at("name").get<std::string>();
            p.states = from_utf8(pj.at("states").get<std::string>());
            p.initial = pj.at("initial").get<std::vector<double>>();
            p.rows = pj.at("rows").get<std::vector<std::vector<double>>>();
            p.min_len = pj.at("min_len").get<std::size_t>();
            p.max_len = pj.at("max_len").get<std::size_t>();
            spec.profiles.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad corpus spec field: ") + e.what());
    }
    return spec;
}

std::string corpus_spec_to_json(const CorpusSpec& spec) {
    nlohmann::json j;
    j["seed"] = spec.seed;
    j["traces_per_profile"] = spec.traces_per_profile;
    if (spec.min_separation_floor >= 0.0) j["min_separation_floor"] = spec.min_separation_floor;
    j["profiles"] = nlohmann::json::array();
    for (const auto& p : spec.profiles) {
        j["profiles"].push_back({{"name", p.name},
                                 {"states", to_utf8(p.states)},
                                 {"initial", p.initial},
                                 {"rows", p.rows},
                                 {"min_len", p.min_len},
                                 {"max_len", p.max_len}});
    }
    return j.dump(2) + "\n";
}

}  // namespace proctrace

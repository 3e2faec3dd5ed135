#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "proctrace/alphabet.hpp"
#include "proctrace/rng.hpp"

namespace proctrace {

// Ground-truth Markov chain of one synthetic program: a state set, an
// initial distribution and fully defined transition rows.
struct ProgramProfile {
    std::string name;
    std::u32string states;
    std::vector<double> initial;             // aligned with states, sums to 1
    std::vector<std::vector<double>> rows;   // rows[i][j] = P(states[j] | states[i])
    std::size_t min_len = 1;
    std::size_t max_len = 1;

    void validate() const;  // throws DataError on a malformed distribution
};

struct CorpusSpec {
    std::vector<ProgramProfile> profiles;
    std::size_t traces_per_profile = 0;
    std::uint64_t seed = 0;
    double min_separation_floor = -1.0;  // < 0: report only, do not enforce
};

struct SimulatedCorpus {
    std::vector<EventString> strings;
    // Smallest over profile pairs of the max-over-rows total-variation
    // distance between their transition rows.
    double realized_separation = 0.0;
};

std::u32string sample_string(const ProgramProfile& profile, std::size_t length, Rng& rng);

double profile_separation(const ProgramProfile& a, const ProgramProfile& b);

// Deterministic given the spec seed; each trace draws from a sub-seed of
// (seed, profile index, trace index), so generation order does not matter.
SimulatedCorpus generate_corpus(const CorpusSpec& spec);

CorpusSpec corpus_spec_from_json(const std::string& text);
std::string corpus_spec_to_json(const CorpusSpec& spec);

}  // namespace proctrace

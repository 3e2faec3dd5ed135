#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "proctrace/alphabet.hpp"

namespace proctrace {

// Sparse one-step transition probabilities over the alphabet. Characters
// with no outgoing transitions have no row at all, so every stored row
// sums to one.
struct TransitionMatrix {
    std::size_t dim = 0;
    std::map<std::pair<int, int>, double> entries;  // (row, col) -> probability
    std::map<int, std::int64_t> row_counts;         // row -> outgoing bigram count
};

// TransitionMatrix flattened to a sparse vector of length dim^2; entry
// (i, j) sits at flat index i*dim + j.
struct FeatureVector {
    std::size_t length = 0;
    std::vector<std::pair<std::int64_t, double>> nonzeros;  // sorted by flat index
};

struct FeatureMatrix {
    std::size_t width = 0;  // |A|^2
    std::vector<FeatureVector> rows;
    std::vector<std::string> labels;  // aligned program names
    std::vector<std::string> trace_ids;
};

// Counts bigrams of s and normalizes per row. Throws DataError when a
// character lies outside the config's alphabet.
TransitionMatrix build_transition_matrix(const EventString& s, const AlphabetConfig& config);

FeatureVector flatten(const TransitionMatrix& m);

FeatureMatrix assemble_feature_matrix(const std::vector<EventString>& strings,
                                      const AlphabetConfig& config);

// Figure-3 style debug dumps: a dim x dim grid, zero entries white.
void dump_matrix_pgm(std::ostream& out, const TransitionMatrix& m);
void dump_matrix_csv(std::ostream& out, const TransitionMatrix& m);

}  // namespace proctrace

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "proctrace/markov.hpp"

namespace proctrace {

// Dominant right-singular subspace of the uncentered sparse feature matrix.
struct ProjectionBasis {
    std::size_t m = 0;
    std::size_t width = 0;                          // |A|^2
    std::vector<std::vector<double>> directions;    // m orthonormal vectors, length width
    std::vector<double> singular_values;            // non-increasing
    std::uint64_t seed = 0;
};

struct ProjectedVector {
    std::vector<double> coords;
    std::string label;
};

// Randomized range finder (oversampling 10, 4 power iterations) over the
// sparse matrix, then an exact SVD of the small projected matrix. The data
// is never centered, so sparsity is preserved end to end. Deterministic for
// fixed (features, m, seed); sign convention: each direction's entry of
// largest magnitude is positive.
ProjectionBasis fit_projection(const FeatureMatrix& features, std::size_t m, std::uint64_t seed);

std::vector<double> project(const FeatureVector& v, const ProjectionBasis& basis);

}  // namespace proctrace

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "proctrace/dimred.hpp"

namespace proctrace {

enum class Voting { Uniform, DistanceWeighted };

const char* to_string(Voting v);
Voting voting_from_string(const std::string& s);

struct Hyperparameters {
    std::size_t k = 1;
    Voting voting = Voting::DistanceWeighted;
    double p = 1.0;       // Minkowski exponent
    std::size_t m = 100;  // projection component count
};

// Read-only store of projected training points; safe for concurrent queries.
struct TrainingIndex {
    std::vector<ProjectedVector> points;

    std::vector<std::string> label_set() const;  // distinct labels, sorted
};

struct Neighbor {
    std::size_t index = 0;  // position in the training index
    double distance = 0.0;
};

struct Prediction {
    std::string label;
    std::vector<Neighbor> neighbors;            // sorted by (distance, index)
    std::map<std::string, double> vote_weights; // per-class totals
};

double minkowski_distance(const std::vector<double>& x, const std::vector<double>& y, double p);

// Exhaustive scan; ties broken by lower training index.
std::vector<Neighbor> find_k_nearest(const TrainingIndex& index, const std::vector<double>& query,
                                     std::size_t k, double p);

// Uniform voting gives each neighbor weight 1; distance-weighted gives 1/d,
// where zero-distance neighbors dominate exclusively. Class-vote ties break
// to the lexicographically smallest label.
Prediction classify(const TrainingIndex& index, const std::vector<double>& query,
                    const Hyperparameters& hyper);

}  // namespace proctrace

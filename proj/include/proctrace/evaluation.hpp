#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "proctrace/alphabet.hpp"
#include "proctrace/knn.hpp"
#include "proctrace/metrics.hpp"

namespace proctrace {

struct SplitResult {
    std::vector<std::size_t> train;
    std::vector<std::size_t> verify;
    std::vector<std::string> warnings;
};

// Per class, round-half-up of count/4 members go to the verify side (at
// least 1 when the class has >= 2 members). Singleton classes go wholly to
// train with a warning. Selection is seed-deterministic.
SplitResult stratified_split(const std::vector<std::string>& labels, std::uint64_t seed);

struct FoldResult {
    std::vector<int> assignment;  // index -> fold
    std::vector<std::string> warnings;
};

// Per class: seeded shuffle, then round-robin from a seed-determined start
// fold, so fold sizes per class differ by at most 1.
FoldResult stratified_folds(const std::vector<std::string>& labels, int folds, std::uint64_t seed);

struct GridSpec {
    std::vector<std::size_t> neighbors = {1, 5, 20, 100};
    std::vector<Voting> votings = {Voting::Uniform, Voting::DistanceWeighted};
    std::vector<double> ps = {1.0, 2.0, 3.0};
    std::vector<std::size_t> components = {5, 10, 15, 25, 50, 100};

    std::size_t combination_count() const;
    // Enumeration order: neighbors, then voting, then p, then components.
    std::vector<Hyperparameters> enumerate() const;
};

struct GridCombinationScore {
    Hyperparameters hyper;
    double mean_score = 0.0;  // mean macro-F1 over folds; 0 when failed
    bool failed = false;
};

struct GridSearchResult {
    std::vector<GridCombinationScore> combos;  // in enumeration order
    Hyperparameters best;
    double best_score = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

// Mean macro-F1 of one hyperparameter combination over the given fold
// assignment. Throws ParamError when the combination cannot run on a fold
// (k or m too large for the fold's training side).
double evaluate_combination(const FeatureMatrix& features, const std::vector<int>& fold_assignment,
                            int folds, const Hyperparameters& hyper, std::uint64_t seed);

// Exhaustive seed-deterministic search over the grid by threefold (default)
// stratified cross-validated macro-F1. A failing combination scores 0 with a
// warning. Ties go to the first combination in enumeration order.
GridSearchResult grid_search(const std::vector<EventString>& train_strings,
                             const AlphabetConfig& config, const GridSpec& grid = {},
                             int folds = 3, std::uint64_t seed = 0);

std::string grid_search_result_to_json(const GridSearchResult& result);
std::string format_grid_search_result(const GridSearchResult& result);

}  // namespace proctrace

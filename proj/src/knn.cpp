#include "proctrace/knn.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace proctrace {

const char* to_string(Voting v) {
    return v == Voting::Uniform ? "uniform" : "distance_weighted";
}

Voting voting_from_string(const std::string& s) {
    if (s == "uniform") return Voting::Uniform;
    if (s == "distance_weighted" || s == "distance-weighted") return Voting::DistanceWeighted;
    throw ParamError("unknown voting method '" + s + "'");
}

std::vector<std::string> TrainingIndex::label_set() const {
    std::set<std::string> labels;
    for (const auto& pt : points) labels.insert(pt.label);
    return {labels.begin(), labels.end()};
}

double minkowski_distance(const std::vector<double>& x, const std::vector<double>& y, double p) {
    if (x.size() != y.size())
        throw ParamError("minkowski_distance: length mismatch " + std::to_string(x.size()) +
                         " vs " + std::to_string(y.size()));
    if (p < 1.0) throw ParamError("minkowski exponent must be >= 1");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i] - y[i]), p);
    return std::pow(acc, 1.0 / p);
}

std::vector<Neighbor> find_k_nearest(const TrainingIndex& index, const std::vector<double>& query,
                                     std::size_t k, double p) {
    if (k < 1) throw ParamError("k must be at least 1");
    if (k > index.points.size())
        throw ParamError("k=" + std::to_string(k) + " exceeds training set size " +
                         std::to_string(index.points.size()));
    std::vector<Neighbor> all;
    all.reserve(index.points.size());
    for (std::size_t i = 0; i < index.points.size(); ++i) {
        all.push_back({i, minkowski_distance(query, index.points[i].coords, p)});
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                      [](const Neighbor& a, const Neighbor& b) {
                          return a.distance != b.distance ? a.distance < b.distance
                                                          : a.index < b.index;
                      });
    all.resize(k);
    return all;
}

Prediction classify(const TrainingIndex& index, const std::vector<double>& query,
                    const Hyperparameters& hyper) {
    Prediction pred;
    pred.neighbors = find_k_nearest(index, query, hyper.k, hyper.p);

    const bool any_exact =
        hyper.voting == Voting::DistanceWeighted &&
        std::any_of(pred.neighbors.begin(), pred.neighbors.end(),
                    [](const Neighbor& n) { return n.distance == 0.0; });
    for (const auto& n : pred.neighbors) {
        const std::string& label = index.points[n.index].label;
        double w;
        if (hyper.voting == Voting::Uniform) {
            w = 1.0;
        } else if (any_exact) {
            // limit of 1/d as d -> 0: only exact matches vote
            w = n.distance == 0.0 ? 1.0 : 0.0;
        } else {
            w = 1.0 / n.distance;
        }
        pred.vote_weights[label] += w;
    }

    double best = -1.0;
    for (const auto& [label, w] : pred.vote_weights) {
        if (w > best) {  // map iteration is label-sorted, so ties keep the smallest label
            best = w;
            pred.label = label;
        }
    }
    return pred;
}

}  // namespace proctrace

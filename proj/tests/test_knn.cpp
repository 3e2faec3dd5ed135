#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "proctrace/knn.hpp"
#include "proctrace/rng.hpp"

using namespace proctrace;

namespace {

TrainingIndex make_index(const std::vector<std::pair<std::vector<double>, std::string>>& pts) {
    TrainingIndex idx;
    for (const auto& [coords, label] : pts) idx.points.push_back({coords, label});
    return idx;
}

// Reference implementation: full sort of (distance, index), then voting over
// the first k, written independently of the library path.
std::string reference_classify(const TrainingIndex& index, const std::vector<double>& q,
                               const Hyperparameters& h) {
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < index.points.size(); ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < q.size(); ++c) {
            acc += std::pow(std::abs(q[c] - index.points[i].coords[c]), h.p);
        }
        dist.emplace_back(std::pow(acc, 1.0 / h.p), i);
    }
    std::sort(dist.begin(), dist.end());
    const bool exact = h.voting == Voting::DistanceWeighted &&
                       std::any_of(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(h.k),
                                   [](const auto& d) { return d.first == 0.0; });
    std::map<std::string, double> votes;
    for (std::size_t i = 0; i < h.k; ++i) {
        const std::string& label = index.points[dist[i].second].label;
        if (h.voting == Voting::Uniform) votes[label] += 1.0;
        else if (exact) votes[label] += dist[i].first == 0.0 ? 1.0 : 0.0;
        else votes[label] += 1.0 / dist[i].first;
    }
    std::string best;
    double best_w = -1.0;
    for (const auto& [label, w] : votes) {
        if (w > best_w) {
            best_w = w;
            best = label;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("minkowski_distance closed-form examples") {
    CHECK(minkowski_distance({0, 0}, {1, 1}, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(minkowski_distance({0, 0}, {1, 1}, 2) == doctest::Approx(1.41421356).epsilon(1e-8));
    CHECK(minkowski_distance({0, 0}, {1, 1}, 3) == doctest::Approx(1.25992105).epsilon(1e-8));
    CHECK_THROWS_AS(minkowski_distance({0, 0}, {1}, 2), ParamError);
    CHECK_THROWS_AS(minkowski_distance({0}, {1}, 0.5), ParamError);
}

TEST_CASE("find_k_nearest basics and tie rule") {
    const auto idx = make_index({{{0.0}, "a"}, {{10.0}, "b"}});
    const auto n1 = find_k_nearest(idx, {1.0}, 1, 2);
    REQUIRE(n1.size() == 1);
    CHECK(n1[0].index == 0);

    // equidistant pair: lower training index wins
    const auto tie = make_index({{{-1.0}, "a"}, {{1.0}, "b"}});
    CHECK(find_k_nearest(tie, {0.0}, 1, 2)[0].index == 0);

    CHECK_THROWS_AS(find_k_nearest(idx, {0.0}, 3, 2), ParamError);
    CHECK_THROWS_AS(find_k_nearest(idx, {0.0}, 0, 2), ParamError);
}

TEST_CASE("find_k_nearest agrees with an exhaustive scan on random sets") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        TrainingIndex idx;
        for (int i = 0; i < 200; ++i) {
            idx.points.push_back({{rng.gaussian(), rng.gaussian(), rng.gaussian()}, "x"});
        }
        const std::vector<double> q = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
        const std::size_t k = static_cast<std::size_t>(rng.uniform_int(1, 20));
        const auto got = find_k_nearest(idx, q, k, 2);

        std::vector<std::pair<double, std::size_t>> ref;
        for (std::size_t i = 0; i < idx.points.size(); ++i) {
            ref.emplace_back(minkowski_distance(q, idx.points[i].coords, 2), i);
        }
        std::sort(ref.begin(), ref.end());
        REQUIRE(got.size() == k);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(got[i].index == ref[i].second);
            CHECK(got[i].distance == ref[i].first);
        }
    }
}

TEST_CASE("classify voting rules") {
    // neighbors at d=1 (A), d=2 (B), d=3 (B)
    const auto idx = make_index({{{1.0}, "A"}, {{2.0}, "B"}, {{3.0}, "B"}});
    Hyperparameters h;
    h.k = 3;
    h.p = 1;

    h.voting = Voting::Uniform;
    CHECK(classify(idx, {0.0}, h).label == "B");  // 2 votes vs 1

    h.voting = Voting::DistanceWeighted;
    const Prediction pred = classify(idx, {0.0}, h);
    CHECK(pred.label == "A");  // 1.0 vs 1/2 + 1/3
    CHECK(pred.vote_weights.at("A") == doctest::Approx(1.0));
    CHECK(pred.vote_weights.at("B") == doctest::Approx(1.0 / 2 + 1.0 / 3));
}

TEST_CASE("k=1 returns the nearest neighbor's label") {
    const auto idx = make_index({{{0.0}, "near"}, {{5.0}, "far"}});
    Hyperparameters h;
    CHECK(classify(idx, {1.0}, h).label == "near");
}

TEST_CASE("zero-distance neighbors dominate distance-weighted voting") {
    const auto idx = make_index({{{1.0, 1.0}, "match"},
                                 {{1.0, 1.001}, "close"},
                                 {{1.0, 1.002}, "close"},
                                 {{1.0, 1.003}, "close"}});
    Hyperparameters h;
    h.k = 4;
    h.voting = Voting::DistanceWeighted;
    CHECK(classify(idx, {1.0, 1.0}, h).label == "match");
}

TEST_CASE("class-vote ties break to the lexicographically smallest label") {
    const auto idx = make_index({{{-1.0}, "zeta"}, {{1.0}, "alpha"}});
    Hyperparameters h;
    h.k = 2;
    h.voting = Voting::Uniform;
    CHECK(classify(idx, {0.0}, h).label == "alpha");
}

TEST_CASE("classify agrees with the reference on random instances over the whole grid") {
    Rng rng(2025);
    const std::vector<std::size_t> ks = {1, 3, 7};
    const std::vector<double> ps = {1, 2, 3};
    for (int trial = 0; trial < 100; ++trial) {
        TrainingIndex idx;
        const int n = static_cast<int>(rng.uniform_int(10, 40));
        for (int i = 0; i < n; ++i) {
            idx.points.push_back({{rng.gaussian(), rng.gaussian()},
                                  std::string(1, static_cast<char>('a' + rng.uniform_int(0, 3)))});
        }
        const std::vector<double> q = {rng.gaussian(), rng.gaussian()};
        for (std::size_t k : ks) {
            for (double p : ps) {
                for (Voting v : {Voting::Uniform, Voting::DistanceWeighted}) {
                    const Hyperparameters h{k, v, p, 2};
                    CHECK(classify(idx, q, h).label == reference_classify(idx, q, h));
                }
            }
        }
    }
}

TEST_CASE("a query equal to a training point returns that point's label") {
    Rng rng(4);
    TrainingIndex idx;
    for (int i = 0; i < 30; ++i) {
        idx.points.push_back({{rng.gaussian(), rng.gaussian()}, "c" + std::to_string(i % 5)});
    }
    for (std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{20}}) {
        Hyperparameters h;
        h.k = k;
        h.voting = Voting::DistanceWeighted;
        for (std::size_t i = 0; i < idx.points.size(); i += 7) {
            CHECK(classify(idx, idx.points[i].coords, h).label == idx.points[i].label);
        }
    }
}

TEST_CASE("predictions are invariant under uniform positive scaling") {
    Rng rng(9);
    TrainingIndex idx, scaled;
    const double factor = 37.5;
    for (int i = 0; i < 50; ++i) {
        const std::vector<double> c = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
        const std::string label = "c" + std::to_string(i % 4);
        idx.points.push_back({c, label});
        scaled.points.push_back({{c[0] * factor, c[1] * factor, c[2] * factor}, label});
    }
    for (int trial = 0; trial < 30; ++trial) {
        const std::vector<double> q = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
        const std::vector<double> qs = {q[0] * factor, q[1] * factor, q[2] * factor};
        for (double p : {1.0, 2.0, 3.0}) {
            for (Voting v : {Voting::Uniform, Voting::DistanceWeighted}) {
                const Hyperparameters h{5, v, p, 3};
                CHECK(classify(idx, q, h).label == classify(scaled, qs, h).label);
            }
        }
    }
}

TEST_CASE("shuffling training points only matters at exact distance ties") {
    Rng rng(15);
    std::vector<std::pair<std::vector<double>, std::string>> pts;
    for (int i = 0; i < 40; ++i) {
        pts.push_back({{rng.gaussian(), rng.gaussian()}, "c" + std::to_string(i % 3)});
    }
    auto shuffled = pts;
    rng.shuffle(shuffled);
    const auto a = make_index(pts);
    const auto b = make_index(shuffled);
    Hyperparameters h;
    h.k = 5;
    h.voting = Voting::Uniform;
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<double> q = {rng.gaussian(), rng.gaussian()};
        const auto na = find_k_nearest(a, q, h.k, h.p);
        const auto nb = find_k_nearest(b, q, h.k, h.p);
        // generic gaussian coordinates: no exact ties, so the same points win
        std::vector<double> da, db;
        for (const auto& n : na) da.push_back(n.distance);
        for (const auto& n : nb) db.push_back(n.distance);
        CHECK(da == db);
        CHECK(classify(a, q, h).label == classify(b, q, h).label);
    }
}

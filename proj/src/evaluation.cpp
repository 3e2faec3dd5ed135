#include "proctrace/evaluation.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

#include "proctrace/markov.hpp"
#include "proctrace/rng.hpp"

namespace proctrace {

namespace {

std::map<std::string, std::vector<std::size_t>> group_by_label(
    const std::vector<std::string>& labels) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    return groups;
}

}  // namespace

SplitResult stratified_split(const std::vector<std::string>& labels, std::uint64_t seed) {
    if (labels.empty()) throw ParamError("stratified_split: empty corpus");
    SplitResult result;
    Rng rng(mix_seed(seed, 0x5317));
    for (auto& [label, members] : group_by_label(labels)) {
        if (members.size() < 2) {
            result.warnings.push_back("class '" + label +
                                      "' has fewer than 2 members; kept wholly in train");
            result.train.insert(result.train.end(), members.begin(), members.end());
            continue;
        }
        rng.shuffle(members);
        const std::size_t verify_count = (members.size() + 2) / 4;  // round-half-up of count/4
        for (std::size_t i = 0; i < members.size(); ++i) {
            (i < verify_count ? result.verify : result.train).push_back(members[i]);
        }
    }
    std::sort(result.train.begin(), result.train.end());
    std::sort(result.verify.begin(), result.verify.end());
    return result;
}

FoldResult stratified_folds(const std::vector<std::string>& labels, int folds, std::uint64_t seed) {
    if (folds < 2) throw ParamError("stratified_folds: folds must be >= 2");
    FoldResult result;
    result.assignment.assign(labels.size(), 0);
    Rng rng(mix_seed(seed, 0xf01d));
    for (auto& [label, members] : group_by_label(labels)) {
        if (members.size() < static_cast<std::size_t>(folds)) {
            result.warnings.push_back("class '" + label + "' has " +
                                      std::to_string(members.size()) + " members for " +
                                      std::to_string(folds) + " folds");
        }
        rng.shuffle(members);
        const int start = static_cast<int>(rng.uniform_int(0, folds - 1));
        for (std::size_t i = 0; i < members.size(); ++i) {
            result.assignment[members[i]] = (start + static_cast<int>(i)) % folds;
        }
    }
    return result;
}

std::size_t GridSpec::combination_count() const {
    return neighbors.size() * votings.size() * ps.size() * components.size();
}

std::vector<Hyperparameters> GridSpec::enumerate() const {
    std::vector<Hyperparameters> out;
    out.reserve(combination_count());
    for (std::size_t k : neighbors)
        for (Voting v : votings)
            for (double p : ps)
                for (std::size_t m : components) out.push_back({k, v, p, m});
    return out;
}

namespace {

FeatureMatrix subset(const FeatureMatrix& features, const std::vector<std::size_t>& rows) {
    FeatureMatrix out;
    out.width = features.width;
    for (std::size_t r : rows) {
        out.rows.push_back(features.rows[r]);
        out.labels.push_back(features.labels[r]);
        out.trace_ids.push_back(features.trace_ids[r]);
    }
    return out;
}

// One fold's data projected to m components.
struct FoldProjection {
    TrainingIndex index;
    std::vector<std::vector<double>> val_coords;
    std::vector<std::string> val_labels;
};

FoldProjection project_fold(const FeatureMatrix& features, const std::vector<int>& assignment,
                            int fold, std::size_t m, std::uint64_t seed) {
    std::vector<std::size_t> train_rows, val_rows;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        (assignment[i] == fold ? val_rows : train_rows).push_back(i);
    }
    const FeatureMatrix train = subset(features, train_rows);
    const ProjectionBasis basis = fit_projection(train, m, mix_seed(seed, static_cast<std::uint64_t>(fold), m));

    FoldProjection fp;
    for (std::size_t i = 0; i < train.rows.size(); ++i) {
        fp.index.points.push_back({project(train.rows[i], basis), train.labels[i]});
    }
    for (std::size_t r : val_rows) {
        fp.val_coords.push_back(project(features.rows[r], basis));
        fp.val_labels.push_back(features.labels[r]);
    }
    return fp;
}

double fold_macro_f1(const FoldProjection& fp, const Hyperparameters& hyper) {
    std::vector<std::string> predicted;
    predicted.reserve(fp.val_coords.size());
    for (const auto& q : fp.val_coords) {
        predicted.push_back(classify(fp.index, q, hyper).label);
    }
    return score_report(confusion_counts(predicted, fp.val_labels)).macro.f1;
}

}  // namespace

double evaluate_combination(const FeatureMatrix& features, const std::vector<int>& fold_assignment,
                            int folds, const Hyperparameters& hyper, std::uint64_t seed) {
    double total = 0.0;
    for (int f = 0; f < folds; ++f) {
        const FoldProjection fp = project_fold(features, fold_assignment, f, hyper.m, seed);
        total += fold_macro_f1(fp, hyper);
    }
    return total / folds;
}

GridSearchResult grid_search(const std::vector<EventString>& train_strings,
                             const AlphabetConfig& config, const GridSpec& grid, int folds,
                             std::uint64_t seed) {
    if (grid.combination_count() == 0) throw ParamError("grid_search: empty grid");
    const FeatureMatrix features = assemble_feature_matrix(train_strings, config);
    FoldResult fold_result = stratified_folds(features.labels, folds, seed);

    GridSearchResult result;
    result.seed = seed;
    result.warnings = std::move(fold_result.warnings);

    // Projections only depend on (fold, m); cache them across combinations.
    std::map<std::pair<int, std::size_t>, FoldProjection> cache;
    std::map<std::size_t, std::string> m_errors;
    for (int f = 0; f < folds; ++f) {
        for (std::size_t m : grid.components) {
            if (m_errors.count(m)) continue;
            try {
                cache.emplace(std::make_pair(f, m),
                              project_fold(features, fold_result.assignment, f, m, seed));
            } catch (const std::exception& e) {
                m_errors[m] = e.what();
            }
        }
    }

    bool have_best = false;
    for (const Hyperparameters& hyper : grid.enumerate()) {
        GridCombinationScore score;
        score.hyper = hyper;
        try {
            if (m_errors.count(hyper.m)) throw ParamError(m_errors.at(hyper.m));
            double total = 0.0;
            for (int f = 0; f < folds; ++f) {
                total += fold_macro_f1(cache.at({f, hyper.m}), hyper);
            }
            score.mean_score = total / folds;
        } catch (const std::exception& e) {
            score.failed = true;
            score.mean_score = 0.0;
            result.warnings.push_back("combination k=" + std::to_string(hyper.k) + " " +
                                      to_string(hyper.voting) + " p=" + std::to_string(hyper.p) +
                                      " m=" + std::to_string(hyper.m) + " failed: " + e.what());
        }
        if (!have_best || score.mean_score > result.best_score) {
            have_best = true;
            result.best_score = score.mean_score;
            result.best = hyper;
        }
        result.combos.push_back(std::move(score));
    }
    return result;
}

namespace {

nlohmann::json hyper_to_json(const Hyperparameters& h) {
    return {{"k", h.k}, {"voting", to_string(h.voting)}, {"p", h.p}, {"m", h.m}};
}

}  // namespace

std::string grid_search_result_to_json(const GridSearchResult& result) {
    nlohmann::json j;
    j["seed"] = result.seed;
    j["best"] = hyper_to_json(result.best);
    j["best_score"] = result.best_score;
    j["combinations"] = nlohmann::json::array();
    for (const auto& c : result.combos) {
        nlohmann::json cj = hyper_to_json(c.hyper);
        cj["mean_macro_f1"] = c.mean_score;
        cj["failed"] = c.failed;
        j["combinations"].push_back(cj);
    }
    j["warnings"] = result.warnings;
    return j.dump(2) + "\n";
}

std::string format_grid_search_result(const GridSearchResult& result) {
    std::ostringstream out;
    out << "grid search over " << result.combos.size() << " combinations\n";
    for (const auto& c : result.combos) {
        out << "  k=" << c.hyper.k << " voting=" << to_string(c.hyper.voting)
            << " p=" << c.hyper.p << " m=" << c.hyper.m << "  mean macro-F1=" << c.mean_score
            << (c.failed ? "  (failed)" : "") << "\n";
    }
    out << "best: k=" << result.best.k << " voting=" << to_string(result.best.voting)
        << " p=" << result.best.p << " m=" << result.best.m << "  score=" << result.best_score
        << "\n";
    return out.str();
}

}  // namespace proctrace

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "proctrace/errors.hpp"

namespace proctrace {

struct BinaryCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;
};

// One-vs-rest counts per class for a single-label multiclass task.
struct ConfusionCounts {
    std::map<std::string, BinaryCounts> per_class;
    std::size_t n = 0;
};

ConfusionCounts confusion_counts(const std::vector<std::string>& predicted,
                                 const std::vector<std::string>& truth);

struct Scores {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct ScoreReport {
    Scores macro;
    Scores weighted_macro;
    Scores micro;
    // Plain fraction of correctly classified instances. The micro accuracy
    // formula includes the one-vs-rest TN counts and is reported separately.
    double correct_fraction = 0.0;
    // Classes whose precision or recall was 0/0 (defined as 0 for macro).
    std::size_t undefined_metric_classes = 0;
};

Scores scores_from_counts(const BinaryCounts& c);

ScoreReport score_report(const ConfusionCounts& counts);

// Aligned four-column text table, one row per averaging method.
std::string format_score_table(const ScoreReport& report);

std::string score_report_to_json(const ScoreReport& report);

}  // namespace proctrace

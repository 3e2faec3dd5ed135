#include "proctrace/metrics.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

namespace proctrace {

ConfusionCounts confusion_counts(const std::vector<std::string>& predicted,
                                 const std::vector<std::string>& truth) {
    if (predicted.size() != truth.size())
        throw ParamError("confusion_counts: " + std::to_string(predicted.size()) +
                         " predictions vs " + std::to_string(truth.size()) + " labels");
    ConfusionCounts counts;
    counts.n = truth.size();
    std::set<std::string> classes(truth.begin(), truth.end());
    classes.insert(predicted.begin(), predicted.end());
    for (const auto& c : classes) counts.per_class[c] = {};
    for (std::size_t i = 0; i < truth.size(); ++i) {
        for (const auto& c : classes) {
            auto& b = counts.per_class[c];
            const bool is_true = truth[i] == c;
            const bool is_pred = predicted[i] == c;
            if (is_true && is_pred) ++b.tp;
            else if (!is_true && is_pred) ++b.fp;
            else if (is_true && !is_pred) ++b.fn;
            else ++b.tn;
        }
    }
    return counts;
}

Scores scores_from_counts(const BinaryCounts& c) {
    Scores s;
    const double total = static_cast<double>(c.tp + c.fp + c.fn + c.tn);
    s.accuracy = total > 0 ? static_cast<double>(c.tp + c.tn) / total : 0.0;
    s.precision = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    s.recall = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    s.f1 = (s.precision + s.recall) > 0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

ScoreReport score_report(const ConfusionCounts& counts) {
    if (counts.n == 0) throw ParamError("score_report: empty counts");
    ScoreReport report;
    BinaryCounts global;
    std::int64_t correct = 0;
    const auto classes = static_cast<double>(counts.per_class.size());

    for (const auto& [label, c] : counts.per_class) {
        const Scores s = scores_from_counts(c);
        const double support = static_cast<double>(c.tp + c.fn);
        const double weight = support / static_cast<double>(counts.n);

        report.macro.accuracy += s.accuracy / classes;
        report.macro.precision += s.precision / classes;
        report.macro.recall += s.recall / classes;
        report.macro.f1 += s.f1 / classes;

        report.weighted_macro.accuracy += weight * s.accuracy;
        report.weighted_macro.precision += weight * s.precision;
        report.weighted_macro.recall += weight * s.recall;
        report.weighted_macro.f1 += weight * s.f1;

        if (c.tp + c.fp == 0 || c.tp + c.fn == 0) ++report.undefined_metric_classes;

        global.tp += c.tp;
        global.fp += c.fp;
        global.fn += c.fn;
        global.tn += c.tn;
        correct += c.tp;
    }
    report.micro = scores_from_counts(global);
    report.correct_fraction = static_cast<double>(correct) / static_cast<double>(counts.n);
    return report;
}

std::string format_score_table(const ScoreReport& report) {
    char buf[128];
    std::ostringstream out;
    out << "averaging        accuracy  precision  recall    F1\n";
    const auto row = [&](const char* name, const Scores& s) {
        std::snprintf(buf, sizeof(buf), "%-16s %-9.4f %-10.4f %-9.4f %-9.4f\n", name, s.accuracy,
                      s.precision, s.recall, s.f1);
        out << buf;
    };
    row("macro", report.macro);
    row("weighted macro", report.weighted_macro);
    row("micro", report.micro);
    std::snprintf(buf, sizeof(buf), "correct fraction: %.6f\n", report.correct_fraction);
    out << buf;
    return out.str();
}

namespace {

nlohmann::json scores_to_json(const Scores& s) {
    return {{"accuracy", s.accuracy},
            {"precision", s.precision},
            {"recall", s.recall},
            {"f1", s.f1}};
}

}  // namespace

std::string score_report_to_json(const ScoreReport& report) {
    nlohmann::json j;
    j["macro"] = scores_to_json(report.macro);
    j["weighted_macro"] = scores_to_json(report.weighted_macro);
    j["micro"] = scores_to_json(report.micro);
    j["correct_fraction"] = report.correct_fraction;
    j["undefined_metric_classes"] = report.undefined_metric_classes;
    return j.dump(2) + "\n";
}

}  // namespace proctrace

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "proctrace/alphabet.hpp"
#include "proctrace/anomaly.hpp"
#include "proctrace/dimred.hpp"
#include "proctrace/evaluation.hpp"
#include "proctrace/knn.hpp"

namespace proctrace {

inline constexpr int kModelFormatVersion = 1;
inline constexpr std::size_t kDefaultMinLen = 6;

struct Provenance {
    std::uint64_t seed = 0;
    std::string corpus_digest;
    std::string created;  // caller-supplied; empty keeps model files reproducible
};

// Everything needed to classify new traces: the alphabet, the projection
// basis and the projected training points (k-NN keeps the data itself).
struct TrainedModel {
    int format_version = kModelFormatVersion;
    AlphabetConfig config;
    ProjectionBasis basis;
    TrainingIndex index;
    Hyperparameters hyper;
    Provenance provenance;
};

std::uint64_t fnv1a64(const std::string& data);

std::string corpus_digest(const std::vector<EventString>& strings);

// Filter(min_len) -> featurize -> fit_projection -> index build. Throws
// DataError when fewer than two classes survive the length filter.
TrainedModel train_from_strings(const std::vector<EventString>& strings,
                                const AlphabetConfig& config, const Hyperparameters& hyper,
                                std::uint64_t seed, std::size_t min_len = kDefaultMinLen);

// Full ingest path: parse event logs, group into traces, transform, train.
TrainedModel train_model(const std::vector<std::string>& event_log_paths,
                         const AlphabetConfig& config, const Hyperparameters& hyper,
                         std::uint64_t seed, std::size_t min_len = kDefaultMinLen);

struct TraceOutcome {
    std::string trace_id;
    bool skipped = false;
    std::string skip_reason;
    Prediction prediction;
    AnomalyVerdict verdict;
    bool low_confidence = false;  // query projected to the zero point
};

std::vector<TraceOutcome> classify_strings(const TrainedModel& model,
                                           const std::vector<EventString>& strings,
                                           std::size_t min_len = kDefaultMinLen);

std::vector<TraceOutcome> classify_traces(const TrainedModel& model,
                                          const std::vector<std::string>& event_log_paths,
                                          std::size_t min_len = kDefaultMinLen);

// Model file: one JSON document with an integrity digest. restore verifies
// the digest (CorruptionError) and the format version (VersionError).
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);
void persist_model(const TrainedModel& model, const std::string& path);
TrainedModel restore_model(const std::string& path);

// Three-component projection for the scatter plots; rank below 3 is a
// degenerate input.
struct ProjectionDatasets {
    std::vector<std::array<double, 3>> coords;
    std::vector<std::string> labels;
};

ProjectionDatasets emit_projection(const std::vector<EventString>& strings,
                                   const AlphabetConfig& config, std::uint64_t seed,
                                   std::size_t min_len = kDefaultMinLen);

// Writes <prefix>_c1c2.csv, <prefix>_c2c3.csv and <prefix>_c1c3.csv; shared
// components are formatted identically so shared columns are byte-equal.
void write_projection_csv(const std::string& prefix, const ProjectionDatasets& data);

// Simple scatter rendering, one color per program.
std::string projection_svg(const ProjectionDatasets& data, int x_component, int y_component);

}  // namespace proctrace

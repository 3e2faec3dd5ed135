#pragma once

#include <string>

#include "proctrace/knn.hpp"

namespace proctrace {

// A trace is anomalous when the classifier-assigned program name differs
// from the natural one (both compared after lowercasing). Confidence is the
// raw nearest-neighbor distance, lower meaning a stronger assignment.
struct AnomalyVerdict {
    std::string trace_id;
    std::string natural_name;
    std::string assigned_name;
    bool is_anomaly = false;
    double confidence = 0.0;
};

AnomalyVerdict detect_mismatch(const std::string& trace_id, const std::string& natural_name,
                               const Prediction& prediction);

}  // namespace proctrace

#include "proctrace/anomaly.hpp"

#include "proctrace/trace_model.hpp"

namespace proctrace {

AnomalyVerdict detect_mismatch(const std::string& trace_id, const std::string& natural_name,
                               const Prediction& prediction) {
    AnomalyVerdict verdict;
    verdict.trace_id = trace_id;
    verdict.natural_name = natural_name;
    verdict.assigned_name = prediction.label;
    verdict.is_anomaly = lowercase(natural_name) != lowercase(prediction.label);
    verdict.confidence =
        prediction.neighbors.empty() ? 0.0 : prediction.neighbors.front().distance;
    return verdict;
}

}  // namespace proctrace

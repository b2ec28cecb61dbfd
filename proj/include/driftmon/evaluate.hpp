#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "driftmon/anomaly.hpp"
#include "driftmon/simulate.hpp"

namespace driftmon {

// Outcome of matching one motor's alarms against its fault windows.
// An alarm inside some half-open interval (u, v] is a true positive; the
// first alarm per window defines its detection time. Later alarms in an
// already-satisfied window stay classified as true but do not add to the
// counts, so tp + fn equals the number of windows.
struct MatchedOutcomes {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    std::vector<double> time_to_detection;  // a - u per detected window
    std::vector<double> time_to_failure;    // v - a per detected window
};

// Both lists must belong to one motor and be chronological. Throws DataError
// on overlapping fault windows.
MatchedOutcomes match_alarms(std::span<const AlarmEvent> alarms,
                             std::span<const FaultWindow> faults);

void merge_outcomes(MatchedOutcomes& into, const MatchedOutcomes& other);

struct MetricsReport {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    double precision = 1.0;  // 1 when no alarms were raised
    double recall = 1.0;     // 1 when no faults were present
    std::optional<double> median_time_to_detection;
    std::optional<double> median_time_to_failure;
};

MetricsReport compute_metrics(const MatchedOutcomes& outcomes);

struct SweepPoint {
    double threshold = 0.0;
    MetricsReport report;
};

// One full evaluation per threshold; the runner replays detection at the
// given threshold and returns the fleet's alarms.
std::vector<SweepPoint> threshold_sweep(
    std::span<const double> thresholds,
    const std::function<std::vector<AlarmEvent>(double)>& runner,
    std::span<const FaultWindow> faults);

double median(std::vector<double> values);

}  // namespace driftmon

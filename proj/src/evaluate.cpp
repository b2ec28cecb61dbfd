#include "driftmon/evaluate.hpp"

#include <algorithm>
#include <map>

#include "driftmon/errors.hpp"

namespace driftmon {

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 0) throw DataError("median of empty set");
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

MatchedOutcomes match_alarms(std::span<const AlarmEvent> alarms,
                             std::span<const FaultWindow> faults) {
    for (std::size_t k = 1; k < faults.size(); ++k) {
        if (faults[k].onset < faults[k - 1].failure)
            throw DataError("overlapping fault windows");
    }
    MatchedOutcomes out;
    std::vector<char> satisfied(faults.size(), 0);
    for (const auto& alarm : alarms) {
        bool matched = false;
        for (std::size_t k = 0; k < faults.size(); ++k) {
            if (alarm.time > faults[k].onset && alarm.time <= faults[k].failure) {
                matched = true;
                if (!satisfied[k]) {
                    satisfied[k] = 1;
                    ++out.tp;
                    out.time_to_detection.push_back(
                        static_cast<double>(alarm.time - faults[k].onset));
                    out.time_to_failure.push_back(
                        static_cast<double>(faults[k].failure - alarm.time));
                }
                break;
            }
        }
        if (!matched) ++out.fp;
    }
    out.fn = static_cast<int>(faults.size()) - out.tp;
    return out;
}

void merge_outcomes(MatchedOutcomes& into, const MatchedOutcomes& other) {
    into.tp += other.tp;
    into.fp += other.fp;
    into.fn += other.fn;
    into.time_to_detection.insert(into.time_to_detection.end(),
                                  other.time_to_detection.begin(),
                                  other.time_to_detection.end());
    into.time_to_failure.insert(into.time_to_failure.end(),
                                other.time_to_failure.begin(),
                                other.time_to_failure.end());
}

MetricsReport compute_metrics(const MatchedOutcomes& outcomes) {
    MetricsReport report;
    report.tp = outcomes.tp;
    report.fp = outcomes.fp;
    report.fn = outcomes.fn;
    report.precision = outcomes.tp + outcomes.fp == 0
                           ? 1.0
                           : static_cast<double>(outcomes.tp) /
                                 (outcomes.tp + outcomes.fp);
    report.recall = outcomes.tp + outcomes.fn == 0
                        ? 1.0
                        : static_cast<double>(outcomes.tp) /
                              (outcomes.tp + outcomes.fn);
    if (!outcomes.time_to_detection.empty()) {
        report.median_time_to_detection = median(outcomes.time_to_detection);
        report.median_time_to_failure = median(outcomes.time_to_failure);
    }
    return report;
}

std::vector<SweepPoint> threshold_sweep(
    std::span<const double> thresholds,
    const std::function<std::vector<AlarmEvent>(double)>& runner,
    std::span<const FaultWindow> faults) {
    // Group ground truth per motor once.
    std::map<std::string, std::vector<FaultWindow>> faults_by_motor;
    for (const auto& fault : faults) faults_by_motor[fault.motor_id].push_back(fault);

    std::vector<SweepPoint> points;
    points.reserve(thresholds.size());
    for (const double threshold : thresholds) {
        const auto alarms = runner(threshold);
        std::map<std::string, std::vector<AlarmEvent>> alarms_by_motor;
        for (const auto& alarm : alarms) alarms_by_motor[alarm.motor_id].push_back(alarm);

        MatchedOutcomes total;
        for (const auto& [motor, windows] : faults_by_motor) {
            const auto it = alarms_by_motor.find(motor);
            static const std::vector<AlarmEvent> kNone;
            merge_outcomes(total, match_alarms(
                                      it == alarms_by_motor.end() ? kNone : it->second,
                                      windows));
        }
        // Alarms on motors with no faults at all are false positives too.
        for (const auto& [motor, list] : alarms_by_motor) {
            if (faults_by_motor.find(motor) == faults_by_motor.end())
                total.fp += static_cast<int>(list.size());
        }
        points.push_back({threshold, compute_metrics(total)});
    }
    return points;
}

}  // namespace driftmon

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "driftmon/anomaly.hpp"
#include "driftmon/drift_adapt.hpp"
#include "driftmon/predictor.hpp"

namespace driftmon {

enum class AdaptorKind { cusum, ewma, none };

AdaptorKind adaptor_kind_from_string(const std::string& name);
std::string to_string(AdaptorKind kind);

struct MonitorConfig {
    AdaptorKind adaptor = AdaptorKind::none;
    CusumAdaptorParams cusum;
    EwmaAdaptorParams ewma;
    AnomalyParams anomaly;
    const Predictor* predictor = nullptr;
    double feature_half_life = kFeatureHalfLife;
    // Features warm up from the series start; detectors engage on
    // [eval_start, eval_end) (eval_end clamps to the series size).
    std::size_t eval_start = 0;
    std::size_t eval_end = static_cast<std::size_t>(-1);
    bool collect_scores = false;   // per-step G and drift score, for tuning
    bool collect_adapted = false;  // adapted residual stream, for replays
    bool trace = false;
};

struct TraceRow {
    std::int64_t timestamp = 0;
    int sensor = 0;
    double e = 0.0;
    double eb = 0.0;    // adapted residual
    double bhat = 0.0;
    double score = 0.0;
    bool alarm = false;
};

struct MonitorOutput {
    std::vector<AlarmEvent> alarms;
    std::vector<DriftEvent> drift_events;
    std::vector<double> anomaly_scores;  // aligned with frames[eval_start..]
    std::vector<double> drift_scores;    // NaN while the score is undefined
    std::vector<double> adapted_residuals;     // frame-major, p per frame
    std::vector<std::int64_t> eval_timestamps;
    std::vector<TraceRow> trace;
    std::size_t frames_processed = 0;
    std::size_t skipped_components = 0;
    std::size_t adaptor_state_bytes = 0;
    std::size_t detector_state_bytes = 0;
};

std::unique_ptr<DriftAdaptor> make_adaptor(const MonitorConfig& config,
                                           std::size_t sensor_count);

// Single chronological pass of the monitor over one motor:
// features -> prediction -> residual -> AdaptDrift -> DetectAnomaly.
MonitorOutput run_monitor(const MotorSeries& series, const MonitorConfig& config);

// Baseline: alarm whenever any winding temperature reaches temp_limit, with
// the same restart dormancy for episode counting.
MonitorOutput run_threshold_monitor(const MotorSeries& series, double temp_limit,
                                    std::int64_t restart_delay = 1440,
                                    std::size_t eval_start = 0);

}  // namespace driftmon

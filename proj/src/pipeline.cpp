#include "driftmon/pipeline.hpp"

#include <cmath>
#include <limits>

#include "driftmon/errors.hpp"

namespace driftmon {

AdaptorKind adaptor_kind_from_string(const std::string& name) {
    if (name == "cusum") return AdaptorKind::cusum;
    if (name == "ewma") return AdaptorKind::ewma;
    if (name == "none") return AdaptorKind::none;
    throw ConfigError("unknown adaptor '" + name + "'");
}

std::string to_string(AdaptorKind kind) {
    switch (kind) {
        case AdaptorKind::cusum: return "cusum";
        case AdaptorKind::ewma: return "ewma";
        case AdaptorKind::none: return "none";
    }
    return "none";
}

std::unique_ptr<DriftAdaptor> make_adaptor(const MonitorConfig& config,
                                           std::size_t sensor_count) {
    switch (config.adaptor) {
        case AdaptorKind::cusum:
            return std::make_unique<CusumAdaptor>(sensor_count, config.cusum);
        case AdaptorKind::ewma:
            return std::make_unique<EwmaAdaptor>(sensor_count, config.ewma);
        case AdaptorKind::none:
            return std::make_unique<NoAdaptor>(sensor_count);
    }
    throw ConfigError("invalid adaptor kind");
}

MonitorOutput run_monitor(const MotorSeries& series, const MonitorConfig& config) {
    if (config.predictor == nullptr)
        throw ConfigError("monitor requires a predictor");
    if (!config.predictor->fitted())
        throw ConfigError("monitor predictor is not fitted");
    if (config.eval_start >= std::min(config.eval_end, series.size()))
        throw ConfigError("empty evaluation range for the monitor");

    const std::size_t eval_end = std::min(config.eval_end, series.size());
    const std::size_t sensors = series.sensor_count();
    FeatureStreamBuilder features(sensors, config.feature_half_life);
    auto adaptor = make_adaptor(config, sensors);
    AnomalyDetector detector(sensors, config.anomaly);

    MonitorOutput out;
    const std::size_t eval_frames = eval_end - config.eval_start;
    if (config.collect_scores) {
        out.anomaly_scores.reserve(eval_frames);
        out.drift_scores.reserve(eval_frames);
    }

    for (std::size_t i = 0; i < eval_end; ++i) {
        const SensorFrame& frame = series.frames[i];
        const auto rows = features.push(frame);
        if (i < config.eval_start) continue;

        const ResidualVector residual =
            residual_step(*config.predictor, frame, rows);
        AdaptResult adapted = adaptor->step(residual);
        const AnomalyStepResult result = detector.step(adapted.adapted);

        if (result.alarm) {
            out.alarms.push_back({series.motor_id, frame.timestamp, result.score,
                                  detector.argmax_sensor()});
        }
        if (config.collect_scores) {
            out.anomaly_scores.push_back(result.score);
            out.drift_scores.push_back(adaptor->last_score().value_or(
                std::numeric_limits<double>::quiet_NaN()));
        }
        if (config.collect_adapted) {
            out.adapted_residuals.insert(out.adapted_residuals.end(),
                                         adapted.adapted.e.begin(),
                                         adapted.adapted.e.end());
            out.eval_timestamps.push_back(frame.timestamp);
        }
        if (config.trace) {
            const auto bhat = adaptor->adjustment();
            for (std::size_t j = 0; j < sensors; ++j) {
                out.trace.push_back({frame.timestamp, static_cast<int>(j) + 1,
                                     residual.e[j], adapted.adapted.e[j], bhat[j],
                                     result.score, result.alarm});
            }
        }
        ++out.frames_processed;
    }

    const auto events = adaptor->events();
    out.drift_events.assign(events.begin(), events.end());
    out.skipped_components = detector.skipped_components();
    out.adaptor_state_bytes = adaptor->state_bytes();
    out.detector_state_bytes = detector.state_bytes();
    return out;
}

MonitorOutput run_threshold_monitor(const MotorSeries& series, double temp_limit,
                                    std::int64_t restart_delay,
                                    std::size_t eval_start) {
    if (!std::isfinite(temp_limit))
        throw ConfigError("temperature limit must be finite");
    MonitorOutput out;
    std::int64_t dormant = 0;
    for (std::size_t i = eval_start; i < series.size(); ++i) {
        const SensorFrame& frame = series.frames[i];
        ++out.frames_processed;
        if (dormant > 0) {
            --dormant;
            continue;
        }
        double best = -std::numeric_limits<double>::infinity();
        int best_sensor = 0;
        for (std::size_t j = 0; j < frame.y.size(); ++j) {
            if (std::isfinite(frame.y[j]) && frame.y[j] > best) {
                best = frame.y[j];
                best_sensor = static_cast<int>(j) + 1;
            }
        }
        if (best_sensor != 0 && best >= temp_limit) {
            out.alarms.push_back(
                {series.motor_id, frame.timestamp, best, best_sensor});
            dormant = restart_delay;
        }
    }
    return out;
}

}  // namespace driftmon

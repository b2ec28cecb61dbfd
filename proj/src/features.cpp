#include "driftmon/features.hpp"

#include <cmath>

#include "driftmon/errors.hpp"

namespace driftmon {

const std::array<const char*, FeatureVector::kNumericCount>&
FeatureVector::numeric_names() {
    static const std::array<const char*, kNumericCount> names = {
        "power",     "power_ewma",  "speed",
        "speed_ewma", "torque",     "torque_ewma",
        "air_inlet", "water_cooling", "time_since_switch",
        "prev_state_duration"};
    return names;
}

Ewma::Ewma(double half_life) : alpha_(std::pow(0.5, 1.0 / half_life)) {
    if (!(half_life >= 1.0)) throw ConfigError("ewma half-life must be >= 1");
}

Ewma::Ewma(double half_life, double initial) : Ewma(half_life) {
    current_ = initial;
    initialized_ = true;
}

bool Ewma::update(double x) {
    if (!std::isfinite(x)) {
        ++rejected_;
        return false;
    }
    if (!initialized_) {
        current_ = x;
        initialized_ = true;
        return true;
    }
    current_ = (1.0 - alpha_) * x + alpha_ * current_;
    return true;
}

std::vector<SwitchFeatures> derive_switch_features(
    std::span<const SensorFrame> frames, double eps_on) {
    std::vector<SwitchFeatures> out;
    out.reserve(frames.size());
    bool have_state = false;
    bool state_on = false;
    double run = 0.0;
    double prev = 0.0;
    for (const auto& frame : frames) {
        const bool on = std::abs(frame.speed) > eps_on;
        if (!have_state) {
            have_state = true;
            state_on = on;
            run = 0.0;
        } else if (on != state_on) {
            prev = run + 1.0;  // completed run length in samples
            run = 0.0;
            state_on = on;
        } else {
            run += 1.0;
        }
        out.push_back({run, prev});
    }
    return out;
}

FeatureStreamBuilder::FeatureStreamBuilder(std::size_t sensor_count,
                                           double half_life, double eps_on)
    : sensors_(sensor_count),
      eps_on_(eps_on),
      power_ewma_(half_life),
      speed_ewma_(half_life),
      torque_ewma_(half_life) {}

std::vector<FeatureVector> FeatureStreamBuilder::push(const SensorFrame& frame) {
    power_ewma_.update(frame.power);
    speed_ewma_.update(frame.speed);
    torque_ewma_.update(frame.torque);

    const bool on = std::abs(frame.speed) > eps_on_;
    if (!have_state_) {
        have_state_ = true;
        state_on_ = on;
        run_length_ = 0.0;
    } else if (on != state_on_) {
        prev_duration_ = run_length_ + 1.0;
        run_length_ = 0.0;
        state_on_ = on;
    } else {
        run_length_ += 1.0;
    }

    FeatureVector base;
    base.power = frame.power;
    base.power_ewma = power_ewma_.value();
    base.speed = frame.speed;
    base.speed_ewma = speed_ewma_.value();
    base.torque = frame.torque;
    base.torque_ewma = torque_ewma_.value();
    base.air_inlet = frame.air_inlet;
    base.water_cooling = frame.water_cooling;
    base.time_since_switch = run_length_;
    base.prev_state_duration = prev_duration_;

    std::vector<FeatureVector> rows(sensors_, base);
    for (std::size_t j = 0; j < sensors_; ++j)
        rows[j].sensor_id = static_cast<int>(j) + 1;
    return rows;
}

std::size_t FeatureStreamBuilder::rejected_samples() const {
    return power_ewma_.rejected() + speed_ewma_.rejected() +
           torque_ewma_.rejected();
}

std::vector<FeatureVector> build_feature_stream(const MotorSeries& series,
                                                double half_life) {
    FeatureStreamBuilder builder(series.sensor_count(), half_life);
    std::vector<FeatureVector> out;
    out.reserve(series.size() * series.sensor_count());
    for (const auto& frame : series.frames) {
        auto rows = builder.push(frame);
        out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
}

}  // namespace driftmon

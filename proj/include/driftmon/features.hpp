#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "driftmon/data_model.hpp"

namespace driftmon {

// Default half-life (samples) for smoothed power/speed/torque.
inline constexpr double kFeatureHalfLife = 30.0;

// Speed magnitude above which the motor counts as switched on.
inline constexpr double kOnThresholdRpm = 1.0;

// Model input row for one (frame, sensor) pair.
struct FeatureVector {
    double power = 0.0;
    double power_ewma = 0.0;
    double speed = 0.0;
    double speed_ewma = 0.0;
    double torque = 0.0;
    double torque_ewma = 0.0;
    double air_inlet = 0.0;
    double water_cooling = 0.0;
    double time_since_switch = 0.0;
    double prev_state_duration = 0.0;
    int sensor_id = 1;  // 1-based

    static constexpr std::size_t kNumericCount = 10;
    std::array<double, kNumericCount> numeric() const {
        return {power,     power_ewma, speed,           speed_ewma,
                torque,    torque_ewma, air_inlet,      water_cooling,
                time_since_switch, prev_state_duration};
    }
    static const std::array<const char*, kNumericCount>& numeric_names();
};

// Exponentially weighted moving average with half-life tau (samples):
// current <- (1 - alpha) x + alpha current, alpha = 0.5^(1/tau).
// Initialized at the first observed value unless an explicit start is given.
class Ewma {
  public:
    explicit Ewma(double half_life);
    Ewma(double half_life, double initial);

    // Returns false (state unchanged, sample counted as rejected) for a
    // non-finite input.
    bool update(double x);

    double value() const { return current_; }
    bool initialized() const { return initialized_; }
    double alpha() const { return alpha_; }
    std::size_t rejected() const { return rejected_; }

  private:
    double alpha_;
    double current_ = 0.0;
    bool initialized_ = false;
    std::size_t rejected_ = 0;
};

struct SwitchFeatures {
    double time_since_switch = 0.0;
    double prev_state_duration = 0.0;
};

// Derives on/off features from the speed signal. The state is
// |speed| > eps_on; time_since_switch restarts at 0 on every state change
// and the previous completed run's length becomes prev_state_duration.
std::vector<SwitchFeatures> derive_switch_features(
    std::span<const SensorFrame> frames, double eps_on = kOnThresholdRpm);

// Streaming feature builder; push() returns the p rows for one frame.
class FeatureStreamBuilder {
  public:
    explicit FeatureStreamBuilder(std::size_t sensor_count,
                                  double half_life = kFeatureHalfLife,
                                  double eps_on = kOnThresholdRpm);

    std::vector<FeatureVector> push(const SensorFrame& frame);
    std::size_t rejected_samples() const;

  private:
    std::size_t sensors_;
    double eps_on_;
    Ewma power_ewma_;
    Ewma speed_ewma_;
    Ewma torque_ewma_;
    bool have_state_ = false;
    bool state_on_ = false;
    double run_length_ = 0.0;
    double prev_duration_ = 0.0;
};

// Whole-series convenience wrapper; output has p rows per frame, frame-major.
std::vector<FeatureVector> build_feature_stream(const MotorSeries& series,
                                                double half_life = kFeatureHalfLife);

}  // namespace driftmon

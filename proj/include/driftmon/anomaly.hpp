#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "driftmon/predictor.hpp"

namespace driftmon {

struct AlarmEvent {
    std::string motor_id;
    std::int64_t time = 0;
    double score = 0.0;
    int sensor = 0;  // 1-based argmax sensor
};

struct AnomalyParams {
    double rho = 30.0;    // smallest relevant change in mean, degC
    double gamma = std::numeric_limits<double>::infinity();
    std::int64_t restart_delay = 1440;  // samples skipped after an alarm
};

struct AnomalyStepResult {
    double score = 0.0;
    bool alarm = false;
};

// One-sided adaptive recursive CUSUM per sensor, max-aggregated:
//   z_j <- max(z_j + mu_j * e_j - mu_j^2 / 2, 0)
// with mu_j the running mean of the residuals since z_j was last zero,
// bounded below at rho. An alarm resets all state and freezes the detector
// for restart_delay samples, so consecutive alarms are more than
// restart_delay apart.
class AnomalyDetector {
  public:
    AnomalyDetector(std::size_t sensor_count, AnomalyParams params);

    AnomalyStepResult step(const ResidualVector& adapted);

    int argmax_sensor() const { return argmax_sensor_; }
    bool dormant() const { return dormant_remaining_ > 0; }
    std::size_t skipped_components() const { return skipped_; }
    std::size_t state_bytes() const;

    double z(std::size_t sensor) const { return z_[sensor]; }
    double mean_estimate(std::size_t sensor) const { return mu_[sensor]; }

  private:
    std::size_t sensors_;
    AnomalyParams params_;
    std::vector<double> z_;
    std::vector<double> s_;
    std::vector<std::int64_t> n_;
    std::vector<double> prev_e_;
    std::vector<double> mu_;
    std::int64_t dormant_remaining_ = 0;
    int argmax_sensor_ = 1;
    std::size_t skipped_ = 0;
};

}  // namespace driftmon

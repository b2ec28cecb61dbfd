#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "driftmon/data_model.hpp"
#include "driftmon/rng.hpp"

namespace driftmon {

inline constexpr double kDefaultFaultSlope = 0.62;  // degC per minute
inline constexpr int kDefaultDelayMax = 17;         // minutes
inline constexpr double kFailureTemp = 145.0;       // degC
inline constexpr double kAlarmTemp = 130.0;         // degC
inline constexpr std::int64_t kMinFaultGap = 2880;  // 48 h between faults

// Ground truth for one injected overheating event. The latent hotspot ramps
// from the reading at onset u with the given slope; failure is the first
// sample where the latent ramp reaches kFailureTemp.
struct FaultWindow {
    std::string motor_id;
    std::int64_t onset = 0;    // u, timestamp
    std::int64_t failure = 0;  // v, timestamp
    int sensor = 1;            // 1-based affected sensor
    double slope = kDefaultFaultSlope;
    int delay = 0;             // minutes between latent ramp and the reading
};

enum class DriftMode { negative, positive, none };

DriftMode drift_mode_from_string(const std::string& name);
std::string to_string(DriftMode mode);

struct DriftSpec {
    std::int64_t drift_time = 0;
    std::vector<double> delta;  // per-sensor magnitude; empty = estimate
    DriftMode mode = DriftMode::negative;
};

// Replaces sensor readings with the delayed latent ramp on
// [u + d, v + d]; the reading caps at kFailureTemp and the original signal
// resumes afterwards so that later faults see a non-faulty stream.
// Throws SamplingError when the ramp would extend past the series end.
FaultWindow inject_fault(MotorSeries& series, std::size_t onset_index, int sensor,
                         double slope = kDefaultFaultSlope, int delay = 0,
                         double failure_temp = kFailureTemp);

// Uniform onset draws over [range.begin, range.end), resampled until all
// pairwise onset gaps are at least min_gap + duration_bound. Returns sorted
// frame indices. Throws SamplingError when placement keeps failing.
std::vector<std::size_t> sample_fault_times(IndexRange range, int n_faults,
                                            Rng& rng,
                                            std::int64_t min_gap = kMinFaultGap,
                                            std::int64_t duration_bound = 0);

// Mean temperature change across the drift, per sensor, from symmetric
// windows around drift_time with a guard band excluded.
std::vector<double> estimate_drift_delta(const MotorSeries& series,
                                         std::int64_t drift_time,
                                         std::int64_t window_samples,
                                         std::int64_t guard_samples);

// Scenario transform for a series with a known drift:
//   negative: keep the drift as-is,
//   positive: flip its sign (subtract 2 * delta after drift_time),
//   none:     remove it (subtract delta after drift_time).
// When spec.delta is empty the delta is estimated from the series.
MotorSeries apply_drift_scenario(const MotorSeries& series, const DriftSpec& spec,
                                 std::int64_t window_samples = 30 * 1440,
                                 std::int64_t guard_samples = 1440);

// Adds delta to all winding temperatures from from_time onward. Used to
// construct synthetic drift scenarios with known ground truth.
void add_step_offset(MotorSeries& series, std::int64_t from_time,
                     std::span<const double> delta);

// Synthetic fleet generator: regime-switching load profile, winding
// temperatures as a stable response to the smoothed load plus per-sensor
// offsets, Gaussian noise and occasional single-sensor excursions.
struct SynthConfig {
    int motors = 9;
    int days = 60;
    std::uint64_t seed = 1;
    int sensors = static_cast<int>(kSensorCount);

    double base_power_min = 5300.0, base_power_max = 5600.0;  // kW
    double base_speed_min = 145.0, base_speed_max = 165.0;    // rpm
    double power_coef_min = 0.0094, power_coef_max = 0.0097;  // degC/kW
    double speed_coef_min = 0.060, speed_coef_max = 0.070;    // degC/rpm
    double torque_coef_min = 0.015, torque_coef_max = 0.035;  // degC/kNm
    double air_coef = 0.40, water_coef = 0.30;
    double sensor_offset_base = 16.0, sensor_offset_step = 0.5,
           sensor_offset_jitter = 0.5;

    double on_dwell_mean = 5760.0, on_dwell_min = 720.0;   // minutes
    double off_dwell_mean = 360.0, off_dwell_min = 60.0;
    bool always_on = false;
    double load_dwell_mean = 720.0, load_dwell_min = 240.0;
    std::vector<double> load_levels = {0.30, 0.52, 1.0};
    std::vector<double> load_weights = {0.40, 0.35, 0.25};
    double power_theta = 0.02, power_sigma = 8.0;

    double air_mean = 25.0, air_amp = 4.0, air_walk_sigma = 0.01;
    double water_mean = 33.0, water_amp = 2.5;

    double noise_sigma = 1.0;
    double excursion_rate_per_day = 0.10;  // per sensor
    double excursion_amp_min = 14.0, excursion_amp_max = 19.5;
    int excursion_dur_min = 30, excursion_dur_max = 110;

    // Optional step drift written into the data and annotated on the series.
    std::optional<std::int64_t> drift_time;
    std::vector<double> drift_delta;
};

std::vector<MotorSeries> generate_synthetic_fleet(const SynthConfig& config);

// Regenerates a single motor of the fleet (deterministic per index), so
// large experiments can stream one motor at a time.
MotorSeries generate_synthetic_motor(const SynthConfig& config, int motor_index);

}  // namespace driftmon

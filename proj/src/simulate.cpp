#include "driftmon/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "driftmon/errors.hpp"
#include "driftmon/features.hpp"

namespace driftmon {

DriftMode drift_mode_from_string(const std::string& name) {
    if (name == "negative") return DriftMode::negative;
    if (name == "positive") return DriftMode::positive;
    if (name == "none") return DriftMode::none;
    throw ConfigError("unknown drift mode '" + name + "'");
}

std::string to_string(DriftMode mode) {
    switch (mode) {
        case DriftMode::negative: return "negative";
        case DriftMode::positive: return "positive";
        case DriftMode::none: return "none";
    }
    return "none";
}

FaultWindow inject_fault(MotorSeries& series, std::size_t onset_index, int sensor,
                         double slope, int delay, double failure_temp) {
    if (onset_index >= series.size())
        throw SamplingError("fault onset outside series");
    if (sensor < 1 || static_cast<std::size_t>(sensor) > series.sensor_count())
        throw SamplingError("fault sensor out of range");
    if (!(slope > 0.0)) throw SamplingError("fault slope must be > 0");
    if (delay < 0) throw SamplingError("fault delay must be >= 0");

    const std::size_t j = static_cast<std::size_t>(sensor) - 1;
    const double y_onset = series.frames[onset_index].y[j];
    if (!std::isfinite(y_onset))
        throw SamplingError("fault onset reading is missing");

    const std::int64_t steps =
        y_onset >= failure_temp
            ? 0
            : static_cast<std::int64_t>(std::ceil((failure_temp - y_onset) / slope));
    const std::size_t last =
        onset_index + static_cast<std::size_t>(steps + delay);
    if (last >= series.size())
        throw SamplingError("fault ramp extends past series end");

    for (std::size_t i = onset_index + static_cast<std::size_t>(delay); i <= last;
         ++i) {
        const double latent =
            y_onset + slope * static_cast<double>(i - delay - onset_index);
        series.frames[i].y[j] = std::min(latent, failure_temp);
    }

    FaultWindow window;
    window.motor_id = series.motor_id;
    window.onset = series.frames[onset_index].timestamp;
    window.failure = window.onset + steps;
    window.sensor = sensor;
    window.slope = slope;
    window.delay = delay;
    return window;
}

std::vector<std::size_t> sample_fault_times(IndexRange range, int n_faults,
                                            Rng& rng, std::int64_t min_gap,
                                            std::int64_t duration_bound) {
    if (n_faults < 0) throw SamplingError("negative fault count");
    if (n_faults == 0) return {};
    const auto lo = static_cast<std::int64_t>(range.begin);
    const auto hi = static_cast<std::int64_t>(range.end) - 1 - duration_bound;
    const std::int64_t spacing = min_gap + duration_bound;
    if (hi < lo || (hi - lo) < (n_faults - 1) * spacing)
        throw SamplingError("range too short for requested fault density");

    constexpr int kMaxTries = 20000;
    std::vector<std::int64_t> placed;
    placed.reserve(static_cast<std::size_t>(n_faults));
    for (int k = 0; k < n_faults; ++k) {
        bool ok = false;
        for (int attempt = 0; attempt < kMaxTries; ++attempt) {
            const std::int64_t u = rng.uniform_int(lo, hi);
            bool clear = true;
            for (const std::int64_t other : placed) {
                if (std::llabs(u - other) < spacing) {
                    clear = false;
                    break;
                }
            }
            if (clear) {
                placed.push_back(u);
                ok = true;
                break;
            }
        }
        if (!ok)
            throw SamplingError("fault onset sampling infeasible after retries");
    }
    std::sort(placed.begin(), placed.end());
    std::vector<std::size_t> out;
    out.reserve(placed.size());
    for (const std::int64_t u : placed) out.push_back(static_cast<std::size_t>(u));
    return out;
}

std::vector<double> estimate_drift_delta(const MotorSeries& series,
                                         std::int64_t drift_time,
                                         std::int64_t window_samples,
                                         std::int64_t guard_samples) {
    const std::size_t n = series.size();
    std::size_t drift_idx = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (series.frames[i].timestamp >= drift_time) {
            drift_idx = i;
            break;
        }
    }
    if (drift_idx == n) throw DataError("drift time past series end");
    const std::int64_t pre_lo =
        static_cast<std::int64_t>(drift_idx) - guard_samples - window_samples;
    const std::int64_t post_hi =
        static_cast<std::int64_t>(drift_idx) + guard_samples + window_samples;
    if (pre_lo < 0 || post_hi > static_cast<std::int64_t>(n))
        throw DataError("drift estimation window extends outside series");

    const std::size_t p = series.sensor_count();
    std::vector<double> delta(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        double pre_sum = 0.0, post_sum = 0.0;
        std::int64_t pre_n = 0, post_n = 0;
        for (std::int64_t i = pre_lo; i < pre_lo + window_samples; ++i) {
            const double v = series.frames[static_cast<std::size_t>(i)].y[j];
            if (std::isfinite(v)) {
                pre_sum += v;
                ++pre_n;
            }
        }
        for (std::int64_t i = post_hi - window_samples; i < post_hi; ++i) {
            const double v = series.frames[static_cast<std::size_t>(i)].y[j];
            if (std::isfinite(v)) {
                post_sum += v;
                ++post_n;
            }
        }
        if (pre_n == 0 || post_n == 0)
            throw DataError("drift estimation windows have no data");
        delta[j] = post_sum / post_n - pre_sum / pre_n;
    }
    return delta;
}

void add_step_offset(MotorSeries& series, std::int64_t from_time,
                     std::span<const double> delta) {
    for (auto& frame : series.frames) {
        if (frame.timestamp < from_time) continue;
        for (std::size_t j = 0; j < frame.y.size() && j < delta.size(); ++j)
            frame.y[j] += delta[j];
    }
}

MotorSeries apply_drift_scenario(const MotorSeries& series, const DriftSpec& spec,
                                 std::int64_t window_samples,
                                 std::int64_t guard_samples) {
    std::vector<double> delta =
        spec.delta.empty() ? estimate_drift_delta(series, spec.drift_time,
                                                  window_samples, guard_samples)
                           : spec.delta;
    MotorSeries out = series;
    if (spec.mode == DriftMode::negative) return out;

    const double factor = spec.mode == DriftMode::positive ? -2.0 : -1.0;
    std::vector<double> shift(delta.size());
    for (std::size_t j = 0; j < delta.size(); ++j) shift[j] = factor * delta[j];
    add_step_offset(out, spec.drift_time, shift);
    return out;
}

namespace {

struct Regime {
    std::vector<char> on;
    std::vector<double> load;
};

Regime build_regimes(const SynthConfig& cfg, std::size_t n, Rng& rng) {
    Regime regime;
    regime.on.assign(n, 1);
    regime.load.assign(n, 0.0);
    std::size_t t = 0;
    bool on = true;
    while (t < n) {
        std::size_t dwell;
        if (cfg.always_on) {
            dwell = n;
            on = true;
        } else if (on) {
            dwell = static_cast<std::size_t>(rng.exponential(cfg.on_dwell_mean) +
                                             cfg.on_dwell_min);
        } else {
            dwell = static_cast<std::size_t>(rng.exponential(cfg.off_dwell_mean) +
                                             cfg.off_dwell_min);
        }
        const std::size_t end = std::min(n, t + dwell);
        std::size_t tt = t;
        while (tt < end) {
            const auto sub = static_cast<std::size_t>(
                rng.exponential(cfg.load_dwell_mean) + cfg.load_dwell_min);
            const std::size_t sub_end = std::min(end, tt + sub);
            double frac = 0.0;
            if (on) {
                const int pick = rng.weighted_choice(cfg.load_weights.data(),
                                                     static_cast<int>(
                                                         cfg.load_weights.size()));
                frac = cfg.load_levels[static_cast<std::size_t>(pick)];
            }
            for (std::size_t i = tt; i < sub_end; ++i) {
                regime.on[i] = on ? 1 : 0;
                regime.load[i] = on ? frac : 0.0;
            }
            tt = sub_end;
        }
        on = !on;
        t = end;
    }
    return regime;
}

MotorSeries generate_motor(const SynthConfig& cfg, int index, Rng rng) {
    const std::size_t n = static_cast<std::size_t>(cfg.days) * 1440;
    const auto p = static_cast<std::size_t>(cfg.sensors);

    const double base_power = rng.uniform(cfg.base_power_min, cfg.base_power_max);
    const double base_speed = rng.uniform(cfg.base_speed_min, cfg.base_speed_max);
    const double k_power = rng.uniform(cfg.power_coef_min, cfg.power_coef_max);
    const double k_speed = rng.uniform(cfg.speed_coef_min, cfg.speed_coef_max);
    const double k_torque = rng.uniform(cfg.torque_coef_min, cfg.torque_coef_max);
    std::vector<double> offsets(p);
    for (std::size_t j = 0; j < p; ++j) {
        offsets[j] = cfg.sensor_offset_base +
                     cfg.sensor_offset_step * static_cast<double>(j) +
                     rng.uniform(-cfg.sensor_offset_jitter,
                                 cfg.sensor_offset_jitter);
    }
    const double air_phase = rng.uniform(0.0, 6.283185307179586);
    const double water_phase = rng.uniform(0.0, 6.283185307179586);

    const Regime regime = build_regimes(cfg, n, rng);

    MotorSeries series;
    char name[16];
    std::snprintf(name, sizeof(name), "M%02d", index + 1);
    series.motor_id = name;
    series.frames.resize(n);

    // Load profile: mean-reverting power around the regime target.
    double power = base_power * regime.load[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double target = base_power * regime.load[i];
        power += cfg.power_theta * (target - power) +
                 cfg.power_sigma * rng.normal();
        if (!regime.on[i]) power = 0.0;
        series.frames[i].power = std::max(power, 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double noise = 0.5 * rng.normal();
        series.frames[i].speed =
            regime.on[i] ? base_speed * (0.6 + 0.4 * regime.load[i]) + noise : 0.0;
    }
    double air_walk = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        air_walk += cfg.air_walk_sigma * rng.normal();
        const double phase = 6.283185307179586 * static_cast<double>(i) / 1440.0;
        series.frames[i].timestamp = static_cast<std::int64_t>(i);
        series.frames[i].air_inlet =
            cfg.air_mean + cfg.air_amp * std::sin(phase + air_phase) + air_walk;
        series.frames[i].water_cooling =
            cfg.water_mean + cfg.water_amp * std::sin(phase + water_phase);
        const double speed = series.frames[i].speed;
        series.frames[i].torque =
            speed > 1.0 ? 9.549 * series.frames[i].power / speed : 0.0;
    }

    // Winding temperatures respond to the smoothed load, so a linear model
    // on the monitor's own feature set can represent them exactly.
    Ewma power_sm(kFeatureHalfLife), speed_sm(kFeatureHalfLife),
        torque_sm(kFeatureHalfLife);
    std::vector<double> clean(n);
    for (std::size_t i = 0; i < n; ++i) {
        power_sm.update(series.frames[i].power);
        speed_sm.update(series.frames[i].speed);
        torque_sm.update(series.frames[i].torque);
        clean[i] = k_power * power_sm.value() + k_speed * speed_sm.value() +
                   k_torque * torque_sm.value() +
                   cfg.air_coef * series.frames[i].air_inlet +
                   cfg.water_coef * series.frames[i].water_cooling;
    }
    for (std::size_t i = 0; i < n; ++i) series.frames[i].y.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            series.frames[i].y[j] =
                offsets[j] + clean[i] + cfg.noise_sigma * rng.normal();
        }
    }

    // Single-sensor excursions: unmodeled disturbances the detector must
    // tolerate at the tuned false-alarm level.
    const double expected =
        cfg.excursion_rate_per_day * static_cast<double>(cfg.days);
    for (std::size_t j = 0; j < p; ++j) {
        const int count = rng.poisson(expected);
        for (int k = 0; k < count; ++k) {
            const auto start = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
            const auto dur = static_cast<std::size_t>(rng.uniform_int(
                cfg.excursion_dur_min, cfg.excursion_dur_max));
            const double amp =
                rng.uniform(cfg.excursion_amp_min, cfg.excursion_amp_max);
            for (std::size_t i = start; i < std::min(n, start + dur); ++i)
                series.frames[i].y[j] += amp;
        }
    }

    if (cfg.drift_time.has_value() && !cfg.drift_delta.empty()) {
        add_step_offset(series, *cfg.drift_time, cfg.drift_delta);
        series.drift_times.push_back(*cfg.drift_time);
    }
    return series;
}

}  // namespace

std::vector<MotorSeries> generate_synthetic_fleet(const SynthConfig& config) {
    std::vector<MotorSeries> fleet;
    fleet.reserve(static_cast<std::size_t>(config.motors));
    for (int m = 0; m < config.motors; ++m)
        fleet.push_back(generate_synthetic_motor(config, m));
    return fleet;
}

MotorSeries generate_synthetic_motor(const SynthConfig& config, int motor_index) {
    if (config.motors < 1 || config.days < 1 || config.sensors < 1)
        throw ConfigError("synthetic fleet needs motors, days, sensors >= 1");
    if (config.load_levels.empty() ||
        config.load_levels.size() != config.load_weights.size())
        throw ConfigError("load levels and weights must align");
    if (motor_index < 0 || motor_index >= config.motors)
        throw ConfigError("motor index outside configured fleet");
    const Rng master(config.seed);
    return generate_motor(config, motor_index,
                          master.fork(static_cast<std::uint64_t>(motor_index)));
}

}  // namespace driftmon

#include "driftmon/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "driftmon/errors.hpp"

namespace driftmon {
namespace {

struct MotorContext {
    std::string motor_id;
    LinearBaseline model;
    DatasetSplit split;
    std::size_t frames = 0;
    std::vector<std::size_t> fault_onsets;
    std::vector<int> fault_sensors;
    std::vector<int> fault_delays;
};

struct AdaptedCache {
    std::vector<std::int64_t> timestamps;
    std::vector<double> residuals;  // frame-major, p per frame
};

std::vector<double> train_targets(const MotorSeries& series, IndexRange range) {
    const std::size_t p = series.sensor_count();
    std::vector<double> targets;
    targets.reserve(range.size() * p);
    for (std::size_t i = range.begin; i < range.end; ++i)
        for (std::size_t j = 0; j < p; ++j)
            targets.push_back(series.frames[i].y[j]);
    return targets;
}

double min_test_temperature(const MotorSeries& series, IndexRange test) {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = test.begin; i < test.end; ++i)
        for (const double v : series.frames[i].y)
            if (std::isfinite(v)) lowest = std::min(lowest, v);
    return std::isfinite(lowest) ? lowest : 0.0;
}

std::vector<AlarmEvent> replay_anomaly(const std::vector<AdaptedCache>& caches,
                                       const std::vector<std::string>& motor_ids,
                                       std::size_t sensors,
                                       const AnomalyParams& params) {
    std::vector<AlarmEvent> alarms;
    for (std::size_t m = 0; m < caches.size(); ++m) {
        const auto& cache = caches[m];
        AnomalyDetector detector(sensors, params);
        ResidualVector r;
        r.e.resize(sensors);
        for (std::size_t i = 0; i < cache.timestamps.size(); ++i) {
            for (std::size_t j = 0; j < sensors; ++j)
                r.e[j] = cache.residuals[i * sensors + j];
            r.timestamp = cache.timestamps[i];
            const auto step = detector.step(r);
            if (step.alarm)
                alarms.push_back({motor_ids[m], r.timestamp, step.score,
                                  detector.argmax_sensor()});
        }
    }
    return alarms;
}

std::vector<AlarmEvent> replay_threshold(
    const std::vector<AdaptedCache>& max_temp,
    const std::vector<std::string>& motor_ids, double limit,
    std::int64_t restart_delay) {
    std::vector<AlarmEvent> alarms;
    for (std::size_t m = 0; m < max_temp.size(); ++m) {
        const auto& cache = max_temp[m];
        std::int64_t dormant = 0;
        for (std::size_t i = 0; i < cache.timestamps.size(); ++i) {
            if (dormant > 0) {
                --dormant;
                continue;
            }
            if (cache.residuals[i] >= limit) {
                alarms.push_back({motor_ids[m], cache.timestamps[i],
                                  cache.residuals[i], 0});
                dormant = restart_delay;
            }
        }
    }
    return alarms;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::ostream* log) {
    const auto t_start = std::chrono::steady_clock::now();
    auto note = [log](const std::string& line) {
        if (log != nullptr) *log << line << '\n';
    };

    for (const auto& scenario : config.scenarios) drift_mode_from_string(scenario);
    for (const auto& method : config.methods) {
        if (method != "threshold") adaptor_kind_from_string(method);
    }

    const bool from_dataset = !config.dataset_path.empty();
    std::vector<MotorSeries> dataset;
    int motors = config.synth.motors;
    if (from_dataset) {
        dataset = parse_fleet_csv(config.dataset_path);
        if (!config.drift_annotations_path.empty())
            load_drift_annotations(config.drift_annotations_path, dataset);
        motors = static_cast<int>(dataset.size());
        if (motors == 0) throw DataError("dataset has no motors");
    }
    auto fetch_series = [&](int m) {
        return from_dataset ? dataset[static_cast<std::size_t>(m)]
                            : generate_synthetic_motor(config.synth, m);
    };

    ExperimentResult result;
    result.motors = motors;

    // Pass 1: fit one model per motor and pool validation score trajectories.
    const Rng master(config.seed);
    std::vector<MotorContext> contexts(static_cast<std::size_t>(motors));
    std::vector<std::vector<double>> anomaly_scores;
    std::vector<std::vector<double>> drift_scores;
    std::size_t sensors = kSensorCount;
    for (int m = 0; m < motors; ++m) {
        MotorSeries series = fetch_series(m);
        auto& ctx = contexts[static_cast<std::size_t>(m)];
        ctx.motor_id = series.motor_id;
        ctx.split = split_dataset(series);
        ctx.frames = series.size();
        sensors = series.sensor_count();
        result.total_frames += series.size();

        const auto features = build_feature_stream(series, config.feature_half_life);
        const std::size_t p = sensors;
        const std::span<const FeatureVector> rows(
            features.data() + ctx.split.train.begin * p,
            ctx.split.train.size() * p);
        const auto targets = train_targets(series, ctx.split.train);
        ctx.model = fit_linear(rows, targets, p);

        MonitorConfig validation;
        validation.adaptor = AdaptorKind::cusum;
        validation.cusum = config.cusum;
        validation.cusum.lambda = std::numeric_limits<double>::infinity();
        validation.anomaly = config.anomaly;
        validation.anomaly.gamma = std::numeric_limits<double>::infinity();
        validation.predictor = &ctx.model;
        validation.feature_half_life = config.feature_half_life;
        validation.eval_start = ctx.split.validation.begin;
        validation.eval_end = ctx.split.validation.end;
        validation.collect_scores = true;
        MonitorOutput out = run_monitor(series, validation);
        anomaly_scores.push_back(std::move(out.anomaly_scores));
        drift_scores.push_back(std::move(out.drift_scores));

        // Fault placement is independent of scenario and method.
        const double low = min_test_temperature(series, ctx.split.test);
        const auto duration_bound = static_cast<std::int64_t>(
            std::ceil((config.temp_failure - (low - std::abs(config.drift_delta))) /
                      config.fault_slope) +
            config.fault_delay_max + 1);
        Rng fault_rng = master.fork(0x10000u + static_cast<std::uint64_t>(m));
        ctx.fault_onsets = sample_fault_times(
            {ctx.split.test.begin, series.size()}, config.faults_per_motor,
            fault_rng, config.fault_min_gap, duration_bound);
        for (std::size_t k = 0; k < ctx.fault_onsets.size(); ++k) {
            ctx.fault_sensors.push_back(static_cast<int>(
                fault_rng.uniform_int(1, static_cast<std::int64_t>(p))));
            ctx.fault_delays.push_back(static_cast<int>(
                fault_rng.uniform_int(0, config.fault_delay_max)));
        }
        note("[experiment] motor " + ctx.motor_id + ": fitted, " +
             std::to_string(ctx.fault_onsets.size()) + " fault onsets sampled");
    }

    result.gamma_tuning =
        tune_threshold_pooled(anomaly_scores, config.q_val_gamma,
                              config.removal_quantile);
    result.lambda_tuning =
        tune_threshold_pooled(drift_scores, config.q_val_lambda,
                              config.removal_quantile);
    result.gamma = result.gamma_tuning.threshold;
    result.lambda = result.lambda_tuning.threshold;
    note("[experiment] tuned gamma=" + std::to_string(result.gamma) +
         " lambda=" + std::to_string(result.lambda));
    anomaly_scores.clear();
    drift_scores.clear();

    // Pass 2: scenario construction, fault injection, method runs.
    std::vector<std::string> motor_ids;
    for (const auto& ctx : contexts) motor_ids.push_back(ctx.motor_id);

    for (const auto& scenario : config.scenarios) {
        const DriftMode mode = drift_mode_from_string(scenario);

        struct CellAccumulator {
            MatchedOutcomes outcomes;
            std::vector<AlarmEvent> alarms;
            std::vector<DriftEvent> drift_events;
        };
        std::vector<CellAccumulator> accumulators(config.methods.size());
        std::vector<FaultWindow> all_faults;

        const bool want_sweep = config.sweep;
        std::vector<AdaptedCache> sweep_none;   // no-adapt residuals per motor
        std::vector<AdaptedCache> sweep_temps;  // per-frame max temperature

        for (int m = 0; m < motors; ++m) {
            auto& ctx = contexts[static_cast<std::size_t>(m)];
            MotorSeries series = fetch_series(m);

            if (mode != DriftMode::negative) {
                if (!series.drift_times.empty()) {
                    DriftSpec spec;
                    spec.drift_time = series.drift_times.front();
                    spec.mode = mode;
                    series = apply_drift_scenario(series, spec);
                } else if (config.drift_delta != 0.0) {
                    // Drift-free base: construct the scenario with a known
                    // step. "negative" keeps the base clean so that the
                    // +/- pair shares its pre-drift segment.
                }
            }
            if (series.drift_times.empty() && config.drift_delta != 0.0 &&
                mode != DriftMode::none) {
                const std::size_t drift_idx =
                    ctx.split.test.begin +
                    static_cast<std::size_t>(config.drift_day_in_test * 1440.0);
                if (drift_idx >= series.size())
                    throw ConfigError("drift_day_in_test lies past the test range");
                const double sign = mode == DriftMode::positive ? 1.0 : -1.0;
                const std::vector<double> delta(series.sensor_count(),
                                                sign * config.drift_delta);
                add_step_offset(series, series.frames[drift_idx].timestamp, delta);
            }

            std::vector<FaultWindow> windows;
            for (std::size_t k = 0; k < ctx.fault_onsets.size(); ++k) {
                windows.push_back(inject_fault(series, ctx.fault_onsets[k],
                                               ctx.fault_sensors[k],
                                               config.fault_slope,
                                               ctx.fault_delays[k],
                                               config.temp_failure));
            }
            all_faults.insert(all_faults.end(), windows.begin(), windows.end());

            for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
                const std::string& method = config.methods[mi];
                MonitorOutput out;
                if (method == "threshold") {
                    out = run_threshold_monitor(series, config.temp_alarm,
                                                config.anomaly.restart_delay,
                                                ctx.split.test.begin);
                } else {
                    MonitorConfig mc;
                    mc.adaptor = adaptor_kind_from_string(method);
                    mc.cusum = config.cusum;
                    mc.cusum.lambda = result.lambda;
                    mc.ewma = config.ewma;
                    mc.anomaly = config.anomaly;
                    mc.anomaly.gamma = result.gamma;
                    mc.predictor = &ctx.model;
                    mc.feature_half_life = config.feature_half_life;
                    mc.eval_start = ctx.split.test.begin;
                    mc.collect_adapted = want_sweep && method == "none";
                    out = run_monitor(series, mc);
                    result.max_adaptor_state_bytes = std::max(
                        result.max_adaptor_state_bytes, out.adaptor_state_bytes);
                    if (mc.collect_adapted) {
                        sweep_none.push_back({std::move(out.eval_timestamps),
                                              std::move(out.adapted_residuals)});
                    }
                }
                auto& acc = accumulators[mi];
                merge_outcomes(acc.outcomes, match_alarms(out.alarms, windows));
                acc.alarms.insert(acc.alarms.end(), out.alarms.begin(),
                                  out.alarms.end());
                acc.drift_events.insert(acc.drift_events.end(),
                                        out.drift_events.begin(),
                                        out.drift_events.end());
            }

            if (want_sweep) {
                AdaptedCache temps;
                for (std::size_t i = ctx.split.test.begin; i < series.size(); ++i) {
                    double best = -std::numeric_limits<double>::infinity();
                    for (const double v : series.frames[i].y)
                        if (std::isfinite(v)) best = std::max(best, v);
                    temps.timestamps.push_back(series.frames[i].timestamp);
                    temps.residuals.push_back(best);
                }
                sweep_temps.push_back(std::move(temps));
            }
        }

        for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
            CellResult cell;
            cell.scenario = scenario;
            cell.method = config.methods[mi];
            cell.report = compute_metrics(accumulators[mi].outcomes);
            cell.alarms = std::move(accumulators[mi].alarms);
            cell.drift_events = std::move(accumulators[mi].drift_events);
            cell.detection_times = accumulators[mi].outcomes.time_to_detection;
            result.cells.push_back(std::move(cell));
            note("[experiment] " + scenario + "/" + config.methods[mi] +
                 ": FP=" + std::to_string(result.cells.back().report.fp) +
                 " FN=" + std::to_string(result.cells.back().report.fn));
        }
        result.faults_injected += all_faults.size();

        if (want_sweep) {
            std::vector<double> gammas = config.sweep_gammas;
            if (gammas.empty()) {
                for (const double f : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0})
                    gammas.push_back(result.gamma * f);
            }
            std::sort(gammas.begin(), gammas.end());
            SweepCurve gamma_curve;
            gamma_curve.scenario = scenario;
            gamma_curve.method = "none";
            gamma_curve.points = threshold_sweep(
                gammas,
                [&](double gamma) {
                    AnomalyParams params = config.anomaly;
                    params.gamma = gamma;
                    return replay_anomaly(sweep_none, motor_ids, sensors, params);
                },
                all_faults);
            result.curves.push_back(std::move(gamma_curve));

            std::vector<double> temps = config.sweep_temperatures;
            if (temps.empty()) {
                for (double t = 125.0; t <= 145.0; t += 1.0) temps.push_back(t);
            }
            SweepCurve temp_curve;
            temp_curve.scenario = scenario;
            temp_curve.method = "threshold";
            temp_curve.points = threshold_sweep(
                temps,
                [&](double limit) {
                    return replay_threshold(sweep_temps, motor_ids, limit,
                                            config.anomaly.restart_delay);
                },
                all_faults);
            result.curves.push_back(std::move(temp_curve));
        }
    }

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return result;
}

}  // namespace driftmon

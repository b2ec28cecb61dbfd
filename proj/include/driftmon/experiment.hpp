#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "driftmon/evaluate.hpp"
#include "driftmon/pipeline.hpp"
#include "driftmon/simulate.hpp"
#include "driftmon/tuning.hpp"

namespace driftmon {

// Full grid experiment: train per motor, tune detectors on validation,
// construct drift scenarios, inject faults into the test range and run every
// requested method.
struct ExperimentConfig {
    SynthConfig synth;
    std::string dataset_path;            // when set, replaces the generator
    std::string drift_annotations_path;  // optional, with dataset_path

    std::vector<std::string> scenarios = {"none", "positive", "negative"};
    std::vector<std::string> methods = {"cusum", "ewma", "none", "threshold"};

    int faults_per_motor = 5;
    double fault_slope = kDefaultFaultSlope;
    int fault_delay_max = kDefaultDelayMax;
    std::int64_t fault_min_gap = kMinFaultGap;

    double temp_alarm = kAlarmTemp;
    double temp_failure = kFailureTemp;

    int q_val_gamma = 5;
    int q_val_lambda = 200;
    double removal_quantile = 0.2;

    // Synthetic scenario drift: a step of +/- drift_delta on all sensors,
    // placed this many days into the test range (after detector warm-up).
    double drift_delta = 7.0;
    double drift_day_in_test = 7.4;

    CusumAdaptorParams cusum;
    EwmaAdaptorParams ewma;
    AnomalyParams anomaly;
    double feature_half_life = kFeatureHalfLife;

    bool sweep = false;
    std::vector<double> sweep_gammas;        // empty: peaks at q_val 1..50
    std::vector<double> sweep_temperatures;  // empty: 125..145 step 1

    std::uint64_t seed = 1;
};

struct CellResult {
    std::string scenario;
    std::string method;
    MetricsReport report;
    std::vector<AlarmEvent> alarms;
    std::vector<DriftEvent> drift_events;
    std::vector<double> detection_times;  // per-TP, for distribution plots
};

struct SweepCurve {
    std::string scenario;
    std::string method;  // residual method for gamma curves, "threshold" for temp
    std::vector<SweepPoint> points;
};

struct ExperimentResult {
    double gamma = 0.0;
    double lambda = 0.0;
    TuningResult gamma_tuning;
    TuningResult lambda_tuning;
    std::vector<CellResult> cells;
    std::vector<SweepCurve> curves;
    int motors = 0;
    std::size_t total_frames = 0;
    std::size_t faults_injected = 0;
    std::size_t max_adaptor_state_bytes = 0;
    double wall_seconds = 0.0;
};

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::ostream* log = nullptr);

}  // namespace driftmon

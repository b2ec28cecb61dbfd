#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "driftmon/predictor.hpp"

namespace driftmon {

// Compensated accumulator for long-lived sliding-window sums.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    void reset(double v) {
        sum = v;
        carry = 0.0;
    }
};

struct DriftEvent {
    std::int64_t detection_time = 0;       // timestamp of the detecting sample
    std::vector<double> adjustment_before;
    std::vector<double> adjustment_after;  // equals before until the retrain fires
    bool retrained = false;
};

struct AdaptResult {
    ResidualVector adapted;
    bool drift_detected = false;
};

class DriftAdaptor {
  public:
    virtual ~DriftAdaptor() = default;

    virtual AdaptResult step(const ResidualVector& e) = 0;

    // Current additive adjustment vector b.
    virtual std::span<const double> adjustment() const = 0;

    virtual std::span<const DriftEvent> events() const { return {}; }

    // Lagged global drift score at the latest step, when defined.
    virtual std::optional<double> last_score() const { return std::nullopt; }

    // Approximate retained state, for the O(p * (max S + l)) bound.
    virtual std::size_t state_bytes() const = 0;
};

struct CusumAdaptorParams {
    int n_retrain = 400;
    int lag = 240;
    std::vector<int> lookbacks = {1440, 2880, 4320, 5760, 7200, 8640, 10080};
    double lambda = std::numeric_limits<double>::infinity();
};

// On-demand adaptor: two-sided CUSUM test on the lagged adapted residuals,
// sum-aggregated over sensors. On detection at d the adjustment is set
// n_retrain - lag samples later to the per-sensor mean of the raw residuals
// over (d - lag, d - lag + n_retrain].
class CusumAdaptor : public DriftAdaptor {
  public:
    CusumAdaptor(std::size_t sensor_count, CusumAdaptorParams params);

    AdaptResult step(const ResidualVector& e) override;
    std::span<const double> adjustment() const override { return adjustment_; }
    std::span<const DriftEvent> events() const override { return events_; }
    std::optional<double> last_score() const override { return last_score_; }
    std::size_t state_bytes() const override;

    // Global lagged score, recomputed from the stored windowed sums.
    std::optional<double> score() const;

    // Brute-force check hook: the incrementally maintained windowed sum for
    // one sensor and lookback, as currently stored.
    double windowed_sum(std::size_t lookback_index, std::size_t sensor) const;
    std::int64_t steps_seen() const { return t_; }
    const std::vector<std::int64_t>& detections() const { return detections_; }

  private:
    void recompute_sums_exact();

    std::size_t sensors_;
    CusumAdaptorParams params_;
    int max_lookback_;
    std::int64_t t_ = 0;  // 1-based step counter

    std::vector<double> adapted_ring_;  // (max_lookback + lag + 1) x sensors
    std::size_t ring_capacity_;
    std::vector<double> raw_ring_;      // n_retrain x sensors, NaN-preserving
    std::vector<KahanSum> raw_sum_;
    std::vector<int> raw_count_;
    std::vector<KahanSum> window_sums_;  // lookbacks x sensors

    std::vector<double> adjustment_;
    std::vector<std::int64_t> detections_;  // step indices
    std::vector<DriftEvent> events_;
    std::int64_t retrain_at_ = -1;
    std::optional<double> last_score_;
};

struct EwmaAdaptorParams {
    double half_life = 480.0;
    int lag = 240;
};

// Continuous adaptor: b <- (1 - w) b + w e_{t-l} with new-sample weight
// w = 1 - 0.5^(1/half_life); b = 0 until l samples exist.
class EwmaAdaptor : public DriftAdaptor {
  public:
    EwmaAdaptor(std::size_t sensor_count, EwmaAdaptorParams params);

    AdaptResult step(const ResidualVector& e) override;
    std::span<const double> adjustment() const override { return adjustment_; }
    std::size_t state_bytes() const override;

  private:
    std::size_t sensors_;
    EwmaAdaptorParams params_;
    double new_weight_;
    std::int64_t t_ = 0;
    std::vector<double> delay_ring_;  // (lag + 1) x sensors
    std::vector<double> adjustment_;
};

// Passthrough used by the "No adapt" method.
class NoAdaptor : public DriftAdaptor {
  public:
    explicit NoAdaptor(std::size_t sensor_count)
        : adjustment_(sensor_count, 0.0) {}

    AdaptResult step(const ResidualVector& e) override {
        return {e, false};
    }
    std::span<const double> adjustment() const override { return adjustment_; }
    std::size_t state_bytes() const override {
        return adjustment_.size() * sizeof(double);
    }

  private:
    std::vector<double> adjustment_;
};

}  // namespace driftmon

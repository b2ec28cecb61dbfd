#include "driftmon/drift_adapt.hpp"

#include <cmath>

#include "driftmon/errors.hpp"

namespace driftmon {
namespace {

// Sliding-window sums are refreshed from the rings at this cadence so that
// floating error cannot accumulate over arbitrarily long streams.
constexpr std::int64_t kExactRecomputePeriod = 100000;

double value_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

CusumAdaptor::CusumAdaptor(std::size_t sensor_count, CusumAdaptorParams params)
    : sensors_(sensor_count), params_(std::move(params)) {
    if (params_.lookbacks.empty())
        throw ConfigError("cusum adaptor needs at least one lookback");
    if (params_.lag < 0 || params_.n_retrain <= params_.lag)
        throw ConfigError("cusum adaptor requires n_retrain > lag >= 0");
    max_lookback_ = 0;
    for (const int n : params_.lookbacks) {
        if (n < 1) throw ConfigError("lookback lengths must be >= 1");
        max_lookback_ = std::max(max_lookback_, n);
    }
    ring_capacity_ = static_cast<std::size_t>(max_lookback_ + params_.lag + 1);
    adapted_ring_.assign(ring_capacity_ * sensors_, 0.0);
    raw_ring_.assign(static_cast<std::size_t>(params_.n_retrain) * sensors_, 0.0);
    raw_sum_.assign(sensors_, {});
    raw_count_.assign(sensors_, 0);
    window_sums_.assign(params_.lookbacks.size() * sensors_, {});
    adjustment_.assign(sensors_, 0.0);
}

AdaptResult CusumAdaptor::step(const ResidualVector& e) {
    if (e.e.size() != sensors_)
        throw ConfigError("residual dimension does not match adaptor");
    ++t_;

    // Raw ring holds the trailing n_retrain residuals for retrain means.
    const std::size_t raw_slot =
        static_cast<std::size_t>((t_ - 1) % params_.n_retrain) * sensors_;
    for (std::size_t j = 0; j < sensors_; ++j) {
        if (t_ > params_.n_retrain) {
            const double old = raw_ring_[raw_slot + j];
            if (std::isfinite(old)) {
                raw_sum_[j].add(-old);
                --raw_count_[j];
            }
        }
        const double v = e.e[j];
        raw_ring_[raw_slot + j] = v;
        if (std::isfinite(v)) {
            raw_sum_[j].add(v);
            ++raw_count_[j];
        }
    }

    // Eq. (9) schedule: the adjustment becomes active n_retrain - lag samples
    // after the detection, estimated from the raw residuals over
    // (d - lag, d - lag + n_retrain] == the trailing n_retrain raws here.
    if (t_ == retrain_at_) {
        for (std::size_t j = 0; j < sensors_; ++j) {
            if (raw_count_[j] > 0)
                adjustment_[j] = raw_sum_[j].sum / raw_count_[j];
        }
        if (!events_.empty()) {
            events_.back().adjustment_after = adjustment_;
            events_.back().retrained = true;
        }
        retrain_at_ = -1;
    }

    AdaptResult result;
    result.adapted.timestamp = e.timestamp;
    result.adapted.e.resize(sensors_);
    const std::size_t slot =
        static_cast<std::size_t>((t_ - 1) % ring_capacity_) * sensors_;
    for (std::size_t j = 0; j < sensors_; ++j) {
        result.adapted.e[j] = e.e[j] - adjustment_[j];
        adapted_ring_[slot + j] = result.adapted.e[j];
    }

    // Advance the lagged windowed sums with the sample from l steps back.
    const std::int64_t lagged = t_ - params_.lag;
    if (lagged >= 1) {
        const std::size_t in_slot =
            static_cast<std::size_t>((lagged - 1) % ring_capacity_) * sensors_;
        for (std::size_t k = 0; k < params_.lookbacks.size(); ++k) {
            const std::int64_t leaving = lagged - params_.lookbacks[k];
            const std::size_t out_slot =
                leaving >= 1 ? static_cast<std::size_t>((leaving - 1) %
                                                        ring_capacity_) *
                                   sensors_
                             : 0;
            for (std::size_t j = 0; j < sensors_; ++j) {
                auto& acc = window_sums_[k * sensors_ + j];
                acc.add(value_or_zero(adapted_ring_[in_slot + j]));
                if (leaving >= 1)
                    acc.add(-value_or_zero(adapted_ring_[out_slot + j]));
            }
        }
    }
    if (t_ % kExactRecomputePeriod == 0) recompute_sums_exact();

    last_score_ = score();
    bool detected = false;
    if (last_score_.has_value()) {
        const bool dormant =
            !detections_.empty() && t_ - detections_.back() <= params_.n_retrain;
        if (!dormant && *last_score_ > params_.lambda) {
            detections_.push_back(t_);
            DriftEvent event;
            event.detection_time = e.timestamp;
            event.adjustment_before = adjustment_;
            event.adjustment_after = adjustment_;
            events_.push_back(std::move(event));
            retrain_at_ = t_ + params_.n_retrain - params_.lag;
            detected = true;
        }
    }
    result.drift_detected = detected;
    return result;
}

std::optional<double> CusumAdaptor::score() const {
    if (t_ - params_.lag < max_lookback_) return std::nullopt;
    double total = 0.0;
    for (std::size_t j = 0; j < sensors_; ++j) {
        double best = 0.0;
        for (std::size_t k = 0; k < params_.lookbacks.size(); ++k) {
            const double v = std::abs(window_sums_[k * sensors_ + j].sum) /
                             std::sqrt(static_cast<double>(params_.lookbacks[k]));
            best = std::max(best, v);
        }
        total += best;
    }
    return total;
}

double CusumAdaptor::windowed_sum(std::size_t lookback_index,
                                  std::size_t sensor) const {
    return window_sums_[lookback_index * sensors_ + sensor].sum;
}

void CusumAdaptor::recompute_sums_exact() {
    const std::int64_t lagged = t_ - params_.lag;
    for (std::size_t k = 0; k < params_.lookbacks.size(); ++k) {
        const std::int64_t lo = std::max<std::int64_t>(1, lagged - params_.lookbacks[k] + 1);
        for (std::size_t j = 0; j < sensors_; ++j) {
            double sum = 0.0;
            for (std::int64_t i = lo; i <= lagged; ++i) {
                const std::size_t slot =
                    static_cast<std::size_t>((i - 1) % ring_capacity_) * sensors_;
                sum += value_or_zero(adapted_ring_[slot + j]);
            }
            window_sums_[k * sensors_ + j].reset(sum);
        }
    }
    for (std::size_t j = 0; j < sensors_; ++j) {
        double sum = 0.0;
        int count = 0;
        const std::int64_t lo = std::max<std::int64_t>(1, t_ - params_.n_retrain + 1);
        for (std::int64_t i = lo; i <= t_; ++i) {
            const std::size_t slot =
                static_cast<std::size_t>((i - 1) % params_.n_retrain) * sensors_;
            const double v = raw_ring_[slot + j];
            if (std::isfinite(v)) {
                sum += v;
                ++count;
            }
        }
        raw_sum_[j].reset(sum);
        raw_count_[j] = count;
    }
}

std::size_t CusumAdaptor::state_bytes() const {
    return adapted_ring_.size() * sizeof(double) +
           raw_ring_.size() * sizeof(double) +
           window_sums_.size() * sizeof(KahanSum) +
           raw_sum_.size() * sizeof(KahanSum) + raw_count_.size() * sizeof(int) +
           adjustment_.size() * sizeof(double);
}

EwmaAdaptor::EwmaAdaptor(std::size_t sensor_count, EwmaAdaptorParams params)
    : sensors_(sensor_count), params_(params) {
    if (params_.half_life < 1.0)
        throw ConfigError("ewma adaptor half-life must be >= 1");
    if (params_.lag < 0) throw ConfigError("ewma adaptor lag must be >= 0");
    new_weight_ = 1.0 - std::pow(0.5, 1.0 / params_.half_life);
    delay_ring_.assign(static_cast<std::size_t>(params_.lag + 1) * sensors_, 0.0);
    adjustment_.assign(sensors_, 0.0);
}

AdaptResult EwmaAdaptor::step(const ResidualVector& e) {
    if (e.e.size() != sensors_)
        throw ConfigError("residual dimension does not match adaptor");
    ++t_;
    const std::size_t cap = static_cast<std::size_t>(params_.lag + 1);
    const std::size_t slot = static_cast<std::size_t>((t_ - 1) % cap) * sensors_;
    for (std::size_t j = 0; j < sensors_; ++j) delay_ring_[slot + j] = e.e[j];

    const std::int64_t lagged = t_ - params_.lag;
    if (lagged >= 1) {
        const std::size_t lag_slot =
            static_cast<std::size_t>((lagged - 1) % cap) * sensors_;
        for (std::size_t j = 0; j < sensors_; ++j) {
            const double v = delay_ring_[lag_slot + j];
            if (std::isfinite(v))
                adjustment_[j] =
                    (1.0 - new_weight_) * adjustment_[j] + new_weight_ * v;
        }
    }

    AdaptResult result;
    result.adapted.timestamp = e.timestamp;
    result.adapted.e.resize(sensors_);
    for (std::size_t j = 0; j < sensors_; ++j)
        result.adapted.e[j] = e.e[j] - adjustment_[j];
    return result;
}

std::size_t EwmaAdaptor::state_bytes() const {
    return delay_ring_.size() * sizeof(double) +
           adjustment_.size() * sizeof(double);
}

}  // namespace driftmon

#include "driftmon/anomaly.hpp"

#include <cmath>

#include "driftmon/errors.hpp"

namespace driftmon {

AnomalyDetector::AnomalyDetector(std::size_t sensor_count, AnomalyParams params)
    : sensors_(sensor_count), params_(params) {
    if (!(params_.rho > 0.0)) throw ConfigError("anomaly rho must be > 0");
    if (!(params_.gamma > 0.0)) throw ConfigError("anomaly gamma must be > 0");
    if (params_.restart_delay <= 0)
        throw ConfigError("anomaly restart delay must be > 0");
    z_.assign(sensors_, 0.0);
    s_.assign(sensors_, 0.0);
    n_.assign(sensors_, 0);
    prev_e_.assign(sensors_, 0.0);
    mu_.assign(sensors_, params_.rho);
}

AnomalyStepResult AnomalyDetector::step(const ResidualVector& adapted) {
    if (adapted.e.size() != sensors_)
        throw ConfigError("residual dimension does not match detector");

    if (dormant_remaining_ > 0) {
        --dormant_remaining_;
        return {0.0, false};
    }

    double best = 0.0;
    int best_sensor = 1;
    for (std::size_t j = 0; j < sensors_; ++j) {
        const double e = adapted.e[j];
        if (!std::isfinite(e)) {
            ++skipped_;  // sensor state carries forward untouched
            if (z_[j] > best) {
                best = z_[j];
                best_sensor = static_cast<int>(j) + 1;
            }
            continue;
        }
        if (z_[j] > 0.0) {
            n_[j] += 1;
            s_[j] += prev_e_[j];
        } else {
            n_[j] = 0;
            s_[j] = 0.0;
        }
        double mu = params_.rho;
        if (n_[j] > 0) {
            const double mean = s_[j] / static_cast<double>(n_[j]);
            if (mean > mu) mu = mean;
        }
        mu_[j] = mu;
        const double z = z_[j] + mu * e - 0.5 * mu * mu;
        z_[j] = z > 0.0 ? z : 0.0;
        prev_e_[j] = e;
        if (z_[j] > best) {
            best = z_[j];
            best_sensor = static_cast<int>(j) + 1;
        }
    }
    argmax_sensor_ = best_sensor;

    if (best > params_.gamma) {
        z_.assign(sensors_, 0.0);
        s_.assign(sensors_, 0.0);
        n_.assign(sensors_, 0);
        prev_e_.assign(sensors_, 0.0);
        mu_.assign(sensors_, params_.rho);
        dormant_remaining_ = params_.restart_delay;
        return {best, true};
    }
    return {best, false};
}

std::size_t AnomalyDetector::state_bytes() const {
    return sensors_ * (3 * sizeof(double) + sizeof(std::int64_t)) +
           mu_.size() * sizeof(double);
}

}  // namespace driftmon

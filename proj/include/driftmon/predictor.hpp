#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "driftmon/data_model.hpp"
#include "driftmon/features.hpp"

namespace driftmon {

// Per-sensor residuals e = y - yhat for one frame. NaN marks a missing
// component (missing reading or missing prediction).
struct ResidualVector {
    std::int64_t timestamp = 0;
    std::vector<double> e;
};

class Predictor {
  public:
    virtual ~Predictor() = default;

    // One scalar prediction per (frame, sensor) feature row.
    virtual double predict(const FeatureVector& features) const = 0;

    // Frame-level path; the default applies predict() per sensor row.
    // Overridden by predictors whose values are carried in the data itself.
    virtual std::vector<double> predict_frame(
        const SensorFrame& frame, std::span<const FeatureVector> rows) const;

    virtual bool fitted() const { return true; }
};

// Shared slopes over the numeric features plus one intercept per sensor
// (the categorical sensor feature). Fitted by ridge-regularized normal
// equations solved with a dense Cholesky factorization.
class LinearBaseline : public Predictor {
  public:
    LinearBaseline() = default;

    double predict(const FeatureVector& features) const override;
    bool fitted() const override { return fitted_; }

    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& intercepts() const { return intercepts_; }

    void save(const std::filesystem::path& path) const;
    static LinearBaseline load(const std::filesystem::path& path);

    friend LinearBaseline fit_linear(std::span<const FeatureVector>,
                                     std::span<const double>, std::size_t,
                                     double);

  private:
    std::vector<double> weights_;     // one per numeric feature
    std::vector<double> intercepts_;  // one per sensor
    bool fitted_ = false;
};

// Least-squares fit of rows -> targets. Rows with a non-finite target or
// feature are skipped. The ridge term applies to slope columns only, so
// per-sensor training residuals have mean zero. Throws FitError when there
// are fewer usable rows than coefficients or the system is degenerate.
LinearBaseline fit_linear(std::span<const FeatureVector> rows,
                          std::span<const double> targets,
                          std::size_t sensor_count, double ridge = 1e-6);

// Uses prediction columns (yhat1..yhat6) carried in the fleet CSV.
class ExternalColumnPredictor : public Predictor {
  public:
    double predict(const FeatureVector&) const override;
    std::vector<double> predict_frame(
        const SensorFrame& frame, std::span<const FeatureVector> rows) const override;
};

// e_j = y_j - predict(features_j); components with missing inputs are NaN.
ResidualVector residual_step(const Predictor& predictor, const SensorFrame& frame,
                             std::span<const FeatureVector> rows);

}  // namespace driftmon

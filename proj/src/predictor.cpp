#include "driftmon/predictor.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "driftmon/errors.hpp"

namespace driftmon {
namespace {

constexpr std::size_t kNumeric = FeatureVector::kNumericCount;

// Solves A x = b in place for a symmetric positive definite A (row-major,
// dimension n). Returns false when a pivot collapses.
bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double sum = a[i * n + j];
            for (std::size_t k = 0; k < i; ++k)
                sum -= a[i * n + k] * a[j * n + k];
            if (i == j) {
                if (sum <= 0.0) return false;
                a[i * n + i] = std::sqrt(sum);
            } else {
                a[j * n + i] = sum / a[i * n + i];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) sum -= a[i * n + k] * b[k];
        b[i] = sum / a[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double sum = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) sum -= a[k * n + ii] * b[k];
        b[ii] = sum / a[ii * n + ii];
    }
    return true;
}

}  // namespace

std::vector<double> Predictor::predict_frame(
    const SensorFrame&, std::span<const FeatureVector> rows) const {
    std::vector<double> out(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) out[j] = predict(rows[j]);
    return out;
}

double LinearBaseline::predict(const FeatureVector& features) const {
    const auto x = features.numeric();
    double acc = intercepts_[static_cast<std::size_t>(features.sensor_id) - 1];
    for (std::size_t k = 0; k < kNumeric; ++k) acc += weights_[k] * x[k];
    return acc;
}

LinearBaseline fit_linear(std::span<const FeatureVector> rows,
                          std::span<const double> targets,
                          std::size_t sensor_count, double ridge) {
    if (rows.size() != targets.size())
        throw FitError("rows and targets are not aligned");
    const std::size_t dim = kNumeric + sensor_count;

    std::vector<double> gram(dim * dim, 0.0);
    std::vector<double> rhs(dim, 0.0);
    std::size_t used = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double target = targets[i];
        if (!std::isfinite(target)) continue;
        const auto x = rows[i].numeric();
        bool ok = true;
        for (const double v : x)
            if (!std::isfinite(v)) ok = false;
        if (!ok) continue;
        const std::size_t sensor =
            static_cast<std::size_t>(rows[i].sensor_id) - 1;
        if (sensor >= sensor_count)
            throw FitError("sensor_id out of range in training rows");
        ++used;
        for (std::size_t a = 0; a < kNumeric; ++a) {
            for (std::size_t b = a; b < kNumeric; ++b)
                gram[a * dim + b] += x[a] * x[b];
            gram[a * dim + kNumeric + sensor] += x[a];
            rhs[a] += x[a] * target;
        }
        gram[(kNumeric + sensor) * dim + kNumeric + sensor] += 1.0;
        rhs[kNumeric + sensor] += target;
    }
    if (used < dim + 1)
        throw FitError("not enough rows to fit: " + std::to_string(used));

    // Mirror the upper triangle, then regularize slope columns only.
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = a + 1; b < dim; ++b)
            gram[b * dim + a] = gram[a * dim + b];
    for (std::size_t a = 0; a < kNumeric; ++a) gram[a * dim + a] += ridge;

    if (!cholesky_solve(gram, rhs, dim))
        throw FitError("degenerate design matrix (rank-deficient after ridge)");

    LinearBaseline model;
    model.weights_.assign(rhs.begin(), rhs.begin() + kNumeric);
    model.intercepts_.assign(rhs.begin() + kNumeric, rhs.end());
    model.fitted_ = true;
    return model;
}

void LinearBaseline::save(const std::filesystem::path& path) const {
    nlohmann::json doc;
    doc["feature_names"] = FeatureVector::numeric_names();
    doc["weights"] = weights_;
    doc["intercepts"] = intercepts_;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

LinearBaseline LinearBaseline::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    nlohmann::json doc;
    in >> doc;
    const auto names = doc.at("feature_names").get<std::vector<std::string>>();
    const auto& expected = FeatureVector::numeric_names();
    if (names.size() != expected.size())
        throw SchemaError("model file feature set mismatch: " + path.string());
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] != expected[i])
            throw SchemaError("model file feature set mismatch: " + path.string());
    LinearBaseline model;
    model.weights_ = doc.at("weights").get<std::vector<double>>();
    model.intercepts_ = doc.at("intercepts").get<std::vector<double>>();
    if (model.weights_.size() != kNumeric || model.intercepts_.empty())
        throw SchemaError("model file has wrong coefficient counts");
    model.fitted_ = true;
    return model;
}

double ExternalColumnPredictor::predict(const FeatureVector&) const {
    // Per-row prediction is undefined without the frame; predictions live in
    // the yhat columns handled by predict_frame.
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> ExternalColumnPredictor::predict_frame(
    const SensorFrame& frame, std::span<const FeatureVector> rows) const {
    std::vector<double> out(rows.size(),
                            std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 0; j < rows.size() && j < frame.yhat.size(); ++j)
        out[j] = frame.yhat[j];
    return out;
}

ResidualVector residual_step(const Predictor& predictor, const SensorFrame& frame,
                             std::span<const FeatureVector> rows) {
    ResidualVector r;
    r.timestamp = frame.timestamp;
    const auto predictions = predictor.predict_frame(frame, rows);
    r.e.resize(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const double y = j < frame.y.size()
                             ? frame.y[j]
                             : std::numeric_limits<double>::quiet_NaN();
        r.e[j] = y - predictions[j];
    }
    return r;
}

}  // namespace driftmon

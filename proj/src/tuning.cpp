#include "driftmon/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "driftmon/errors.hpp"

namespace driftmon {
namespace {

// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw TuningError("no finite scores to tune on");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

}  // namespace

TuningResult tune_threshold_pooled(
    const std::vector<std::vector<double>>& score_sequences, int q_val,
    double removal_quantile) {
    if (q_val < 1) throw TuningError("q_val must be >= 1");
    if (removal_quantile < 0.0 || removal_quantile > 1.0)
        throw TuningError("removal quantile must lie in [0, 1]");

    std::vector<double> pooled;
    for (const auto& seq : score_sequences)
        for (const double v : seq)
            if (std::isfinite(v)) pooled.push_back(v);
    const double stop = quantile(std::move(pooled), removal_quantile);

    std::vector<std::vector<char>> alive(score_sequences.size());
    for (std::size_t m = 0; m < score_sequences.size(); ++m) {
        alive[m].assign(score_sequences[m].size(), 1);
        for (std::size_t i = 0; i < score_sequences[m].size(); ++i)
            if (!std::isfinite(score_sequences[m][i])) alive[m][i] = 0;
    }

    TuningResult result;
    result.q_val = q_val;
    result.removal_quantile = removal_quantile;
    for (int iter = 0; iter < q_val; ++iter) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_m = 0, best_i = 0;
        bool found = false;
        for (std::size_t m = 0; m < score_sequences.size(); ++m) {
            const auto& seq = score_sequences[m];
            for (std::size_t i = 0; i < seq.size(); ++i) {
                if (alive[m][i] && seq[i] > best) {
                    best = seq[i];
                    best_m = m;
                    best_i = i;
                    found = true;
                }
            }
        }
        if (!found) {
            throw TuningError(
                "validation scores exhausted after " + std::to_string(iter) +
                " of " + std::to_string(q_val) + " peak removals");
        }
        result.peaks.push_back(best);
        result.threshold = best;

        // Remove the contiguous run around the argmax that stays above the
        // stop level; values at or below it act as separators.
        const auto& seq = score_sequences[best_m];
        auto& mask = alive[best_m];
        std::size_t lo = best_i;
        while (lo > 0 && std::isfinite(seq[lo - 1]) && seq[lo - 1] > stop) --lo;
        std::size_t hi = best_i;
        while (hi + 1 < seq.size() && std::isfinite(seq[hi + 1]) &&
               seq[hi + 1] > stop)
            ++hi;
        for (std::size_t i = lo; i <= hi; ++i) mask[i] = 0;
    }
    return result;
}

TuningResult tune_threshold(std::span<const double> scores, int q_val,
                            double removal_quantile) {
    std::vector<std::vector<double>> one;
    one.emplace_back(scores.begin(), scores.end());
    return tune_threshold_pooled(one, q_val, removal_quantile);
}

int count_upward_crossings(std::span<const double> scores, double threshold) {
    int crossings = 0;
    bool above = false;
    for (const double v : scores) {
        if (!std::isfinite(v)) continue;
        const bool now = v > threshold;
        if (now && !above) ++crossings;
        above = now;
    }
    return crossings;
}

}  // namespace driftmon

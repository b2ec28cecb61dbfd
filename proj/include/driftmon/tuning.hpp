#pragma once

#include <span>
#include <vector>

namespace driftmon {

struct TuningResult {
    double threshold = 0.0;
    int q_val = 0;
    double removal_quantile = 0.2;
    std::vector<double> peaks;  // maximum found in each iteration
};

// Peak-removal threshold calibration. Iterates q_val times: find the global
// maximum over the remaining index set, expand left/right from the argmax
// while scores stay strictly above the stop level (the removal_quantile
// empirical quantile of all scores), drop that run, and return the last
// iteration's maximum. Non-finite scores (detector warm-up) are ignored.
// Throws TuningError when the index set is exhausted early.
TuningResult tune_threshold(std::span<const double> scores, int q_val,
                            double removal_quantile = 0.2);

// Pooled variant: scores from several motors are tuned jointly; the removal
// runs stay confined to the sequence that produced the peak.
TuningResult tune_threshold_pooled(
    const std::vector<std::vector<double>>& score_sequences, int q_val,
    double removal_quantile = 0.2);

// Counts upward crossings of a threshold, the episode notion used to verify
// a tuned detector on its validation scores.
int count_upward_crossings(std::span<const double> scores, double threshold);

}  // namespace driftmon

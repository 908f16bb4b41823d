#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lsm/matrix.hpp"
#include "lsm/trace.hpp"

namespace lsm {

/// Trained linear readout. w_out is (F+1) x P; the last row holds the bias
/// weights for the implicit constant-1 feature.
struct ReadoutModel {
    Matrix w_out;
    double lambda = 0.0;
    FeatureMode mode;

    bool operator==(const ReadoutModel&) const = default;
};

/// Recorded features and targets retained at training time. Enables
/// retraining with new targets without touching the reservoir.
/// boundaries[k]..boundaries[k+1] is the row range of sequence k;
/// boundaries.front() == 0 and boundaries.back() == row count.
struct StateCache {
    Matrix features;
    Matrix targets;
    std::vector<std::size_t> boundaries;

    bool operator==(const StateCache&) const = default;
};

/// Scale-aware default regularization: 1e-6 * trace(S~' S~) / (F+1) where
/// S~ is the feature matrix with the constant column appended.
double default_lambda(const Matrix& s);

/// Ridge regression via the normal equations (S~' S~ + lambda I) w = S~' Y,
/// solved with a Cholesky factorization. lambda regularizes every row
/// including the bias. A rank-deficient system with lambda = 0 throws
/// RankDeficiencyError rather than silently pseudo-inverting.
ReadoutModel fit_readout(const Matrix& s, const Matrix& y, double lambda,
                         const FeatureMode& mode = {});

/// out[p] = sum_f features[f] * w_out(f, p) + w_out(F, p).
void predict_row(const ReadoutModel& model, std::span<const double> features,
                 std::span<double> out);

Matrix predict(const ReadoutModel& model, const Matrix& s);

/// Identical code path to fit_readout on the cached features; performs no
/// reservoir execution (takes no Reservoir).
ReadoutModel retrain_from_cache(const StateCache& cache, const Matrix& new_y, double lambda,
                                const FeatureMode& mode = {});

namespace detail {

/// Normal-equations ridge solve, optionally without the bias column.
/// Exposed so tests can pin solutions of the raw system.
Matrix ridge_solve(const Matrix& s, const Matrix& y, double lambda, bool add_bias);

}  // namespace detail

}  // namespace lsm

#include "lsm/readout.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lsm {

namespace {

void require_finite(const Matrix& m, const char* what) {
    for (double v : m.data) {
        if (!std::isfinite(v)) throw NumericError(std::string(what) + ": non-finite entry");
    }
}

}  // namespace

double default_lambda(const Matrix& s) {
    double trace = static_cast<double>(s.rows);  // the appended constant column
    for (double v : s.data) trace += v * v;
    return 1e-6 * trace / static_cast<double>(s.cols + 1);
}

namespace detail {

Matrix ridge_solve(const Matrix& s, const Matrix& y, double lambda, bool add_bias) {
    if (s.rows == 0) throw ShapeError("fit: expected at least one feature row, got 0");
    if (y.rows != s.rows) {
        throw ShapeError("fit: targets have " + std::to_string(y.rows) + " rows, features have " +
                         std::to_string(s.rows));
    }
    if (y.cols == 0) throw ShapeError("fit: targets must have at least one column");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw NumericError("fit: lambda must be finite and >= 0");
    }
    require_finite(s, "fit: features");
    require_finite(y, "fit: targets");

    const std::size_t t_steps = s.rows;
    const std::size_t width = s.cols + (add_bias ? 1 : 0);
    const std::size_t outputs = y.cols;

    // Normal equations A w = B with A = S~' S~ + lambda I, B = S~' Y,
    // accumulated in step order.
    Matrix a(width, width);
    Matrix b(width, outputs);
    std::vector<double> srow(width, 1.0);  // trailing 1.0 is the bias feature
    for (std::size_t t = 0; t < t_steps; ++t) {
        const auto row = s.row(t);
        std::copy(row.begin(), row.end(), srow.begin());
        for (std::size_t i = 0; i < width; ++i) {
            const double si = srow[i];
            double* arow = a.row(i).data();
            for (std::size_t j = i; j < width; ++j) arow[j] += si * srow[j];
            double* brow = b.row(i).data();
            const auto yrow = y.row(t);
            for (std::size_t p = 0; p < outputs; ++p) brow[p] += si * yrow[p];
        }
    }
    double max_diag = 0.0;
    for (std::size_t i = 0; i < width; ++i) {
        a(i, i) += lambda;
        max_diag = std::max(max_diag, a(i, i));
        for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);  // mirror lower triangle
    }

    // In-place Cholesky, A = L L'. A pivot at or below the breakdown
    // threshold means the system has no unique solution.
    const double pivot_floor =
        static_cast<double>(width) * std::numeric_limits<double>::epsilon() * max_diag;
    for (std::size_t k = 0; k < width; ++k) {
        double d = a(k, k);
        for (std::size_t j = 0; j < k; ++j) d -= a(k, j) * a(k, j);
        if (!(d > pivot_floor)) {
            if (lambda == 0.0) {
                throw RankDeficiencyError(
                    "fit: normal equations are rank-deficient at lambda = 0; "
                    "use lambda > 0");
            }
            throw NumericError("fit: Cholesky breakdown at pivot " + std::to_string(k));
        }
        const double lkk = std::sqrt(d);
        a(k, k) = lkk;
        for (std::size_t i = k + 1; i < width; ++i) {
            double v = a(i, k);
            for (std::size_t j = 0; j < k; ++j) v -= a(i, j) * a(k, j);
            a(i, k) = v / lkk;
        }
    }

    // Forward and back substitution, one RHS column at a time.
    Matrix w(width, outputs);
    std::vector<double> col(width);
    for (std::size_t p = 0; p < outputs; ++p) {
        for (std::size_t i = 0; i < width; ++i) {
            double v = b(i, p);
            for (std::size_t j = 0; j < i; ++j) v -= a(i, j) * col[j];
            col[i] = v / a(i, i);
        }
        for (std::size_t ii = width; ii-- > 0;) {
            double v = col[ii];
            for (std::size_t j = ii + 1; j < width; ++j) v -= a(j, ii) * col[j];
            col[ii] = v / a(ii, ii);
        }
        for (std::size_t i = 0; i < width; ++i) w(i, p) = col[i];
    }
    return w;
}

}  // namespace detail

ReadoutModel fit_readout(const Matrix& s, const Matrix& y, double lambda,
                         const FeatureMode& mode) {
    validate_mode(mode);
    ReadoutModel model;
    model.w_out = detail::ridge_solve(s, y, lambda, /*add_bias=*/true);
    model.lambda = lambda;
    model.mode = mode;
    return model;
}

void predict_row(const ReadoutModel& model, std::span<const double> features,
                 std::span<double> out) {
    const std::size_t width = model.w_out.rows;  // F + 1
    const std::size_t outputs = model.w_out.cols;
    if (features.size() + 1 != width) {
        throw ShapeError("predict: expected " + std::to_string(width - 1) + " features, got " +
                         std::to_string(features.size()));
    }
    if (out.size() != outputs) {
        throw ShapeError("predict: expected " + std::to_string(outputs) + " outputs, got " +
                         std::to_string(out.size()));
    }
    for (std::size_t p = 0; p < outputs; ++p) {
        double acc = 0.0;
        for (std::size_t f = 0; f + 1 < width; ++f) acc += features[f] * model.w_out(f, p);
        out[p] = acc + model.w_out(width - 1, p);
    }
}

Matrix predict(const ReadoutModel& model, const Matrix& s) {
    if (s.cols + 1 != model.w_out.rows) {
        throw ShapeError("predict: expected " + std::to_string(model.w_out.rows - 1) +
                         " feature columns, got " + std::to_string(s.cols));
    }
    Matrix out(s.rows, model.w_out.cols);
    for (std::size_t t = 0; t < s.rows; ++t) predict_row(model, s.row(t), out.row(t));
    return out;
}

ReadoutModel retrain_from_cache(const StateCache& cache, const Matrix& new_y, double lambda,
                                const FeatureMode& mode) {
    if (new_y.rows != cache.features.rows) {
        throw ShapeError("retrain: targets have " + std::to_string(new_y.rows) +
                         " rows, cache has " + std::to_string(cache.features.rows));
    }
    return fit_readout(cache.features, new_y, lambda, mode);
}

}  // namespace lsm

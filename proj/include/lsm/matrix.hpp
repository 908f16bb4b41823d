#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lsm/error.hpp"

namespace lsm {

/// Dense row-major matrix of doubles. Time steps are rows throughout the
/// library: a T x M input block holds one input vector per row.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool empty() const { return rows == 0 || cols == 0; }

    bool operator==(const Matrix&) const = default;
};

/// Throws ShapeError unless `m` is rows x cols; `what` names the operand.
void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* what);

/// Vertical concatenation; all blocks must share a column count.
Matrix vstack(const std::vector<Matrix>& blocks);

}  // namespace lsm

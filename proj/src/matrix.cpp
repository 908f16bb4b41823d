#include "lsm/matrix.hpp"

#include <string>

namespace lsm {

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
    if (m.rows != rows || m.cols != cols) {
        throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows) + "x" +
                         std::to_string(m.cols));
    }
}

Matrix vstack(const std::vector<Matrix>& blocks) {
    if (blocks.empty()) return {};
    const std::size_t cols = blocks.front().cols;
    std::size_t rows = 0;
    for (const Matrix& b : blocks) {
        if (b.cols != cols) {
            throw ShapeError("vstack: expected " + std::to_string(cols) + " columns, got " +
                             std::to_string(b.cols));
        }
        rows += b.rows;
    }
    Matrix out(rows, cols);
    std::size_t at = 0;
    for (const Matrix& b : blocks) {
        std::copy(b.data.begin(), b.data.end(), out.data.begin() + at);
        at += b.data.size();
    }
    return out;
}

}  // namespace lsm

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rsvd/errors.hpp"

namespace rsvd {

// Column-major dense matrix of doubles. Columns are contiguous, which keeps
// the tall-skinny products A'Y and Y'Y stride friendly.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), data(std::size_t(r) * c, 0.0) {
        if (r < 0 || c < 0) throw DimensionError("negative matrix dimension");
    }

    double& operator()(int i, int j) { return data[std::size_t(j) * rows + i]; }
    double operator()(int i, int j) const { return data[std::size_t(j) * rows + i]; }

    double* col(int j) { return data.data() + std::size_t(j) * rows; }
    const double* col(int j) const { return data.data() + std::size_t(j) * rows; }

    bool empty() const { return rows == 0 || cols == 0; }

    static DenseMatrix identity(int n) {
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    // Appends the columns of other; used by the factorization driver to grow
    // Y and W without reallocating per block.
    void append_cols(const DenseMatrix& other) {
        if (empty() && cols == 0 && rows == 0) {
            *this = other;
            return;
        }
        if (other.rows != rows) throw DimensionError("append_cols: row mismatch");
        std::size_t need = std::size_t(rows) * (cols + other.cols);
        if (data.capacity() < need)
            data.reserve(std::max(need, data.capacity() + data.capacity() / 2));
        data.insert(data.end(), other.data.begin(), other.data.end());
        cols += other.cols;
    }
};

inline DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols, a.rows);
    for (int j = 0; j < a.cols; ++j)
        for (int i = 0; i < a.rows; ++i) t(j, i) = a(i, j);
    return t;
}

}  // namespace rsvd

#pragma once

// Dense row-major matrix plus the three kernels the belief-net trainer
// spends its time in. Loops keep the innermost index over contiguous output
// so the compiler can vectorize without reassociating reductions.

#include <cmath>
#include <cstddef>
#include <vector>

#include "hqa/util.hpp"

namespace hqa {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), v(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
    double* row(std::size_t r) { return v.data() + r * cols; }
    const double* row(std::size_t r) const { return v.data() + r * cols; }
};

inline Matrix transpose(const Matrix& m) {
    Matrix t(m.cols, m.rows);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) t(c, r) = m(r, c);
    return t;
}

// out = A (n x k) * W (k x m) + bias broadcast over rows.
inline void affine_rows(const Matrix& a, const Matrix& w, const std::vector<double>& bias,
                        Matrix& out) {
    if (a.cols != w.rows || bias.size() != w.cols)
        throw RuntimeFailure("affine_rows: dimension mismatch");
    out = Matrix(a.rows, w.cols);
    for (std::size_t r = 0; r < a.rows; ++r) {
        double* o = out.row(r);
        for (std::size_t j = 0; j < w.cols; ++j) o[j] = bias[j];
        const double* ar = a.row(r);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double x = ar[k];
            if (x == 0.0) continue;
            const double* wk = w.row(k);
            for (std::size_t j = 0; j < w.cols; ++j) o[j] += x * wk[j];
        }
    }
}

// out[i][j] = sum_r A[r][i] * B[r][j]; the CD statistics accumulator.
inline void accumulate_outer(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.rows != b.rows) throw RuntimeFailure("accumulate_outer: row mismatch");
    out = Matrix(a.cols, b.cols);
    for (std::size_t r = 0; r < a.rows; ++r) {
        const double* ar = a.row(r);
        const double* br = b.row(r);
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double x = ar[i];
            if (x == 0.0) continue;
            double* oi = out.row(i);
            for (std::size_t j = 0; j < b.cols; ++j) oi[j] += x * br[j];
        }
    }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline void sigmoid_in_place(Matrix& m) {
    for (double& x : m.v) x = sigmoid(x);
}

}  // namespace hqa

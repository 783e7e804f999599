#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dkt/error.hpp"
#include "dkt/rng.hpp"

namespace dkt {

// Dense row-major matrix of doubles. Deliberately minimal: the model code
// below needs predictable memory layout and exact reproducibility more
// than it needs a linear-algebra DSL.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    std::string shape_str() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        fail(ErrorCode::DimensionMismatch,
             "matmul: " + a.shape_str() + " incompatible with " + b.shape_str());
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = arow[k];
            const double* brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

template <typename F>
Matrix elementwise(const Matrix& a, F&& f) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = f(a.data()[i]);
    return out;
}

// Logistic sigmoid, output clamped into the open interval (0, 1) so that
// downstream log-loss terms stay finite even for saturated activations.
inline double sigmoid(double x) {
    double v;
    if (x >= 0.0) {
        v = 1.0 / (1.0 + std::exp(-x));
    } else {
        const double e = std::exp(x);
        v = e / (1.0 + e);
    }
    const double lo = 2.2250738585072014e-308;  // smallest normal double
    const double hi = 0x1.fffffffffffffp-1;     // largest double below 1
    if (v < lo) v = lo;
    if (v > hi) v = hi;
    return v;
}

inline double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Matrix with i.i.d. standard normal entries drawn from `rng`.
inline Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (double& x : m.data()) x = rng.normal();
    return m;
}

// --- small vector helpers used throughout the model code ---

inline double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

// out += W v  (W: rows x cols, v: cols)
inline void matvec_add(const Matrix& w, const double* v, double* out) {
    for (std::size_t r = 0; r < w.rows(); ++r) out[r] += dot(w.row(r), v, w.cols());
}

// out += W^T d  (d: rows, out: cols)
inline void matvec_transpose_add(const Matrix& w, const double* d, double* out) {
    for (std::size_t r = 0; r < w.rows(); ++r) {
        const double dr = d[r];
        if (dr == 0.0) continue;
        const double* row = w.row(r);
        for (std::size_t c = 0; c < w.cols(); ++c) out[c] += dr * row[c];
    }
}

// G += d v^T  (outer product accumulate)
inline void outer_add(Matrix& g, const double* d, const double* v) {
    for (std::size_t r = 0; r < g.rows(); ++r) {
        const double dr = d[r];
        if (dr == 0.0) continue;
        double* row = g.row(r);
        for (std::size_t c = 0; c < g.cols(); ++c) row[c] += dr * v[c];
    }
}

}  // namespace dkt

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "eulag/errors.hpp"

namespace eulag {

using Vector = std::vector<double>;

// Dense row-major square-or-rectangular matrix. Small sizes only; the
// analysis never needs more than a few dozen rows.
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

    static Matrix diagonal(const Vector& d) {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Vector apply(const Vector& x) const {
        require(x.size() == cols_, errc::dimension_mismatch, "matrix-vector product");
        Vector y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    Vector apply_transposed(const Vector& x) const {
        require(x.size() == rows_, errc::dimension_mismatch, "transposed matrix-vector product");
        Vector y(cols_, 0.0);
        for (std::size_t j = 0; j < cols_; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, j) * x[i];
            y[j] = s;
        }
        return y;
    }

    bool is_symmetric(double tol) const {
        if (rows_ != cols_) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        return true;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double dot(const Vector& a, const Vector& b) {
    require(a.size() == b.size(), errc::dimension_mismatch, "dot product");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

inline Vector operator+(Vector a, const Vector& b) {
    require(a.size() == b.size(), errc::dimension_mismatch, "vector sum");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline Vector operator-(Vector a, const Vector& b) {
    require(a.size() == b.size(), errc::dimension_mismatch, "vector difference");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

inline Vector operator*(double s, Vector a) {
    for (double& v : a) v *= s;
    return a;
}

inline Vector axpy(double s, const Vector& x, Vector y) {
    require(x.size() == y.size(), errc::dimension_mismatch, "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
    return y;
}

struct JacobiResult {
    Vector eigenvalues;  // ascending
    Matrix eigenvectors; // columns, orthonormal
};

namespace detail {

inline double offdiagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

} // namespace detail

// Cyclic Jacobi rotations. Deterministic sweep order, so the output is a
// pure function of the input entries.
inline JacobiResult jacobi_eigendecompose(Matrix a, int max_sweeps = 100) {
    require(a.rows() == a.cols(), errc::dimension_mismatch, "eigendecomposition of nonsquare matrix");
    const std::size_t n = a.rows();
    Matrix v = Matrix::identity(n);
    const double stop = 1e-12 * std::max(1.0, a.frobenius_norm());

    int sweep = 0;
    while (detail::offdiagonal_norm(a) > stop) {
        if (sweep++ >= max_sweeps)
            fail(errc::convergence_failure, "off-diagonal norm above tolerance after sweep cap");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double apj = a(p, j);
                    const double aqj = a(q, j);
                    a(p, j) = c * apj - s * aqj;
                    a(q, j) = s * apj + c * aqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    // Sort ascending; fix each eigenvector's sign so the largest-magnitude
    // component is positive (keeps the decomposition deterministic).
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (a(order[j], order[j]) < a(order[i], order[i])) std::swap(order[i], order[j]);

    JacobiResult out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        const std::size_t src = order[col];
        out.eigenvalues[col] = a(src, src);
        std::size_t imax = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(v(i, src)) > std::abs(v(imax, src))) imax = i;
        const double sign = v(imax, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, col) = sign * v(i, src);
    }
    return out;
}

} // namespace eulag

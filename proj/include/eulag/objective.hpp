#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "eulag/errors.hpp"
#include "eulag/linalg.hpp"

namespace eulag {

// Orthogonal diagonalization A = P diag(eigenvalues) P^T with eigenvalues
// ascending. Reduces the d-dimensional quadratic to d independent modes.
struct EigenDecomposition {
    Vector eigenvalues;
    Matrix basis; // columns are eigenvectors
};

// f(x) = 1/2 (x - x*)^T A (x - x*) with A symmetric positive definite.
// Immutable after construction; the eigendecomposition is cached once.
class QuadraticObjective {
public:
    QuadraticObjective(Matrix a, Vector x_star)
        : a_(std::move(a)), x_star_(std::move(x_star)) {
        require(a_.rows() == a_.cols(), errc::dimension_mismatch, "objective matrix must be square");
        require(a_.rows() == x_star_.size(), errc::dimension_mismatch,
                "minimizer length must match matrix dimension");
        require(!x_star_.empty(), errc::invalid_argument, "objective dimension must be positive");
        if (!a_.is_symmetric(1e-12)) fail(errc::non_symmetric, "entrywise tolerance 1e-12 exceeded");

        auto jr = jacobi_eigendecompose(a_);
        for (double lam : jr.eigenvalues)
            if (!(lam > 0.0)) fail(errc::not_positive_definite, "eigenvalue <= 0");
        eig_ = EigenDecomposition{std::move(jr.eigenvalues), std::move(jr.eigenvectors)};
    }

    std::size_t dim() const { return x_star_.size(); }
    const Matrix& matrix() const { return a_; }
    const Vector& minimizer() const { return x_star_; }
    const EigenDecomposition& eigen() const { return eig_; }

    // Largest eigenvalue of A; the gradient Lipschitz constant.
    double smoothness_constant() const { return eig_.eigenvalues.back(); }

    Vector gradient(const Vector& x) const {
        require(x.size() == dim(), errc::dimension_mismatch, "gradient");
        return a_.apply(x - x_star_);
    }

    double value(const Vector& x) const {
        require(x.size() == dim(), errc::dimension_mismatch, "value");
        Vector d = x - x_star_;
        return 0.5 * dot(d, a_.apply(d));
    }

    // f(x) - f(x*) = f(x) since f(x*) = 0.
    double suboptimality(const Vector& x) const { return value(x); }

    // x~ = P^T (x - x*)
    Vector to_eigenbasis(const Vector& x) const {
        require(x.size() == dim(), errc::dimension_mismatch, "to_eigenbasis");
        return eig_.basis.apply_transposed(x - x_star_);
    }

    Vector from_eigenbasis(const Vector& xt) const {
        require(xt.size() == dim(), errc::dimension_mismatch, "from_eigenbasis");
        return eig_.basis.apply(xt) + x_star_;
    }

private:
    Matrix a_;
    Vector x_star_;
    EigenDecomposition eig_;
};

inline QuadraticObjective build_objective(Matrix a, Vector x_star) {
    return QuadraticObjective(std::move(a), std::move(x_star));
}

// dim eigenvalues evenly log-spaced in [1, L]; the default experimental
// spectrum when only a smoothness constant is given.
inline Vector log_spaced_spectrum(double smoothness, std::size_t dim) {
    require(smoothness >= 1.0, errc::invalid_argument, "spectrum needs L >= 1");
    require(dim >= 1, errc::invalid_argument, "spectrum needs dim >= 1");
    Vector lams(dim);
    if (dim == 1) {
        lams[0] = smoothness;
        return lams;
    }
    const double step = std::log(smoothness) / static_cast<double>(dim - 1);
    for (std::size_t i = 0; i < dim; ++i) lams[i] = std::exp(step * static_cast<double>(i));
    lams.back() = smoothness;
    return lams;
}

inline QuadraticObjective default_objective(double smoothness, std::size_t dim) {
    return QuadraticObjective(Matrix::diagonal(log_spaced_spectrum(smoothness, dim)),
                              Vector(dim, 0.0));
}

// Matrix-file format: first line `dim`, then dim rows of dim entries,
// then one row holding x*.
inline QuadraticObjective load_objective(std::istream& in) {
    std::size_t dim = 0;
    if (!(in >> dim) || dim == 0) fail(errc::io_failure, "matrix file: bad dimension line");
    Matrix a(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            if (!(in >> a(i, j))) fail(errc::io_failure, "matrix file: truncated matrix rows");
    Vector xs(dim);
    for (std::size_t i = 0; i < dim; ++i)
        if (!(in >> xs[i])) fail(errc::io_failure, "matrix file: truncated minimizer row");
    return QuadraticObjective(std::move(a), std::move(xs));
}

inline QuadraticObjective load_objective(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_failure, "cannot open matrix file " + path);
    return load_objective(in);
}

} // namespace eulag

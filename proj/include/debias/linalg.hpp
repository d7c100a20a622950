#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace debias {

using Vector = std::vector<double>;

/// Dense row-major matrix. Small sizes only (dimensions of a few dozen).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> diag);
    static Matrix outer(std::span<const double> a, std::span<const double> b);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    const std::vector<double>& entries() const { return data_; }

    Matrix transpose() const;
    double max_abs() const;
    double frobenius() const;

    /// this += scale * a b^T
    void add_outer(std::span<const double> a, std::span<const double> b, double scale = 1.0);

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }
    friend Matrix operator*(const Matrix& a, const Matrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Vector operator*(const Matrix& m, std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
/// Largest |x_i|.
double norm_inf(std::span<const double> v);
Vector basis_vector(std::size_t n, std::size_t i);

/// Throws std::invalid_argument when M is not square, holds NaN/Inf, or is not
/// symmetric to within 1e-9 (1 + max|M|).
void require_symmetric(const Matrix& m);
bool is_symmetric(const Matrix& m);

/// Eigen-decomposition of a symmetric matrix: M = Q diag(values) Q^T, values
/// sorted in decreasing order, eigenvectors stored as the columns of Q.
struct SymmetricEigen {
    Vector values;
    Matrix vectors;
    int sweeps = 0;
};

/// Cyclic Jacobi rotations. Stops once the off-diagonal Frobenius mass is
/// below 1e-12 ||M||_F.
SymmetricEigen eigen_symmetric(const Matrix& m);

/// Eigenvalues below kRankTolerance * lambda_max are treated as zero.
inline constexpr double kRankTolerance = 1e-10;

/// Moore-Penrose inverse of a symmetric PSD matrix.
Matrix pseudo_inverse(const Matrix& m);

/// Numerical rank with the same cutoff as pseudo_inverse.
std::size_t rank_symmetric(const Matrix& m);

/// True iff ||(I - M M^+) v|| <= 1e-8 (1 + ||v||).
bool in_image(const Matrix& m, std::span<const double> v);

/// True iff lambda_min(A - B) >= -slack.
bool psd_dominates(const Matrix& a, const Matrix& b, double slack);

/// Orthonormal basis (as rows) of the span of the given vectors.
Matrix orthonormal_span_basis(std::span<const Vector> vectors);

/// Inverse of a symmetric positive definite matrix (Cholesky). Throws
/// std::domain_error if the matrix is not numerically positive definite.
Matrix spd_inverse(const Matrix& m);

}  // namespace debias

#include "debias/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace debias {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
        throw std::invalid_argument("Matrix: " + std::to_string(data_.size()) + " entries for a " +
                                    std::to_string(rows_) + "x" + std::to_string(cols_) + " shape");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

Matrix Matrix::outer(std::span<const double> a, std::span<const double> b) {
    Matrix m(a.size(), b.size());
    m.add_outer(a, b);
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

double Matrix::frobenius() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

void Matrix::add_outer(std::span<const double> a, std::span<const double> b, double scale) {
    if (a.size() != rows_ || b.size() != cols_)
        throw std::invalid_argument("Matrix::add_outer: dimension mismatch");
    for (std::size_t i = 0; i < rows_; ++i) {
        const double ai = scale * a[i];
        if (ai == 0.0) continue;
        double* r = data_.data() + i * cols_;
        for (std::size_t j = 0; j < cols_; ++j) r[j] += ai * b[j];
    }
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("Matrix: shape mismatch in addition");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("Matrix: shape mismatch in subtraction");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("Matrix: shape mismatch in product");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector operator*(const Matrix& m, std::span<const double> v) {
    if (m.cols() != v.size()) throw std::invalid_argument("Matrix: dimension mismatch in product");
    Vector out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = dot(m.row(i), v);
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Vector basis_vector(std::size_t n, std::size_t i) {
    Vector e(n, 0.0);
    e.at(i) = 1.0;
    return e;
}

namespace {

bool all_finite(const Matrix& m) {
    return std::all_of(m.entries().begin(), m.entries().end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

bool is_symmetric(const Matrix& m) {
    if (!m.square() || !all_finite(m)) return false;
    const double tol = 1e-9 * (1.0 + m.max_abs());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > tol) return false;
    return true;
}

void require_symmetric(const Matrix& m) {
    if (!m.square()) throw std::invalid_argument("expected a square matrix");
    if (!all_finite(m)) throw std::invalid_argument("matrix contains NaN or Inf entries");
    if (!is_symmetric(m)) throw std::invalid_argument("matrix is not symmetric");
}

SymmetricEigen eigen_symmetric(const Matrix& input) {
    require_symmetric(input);
    const std::size_t n = input.rows();
    Matrix a = input;
    // Symmetrize exactly so rotations act on a truly symmetric matrix.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
    Matrix q = Matrix::identity(n);

    const double threshold = 1e-12 * a.frobenius();
    auto off_diagonal = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    SymmetricEigen out;
    constexpr int kMaxSweeps = 100;
    while (out.sweeps < kMaxSweeps && off_diagonal() > threshold) {
        ++out.sweeps;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                const double apr = a(p, r);
                if (apr == 0.0) continue;
                const double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akr = a(k, r);
                    a(k, p) = c * akp - s * akr;
                    a(k, r) = s * akp + c * akr;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double ark = a(r, k);
                    a(p, k) = c * apk - s * ark;
                    a(r, k) = s * apk + c * ark;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double qkp = q(k, p);
                    const double qkr = q(k, r);
                    q(k, p) = c * qkp - s * qkr;
                    q(k, r) = s * qkp + c * qkr;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        out.values[c] = a(order[c], order[c]);
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, c) = q(k, order[c]);
    }
    return out;
}

namespace {

double rank_cutoff(const Vector& values) {
    const double lmax = values.empty() ? 0.0 : std::max(0.0, values.front());
    return kRankTolerance * lmax;
}

}  // namespace

Matrix pseudo_inverse(const Matrix& m) {
    const SymmetricEigen eig = eigen_symmetric(m);
    const std::size_t n = m.rows();
    Matrix out(n, n);
    const double cutoff = rank_cutoff(eig.values);
    Vector col(n);
    for (std::size_t c = 0; c < n; ++c) {
        const double lambda = eig.values[c];
        if (lambda <= cutoff || lambda <= 0.0) continue;
        for (std::size_t k = 0; k < n; ++k) col[k] = eig.vectors(k, c);
        out.add_outer(col, col, 1.0 / lambda);
    }
    return out;
}

std::size_t rank_symmetric(const Matrix& m) {
    const SymmetricEigen eig = eigen_symmetric(m);
    const double cutoff = rank_cutoff(eig.values);
    return static_cast<std::size_t>(
        std::count_if(eig.values.begin(), eig.values.end(), [&](double l) { return l > cutoff && l > 0.0; }));
}

bool in_image(const Matrix& m, std::span<const double> v) {
    if (!m.square() || m.rows() != v.size()) throw std::invalid_argument("in_image: dimension mismatch");
    const Vector projected = m * std::span<const double>(pseudo_inverse(m) * v);
    double residual = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) residual += (v[i] - projected[i]) * (v[i] - projected[i]);
    return std::sqrt(residual) <= 1e-8 * (1.0 + norm2(v));
}

bool psd_dominates(const Matrix& a, const Matrix& b, double slack) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("psd_dominates: shape mismatch");
    const SymmetricEigen eig = eigen_symmetric(a - b);
    return eig.values.empty() || eig.values.back() >= -slack;
}

Matrix orthonormal_span_basis(std::span<const Vector> vectors) {
    if (vectors.empty()) return Matrix();
    const std::size_t n = vectors.front().size();
    Matrix gram(n, n);
    for (const Vector& v : vectors) gram.add_outer(v, v);
    const SymmetricEigen eig = eigen_symmetric(gram);
    const double cutoff = rank_cutoff(eig.values);
    std::size_t r = 0;
    while (r < n && eig.values[r] > cutoff && eig.values[r] > 0.0) ++r;
    Matrix basis(r, n);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = 0; k < n; ++k) basis(i, k) = eig.vectors(k, i);
    return basis;
}

Matrix spd_inverse(const Matrix& m) {
    if (!m.square()) throw std::invalid_argument("spd_inverse: expected a square matrix");
    const std::size_t n = m.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0)) throw std::domain_error("spd_inverse: matrix is not positive definite");
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    // Invert L column by column, then M^{-1} = L^{-T} L^{-1}.
    Matrix linv(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = c; i < n; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (std::size_t k = c; k < i; ++k) s -= l(i, k) * linv(k, c);
            linv(i, c) = s / l(i, i);
        }
    }
    return linv.transpose() * linv;
}

}  // namespace debias

#pragma once

#include <cstddef>
#include <vector>

namespace kdvb {

/// Dense square matrix, row-major. Sized for this library's N x N work
/// (N <= ~64); no banded storage, clarity over cache tricks.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    [[nodiscard]] static Matrix identity(std::size_t n);

    [[nodiscard]] double trace() const noexcept;
    [[nodiscard]] double frobenius_norm() const noexcept;
    [[nodiscard]] double max_abs() const noexcept;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double scalar) noexcept;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

[[nodiscard]] Matrix operator*(const Matrix& a, const Matrix& b);
[[nodiscard]] Matrix operator+(Matrix a, const Matrix& b);
[[nodiscard]] Matrix operator-(Matrix a, const Matrix& b);
[[nodiscard]] Matrix operator*(double s, Matrix a);

/// Commutator [A, B] = AB - BA.
[[nodiscard]] Matrix commutator(const Matrix& a, const Matrix& b);

/// Solves A x = b in place by Gaussian elimination with partial pivoting.
/// Returns false if a pivot falls below singular_tol times the row scale;
/// a and b are clobbered either way.
bool solve_linear_inplace(std::vector<double>& a, std::vector<double>& b, std::size_t n,
                          double singular_tol = 1e-14);

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method, ascending.
/// Input is copied; intended for the small Gram matrices of the rank checks.
[[nodiscard]] std::vector<double> symmetric_eigenvalues(const Matrix& m);

/// Singular values (ascending) of a general r x c matrix given in row-major
/// order, via eigenvalues of the r x r Gram matrix M M^T (requires r <= c).
[[nodiscard]] std::vector<double> singular_values(const std::vector<double>& m, std::size_t rows,
                                                  std::size_t cols);

}  // namespace kdvb

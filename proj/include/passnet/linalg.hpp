#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace passnet::linalg {

// Dense row-major real matrix. Only what the certificates and the simulator need.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const noexcept { return data_; }

  Matrix transpose() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& lhs, const Matrix& rhs);
std::vector<double> operator*(const Matrix& lhs, std::span<const double> v);

// Real symmetric matrix. Only the lower triangle is stored, so symmetry holds
// exactly for every instance.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t dim);

  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);
  // Rejects inputs whose mirrored entries differ by more than `tol`.
  static SymMatrix from_dense(const Matrix& m, double tol = 0.0);

  std::size_t dim() const noexcept { return dim_; }

  double operator()(std::size_t i, std::size_t j) const { return packed_[index(i, j)]; }
  void set(std::size_t i, std::size_t j, double value) { packed_[index(i, j)] = value; }
  void add(std::size_t i, std::size_t j, double value) { packed_[index(i, j)] += value; }

  double max_abs() const;
  double trace() const;
  double frobenius() const;
  Matrix to_dense() const;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    return i * (i + 1) / 2 + j;
  }

  std::size_t dim_;
  std::vector<double> packed_;
};

struct EigenResult {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // column k pairs with eigenvalues[k]
  int iterations = 0;               // Jacobi sweeps performed
  bool converged = false;
};

// Cyclic Jacobi eigen-decomposition. Convergence is declared once the
// off-diagonal Frobenius norm drops to tol * ||A||_F. Throws NonConvergence
// when the sweep cap (50 * dim^2) is hit or an eigenpair residual exceeds
// 10 * tol * ||A||_F.
EigenResult sym_eigvals(const SymMatrix& a, double tol = 1e-12);

struct PsdResult {
  bool verdict = false;
  double min_eig = 0.0;
};

// 1e-9 * dim * max|a_ij|
double default_psd_tolerance(const SymMatrix& a);

// verdict = (min_eig >= -tol); tol defaults to default_psd_tolerance(a).
PsdResult is_psd(const SymMatrix& a, std::optional<double> tol = std::nullopt);

}  // namespace passnet::linalg

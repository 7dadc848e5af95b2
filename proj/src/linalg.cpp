#include "passnet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "passnet/errors.hpp"

namespace passnet::linalg {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.cols() != rhs.rows())
    throw DimensionMismatch("matrix product: " + std::to_string(lhs.cols()) + " columns vs " +
                            std::to_string(rhs.rows()) + " rows");
  Matrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i)
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const double a = lhs(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

std::vector<double> operator*(const Matrix& lhs, std::span<const double> v) {
  if (lhs.cols() != v.size())
    throw DimensionMismatch("matrix-vector product: " + std::to_string(lhs.cols()) +
                            " columns vs vector of " + std::to_string(v.size()));
  std::vector<double> out(lhs.rows(), 0.0);
  for (std::size_t i = 0; i < lhs.rows(); ++i) {
    const auto r = lhs.row(i);
    out[i] = std::inner_product(r.begin(), r.end(), v.begin(), 0.0);
  }
  return out;
}

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), packed_(dim * (dim + 1) / 2, 0.0) {
  if (dim == 0) throw DimensionMismatch("symmetric matrix dimension must be at least 1");
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.set(i, i, diag[i]);
  return m;
}

SymMatrix SymMatrix::from_dense(const Matrix& m, double tol) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("symmetric matrix from " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + " input");
  SymMatrix s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol)
        throw InputError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                         std::to_string(j) + ")");
      s.set(i, j, m(i, j));
    }
  return s;
}

double SymMatrix::max_abs() const {
  double best = 0.0;
  for (double v : packed_) best = std::max(best, std::abs(v));
  return best;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double SymMatrix::frobenius() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = (*this)(i, j);
      sum += (i == j ? 1.0 : 2.0) * v * v;
    }
  return std::sqrt(sum);
}

Matrix SymMatrix::to_dense() const {
  Matrix m(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) sum += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(sum);
}

// Annihilates a(p, q) with a plane rotation applied from both sides, and
// accumulates the rotation into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
  const double c = 1.0 / std::hypot(t, 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();

  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

EigenResult sym_eigvals(const SymMatrix& input, double tol) {
  if (!(tol > 0.0)) throw InputError("eigensolver tolerance must be positive");
  const std::size_t n = input.dim();
  const double scale = input.frobenius();
  Matrix a = input.to_dense();
  Matrix v = Matrix::identity(n);

  EigenResult result;
  const int max_sweeps = static_cast<int>(50 * n * n);
  const double threshold = tol * scale;
  while (off_diagonal_norm(a) > threshold) {
    if (result.iterations >= max_sweeps)
      throw NonConvergence("Jacobi eigensolver did not converge after " +
                           std::to_string(max_sweeps) + " sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    ++result.iterations;
  }
  result.converged = true;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return a(l, l) < a(r, r); });
  result.eigenvalues.resize(n);
  result.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    result.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) result.eigenvectors(i, k) = v(i, order[k]);
  }

  // Residual check ||A v - lambda v|| against the untouched input.
  const double eps = std::numeric_limits<double>::epsilon();
  const double allowed =
      std::max(10.0 * tol, 64.0 * static_cast<double>(n) * eps) * std::max(scale, 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = -result.eigenvalues[k] * result.eigenvectors(i, k);
      for (std::size_t j = 0; j < n; ++j) r += input(i, j) * result.eigenvectors(j, k);
      sum += r * r;
    }
    if (std::sqrt(sum) > allowed)
      throw NonConvergence("eigenpair " + std::to_string(k) + " residual " +
                           std::to_string(std::sqrt(sum)) + " exceeds " + std::to_string(allowed));
  }
  return result;
}

double default_psd_tolerance(const SymMatrix& a) {
  return 1e-9 * static_cast<double>(a.dim()) * a.max_abs();
}

PsdResult is_psd(const SymMatrix& a, std::optional<double> tol) {
  const double t = tol.value_or(default_psd_tolerance(a));
  if (t < 0.0) throw InputError("PSD tolerance must be non-negative");
  const auto eig = sym_eigvals(a);
  const double min_eig = eig.eigenvalues.front();
  return {min_eig >= -t, min_eig};
}

}  // namespace passnet::linalg

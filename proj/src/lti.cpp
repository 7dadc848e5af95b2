#include "passnet/lti.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace passnet::lti {

namespace {

using K = LtiError::Kind;

std::string poly_string(std::span<const double> c) {
  std::string out = "[";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(c[i]);
  }
  return out + "]";
}

// Routh array; true iff every root of `p` (descending, p[0] != 0) has
// strictly negative real part.
bool routh_hurwitz(std::vector<double> p) {
  if (p.size() <= 1) return true;
  if (p[0] < 0)
    for (double& v : p) v = -v;
  double scale = 0.0;
  for (double v : p) scale = std::max(scale, std::abs(v));
  const double zero_tol = 1e-12 * scale;

  std::vector<double> upper, lower;
  for (std::size_t i = 0; i < p.size(); i += 2) upper.push_back(p[i]);
  for (std::size_t i = 1; i < p.size(); i += 2) lower.push_back(p[i]);
  const std::size_t rows = p.size();
  for (std::size_t r = 1; r < rows; ++r) {
    if (lower.empty() || !(lower[0] > zero_tol)) return false;
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < upper.size(); ++i) {
      const double right = i + 1 < lower.size() ? lower[i + 1] : 0.0;
      next.push_back((lower[0] * upper[i + 1] - upper[0] * right) / lower[0]);
    }
    upper = std::move(lower);
    lower = std::move(next);
  }
  return true;
}

double real_part(const RationalTransfer& h, double omega) { return freq_response(h, omega).real(); }

}  // namespace

RationalTransfer tf_new(std::vector<double> num, std::vector<double> den) {
  if (num.empty() || den.empty())
    throw LtiError(K::EmptyCoefficients, "transfer function coefficient lists must be nonempty");
  if (den.front() == 0.0)
    throw LtiError(K::ZeroLeadingDenominator, "leading denominator coefficient is zero");
  for (double v : num)
    if (!std::isfinite(v)) throw LtiError(K::EmptyCoefficients, "non-finite numerator coefficient");
  for (double v : den)
    if (!std::isfinite(v)) throw LtiError(K::EmptyCoefficients, "non-finite denominator coefficient");

  const auto first_nonzero = std::find_if(num.begin(), num.end(), [](double v) { return v != 0.0; });
  if (first_nonzero == num.end()) throw LtiError(K::ZeroNumerator, "numerator is identically zero");
  num.erase(num.begin(), first_nonzero);
  if (num.size() >= den.size())
    throw LtiError(K::NotStrictlyProper, "transfer function " + poly_string(num) + " / " +
                                             poly_string(den) + " is not strictly proper");

  const double lead = den.front();
  for (double& v : num) v /= lead;
  for (double& v : den) v /= lead;
  return RationalTransfer(std::move(num), std::move(den));
}

Complex polyval(std::span<const double> coeffs, Complex s) {
  Complex acc{0.0, 0.0};
  for (double c : coeffs) acc = acc * s + c;
  return acc;
}

Complex freq_response(const RationalTransfer& h, double omega) {
  const Complex s{0.0, omega};
  const Complex d = polyval(h.den(), s);
  if (std::abs(d) <= 1e-12)
    throw LtiError(K::PoleAtFrequency, "transfer function has a pole at omega = " + std::to_string(omega));
  return polyval(h.num(), s) / d;
}

StateSpace realize(const RationalTransfer& h) {
  const std::size_t m = h.order();
  StateSpace ss{linalg::Matrix(m, m), std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
  for (std::size_t i = 0; i + 1 < m; ++i) ss.a(i, i + 1) = 1.0;
  // den = s^m + d1 s^{m-1} + ... + dm; last row is [-dm, ..., -d1].
  for (std::size_t j = 0; j < m; ++j) ss.a(m - 1, j) = 0.0 - h.den()[m - j];
  ss.b[m - 1] = 1.0;
  // num padded to m coefficients, C = [c0, c1, ..., c_{m-1}] (ascending powers).
  const auto& num = h.num();
  for (std::size_t j = 0; j < num.size(); ++j) ss.c[j] = num[num.size() - 1 - j];
  return ss;
}

Complex freq_response(const StateSpace& ss, double omega) {
  const std::size_t m = ss.order();
  // Solve (j omega I - A) x = B.
  std::vector<Complex> mat(m * m);
  std::vector<Complex> rhs(ss.b.begin(), ss.b.end());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      mat[i * m + j] = Complex{-ss.a(i, j), i == j ? omega : 0.0};
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(mat[r * m + col]) > std::abs(mat[pivot * m + col])) pivot = r;
    if (std::abs(mat[pivot * m + col]) <= 1e-300)
      throw LtiError(K::PoleAtFrequency, "state matrix has an eigenvalue at j" + std::to_string(omega));
    if (pivot != col) {
      for (std::size_t j = 0; j < m; ++j) std::swap(mat[col * m + j], mat[pivot * m + j]);
      std::swap(rhs[col], rhs[pivot]);
    }
    for (std::size_t r = col + 1; r < m; ++r) {
      const Complex f = mat[r * m + col] / mat[col * m + col];
      for (std::size_t j = col; j < m; ++j) mat[r * m + j] -= f * mat[col * m + j];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<Complex> x(m);
  for (std::size_t i = m; i-- > 0;) {
    Complex acc = rhs[i];
    for (std::size_t j = i + 1; j < m; ++j) acc -= mat[i * m + j] * x[j];
    x[i] = acc / mat[i * m + i];
  }
  Complex y{0.0, 0.0};
  for (std::size_t i = 0; i < m; ++i) y += ss.c[i] * x[i];
  return y;
}

PoleScreen screen_poles(const RationalTransfer& h) {
  const auto& den = h.den();
  double scale = 0.0;
  for (double v : den) scale = std::max(scale, std::abs(v));
  PoleScreen screen;
  std::size_t keep = den.size();
  while (keep > 1 && std::abs(den[keep - 1]) <= 1e-14 * scale) {
    --keep;
    ++screen.origin_poles;
  }
  screen.remainder_hurwitz = routh_hurwitz({den.begin(), den.begin() + static_cast<long>(keep)});
  return screen;
}

std::vector<double> log_grid(double omega_min, double omega_max, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double lo = std::log10(omega_min);
  const double step = (std::log10(omega_max) - lo) / (points - 1);
  for (int k = 0; k < points; ++k) grid[k] = std::pow(10.0, lo + step * k);
  grid.front() = omega_min;
  grid.back() = omega_max;
  return grid;
}

std::vector<double> real_part_sweep(const RationalTransfer& h, std::span<const double> omegas) {
  std::vector<double> out(omegas.size());
  const long count = static_cast<long>(omegas.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < count; ++k) out[k] = real_part(h, omegas[k]);
  return out;
}

std::vector<double> real_part_sweep_serial(const RationalTransfer& h, std::span<const double> omegas) {
  std::vector<double> out(omegas.size());
  for (std::size_t k = 0; k < omegas.size(); ++k) out[k] = real_part(h, omegas[k]);
  return out;
}

IfpEstimate ifp_index_estimate(const RationalTransfer& h, double omega_min, double omega_max, int points) {
  if (!(omega_min > 0.0) || !(omega_max > omega_min))
    throw LtiError(K::InvalidSweep, "frequency range must satisfy 0 < omega_min < omega_max");
  if (points < 64) throw LtiError(K::InvalidSweep, "frequency sweep needs at least 64 points");

  const auto screen = screen_poles(h);
  if (screen.origin_poles > 1)
    throw LtiError(K::UnstablePoles, "repeated pole at the origin (" +
                                         std::to_string(screen.origin_poles) + ")");
  if (!screen.remainder_hurwitz)
    throw LtiError(K::UnstablePoles, "denominator " + poly_string(h.den()) +
                                         " has poles in the closed right half-plane off the origin");

  const auto grid = log_grid(omega_min, omega_max, points);
  const auto values = real_part_sweep(h, grid);

  IfpEstimate est;
  est.grid_points = points;
  const auto best = std::min_element(values.begin(), values.end());
  std::size_t k = static_cast<std::size_t>(best - values.begin());
  est.nu = *best;
  est.argmin_omega = grid[k];

  for (double divisor : {10.0, 100.0, 1000.0}) {
    const double omega = omega_min / divisor;
    const double v = real_part(h, omega);
    if (v < est.nu) {
      est.nu = v;
      est.argmin_omega = omega;
    }
  }

  if (est.argmin_omega == grid[k]) {
    // Golden-section search on the bracket formed by the neighbouring grid points.
    double lo = grid[k == 0 ? 0 : k - 1];
    double hi = grid[std::min(k + 1, grid.size() - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = real_part(h, x1);
    double f2 = real_part(h, x2);
    while (hi - lo >= 1e-6 * est.argmin_omega) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = real_part(h, x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = real_part(h, x2);
      }
    }
    est.refined = true;
    const double x = f1 < f2 ? x1 : x2;
    const double f = std::min(f1, f2);
    if (f < est.nu) {
      est.nu = f;
      est.argmin_omega = x;
    }
  }
  return est;
}

}  // namespace passnet::lti

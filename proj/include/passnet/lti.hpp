#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "passnet/errors.hpp"
#include "passnet/linalg.hpp"

namespace passnet::lti {

using Complex = std::complex<double>;

class LtiError : public InputError {
 public:
  enum class Kind {
    EmptyCoefficients,
    ZeroLeadingDenominator,
    NotStrictlyProper,
    ZeroNumerator,
    PoleAtFrequency,
    UnstablePoles,
    InvalidSweep
  };

  LtiError(Kind kind, const std::string& what) : InputError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Strictly proper SISO transfer function num(s)/den(s). Coefficients are in
// descending powers of s; den is monic and num has no leading zeros.
class RationalTransfer {
 public:
  const std::vector<double>& num() const noexcept { return num_; }
  const std::vector<double>& den() const noexcept { return den_; }
  std::size_t order() const noexcept { return den_.size() - 1; }

  friend RationalTransfer tf_new(std::vector<double> num, std::vector<double> den);

 private:
  RationalTransfer(std::vector<double> num, std::vector<double> den)
      : num_(std::move(num)), den_(std::move(den)) {}

  std::vector<double> num_;
  std::vector<double> den_;
};

// Normalizes and validates. Throws LtiError (NotStrictlyProper, ZeroNumerator, ...).
RationalTransfer tf_new(std::vector<double> num, std::vector<double> den);

// Horner evaluation of a descending-power polynomial at a complex point.
Complex polyval(std::span<const double> coeffs, Complex s);

// H(j omega). Throws LtiError(PoleAtFrequency) when |den(j omega)| <= 1e-12.
Complex freq_response(const RationalTransfer& h, double omega);

// Controllable canonical realization: companion A, B = e_m, C from the numerator.
struct StateSpace {
  linalg::Matrix a;
  std::vector<double> b;
  std::vector<double> c;

  std::size_t order() const noexcept { return b.size(); }
};

StateSpace realize(const RationalTransfer& h);

// C (j omega I - A)^{-1} B by complex Gaussian elimination.
Complex freq_response(const StateSpace& ss, double omega);

// Number of poles at s = 0 and whether the remaining poles are strictly in the
// open left half-plane (Routh array).
struct PoleScreen {
  std::size_t origin_poles = 0;
  bool remainder_hurwitz = false;
};
PoleScreen screen_poles(const RationalTransfer& h);

struct IfpEstimate {
  double nu = 0.0;            // estimated input-feedforward passivity index
  double argmin_omega = 0.0;  // rad/s
  int grid_points = 0;
  bool refined = false;       // golden-section refinement ran
};

// `points` log-spaced frequencies over [omega_min, omega_max], inclusive.
std::vector<double> log_grid(double omega_min, double omega_max, int points);

// Re H(j omega) over a grid. OpenMP-parallel over frequencies.
std::vector<double> real_part_sweep(const RationalTransfer& h, std::span<const double> omegas);
// Sequential reference for real_part_sweep; results are bit-identical.
std::vector<double> real_part_sweep_serial(const RationalTransfer& h, std::span<const double> omegas);

// Infimum of Re H(j omega): log grid, probes at omega_min/{10,100,1000} for the
// omega -> 0+ limit, then golden-section refinement around the grid minimum.
// The true index can only be lower than what a sampled infimum reports, so the
// result is an upper bound on the index.
// Throws LtiError(UnstablePoles) for open right-half-plane poles, imaginary-axis
// poles off the origin, or a repeated pole at the origin.
IfpEstimate ifp_index_estimate(const RationalTransfer& h, double omega_min = 1e-4,
                               double omega_max = 1e4, int points = 2048);

}  // namespace passnet::lti

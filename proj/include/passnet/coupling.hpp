#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "passnet/errors.hpp"

namespace passnet::coupling {

class CouplingError : public InputError {
 public:
  using InputError::InputError;
};

// theta(x) = gain * x
struct LinearGain {
  double gain;
};

// theta(x) = gain * sin(x) for |x| < pi/2, gain * x otherwise.
struct SaturatedSine {
  double gain;
};

// Piecewise-linear through the origin and the (x > 0, y) breakpoints, mirrored
// to the negative half so the map is odd. Past the last breakpoint the map
// continues along the ray through the origin and that breakpoint.
struct CustomTable {
  std::vector<std::pair<double, double>> breakpoints;
};

using CouplingKind = std::variant<LinearGain, SaturatedSine, CustomTable>;

// Static odd edge nonlinearity with declared sector [alpha_lo, alpha_hi].
class SectorCoupling {
 public:
  SectorCoupling(CouplingKind kind, double alpha_lo, double alpha_hi);

  static SectorCoupling linear_gain(double gain) { return {LinearGain{gain}, gain, gain}; }

  const CouplingKind& kind() const noexcept { return kind_; }
  double alpha_lo() const noexcept { return alpha_lo_; }
  double alpha_hi() const noexcept { return alpha_hi_; }
  std::string kind_name() const;

  double operator()(double x) const;

 private:
  CouplingKind kind_;
  double alpha_lo_;
  double alpha_hi_;
};

inline double sector_eval(const SectorCoupling& c, double x) { return c(x); }

struct SectorCheck {
  double alpha_lo_observed = 0.0;
  double alpha_hi_observed = 0.0;
  bool odd = true;
  bool pass = false;
};

// Samples theta(x)/x on a symmetric grid of nonzero points in [-range, range]
// and compares against the declared sector (1e-9 slack); also checks oddness.
SectorCheck sector_verify(const SectorCoupling& c, int samples = 20000, double range = 10.0);

// One coupling per edge, in canonical edge order.
class CouplingBank {
 public:
  explicit CouplingBank(std::vector<SectorCoupling> couplings);

  std::size_t size() const noexcept { return couplings_.size(); }
  const SectorCoupling& operator[](std::size_t k) const { return couplings_.at(k); }
  const std::vector<SectorCoupling>& couplings() const noexcept { return couplings_; }

  // min over edges of the lower sector bound
  double alpha_lo_min() const noexcept { return alpha_lo_min_; }
  // per edge 1 / alpha_hi
  std::vector<double> inverse_upper_bounds() const;

 private:
  std::vector<SectorCoupling> couplings_;
  double alpha_lo_min_;
};

// b_k = theta_k(a_k). Throws DimensionMismatch on length mismatch.
std::vector<double> psi_apply(const CouplingBank& bank, std::span<const double> a);
void psi_apply(const CouplingBank& bank, std::span<const double> a, std::span<double> out);

}  // namespace passnet::coupling

#include "passnet/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace passnet::coupling {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double table_positive(const CustomTable& t, double x) {
  const auto& bp = t.breakpoints;
  if (x <= bp.front().first) return bp.front().second / bp.front().first * x;
  for (std::size_t i = 1; i < bp.size(); ++i) {
    if (x <= bp[i].first) {
      const auto [x0, y0] = bp[i - 1];
      const auto [x1, y1] = bp[i];
      return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
  }
  return bp.back().second / bp.back().first * x;
}

}  // namespace

SectorCoupling::SectorCoupling(CouplingKind kind, double alpha_lo, double alpha_hi)
    : kind_(std::move(kind)), alpha_lo_(alpha_lo), alpha_hi_(alpha_hi) {
  if (!(alpha_lo > 0.0) || !std::isfinite(alpha_lo))
    throw CouplingError("lower sector bound must be positive and finite");
  if (!(alpha_hi >= alpha_lo) || !std::isfinite(alpha_hi))
    throw CouplingError("upper sector bound must be finite and at least the lower bound");
  std::visit(overloaded{
                 [](const LinearGain& g) {
                   if (!(g.gain > 0.0)) throw CouplingError("linear gain must be positive");
                 },
                 [](const SaturatedSine& s) {
                   if (!(s.gain > 0.0)) throw CouplingError("saturated sine gain must be positive");
                 },
                 [](const CustomTable& t) {
                   if (t.breakpoints.empty()) throw CouplingError("custom table needs breakpoints");
                   double last = 0.0;
                   for (const auto& [x, y] : t.breakpoints) {
                     if (!(x > last) || !std::isfinite(x) || !std::isfinite(y))
                       throw CouplingError("custom table breakpoints need strictly increasing x > 0");
                     last = x;
                   }
                 },
             },
             kind_);
}

std::string SectorCoupling::kind_name() const {
  return std::visit(overloaded{
                        [](const LinearGain&) { return std::string("linear_gain"); },
                        [](const SaturatedSine&) { return std::string("saturated_sine"); },
                        [](const CustomTable&) { return std::string("custom_table"); },
                    },
                    kind_);
}

double SectorCoupling::operator()(double x) const {
  return std::visit(overloaded{
                        [x](const LinearGain& g) { return g.gain * x; },
                        [x](const SaturatedSine& s) {
                          return std::abs(x) < std::numbers::pi / 2 ? s.gain * std::sin(x) : s.gain * x;
                        },
                        [x](const CustomTable& t) {
                          if (x == 0.0) return 0.0;
                          const double v = table_positive(t, std::abs(x));
                          return x > 0 ? v : -v;
                        },
                    },
                    kind_);
}

SectorCheck sector_verify(const SectorCoupling& c, int samples, double range) {
  if (samples < 1000) throw InputError("sector verification needs at least 1000 samples");
  if (!(range > 0.0)) throw InputError("sector verification range must be positive");
  SectorCheck check;
  check.alpha_lo_observed = std::numeric_limits<double>::infinity();
  check.alpha_hi_observed = -std::numeric_limits<double>::infinity();
  const int half = samples / 2;
  for (int k = 0; k < half; ++k) {
    const double x = range * (k + 0.5) / half;
    const double fp = c(x);
    const double fn = c(-x);
    if (std::abs(fp + fn) > 1e-12 * (1.0 + std::abs(fp))) check.odd = false;
    for (double ratio : {fp / x, fn / -x}) {
      check.alpha_lo_observed = std::min(check.alpha_lo_observed, ratio);
      check.alpha_hi_observed = std::max(check.alpha_hi_observed, ratio);
    }
  }
  check.pass = check.odd && check.alpha_lo_observed >= c.alpha_lo() - 1e-9 &&
               check.alpha_hi_observed <= c.alpha_hi() + 1e-9 && c(0.0) == 0.0;
  return check;
}

CouplingBank::CouplingBank(std::vector<SectorCoupling> couplings) : couplings_(std::move(couplings)) {
  if (couplings_.empty()) throw CouplingError("coupling bank is empty");
  alpha_lo_min_ = std::numeric_limits<double>::infinity();
  for (const auto& c : couplings_) alpha_lo_min_ = std::min(alpha_lo_min_, c.alpha_lo());
}

std::vector<double> CouplingBank::inverse_upper_bounds() const {
  std::vector<double> out;
  out.reserve(couplings_.size());
  for (const auto& c : couplings_) out.push_back(1.0 / c.alpha_hi());
  return out;
}

void psi_apply(const CouplingBank& bank, std::span<const double> a, std::span<double> out) {
  if (a.size() != bank.size() || out.size() != bank.size())
    throw DimensionMismatch("psi_apply: expected " + std::to_string(bank.size()) + " components, got " +
                            std::to_string(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = bank[k](a[k]);
}

std::vector<double> psi_apply(const CouplingBank& bank, std::span<const double> a) {
  std::vector<double> out(a.size());
  psi_apply(bank, a, out);
  return out;
}

}  // namespace passnet::coupling

#include "passnet/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "passnet/errors.hpp"

namespace passnet::certificates {

namespace {

void check_lengths(const graph::IncidenceMatrix& d, std::span<const double> nu,
                   std::optional<std::span<const double>> lambda) {
  if (nu.size() != d.rows())
    throw DimensionMismatch("index vector has " + std::to_string(nu.size()) + " entries for " +
                            std::to_string(d.rows()) + " agents");
  if (lambda && lambda->size() != d.cols())
    throw DimensionMismatch("edge weight list has " + std::to_string(lambda->size()) + " entries for " +
                            std::to_string(d.cols()) + " edges");
}

}  // namespace

linalg::Matrix dense_edge_gram(const graph::IncidenceMatrix& d, std::span<const double> nu,
                               std::optional<std::span<const double>> lambda) {
  check_lengths(d, nu, lambda);
  const auto dense = d.to_dense();
  linalg::Matrix xi_d(d.rows(), d.cols());
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t k = 0; k < d.cols(); ++k) xi_d(i, k) = nu[i] * dense(i, k);
  auto m = dense.transpose() * xi_d;
  if (lambda)
    for (std::size_t k = 0; k < d.cols(); ++k) m(k, k) += (*lambda)[k];
  return m;
}

EdgeGram edge_gram(const graph::IncidenceMatrix& d, const IndexVector& idx,
                   std::optional<std::span<const double>> lambda) {
  check_lengths(d, idx.nu, lambda);
  const std::size_t p = d.cols();
  EdgeGram gram{linalg::SymMatrix(p), lambda.has_value()};
  const auto& nu = idx.nu;
  for (std::size_t k = 0; k < p; ++k) {
    const auto& ek = d.endpoints(k);
    gram.m.set(k, k, nu[ek.pos] + nu[ek.neg] + (lambda ? (*lambda)[k] : 0.0));
    for (std::size_t l = 0; l < k; ++l) {
      const auto& el = d.endpoints(l);
      // Simple graphs: two distinct edges share at most one node.
      double value = 0.0;
      for (std::size_t node : {ek.pos, ek.neg})
        if (node == el.pos || node == el.neg) value = d(node, k) * d(node, l) * nu[node];
      gram.m.set(k, l, value);
    }
  }

  const auto reference = dense_edge_gram(d, nu, lambda);
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t l = 0; l < p; ++l)
      if (std::abs(reference(k, l) - gram.m(k, l)) > 1e-12)
        throw NumericalError("edge Gram entry (" + std::to_string(k + 1) + ", " + std::to_string(l + 1) +
                             ") disagrees with the dense product");
  return gram;
}

ShortageVerdict shortage_verdict(const IndexVector& idx) {
  ShortageVerdict v;
  v.negative_count = static_cast<int>(std::count_if(idx.nu.begin(), idx.nu.end(), [](double x) { return x < 0.0; }));
  v.compensation_possible = v.negative_count < 2;
  return v;
}

CompensationWeights compensation_weights(const IndexVector& idx) {
  using R = CompensationWeights::Reason;
  CompensationWeights out;
  const auto shortage = shortage_verdict(idx);
  if (shortage.negative_count == 0) {
    out.reason = R::NoShortage;
    return out;
  }
  if (shortage.negative_count >= 2) {
    out.reason = R::MultipleShortages;
    return out;
  }
  const auto neg = static_cast<std::size_t>(
      std::find_if(idx.nu.begin(), idx.nu.end(), [](double x) { return x < 0.0; }) - idx.nu.begin());
  out.shortage_agent = neg;
  const double deficit = std::abs(idx.nu[neg]);

  // Normalizing nu_i s_i >= |nu_neg| sum(s) by sum(s) gives s_i/sum(s) >= |nu_neg|/nu_i;
  // summing over i shows sum_i |nu_neg|/nu_i <= 1 is necessary, and
  // s_i proportional to 1/nu_i attains it.
  double inverse_sum = 0.0;
  bool zero_surplus = false;
  for (std::size_t i = 0; i < idx.nu.size(); ++i) {
    if (i == neg) continue;
    out.agents.push_back(i);
    if (idx.nu[i] == 0.0)
      zero_surplus = true;
    else
      inverse_sum += 1.0 / idx.nu[i];
  }
  out.demand = zero_surplus ? std::numeric_limits<double>::infinity() : deficit * inverse_sum;
  if (zero_surplus || out.demand > 1.0) {
    out.reason = R::InsufficientSurplus;
    return out;
  }
  out.feasible = true;
  out.reason = R::Feasible;
  for (std::size_t i : out.agents) out.weights.push_back((1.0 / idx.nu[i]) / inverse_sum);
  return out;
}

std::string to_string(CompensationWeights::Reason r) {
  switch (r) {
    case CompensationWeights::Reason::Feasible: return "feasible";
    case CompensationWeights::Reason::NoShortage: return "no_shortage";
    case CompensationWeights::Reason::MultipleShortages: return "multiple_shortages";
    case CompensationWeights::Reason::InsufficientSurplus: return "insufficient_surplus";
  }
  return "unknown";
}

DominanceCheck scaled_dominance(const linalg::SymMatrix& a, std::span<const double> scaling) {
  if (scaling.size() != a.dim())
    throw DimensionMismatch("scaling has " + std::to_string(scaling.size()) + " entries for a " +
                            std::to_string(a.dim()) + "-dimensional matrix");
  for (double s : scaling)
    if (!(s > 0.0)) throw InputError("dominance scaling entries must be positive");
  DominanceCheck out{true, true, std::vector<double>(a.dim())};
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (j != i) off += std::abs(a(i, j)) * scaling[j];
    out.slack[i] = a(i, i) * scaling[i] - off;
    if (out.slack[i] < 0.0) out.holds = false;
    if (out.slack[i] <= 0.0) out.strict = false;
  }
  out.strict = out.strict && out.holds;
  return out;
}

EdgeCertificate edge_certificate(const graph::Graph& g, const IndexVector& idx,
                                 const coupling::CouplingBank& bank) {
  if (!graph::is_connected(g))
    throw graph::GraphError(graph::GraphError::Kind::Disconnected, std::nullopt,
                            "edge certificate needs a connected graph");
  if (idx.nu.size() != g.node_count())
    throw DimensionMismatch("index vector has " + std::to_string(idx.nu.size()) + " entries for " +
                            std::to_string(g.node_count()) + " agents");
  if (bank.size() != g.edge_count())
    throw DimensionMismatch("coupling bank has " + std::to_string(bank.size()) + " entries for " +
                            std::to_string(g.edge_count()) + " edges");

  EdgeCertificate cert;
  cert.alpha_lo_min = bank.alpha_lo_min();
  cert.beta_bar = idx.beta_bar;
  const auto r = graph::degrees(g);
  const auto& nu = idx.nu;
  cert.all_positive = true;
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    const std::size_t i = g.edge(k).pos;
    const std::size_t j = g.edge(k).neg;
    const double m = 1.0 / bank[k].alpha_hi() + nu[i] + nu[j] - (r[i] - 1) * std::abs(nu[i]) -
                     (r[j] - 1) * std::abs(nu[j]);
    cert.margins.push_back(m);
    if (!(m > 0.0)) cert.all_positive = false;
  }

  const auto lambda = bank.inverse_upper_bounds();
  const auto gram = edge_gram(graph::incidence(g), idx, std::span<const double>(lambda));
  cert.kappa = linalg::sym_eigvals(gram.m).eigenvalues.front();
  if (cert.all_positive && !(cert.kappa > 0.0))
    throw NumericalError("positive edge margins but smallest eigenvalue " + std::to_string(cert.kappa) +
                         " is not positive");
  if (cert.kappa > 0.0) {
    cert.rho = 1.0 / (cert.kappa * cert.alpha_lo_min) + 1.0;
    cert.sigma = std::sqrt(2.0 * std::abs(cert.beta_bar) / cert.kappa) / cert.alpha_lo_min;
  }
  return cert;
}

CertificateReport certify(const graph::Graph& g, const IndexVector& idx, const coupling::CouplingBank& bank) {
  CertificateReport report;
  report.shortage = shortage_verdict(idx);
  report.open_loop = linalg::is_psd(edge_gram(graph::incidence(g), idx).m);
  report.compensation = compensation_weights(idx);
  report.edges = edge_certificate(g, idx, bank);
  return report;
}

}  // namespace passnet::certificates

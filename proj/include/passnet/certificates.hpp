#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "passnet/coupling.hpp"
#include "passnet/graph.hpp"
#include "passnet/linalg.hpp"

namespace passnet::certificates {

// Per-agent input-feedforward passivity indices nu_i, plus the summed
// storage offsets beta_bar (zero for agents starting at rest).
struct IndexVector {
  std::vector<double> nu;
  double beta_bar = 0.0;
};

// D^T diag(nu) D, optionally plus diag(lambda).
struct EdgeGram {
  linalg::SymMatrix m{1};
  bool lambda_included = false;
};

// Assembles the Gram entry by entry from edge endpoints: diagonal nu_i + nu_j
// (+ lambda_k), off-diagonal +-nu_shared for edges meeting at a node (sign by
// orientation agreement), zero otherwise. The result is cross-checked against
// the dense triple product and a mismatch above 1e-12 throws NumericalError.
EdgeGram edge_gram(const graph::IncidenceMatrix& d, const IndexVector& idx,
                   std::optional<std::span<const double>> lambda = std::nullopt);

// Dense D^T diag(nu) D (+ diag(lambda)). Reference path for edge_gram.
linalg::Matrix dense_edge_gram(const graph::IncidenceMatrix& d, std::span<const double> nu,
                               std::optional<std::span<const double>> lambda = std::nullopt);

// Two or more strictly negative indices make D^T Xi D indefinite for any
// topology, so agent-to-agent compensation is impossible. This is a statement
// about the open loop D^T diag(H) D and the index argument, not about
// closed-loop divergence.
struct ShortageVerdict {
  bool compensation_possible = true;
  int negative_count = 0;
};
ShortageVerdict shortage_verdict(const IndexVector& idx);

// Weights certifying that a single passivity shortage is absorbed by the
// surplus of the others: nu_i >= (sum s) / s_i * |nu_neg| for every other agent.
struct CompensationWeights {
  enum class Reason { Feasible, NoShortage, MultipleShortages, InsufficientSurplus };

  bool feasible = false;
  Reason reason = Reason::InsufficientSurplus;
  std::optional<std::size_t> shortage_agent;  // 0-based
  // sum_i |nu_neg| / nu_i over the remaining agents; feasible iff <= 1
  double demand = 0.0;
  std::vector<std::size_t> agents;  // 0-based agents the weights refer to
  std::vector<double> weights;      // normalized to sum 1, empty when infeasible
};
CompensationWeights compensation_weights(const IndexVector& idx);
std::string to_string(CompensationWeights::Reason r);

// Scaled diagonal dominance: a_ii s_i >= sum_{j != i} |a_ij| s_j for every row.
// Holding implies A is PSD, strictness implies PD.
struct DominanceCheck {
  bool holds = false;
  bool strict = false;
  std::vector<double> slack;
};
DominanceCheck scaled_dominance(const linalg::SymMatrix& a, std::span<const double> scaling);

// Edge-local consensus certificate. Each edge (i, j) needs
//   1/alpha_hi_ij + nu_i + nu_j - (r_i - 1)|nu_i| - (r_j - 1)|nu_j| > 0,
// which makes D^T Xi D + Lambda (Lambda_kk = 1/alpha_hi_k) strictly dominant.
// With kappa its smallest eigenvalue, ||D^T Y||_T <= rho ||D^T W||_T + sigma,
//   rho = 1/(kappa alpha_lo) + 1,  sigma = sqrt(2|beta_bar|/kappa) / alpha_lo.
struct EdgeCertificate {
  std::vector<double> margins;  // per edge, canonical order
  bool all_positive = false;
  double kappa = 0.0;
  std::optional<double> rho;    // present when kappa > 0
  std::optional<double> sigma;  // present when kappa > 0
  double alpha_lo_min = 0.0;
  double beta_bar = 0.0;
};
EdgeCertificate edge_certificate(const graph::Graph& g, const IndexVector& idx,
                                 const coupling::CouplingBank& bank);

struct CertificateReport {
  ShortageVerdict shortage;
  linalg::PsdResult open_loop;  // PSD test of D^T Xi D
  CompensationWeights compensation;
  EdgeCertificate edges;
};
CertificateReport certify(const graph::Graph& g, const IndexVector& idx, const coupling::CouplingBank& bank);

}  // namespace passnet::certificates

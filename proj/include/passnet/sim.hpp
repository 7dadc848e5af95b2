#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "passnet/coupling.hpp"
#include "passnet/graph.hpp"
#include "passnet/linalg.hpp"
#include "passnet/lti.hpp"

namespace passnet::sim {

// Agents y_i = H_i u_i diffusively coupled by u = -D Psi(D^T (Y + W)).
class NetworkModel {
 public:
  NetworkModel(graph::Graph g, std::vector<lti::StateSpace> agents, coupling::CouplingBank bank);

  const graph::Graph& graph() const noexcept { return graph_; }
  const graph::IncidenceMatrix& incidence() const noexcept { return incidence_; }
  const std::vector<lti::StateSpace>& agents() const noexcept { return agents_; }
  const coupling::CouplingBank& bank() const noexcept { return bank_; }

  std::size_t agent_count() const noexcept { return agents_.size(); }
  std::size_t edge_count() const noexcept { return bank_.size(); }
  std::size_t state_dim() const noexcept { return offsets_.back(); }
  // First state index of agent i; offset(agent_count()) == state_dim().
  std::size_t offset(std::size_t i) const { return offsets_.at(i); }

 private:
  graph::Graph graph_;
  graph::IncidenceMatrix incidence_;
  std::vector<lti::StateSpace> agents_;
  coupling::CouplingBank bank_;
  std::vector<std::size_t> offsets_;
};

// Realizes every transfer function. Throws DimensionMismatch on count mismatch.
NetworkModel assemble(const graph::Graph& g, std::span<const lti::RationalTransfer> tfs,
                      const coupling::CouplingBank& bank);

enum class NoiseKind { None, GaussianZoh };

struct NoiseConfig {
  NoiseKind kind = NoiseKind::None;
  double amplitude = 0.0;
  std::uint64_t seed = 1;
};

struct SimConfig {
  double dt = 1e-3;
  double t_final = 100.0;
  std::vector<double> y0;  // initial outputs, one per agent
  NoiseConfig noise;
  int record_stride = 1;

  void validate(std::size_t agent_count) const;
  std::size_t steps() const;
};

// Minimum-norm x_i(0) with C_i x_i(0) = y0_i for every agent.
std::vector<double> initial_state(const NetworkModel& model, std::span<const double> y0);

// Counter-based N(0, 1) draw keyed by (seed, agent, step); independent of call order.
double standard_normal(std::uint64_t seed, std::uint64_t agent, std::uint64_t step);

// n x steps matrix of amplitude * N(0, 1) samples held over each step (zeros for NoiseKind::None).
linalg::Matrix noise_sequence(const SimConfig& cfg, std::size_t n, std::size_t steps);

// One classical RK4 step of the closed loop with the noise w held constant.
// Throws NonFinite when the new state is not finite.
std::vector<double> step_rk4(const NetworkModel& model, std::span<const double> x, std::span<const double> w,
                             double dt);

struct SimulationResult {
  std::uint64_t seed = 0;
  std::vector<double> t;
  linalg::Matrix y, u, w;  // records x agents
  linalg::Matrix v, dy;    // records x edges; v = Psi(D^T(Y+W)), dy = D^T Y
  // Running truncated L2 norms over [0, t] (trapezoidal over every step).
  std::vector<double> norm_dy, norm_dw, norm_v;
  // Final ||D^T Y||_T / ||D^T W||_T; absent when W is identically zero.
  std::optional<double> rho_hat;
  // Running trapezoidal <D^T(Y+W), V>_T and sum_k ||V_k||_T^2 / alpha_hi_k.
  double coupling_supply = 0.0;
  double coupling_bound = 0.0;
};

SimulationResult run(const NetworkModel& model, const SimConfig& cfg);

// Independent runs, one per seed, OpenMP-parallel across seeds. Results come
// back sorted by seed.
std::vector<SimulationResult> run_batch(const NetworkModel& model, const SimConfig& cfg,
                                        std::span<const std::uint64_t> seeds);
// Sequential reference for run_batch; results are bit-identical.
std::vector<SimulationResult> run_batch_serial(const NetworkModel& model, const SimConfig& cfg,
                                               std::span<const std::uint64_t> seeds);

struct ConsensusMetrics {
  std::optional<double> rho_hat;
  // sup over recorded T of ||D^T Y||_T - rho_cert ||D^T W||_T
  double sigma_hat = 0.0;
  // sigma_hat finite and its running sup flat over the last 20% of the horizon
  bool bound_ok = false;
};

ConsensusMetrics consensus_metrics(const SimulationResult& res, double rho_cert);

// Output of a single agent driven by a zero-order-held input from rest, using
// the same RK4 integrator; y has u_held.size() + 1 samples.
std::vector<double> respond(const lti::StateSpace& agent, std::span<const double> u_held, double dt);

}  // namespace passnet::sim

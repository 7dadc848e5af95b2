#include "passnet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "passnet/errors.hpp"

namespace passnet::sim {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// (0, 1]
double unit_open(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53; }

// Closed-loop vector field with preallocated scratch buffers.
class ClosedLoop {
 public:
  explicit ClosedLoop(const NetworkModel& model)
      : model_(model),
        y_(model.agent_count()),
        a_(model.edge_count()),
        b_(model.edge_count()),
        u_(model.agent_count()) {}

  void outputs(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < model_.agent_count(); ++i) {
      const auto& c = model_.agents()[i].c;
      const double* xi = x.data() + model_.offset(i);
      y[i] = std::inner_product(c.begin(), c.end(), xi, 0.0);
    }
  }

  // a = D^T (Y + W), b = Psi(a), u = -D b
  void couple(std::span<const double> y, std::span<const double> w, std::span<double> a, std::span<double> b,
                std::span<double> u) const {
    const auto& d = model_.incidence();
    for (std::size_t k = 0; k < model_.edge_count(); ++k) {
      const auto& e = d.endpoints(k);
      a[k] = (y[e.pos] + w[e.pos]) - (y[e.neg] + w[e.neg]);
    }
    coupling::psi_apply(model_.bank(), a, b);
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t k = 0; k < model_.edge_count(); ++k) {
      const auto& e = d.endpoints(k);
      u[e.pos] -= b[k];
      u[e.neg] += b[k];
    }
  }

  void derivative(std::span<const double> x, std::span<const double> w, std::span<double> dx) {
    outputs(x, y_);
    couple(y_, w, a_, b_, u_);
    for (std::size_t i = 0; i < model_.agent_count(); ++i) {
      const auto& ag = model_.agents()[i];
      const std::size_t off = model_.offset(i);
      const std::size_t m = ag.order();
      for (std::size_t r = 0; r < m; ++r) {
        double acc = ag.b[r] * u_[i];
        for (std::size_t c = 0; c < m; ++c) acc += ag.a(r, c) * x[off + c];
        dx[off + r] = acc;
      }
    }
  }

 private:
  const NetworkModel& model_;
  std::vector<double> y_, a_, b_, u_;
};

class Rk4 {
 public:
  explicit Rk4(std::size_t dim) : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

  template <class Field>
  void step(Field&& f, std::span<double> x, double dt) {
    const std::size_t n = x.size();
    f(std::span<const double>(x), std::span<double>(k1_));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k1_[i];
    f(std::span<const double>(tmp_), std::span<double>(k2_));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k2_[i];
    f(std::span<const double>(tmp_), std::span<double>(k3_));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + dt * k3_[i];
    f(std::span<const double>(tmp_), std::span<double>(k4_));
    for (std::size_t i = 0; i < n; ++i) x[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }

 private:
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

double squared_norm(std::span<const double> v) { return std::inner_product(v.begin(), v.end(), v.begin(), 0.0); }

}  // namespace

NetworkModel::NetworkModel(graph::Graph g, std::vector<lti::StateSpace> agents, coupling::CouplingBank bank)
    : graph_(std::move(g)), incidence_(graph_), agents_(std::move(agents)), bank_(std::move(bank)) {
  if (agents_.size() != graph_.node_count())
    throw DimensionMismatch(std::to_string(agents_.size()) + " agents for a graph with " +
                            std::to_string(graph_.node_count()) + " nodes");
  if (bank_.size() != graph_.edge_count())
    throw DimensionMismatch(std::to_string(bank_.size()) + " couplings for a graph with " +
                            std::to_string(graph_.edge_count()) + " edges");
  offsets_.push_back(0);
  for (const auto& ag : agents_) offsets_.push_back(offsets_.back() + ag.order());
}

NetworkModel assemble(const graph::Graph& g, std::span<const lti::RationalTransfer> tfs,
                      const coupling::CouplingBank& bank) {
  if (tfs.size() != g.node_count())
    throw DimensionMismatch(std::to_string(tfs.size()) + " transfer functions for a graph with " +
                            std::to_string(g.node_count()) + " nodes");
  std::vector<lti::StateSpace> agents;
  agents.reserve(tfs.size());
  for (const auto& h : tfs) agents.push_back(lti::realize(h));
  return NetworkModel(g, std::move(agents), bank);
}

void SimConfig::validate(std::size_t agent_count) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time step must be positive");
  if (!(t_final >= dt) || !std::isfinite(t_final)) throw InputError("final time must be at least one time step");
  if (record_stride < 1) throw InputError("record stride must be at least 1");
  if (y0.size() != agent_count)
    throw DimensionMismatch("initial output vector has " + std::to_string(y0.size()) + " entries for " +
                            std::to_string(agent_count) + " agents");
  if (noise.kind == NoiseKind::GaussianZoh && !(noise.amplitude >= 0.0))
    throw InputError("noise amplitude must be non-negative");
}

std::size_t SimConfig::steps() const { return static_cast<std::size_t>(std::llround(t_final / dt)); }

std::vector<double> initial_state(const NetworkModel& model, std::span<const double> y0) {
  if (y0.size() != model.agent_count())
    throw DimensionMismatch("initial output vector has " + std::to_string(y0.size()) + " entries for " +
                            std::to_string(model.agent_count()) + " agents");
  std::vector<double> x(model.state_dim(), 0.0);
  for (std::size_t i = 0; i < model.agent_count(); ++i) {
    const auto& c = model.agents()[i].c;
    const double cc = squared_norm(c);
    if (cc == 0.0) throw InputError("agent " + std::to_string(i + 1) + " has a zero output map");
    for (std::size_t j = 0; j < c.size(); ++j) x[model.offset(i) + j] = c[j] * y0[i] / cc;
  }
  return x;
}

double standard_normal(std::uint64_t seed, std::uint64_t agent, std::uint64_t step) {
  const std::uint64_t key = mix64(mix64(mix64(seed) ^ agent) ^ step);
  const double u1 = unit_open(mix64(key ^ 0x1ULL));
  const double u2 = unit_open(mix64(key ^ 0x2ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

linalg::Matrix noise_sequence(const SimConfig& cfg, std::size_t n, std::size_t steps) {
  linalg::Matrix w(n, steps);
  if (cfg.noise.kind == NoiseKind::None) return w;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < steps; ++s) w(i, s) = cfg.noise.amplitude * standard_normal(cfg.noise.seed, i, s);
  return w;
}

std::vector<double> step_rk4(const NetworkModel& model, std::span<const double> x, std::span<const double> w,
                             double dt) {
  if (x.size() != model.state_dim() || w.size() != model.agent_count())
    throw DimensionMismatch("state or noise vector does not match the model");
  ClosedLoop loop(model);
  Rk4 rk(x.size());
  std::vector<double> next(x.begin(), x.end());
  rk.step([&](std::span<const double> s, std::span<double> ds) { loop.derivative(s, w, ds); }, next, dt);
  if (!all_finite(next)) throw NonFinite("state became non-finite", dt);
  return next;
}

SimulationResult run(const NetworkModel& model, const SimConfig& cfg) {
  cfg.validate(model.agent_count());
  const std::size_t n = model.agent_count();
  const std::size_t p = model.edge_count();
  const std::size_t steps = cfg.steps();
  const auto stride = static_cast<std::size_t>(cfg.record_stride);
  const std::size_t records = steps / stride + 1 + (steps % stride ? 1 : 0);
  const bool noisy = cfg.noise.kind == NoiseKind::GaussianZoh;
  const auto& d = model.incidence();

  SimulationResult res;
  res.seed = cfg.noise.seed;
  res.t.reserve(records);
  res.y = linalg::Matrix(records, n);
  res.u = linalg::Matrix(records, n);
  res.w = linalg::Matrix(records, n);
  res.v = linalg::Matrix(records, p);
  res.dy = linalg::Matrix(records, p);
  res.norm_dy.reserve(records);
  res.norm_dw.reserve(records);
  res.norm_v.reserve(records);

  ClosedLoop loop(model);
  Rk4 rk(model.state_dim());
  auto x = initial_state(model, cfg.y0);
  std::vector<double> y(n), w(n), a(p), v(p), u(n), dy(p), dw(p);
  const auto inv_hi = model.bank().inverse_upper_bounds();

  auto sample_noise = [&](std::size_t step) {
    for (std::size_t i = 0; i < n; ++i)
      w[i] = noisy ? cfg.noise.amplitude * standard_normal(cfg.noise.seed, i, step) : 0.0;
  };
  // Instantaneous integrands at the current (x, w).
  struct Integrands {
    double dy2, dw2, v2, supply, bound;
  };
  auto evaluate = [&]() {
    loop.outputs(x, y);
    loop.couple(y, w, a, v, u);
    Integrands g{};
    for (std::size_t k = 0; k < p; ++k) {
      const auto& e = d.endpoints(k);
      dy[k] = y[e.pos] - y[e.neg];
      dw[k] = w[e.pos] - w[e.neg];
      g.supply += a[k] * v[k];
      g.bound += inv_hi[k] * v[k] * v[k];
    }
    g.dy2 = squared_norm(dy);
    g.dw2 = squared_norm(dw);
    g.v2 = squared_norm(v);
    return g;
  };

  double int_dy = 0.0, int_dw = 0.0, int_v = 0.0;
  auto record = [&](std::size_t step) {
    const std::size_t r = res.t.size();
    res.t.push_back(static_cast<double>(step) * cfg.dt);
    std::copy(y.begin(), y.end(), res.y.row(r).begin());
    std::copy(u.begin(), u.end(), res.u.row(r).begin());
    std::copy(w.begin(), w.end(), res.w.row(r).begin());
    std::copy(v.begin(), v.end(), res.v.row(r).begin());
    std::copy(dy.begin(), dy.end(), res.dy.row(r).begin());
    res.norm_dy.push_back(std::sqrt(int_dy));
    res.norm_dw.push_back(std::sqrt(int_dw));
    res.norm_v.push_back(std::sqrt(int_v));
  };

  sample_noise(0);
  Integrands prev = evaluate();
  record(0);
  for (std::size_t s = 0; s < steps; ++s) {
    rk.step([&](std::span<const double> st, std::span<double> ds) { loop.derivative(st, w, ds); }, x, cfg.dt);
    if (!all_finite(x)) {
      const double t_fail = static_cast<double>(s + 1) * cfg.dt;
      throw NonFinite("state became non-finite at t = " + std::to_string(t_fail), t_fail);
    }
    sample_noise(s + 1);
    const Integrands cur = evaluate();
    const double h = 0.5 * cfg.dt;
    int_dy += h * (prev.dy2 + cur.dy2);
    int_dw += h * (prev.dw2 + cur.dw2);
    int_v += h * (prev.v2 + cur.v2);
    res.coupling_supply += h * (prev.supply + cur.supply);
    res.coupling_bound += h * (prev.bound + cur.bound);
    prev = cur;
    if ((s + 1) % stride == 0 || s + 1 == steps) record(s + 1);
  }
  if (int_dw > 0.0) res.rho_hat = std::sqrt(int_dy) / std::sqrt(int_dw);
  return res;
}

std::vector<SimulationResult> run_batch(const NetworkModel& model, const SimConfig& cfg,
                                        std::span<const std::uint64_t> seeds) {
  cfg.validate(model.agent_count());
  std::vector<SimulationResult> out(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  const long count = static_cast<long>(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      SimConfig c = cfg;
      c.noise.seed = seeds[i];
      out[i] = run(model, c);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.seed < r.seed; });
  return out;
}

std::vector<SimulationResult> run_batch_serial(const NetworkModel& model, const SimConfig& cfg,
                                               std::span<const std::uint64_t> seeds) {
  std::vector<SimulationResult> out;
  out.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    SimConfig c = cfg;
    c.noise.seed = seed;
    out.push_back(run(model, c));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.seed < r.seed; });
  return out;
}

ConsensusMetrics consensus_metrics(const SimulationResult& res, double rho_cert) {
  ConsensusMetrics m;
  m.rho_hat = res.rho_hat;
  if (res.t.empty()) return m;
  const double horizon = res.t.back();
  std::size_t tail_start = 0;
  while (tail_start < res.t.size() && res.t[tail_start] < 0.8 * horizon) ++tail_start;
  tail_start = std::min(tail_start, res.t.size() - 1);

  bool finite = true;
  double running = -std::numeric_limits<double>::infinity();
  double at_tail_start = running;
  for (std::size_t r = 0; r < res.t.size(); ++r) {
    const double g = res.norm_dy[r] - rho_cert * res.norm_dw[r];
    if (!std::isfinite(g)) finite = false;
    running = std::max(running, g);
    if (r == tail_start) at_tail_start = running;
  }
  m.sigma_hat = running;
  m.bound_ok = finite && std::isfinite(running) && running <= at_tail_start + 1e-9 * (1.0 + std::abs(running));
  return m;
}

std::vector<double> respond(const lti::StateSpace& agent, std::span<const double> u_held, double dt) {
  const std::size_t m = agent.order();
  std::vector<double> x(m, 0.0), y;
  y.reserve(u_held.size() + 1);
  auto output = [&] { return std::inner_product(agent.c.begin(), agent.c.end(), x.begin(), 0.0); };
  Rk4 rk(m);
  y.push_back(output());
  for (double u : u_held) {
    rk.step(
        [&](std::span<const double> s, std::span<double> ds) {
          for (std::size_t r = 0; r < m; ++r) {
            double acc = agent.b[r] * u;
            for (std::size_t c = 0; c < m; ++c) acc += agent.a(r, c) * s[c];
            ds[r] = acc;
          }
        },
        x, dt);
    y.push_back(output());
  }
  return y;
}

}  // namespace passnet::sim

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "passnet/errors.hpp"
#include "passnet/sim.hpp"

using namespace passnet;
using namespace passnet::sim;

namespace {

NetworkModel example_model() {
  const auto ex = testing::reference_network();
  return assemble(ex.g, ex.tfs, ex.bank);
}

NetworkModel two_integrators(double gain = 1.0) {
  const auto g = graph::Graph::from_edge_list(2, std::vector<std::pair<int, int>>{{1, 2}});
  const std::vector<lti::RationalTransfer> tfs{lti::tf_new({1}, {1, 0}), lti::tf_new({1}, {1, 0})};
  return assemble(g, tfs, coupling::CouplingBank({coupling::SectorCoupling::linear_gain(gain)}));
}

SimConfig config(std::vector<double> y0, double t_final, double dt = 1e-3) {
  SimConfig c;
  c.dt = dt;
  c.t_final = t_final;
  c.y0 = std::move(y0);
  return c;
}

}  // namespace

TEST_CASE("assemble examples") {
  CHECK(example_model().state_dim() == 12);
  CHECK(two_integrators().state_dim() == 2);
  const auto ex = testing::reference_network();
  const std::vector<lti::RationalTransfer> four(ex.tfs.begin(), ex.tfs.begin() + 4);
  CHECK_THROWS_AS(assemble(ex.g, four, ex.bank), DimensionMismatch);
}

TEST_CASE("initial state examples") {
  const auto m = example_model();
  const std::vector<double> zero(5, 0.0);
  for (double v : initial_state(m, zero)) CHECK(v == 0.0);
  const auto x = initial_state(m, testing::reference_network().y0);
  CHECK(x[0] == doctest::Approx(-0.3 / 1.64 * 0.8).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(-0.3 / 1.64).epsilon(1e-12));
  CHECK(x[0] == doctest::Approx(-0.14634).epsilon(1e-4));
  CHECK(x[1] == doctest::Approx(-0.18293).epsilon(1e-4));
  const auto two = initial_state(two_integrators(), std::vector<double>{-0.3, 0.2});
  CHECK(two == std::vector<double>{-0.3, 0.2});
  // Every agent's output reproduces y0.
  const auto res = run(m, config(testing::reference_network().y0, 0.01));
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(res.y(0, i) - testing::reference_network().y0[i]) <= 1e-12);
}

TEST_CASE("RK4 step examples") {
  const auto m = example_model();
  const std::vector<double> x0(12, 0.0), w0(5, 0.0);
  CHECK(step_rk4(m, x0, w0, 0.1) == x0);

  // One decoupled integrator keeps its state; a 1/(s+1) agent decays like e^{-t}.
  const auto g = graph::Graph::from_edge_list(2, std::vector<std::pair<int, int>>{{1, 2}});
  const std::vector<lti::RationalTransfer> tfs{lti::tf_new({1}, {1, 0}), lti::tf_new({1}, {1, 1})};
  const auto model = assemble(g, tfs, coupling::CouplingBank({coupling::SectorCoupling::linear_gain(1e-300)}));
  const auto next = step_rk4(model, std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0}, 0.1);
  CHECK(next[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(next[1] - std::exp(-0.1)) <= 1e-7);
}

TEST_CASE("two integrators converge like exp(-2t)") {
  const auto res = run(two_integrators(), config({1.0, -1.0}, 2.0));
  REQUIRE(res.t.back() == doctest::Approx(2.0));
  const std::size_t last = res.t.size() - 1;
  CHECK(std::abs(res.y(last, 0) - std::exp(-4.0)) <= 1e-6);
  CHECK(std::abs(res.y(last, 1) + std::exp(-4.0)) <= 1e-6);
  CHECK_FALSE(res.rho_hat);
}

TEST_CASE("zero initial outputs stay at the origin") {
  const auto res = run(example_model(), config(std::vector<double>(5, 0.0), 5.0));
  for (std::size_t r = 0; r < res.t.size(); ++r)
    for (std::size_t k = 0; k < 5; ++k) CHECK(res.dy(r, k) == 0.0);
  const auto metrics = consensus_metrics(res, 2.0);
  CHECK(metrics.sigma_hat == 0.0);
  CHECK(metrics.bound_ok);
}

TEST_CASE("noise sequence") {
  SimConfig c = config(std::vector<double>(5, 0.0), 1.0);
  const auto none = noise_sequence(c, 3, 100);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 100; ++k) CHECK(none(i, k) == 0.0);

  c.noise = {NoiseKind::GaussianZoh, 0.1, 17};
  const auto a = noise_sequence(c, 2, 50000);
  const auto b = noise_sequence(c, 2, 50000);
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t k = 0; k < 50000; ++k) {
      CHECK(a(i, k) == b(i, k));
      sum += a(i, k);
      sq += a(i, k) * a(i, k);
    }
  const double mean = sum / 1e5;
  const double sd = std::sqrt(sq / 1e5 - mean * mean);
  CHECK(std::abs(mean) <= 0.01);
  CHECK(std::abs(sd - 0.1) <= 0.005);
  CHECK(a(1, 7) == 0.1 * standard_normal(17, 1, 7));
  CHECK(standard_normal(17, 1, 7) != standard_normal(18, 1, 7));
}

TEST_CASE("runs are deterministic and replay the coupling law") {
  const auto m = example_model();
  auto c = config(testing::reference_network().y0, 5.0);
  c.noise = {NoiseKind::GaussianZoh, 0.1, 3};
  c.record_stride = 7;
  const auto a = run(m, c);
  const auto b = run(m, c);
  CHECK(a.t == b.t);
  CHECK(a.y.data() == b.y.data());
  CHECK(a.norm_dy == b.norm_dy);
  CHECK(a.t.back() == doctest::Approx(5.0));

  const auto d = graph::incidence(m.graph());
  for (std::size_t r = 0; r < a.t.size(); ++r) {
    std::vector<double> arg(5);
    for (std::size_t k = 0; k < 5; ++k) {
      const auto& e = d.endpoints(k);
      arg[k] = (a.y(r, e.pos) + a.w(r, e.pos)) - (a.y(r, e.neg) + a.w(r, e.neg));
    }
    const auto v = coupling::psi_apply(m.bank(), arg);
    std::vector<double> u(5, 0.0);
    for (std::size_t k = 0; k < 5; ++k) {
      u[d.endpoints(k).pos] -= v[k];
      u[d.endpoints(k).neg] += v[k];
    }
    for (std::size_t i = 0; i < 5; ++i) CHECK(a.u(r, i) == u[i]);
    for (std::size_t k = 0; k < 5; ++k) CHECK(a.v(r, k) == v[k]);
    if (r > 0) {
      CHECK(a.norm_dy[r] >= a.norm_dy[r - 1]);
      CHECK(a.norm_dw[r] >= a.norm_dw[r - 1]);
      CHECK(a.norm_v[r] >= a.norm_v[r - 1]);
    }
  }
  // Sector energy inequality in integral form.
  const double vv = a.norm_v.back() * a.norm_v.back();
  CHECK(a.coupling_supply >= a.coupling_bound - 1e-6 * (1 + vv));
  CHECK(a.rho_hat);
}

TEST_CASE("parallel batch equals the serial batch") {
  const auto m = example_model();
  auto c = config(testing::reference_network().y0, 2.0);
  c.noise = {NoiseKind::GaussianZoh, 0.1, 1};
  c.record_stride = 50;
  const std::vector<std::uint64_t> seeds{5, 2, 9, 1};
  const auto par = run_batch(m, c, seeds);
  const auto ser = run_batch_serial(m, c, seeds);
  REQUIRE(par.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(par[i].seed == ser[i].seed);
    CHECK(par[i].y.data() == ser[i].y.data());
    CHECK(par[i].norm_dw == ser[i].norm_dw);
  }
  CHECK(par[0].seed == 1);
  CHECK(par[3].seed == 9);
}

TEST_CASE("divergence raises NonFinite with a time") {
  // A huge gain with a coarse step overflows the integrator.
  const auto g = graph::Graph::from_edge_list(2, std::vector<std::pair<int, int>>{{1, 2}});
  const std::vector<lti::RationalTransfer> tfs{lti::tf_new({1}, {1, 0}), lti::tf_new({1}, {1, 0})};
  const auto model = assemble(g, tfs, coupling::CouplingBank({coupling::SectorCoupling::linear_gain(1e150)}));
  try {
    run(model, config({1.0, -1.0}, 100.0, 1.0));
    FAIL("expected NonFinite");
  } catch (const NonFinite& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() <= 100.0);
  }
}

TEST_CASE("configuration validation") {
  const auto m = two_integrators();
  CHECK_THROWS_AS(run(m, config({1.0}, 1.0)), DimensionMismatch);
  CHECK_THROWS_AS(run(m, config({1.0, 0.0}, 1.0, 0.0)), InputError);
  auto c = config({1.0, 0.0}, 1.0);
  c.record_stride = 0;
  CHECK_THROWS_AS(run(m, c), InputError);
}

TEST_CASE("consensus metrics on a noise-free run") {
  const auto res = run(two_integrators(), config({1.0, -1.0}, 10.0));
  const auto metrics = consensus_metrics(res, 3.0);
  CHECK_FALSE(metrics.rho_hat);
  CHECK(metrics.sigma_hat == res.norm_dy.back());
  CHECK(std::isfinite(metrics.sigma_hat));
  CHECK(metrics.bound_ok);
}

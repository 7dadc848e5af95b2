#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "passnet/certificates.hpp"

using namespace passnet;
using namespace passnet::certificates;
using linalg::Matrix;
using linalg::SymMatrix;
using Pairs = std::vector<std::pair<int, int>>;

namespace {

graph::Graph make(std::size_t n, const Pairs& p) { return graph::Graph::from_edge_list(n, p); }

IndexVector nus(std::vector<double> nu) { return IndexVector{std::move(nu), 0.0}; }

// D^T diag(nu) D straight from the generic dense product.
Matrix triple_product(const graph::Graph& g, const std::vector<double>& nu) {
  const auto d = graph::incidence(g).to_dense();
  Matrix xi(nu.size(), nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i) xi(i, i) = nu[i];
  return d.transpose() * xi * d;
}

bool gram_psd(const graph::Graph& g, const std::vector<double>& nu) {
  return linalg::is_psd(edge_gram(graph::incidence(g), nus(nu)).m).verdict;
}

coupling::CouplingBank linear_bank(std::size_t p, double gain) {
  return coupling::CouplingBank(std::vector<coupling::SectorCoupling>(p, coupling::SectorCoupling::linear_gain(gain)));
}

std::vector<double> random_nu(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  std::vector<double> nu(n);
  for (auto& v : nu) v = u(rng);
  return nu;
}

}  // namespace

TEST_CASE("edge Gram examples") {
  const auto two = edge_gram(graph::incidence(make(2, {{1, 2}})), nus({-1, 2}));
  CHECK(two.m.dim() == 1);
  CHECK(two.m(0, 0) == 1.0);
  CHECK_FALSE(two.lambda_included);

  const auto path = edge_gram(graph::incidence(make(3, {{1, 2}, {2, 3}})), nus({1, -0.5, 1}));
  CHECK(path.m(0, 0) == 0.5);
  CHECK(path.m(1, 0) == 0.5);
  CHECK(path.m(1, 1) == 0.5);

  const auto ex = testing::reference_network();
  const auto full = edge_gram(graph::incidence(ex.g), nus(ex.declared_nu));
  const auto ref = triple_product(ex.g, ex.declared_nu);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(full.m(i, j) - ref(i, j)) <= 1e-12);

  const std::vector<double> lambda{1, 2, 3, 4, 5};
  const auto with = edge_gram(graph::incidence(ex.g), nus(ex.declared_nu), lambda);
  CHECK(with.lambda_included);
  CHECK(with.m(4, 4) == doctest::Approx(ref(4, 4) + 5));

  CHECK_THROWS_AS(edge_gram(graph::incidence(ex.g), nus({1, 2})), DimensionMismatch);
}

TEST_CASE("structural Gram equals the dense product on random graphs") {
  std::mt19937_64 rng(100);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = testing::random_connected_graph(rng, 2 + trial % 9);
    const auto nu = random_nu(rng, g.node_count());
    const auto m = edge_gram(graph::incidence(g), nus(nu)).m;
    const auto ref = triple_product(g, nu);
    double err = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i)
      for (std::size_t j = 0; j < m.dim(); ++j) err = std::max(err, std::abs(m(i, j) - ref(i, j)));
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("shortage verdict") {
  CHECK(shortage_verdict(nus({-1, 2})).compensation_possible);
  const auto ex = shortage_verdict(nus({-0.71, -0.41, -0.55, -0.50, -0.61}));
  CHECK_FALSE(ex.compensation_possible);
  CHECK(ex.negative_count == 5);
  CHECK(shortage_verdict(nus({1, 1, 1})).compensation_possible);
  CHECK(shortage_verdict(nus({0, -1, 0})).negative_count == 1);
}

TEST_CASE("compensation weight examples") {
  using R = CompensationWeights::Reason;
  const auto a = compensation_weights(nus({3, 3, 3, -1}));
  REQUIRE(a.feasible);
  CHECK(a.shortage_agent == 3u);
  CHECK(a.agents == std::vector<std::size_t>{0, 1, 2});
  for (double s : a.weights) CHECK(s == doctest::Approx(1.0 / 3));
  CHECK(a.demand == doctest::Approx(1.0));
  for (std::size_t k = 0; k < 3; ++k) CHECK(3 * a.weights[k] - 1.0 >= -1e-12);

  const auto b = compensation_weights(nus({1, 1, -1}));
  CHECK_FALSE(b.feasible);
  CHECK(b.reason == R::InsufficientSurplus);
  CHECK(b.demand == doctest::Approx(2.0));

  const auto c = compensation_weights(nus({2, -0.5}));
  REQUIRE(c.feasible);
  CHECK(c.weights == std::vector<double>{1.0});

  CHECK(compensation_weights(nus({1, 2})).reason == R::NoShortage);
  CHECK(compensation_weights(nus({-1, -2, 5})).reason == R::MultipleShortages);
  CHECK(compensation_weights(nus({0, -1, 4})).reason == R::InsufficientSurplus);
  CHECK(to_string(R::Feasible) == "feasible");
}

TEST_CASE("scaled dominance examples") {
  const std::vector<double> ones{1, 1};
  const auto id = scaled_dominance(SymMatrix::identity(2), ones);
  CHECK(id.holds);
  CHECK(id.strict);
  CHECK(id.slack == std::vector<double>{1, 1});

  SymMatrix tight(2);
  tight.set(0, 0, 1);
  tight.set(1, 1, 1);
  tight.set(1, 0, -1);
  const auto t = scaled_dominance(tight, ones);
  CHECK(t.holds);
  CHECK_FALSE(t.strict);
  CHECK(t.slack == std::vector<double>{0, 0});

  tight.set(1, 0, -2);
  CHECK_FALSE(scaled_dominance(tight, ones).holds);
  const std::vector<double> bad{1, 0};
  CHECK_THROWS_AS(scaled_dominance(tight, bad), InputError);
}

TEST_CASE("edge certificate examples") {
  const auto ex = testing::reference_network();
  const auto c = edge_certificate(ex.g, nus(ex.declared_nu), ex.bank);
  // 1/a_ij + nu_i + nu_j - (r_i - 1)|nu_i| - (r_j - 1)|nu_j| with r = (1,2,3,2,2)
  const double expected[] = {1 / 0.65 - 0.71 - 0.41 - 0.41, 1 / 0.40 - 0.41 - 0.55 - 0.41 - 2 * 0.55,
                             1 / 0.34 - 0.55 - 0.50 - 2 * 0.55 - 0.50, 1 / 0.33 - 0.55 - 0.61 - 2 * 0.55 - 0.61,
                             1 / 0.44 - 0.50 - 0.61 - 0.50 - 0.61};
  for (int k = 0; k < 5; ++k) CHECK(c.margins[k] == doctest::Approx(expected[k]).epsilon(1e-12));
  CHECK(c.margins[0] == doctest::Approx(0.00846).epsilon(0).scale(1).epsilon(1e-5));
  CHECK(c.all_positive);
  CHECK(c.kappa > 0);
  REQUIRE(c.rho);
  CHECK(*c.rho == doctest::Approx(1 / (c.kappa * c.alpha_lo_min) + 1));
  CHECK(*c.sigma == 0.0);

  const auto zero = edge_certificate(ex.g, nus(std::vector<double>(5, 0.0)), ex.bank);
  for (int k = 0; k < 5; ++k) CHECK(zero.margins[k] == doctest::Approx(1 / ex.bank[k].alpha_hi()));
  CHECK(zero.kappa == doctest::Approx(1 / 0.65).epsilon(1e-12));

  const auto two = edge_certificate(make(2, {{1, 2}}), nus({-1, 0.2}), linear_bank(1, 2.0));
  CHECK(two.margins[0] == doctest::Approx(-0.3));
  CHECK_FALSE(two.all_positive);

  auto offset = nus(ex.declared_nu);
  offset.beta_bar = -0.5;
  const auto s = edge_certificate(ex.g, offset, ex.bank);
  CHECK(*s.sigma == doctest::Approx(std::sqrt(2 * 0.5 / s.kappa) / s.alpha_lo_min));

  CHECK_THROWS_AS(edge_certificate(make(4, {{1, 2}, {3, 4}}), nus({1, 1, 1, 1}), linear_bank(2, 1.0)),
                  graph::GraphError);
}

TEST_CASE("orientation does not change any verdict") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testing::random_connected_graph(rng, 2 + trial % 8);
    const auto nu = random_nu(rng, g.node_count());
    const auto bank = linear_bank(g.edge_count(), 0.5 + (trial % 3));
    const auto base = certify(g, nus(nu), bank);
    const auto flipped = certify(g.with_flipped(trial % g.edge_count()), nus(nu), bank);
    CHECK(base.open_loop.verdict == flipped.open_loop.verdict);
    CHECK(base.open_loop.min_eig == doctest::Approx(flipped.open_loop.min_eig).epsilon(1e-9).scale(1));
    for (std::size_t k = 0; k < g.edge_count(); ++k)
      CHECK(base.edges.margins[k] == doctest::Approx(flipped.edges.margins[k]).epsilon(1e-14).scale(1));
    CHECK(base.edges.kappa == doctest::Approx(flipped.edges.kappa).epsilon(1e-9).scale(1));
    CHECK(base.edges.rho.has_value() == flipped.edges.rho.has_value());
    if (base.edges.rho) CHECK(*base.edges.rho == doctest::Approx(*flipped.edges.rho).epsilon(1e-8));
  }
}

TEST_CASE("a spanning tree decides the open-loop PSD test") {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = testing::random_connected_graph(rng, 2 + trial % 9);
    const auto nu = random_nu(rng, g.node_count());
    const auto tree = graph::spanning_tree(g);
    const auto full = linalg::is_psd(edge_gram(graph::incidence(g), nus(nu)).m);
    const auto sub = linalg::is_psd(edge_gram(graph::incidence(g.subgraph(tree)), nus(nu)).m);
    // Skip instances sitting on the PSD boundary.
    if (std::abs(full.min_eig) > 1e-8 && std::abs(sub.min_eig) > 1e-8) CHECK(full.verdict == sub.verdict);
  }
}

TEST_CASE("two or more shortages never certify") {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> pos(0.0, 5.0), neg(-2.0, -1e-3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = testing::random_connected_graph(rng, 2 + trial % 9);
    const std::size_t n = g.node_count();
    std::vector<double> nu(n);
    for (auto& v : nu) v = pos(rng);
    nu[0] = neg(rng);
    nu[1 + trial % (n - 1)] = neg(rng);
    std::shuffle(nu.begin(), nu.end(), rng);
    CHECK_FALSE(shortage_verdict(nus(nu)).compensation_possible);
    CHECK_FALSE(gram_psd(g, nu));
  }
}

TEST_CASE("feasible compensation weights pass dominance and PSD") {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> pos(0.05, 3.0), u01(0.0, 1.0);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = testing::random_connected_graph(rng, 2 + trial % 8);
    const std::size_t n = g.node_count();
    std::vector<double> nu(n);
    double inv = 0.0;
    for (auto& v : nu) {
      v = pos(rng);
      inv += 1.0 / v;
    }
    const std::size_t neg = trial % n;
    inv -= 1.0 / nu[neg];
    nu[neg] = -1.6 * u01(rng) / inv;  // demand roughly uniform on [0, 1.6]
    const auto w = compensation_weights(nus(nu));
    CHECK(w.feasible == (w.demand <= 1.0));
    if (!w.feasible) continue;
    ++feasible;
    // Star graph centred on the shortage agent, scaled by the weights.
    Pairs star;
    for (std::size_t i : w.agents) star.emplace_back(static_cast<int>(i) + 1, static_cast<int>(neg) + 1);
    const auto sg = make(n, star);
    const auto gram = edge_gram(graph::incidence(sg), nus(nu)).m;
    CHECK(scaled_dominance(gram, w.weights).holds);
    for (std::size_t k = 0; k < w.agents.size(); ++k)
      CHECK(nu[w.agents[k]] * w.weights[k] - std::abs(nu[neg]) >= -1e-12);
    const auto psd = linalg::is_psd(edge_gram(graph::incidence(g), nus(nu)).m);
    CHECK(psd.verdict);
  }
  CHECK(feasible > 50);
}

TEST_CASE("closed-form compensation matches the LP and grid oracles") {
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> pos(0.05, 3.0), u01(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 5;
    std::vector<double> surplus(n - 1);
    double inv = 0.0;
    for (auto& v : surplus) {
      v = pos(rng);
      inv += 1.0 / v;
    }
    const double deficit = 2.0 * u01(rng) / inv;
    auto nu = surplus;
    nu.push_back(-deficit);
    const auto w = compensation_weights(nus(nu));
    const double lp = testing::lp_best_min(surplus);
    // Vertex enumeration is exact; only decide cases outside its roundoff.
    if (std::abs(lp - deficit) > 1e-9) CHECK(w.feasible == (lp >= deficit));
    if (n <= 3) {
      // Grid spacing 1e-3 resolves the decision unless the optimum is that close.
      if (std::abs(w.demand - 1.0) > 5e-3) CHECK(w.feasible == testing::grid_feasible(surplus, deficit));
    }
  }
}

TEST_CASE("three-agent path flips at half the neighbour index") {
  const auto g = make(3, {{1, 2}, {2, 3}});
  for (int k = 0; k <= 100; ++k) {
    const double hat = -static_cast<double>(k) / 100;
    if (k == 50) continue;
    CHECK(gram_psd(g, {1, hat, 1}) == (hat > -0.5));
  }
  CHECK(gram_psd(g, {1, -0.5 + 1e-9, 1}));
  CHECK_FALSE(gram_psd(g, {1, -0.5 - 1e-9, 1}));
}

TEST_CASE("positive margins always give a positive kappa") {
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> u(-0.6, 1.0), gain(0.2, 3.0);
  int positive = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto g = testing::random_connected_graph(rng, 2 + trial % 9, 0.2);
    std::vector<double> nu(g.node_count());
    for (auto& v : nu) v = u(rng);
    std::vector<coupling::SectorCoupling> cs;
    for (std::size_t k = 0; k < g.edge_count(); ++k) cs.push_back(coupling::SectorCoupling::linear_gain(gain(rng)));
    const auto c = edge_certificate(g, nus(nu), coupling::CouplingBank(std::move(cs)));
    if (c.all_positive) {
      ++positive;
      CHECK(c.kappa > 0);
    }
  }
  CHECK(positive > 20);
}

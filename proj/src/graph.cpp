#include "passnet/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace passnet::graph {

namespace {

// Path-halving union-find over node ids.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::string edge_label(std::size_t k, int i, int j) {
  return "edge " + std::to_string(k + 1) + " (" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

Graph::Graph(std::size_t n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)), incident_(n) {
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    incident_[edges_[k].pos].push_back(k);
    incident_[edges_[k].neg].push_back(k);
  }
}

Graph Graph::from_edge_list(std::size_t n, std::span<const std::pair<int, int>> pairs) {
  using K = GraphError::Kind;
  if (n < 2) throw GraphError(K::TooFewNodes, std::nullopt, "graph needs at least 2 nodes");
  if (pairs.empty()) throw GraphError(K::NoEdges, std::nullopt, "graph needs at least one edge");

  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  std::vector<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n)
      throw GraphError(K::NodeOutOfRange, k + 1,
                       edge_label(k, i, j) + " references a node outside 1.." + std::to_string(n));
    if (i == j) throw GraphError(K::SelfLoop, k + 1, edge_label(k, i, j) + " is a self-loop");
    const std::pair<std::size_t, std::size_t> key(std::min(i, j), std::max(i, j));
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      throw GraphError(K::DuplicateEdge, k + 1, edge_label(k, i, j) + " duplicates an earlier edge");
    seen.push_back(key);
    edges.push_back({static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)});
  }
  return Graph(n, std::move(edges));
}

Graph Graph::subgraph(std::span<const std::size_t> edge_indices) const {
  std::vector<Edge> kept;
  kept.reserve(edge_indices.size());
  for (std::size_t k : edge_indices) kept.push_back(edges_.at(k));
  return Graph(n_, std::move(kept));
}

Graph Graph::with_flipped(std::size_t k) const {
  auto edges = edges_;
  std::swap(edges.at(k).pos, edges.at(k).neg);
  return Graph(n_, std::move(edges));
}

IncidenceMatrix::IncidenceMatrix(const Graph& g)
    : n_(g.node_count()), p_(g.edge_count()), entries_(n_ * p_, 0), endpoints_(g.edges()) {
  for (std::size_t k = 0; k < p_; ++k) {
    entries_[endpoints_[k].pos * p_ + k] = 1;
    entries_[endpoints_[k].neg * p_ + k] = -1;
  }
}

linalg::Matrix IncidenceMatrix::to_dense() const {
  linalg::Matrix d(n_, p_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < p_; ++k) d(i, k) = (*this)(i, k);
  return d;
}

IncidenceMatrix incidence(const Graph& g) { return IncidenceMatrix(g); }

std::vector<int> degrees(const Graph& g) {
  std::vector<int> r(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) r[i] = static_cast<int>(g.incident(i).size());
  return r;
}

std::size_t component_count(const Graph& g) {
  std::vector<bool> visited(g.node_count(), false);
  std::size_t components = 0;
  for (std::size_t start = 0; start < g.node_count(); ++start) {
    if (visited[start]) continue;
    ++components;
    std::queue<std::size_t> frontier;
    frontier.push(start);
    visited[start] = true;
    while (!frontier.empty()) {
      const std::size_t u = frontier.front();
      frontier.pop();
      for (std::size_t k : g.incident(u)) {
        const Edge& e = g.edge(k);
        const std::size_t v = e.pos == u ? e.neg : e.pos;
        if (!visited[v]) {
          visited[v] = true;
          frontier.push(v);
        }
      }
    }
  }
  return components;
}

bool is_connected(const Graph& g) { return component_count(g) == 1; }

std::vector<std::size_t> spanning_tree(const Graph& g) {
  if (!is_connected(g))
    throw GraphError(GraphError::Kind::Disconnected, std::nullopt,
                     "spanning tree requested for a disconnected graph");
  DisjointSets sets(g.node_count());
  std::vector<std::size_t> tree;
  tree.reserve(g.node_count() - 1);
  for (std::size_t k = 0; k < g.edge_count() && tree.size() + 1 < g.node_count(); ++k)
    if (sets.unite(g.edge(k).pos, g.edge(k).neg)) tree.push_back(k);
  return tree;
}

}  // namespace passnet::graph

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "passnet/errors.hpp"
#include "passnet/linalg.hpp"

namespace passnet::graph {

// Oriented link between two agents; `pos` is the positive end. 0-based ids.
struct Edge {
  std::size_t pos;
  std::size_t neg;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class GraphError : public InputError {
 public:
  enum class Kind { TooFewNodes, NoEdges, SelfLoop, DuplicateEdge, NodeOutOfRange, Disconnected };

  GraphError(Kind kind, std::optional<std::size_t> edge, const std::string& what)
      : InputError(what), kind_(kind), edge_(edge) {}

  Kind kind() const noexcept { return kind_; }
  // 1-based index of the offending edge, when there is one.
  std::optional<std::size_t> edge() const noexcept { return edge_; }

 private:
  Kind kind_;
  std::optional<std::size_t> edge_;
};

// Simple undirected graph with a fixed orientation per edge. The edge order is
// the canonical edge indexing used by every downstream matrix.
class Graph {
 public:
  // Nodes are 1-based in `pairs`; the first element of each pair is the positive end.
  static Graph from_edge_list(std::size_t n, std::span<const std::pair<int, int>> pairs);

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t k) const { return edges_.at(k); }
  // Edge indices touching `node`, ascending.
  const std::vector<std::size_t>& incident(std::size_t node) const { return incident_.at(node); }

  // Same graph keeping only the listed edges (in the listed order).
  Graph subgraph(std::span<const std::size_t> edge_indices) const;
  // Same graph with edge k's orientation reversed.
  Graph with_flipped(std::size_t k) const;

 private:
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
};

// Node-by-edge matrix with +1 at the positive end and -1 at the negative end.
class IncidenceMatrix {
 public:
  explicit IncidenceMatrix(const Graph& g);

  std::size_t rows() const noexcept { return n_; }
  std::size_t cols() const noexcept { return p_; }
  int operator()(std::size_t i, std::size_t k) const { return entries_[i * p_ + k]; }
  const Edge& endpoints(std::size_t k) const { return endpoints_.at(k); }

  linalg::Matrix to_dense() const;

 private:
  std::size_t n_;
  std::size_t p_;
  std::vector<std::int8_t> entries_;
  std::vector<Edge> endpoints_;
};

IncidenceMatrix incidence(const Graph& g);

// r_i: number of neighbours of each node.
std::vector<int> degrees(const Graph& g);

std::size_t component_count(const Graph& g);
bool is_connected(const Graph& g);

// 0-based edge indices of a spanning tree, ascending. Edges are admitted in
// ascending index order whenever they join two different components, so the
// result is deterministic. Throws GraphError(Disconnected).
std::vector<std::size_t> spanning_tree(const Graph& g);

}  // namespace passnet::graph

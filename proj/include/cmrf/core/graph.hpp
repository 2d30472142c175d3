#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace cmrf {

//! Undirected edge stored in canonical order (u < v).
struct Edge
{
  std::size_t u;
  std::size_t v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

//! Undirected simple graph on nodes 0..n-1.
//!
//! Edges are normalized to (min, max) and stored once; the edge order is the
//! order in which they were supplied. Immutable after construction.
class Graph
{
public:
  Graph() = default;
  Graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  std::size_t size() const { return neighbors_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_.at(i); }
  //! Indices of the edges touching node i, aligned with neighbors(i).
  const std::vector<std::size_t>& incident(std::size_t i) const { return incident_.at(i); }
  std::size_t degree(std::size_t i) const { return neighbors_.at(i).size(); }
  std::optional<std::size_t> edge_index(std::size_t i, std::size_t j) const;

  //! True when the graph is a single simple path through all nodes.
  bool is_chain() const;
  //! Nodes in path order; empty unless is_chain().
  std::vector<std::size_t> chain_order() const;

  //! Same node count and the same edges in the same order.
  friend bool operator==(const Graph& a, const Graph& b) { return a.size() == b.size() && a.edges_ == b.edges_; }

private:
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> neighbors_;
  std::vector<std::vector<std::size_t>> incident_;
};

Graph build_chain(std::size_t n);
Graph build_grid(std::size_t rows, std::size_t cols);

} // namespace cmrf

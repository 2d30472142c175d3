#include "cmrf/core/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace cmrf {

Graph::Graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges)
  : neighbors_(n)
  , incident_(n)
{
  if (n == 0)
    throw std::invalid_argument("graph needs at least one node");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a >= n || b >= n)
      throw std::invalid_argument("edge endpoint out of range: {" + std::to_string(a) + "," +
                                  std::to_string(b) + "}");
    if (a == b)
      throw std::invalid_argument("self-loop at node " + std::to_string(a));
    Edge e{ std::min(a, b), std::max(a, b) };
    if (!seen.emplace(e.u, e.v).second)
      throw std::invalid_argument("duplicate edge {" + std::to_string(e.u) + "," +
                                  std::to_string(e.v) + "}");
    const std::size_t index = edges_.size();
    edges_.push_back(e);
    neighbors_[e.u].push_back(e.v);
    incident_[e.u].push_back(index);
    neighbors_[e.v].push_back(e.u);
    incident_[e.v].push_back(index);
  }
}

std::optional<std::size_t>
Graph::edge_index(std::size_t i, std::size_t j) const
{
  if (i >= size() || j >= size())
    return std::nullopt;
  const auto& nb = neighbors_[i];
  for (std::size_t k = 0; k < nb.size(); ++k)
    if (nb[k] == j)
      return incident_[i][k];
  return std::nullopt;
}

bool
Graph::is_chain() const
{
  return !chain_order().empty();
}

std::vector<std::size_t>
Graph::chain_order() const
{
  const std::size_t n = size();
  if (n < 2 || edges_.size() != n - 1)
    return {};
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (degree(i) > 2 || degree(i) == 0)
      return {};
    if (degree(i) == 1 && start == n)
      start = i;
  }
  if (start == n)
    return {};
  std::vector<std::size_t> order{ start };
  std::size_t prev = n, cur = start;
  while (order.size() < n) {
    std::size_t next = n;
    for (auto j : neighbors_[cur])
      if (j != prev)
        next = j;
    if (next == n)
      return {};
    prev = cur;
    cur = next;
    order.push_back(cur);
  }
  return order;
}

Graph
build_chain(std::size_t n)
{
  if (n < 2)
    throw std::invalid_argument("chain needs n >= 2");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i)
    edges.emplace_back(i, i + 1);
  return Graph(n, edges);
}

Graph
build_grid(std::size_t rows, std::size_t cols)
{
  if (rows < 2 || cols < 2)
    throw std::invalid_argument("grid needs rows >= 2 and cols >= 2");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      if (c + 1 < cols)
        edges.emplace_back(i, i + 1);
      if (r + 1 < rows)
        edges.emplace_back(i, i + cols);
    }
  return Graph(rows * cols, edges);
}

} // namespace cmrf

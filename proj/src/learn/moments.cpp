#include "cmrf/learn/moments.hpp"

#include <stdexcept>
#include <string>

namespace cmrf {

MomentSet::MomentSet(Graph graph, BasisSystem basis, int order)
  : graph_(std::move(graph))
  , basis_(std::move(basis))
  , order_(order)
  , inv_chi_(1.0 / basis_.chi())
{
  if (order < 0)
    throw std::invalid_argument("truncation order must be non-negative");
  if (order > basis_.max_order())
    throw std::invalid_argument("truncation order " + std::to_string(order) + " exceeds basis max_order " +
                                std::to_string(basis_.max_order()));
  c_.assign(graph_.size(), Eigen::VectorXd::Zero(order));
  d_.assign(graph_.edge_count(), Eigen::MatrixXd::Zero(order, order));
}

void
MomentSet::basis_values(double x, std::span<double> out) const
{
  basis_.eval_all(x, out);
}

MomentSet
compute_moments(const Dataset& data, const Graph& graph, const BasisSystem& basis, int order)
{
  if (data.dims() != graph.size())
    throw std::invalid_argument("dataset has " + std::to_string(data.dims()) + " variables, graph has " +
                                std::to_string(graph.size()) + " nodes");
  if (!(data.interval() == basis.interval()))
    throw std::invalid_argument("dataset interval differs from the basis interval");
  MomentSet m(graph, basis, order);
  if (order == 0)
    return m;

  const std::size_t N = data.size();
  const std::size_t n = data.dims();
  // phi[i] is N x K: basis values of variable i at every point
  std::vector<Eigen::MatrixXd> phi(n, Eigen::MatrixXd(N, order));
  std::vector<double> buf(static_cast<std::size_t>(order) + 1);
  for (std::size_t mu = 0; mu < N; ++mu)
    for (std::size_t i = 0; i < n; ++i) {
      basis.eval_all(data(mu, i), buf);
      for (int s = 0; s < order; ++s)
        phi[i](mu, s) = buf[s + 1];
    }
  const double inv_n = 1.0 / static_cast<double>(N);
  for (std::size_t i = 0; i < n; ++i)
    m.node(i) = phi[i].colwise().sum().transpose() * inv_n;
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edge(e);
    m.edge(e) = phi[edge.u].transpose() * phi[edge.v] * inv_n;
  }
  return m;
}

double
belief_node(const MomentSet& m, std::size_t i, double x)
{
  if (i >= m.graph().size())
    throw std::invalid_argument("node index out of range");
  if (!m.basis().interval().contains(x))
    throw std::domain_error("x = " + std::to_string(x) + " outside the belief interval");
  std::vector<double> phi(static_cast<std::size_t>(m.order()) + 1);
  m.basis_values(x, phi);
  return m.node_belief(i, std::span<const double>(phi).subspan(1));
}

double
belief_edge(const MomentSet& m, std::size_t i, std::size_t j, double xi, double xj)
{
  const auto e = m.graph().edge_index(i, j);
  if (!e)
    throw std::invalid_argument("{" + std::to_string(i) + "," + std::to_string(j) + "} is not an edge");
  const auto interval = m.basis().interval();
  if (!interval.contains(xi) || !interval.contains(xj))
    throw std::domain_error("edge belief argument outside the interval");
  const double xu = i < j ? xi : xj;
  const double xv = i < j ? xj : xi;
  const auto& edge = m.graph().edge(*e);
  const std::size_t K1 = static_cast<std::size_t>(m.order()) + 1;
  std::vector<double> pu(K1), pv(K1);
  m.basis_values(xu, pu);
  m.basis_values(xv, pv);
  const std::span<const double> su = std::span<const double>(pu).subspan(1);
  const std::span<const double> sv = std::span<const double>(pv).subspan(1);
  return m.edge_belief(*e, m.node_belief(edge.u, su), m.node_belief(edge.v, sv), su, sv);
}

} // namespace cmrf

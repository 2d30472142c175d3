#include "cmrf/learn/coefficients.hpp"

#include "cmrf/core/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cmrf {

double
CoefficientSet::coupling(std::size_t i, std::size_t j, int s, int t) const
{
  const auto e = graph.edge_index(i, j);
  if (!e)
    throw std::invalid_argument("{" + std::to_string(i) + "," + std::to_string(j) + "} is not an edge");
  if (s < 1 || t < 1 || s > order || t > order)
    throw std::invalid_argument("coupling order outside [1, order]");
  return i < j ? J[*e](s - 1, t - 1) : J[*e](t - 1, s - 1);
}

double
CoefficientSet::energy(std::span<const double> x) const
{
  const std::size_t n = graph.size();
  if (x.size() != n)
    throw std::invalid_argument("point dimension does not match the coefficient set");
  const std::size_t L1 = static_cast<std::size_t>(order) + 1;
  std::vector<double> phi(n * L1);
  double psi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!basis.interval().contains(x[i]))
      throw std::domain_error("coordinate outside the basis interval");
    basis.eval_all(x[i], std::span<double>(phi.data() + i * L1, L1));
    for (int s = 1; s <= order; ++s)
      psi -= H[i][s - 1] * phi[i * L1 + s];
  }
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edge(e);
    for (int s = 1; s <= order; ++s)
      for (int t = 1; t <= order; ++t)
        psi -= J[e](s - 1, t - 1) * phi[edge.u * L1 + s] * phi[edge.v * L1 + t];
  }
  return psi;
}

CoefficientSet
recover_coefficients(const LearnedModel& model, int order)
{
  if (order < 0)
    order = model.order();
  const BasisSystem& basis = model.basis();
  if (order > basis.max_order())
    throw std::invalid_argument("recovery order exceeds basis max_order");
  const Graph& g = model.graph();
  const MomentSet& m = model.moments();
  const double eps = model.epsilon();
  const std::size_t L1 = static_cast<std::size_t>(order) + 1;
  const std::size_t K1 = static_cast<std::size_t>(m.order()) + 1;

  CoefficientSet out{ g, basis, order, eps, {}, {}, {}, {} };
  out.A.assign(g.size(), Eigen::VectorXd::Zero(order));
  out.H.assign(g.size(), Eigen::VectorXd::Zero(order));
  out.B.assign(g.edge_count(), Eigen::MatrixXd::Zero(L1, L1));
  out.J.assign(g.edge_count(), Eigen::MatrixXd::Zero(order, order));

  std::vector<double> phi(std::max(L1, K1)), phi_v(std::max(L1, K1));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& rule = model.node_rule(i);
    const double log_norm = std::log(model.node_normalizer(i));
    for (std::size_t k = 0; k < rule.size(); ++k) {
      basis.eval_all(rule.nodes[k], phi);
      const double b = m.node_belief(i, std::span<const double>(phi.data() + 1, K1 - 1));
      const double log_b = std::log(std::max(eps, b)) - log_norm;
      for (std::size_t s = 1; s < L1; ++s)
        out.A[i][s - 1] += rule.weights[k] * phi[s] * log_b;
    }
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edge(e);
    const auto& rule = model.edge_rule(e);
    const double log_norm = std::log(model.edge_normalizer(e));
    Eigen::MatrixXd& B = out.B[e];
    double last_xu = std::nan("");
    double bu = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      if (rule.xu[k] != last_xu) {
        last_xu = rule.xu[k];
        basis.eval_all(last_xu, phi);
        bu = m.node_belief(edge.u, std::span<const double>(phi.data() + 1, K1 - 1));
      }
      basis.eval_all(rule.xv[k], phi_v);
      const std::span<const double> su(phi.data() + 1, K1 - 1);
      const std::span<const double> sv(phi_v.data() + 1, K1 - 1);
      const double xi = m.edge_belief(e, bu, m.node_belief(edge.v, sv), su, sv);
      const double weighted = rule.weights[k] * (std::log(std::max(eps, xi)) - log_norm);
      for (std::size_t s = 0; s < L1; ++s)
        for (std::size_t t = 0; t < L1; ++t)
          B(s, t) += weighted * phi[s] * phi_v[t];
    }
    out.J[e] = B.bottomRightCorner(order, order);
  }
  const double inv_sqrt_chi = 1.0 / std::sqrt(basis.chi());
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.H[i] = (1.0 - static_cast<double>(g.degree(i))) * out.A[i];
    const auto& nb = g.neighbors(i);
    const auto& inc = g.incident(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const Eigen::MatrixXd& B = out.B[inc[k]];
      // boundary row/column: phi_s on node i, phi_0 on the neighbour
      if (i < nb[k])
        out.H[i] += inv_sqrt_chi * B.col(0).tail(order);
      else
        out.H[i] += inv_sqrt_chi * B.row(0).tail(order).transpose();
    }
  }
  return out;
}

double
bethe_free_energy(const MomentSet& m, const CoefficientSet& coeffs)
{
  if (m.order() != coeffs.order)
    throw std::invalid_argument("moment order and coefficient order differ");
  if (m.graph().size() != coeffs.graph.size() || m.graph().edge_count() != coeffs.graph.edge_count())
    throw std::invalid_argument("moment set and coefficient set live on different graphs");
  const LearnedModel model(m, coeffs.epsilon);
  const Graph& g = m.graph();
  const BasisSystem& basis = m.basis();
  const double eps = coeffs.epsilon;
  const std::size_t K1 = static_cast<std::size_t>(m.order()) + 1;

  double f = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    f -= coeffs.H[i].dot(m.node(i));
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    f -= coeffs.J[e].cwiseProduct(m.edge(e)).sum();

  std::vector<double> pu(K1), pv(K1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& rule = model.node_rule(i);
    const double z = model.node_normalizer(i);
    double entropy = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      basis.eval_all(rule.nodes[k], pu);
      const double b = std::max(eps, m.node_belief(i, std::span<const double>(pu).subspan(1))) / z;
      entropy += rule.weights[k] * b * std::log(b);
    }
    f += (1.0 - static_cast<double>(g.degree(i))) * entropy;
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edge(e);
    const auto& rule = model.edge_rule(e);
    const double z = model.edge_normalizer(e);
    double entropy = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      basis.eval_all(rule.xu[k], pu);
      basis.eval_all(rule.xv[k], pv);
      const std::span<const double> su = std::span<const double>(pu).subspan(1);
      const std::span<const double> sv = std::span<const double>(pv).subspan(1);
      const double xi =
        std::max(eps, m.edge_belief(e, m.node_belief(edge.u, su), m.node_belief(edge.v, sv), su, sv)) / z;
      entropy += rule.weights[k] * xi * std::log(xi);
    }
    f += entropy;
  }
  if (!std::isfinite(f))
    throw NumericError("Bethe free energy is not finite");
  return f;
}

} // namespace cmrf

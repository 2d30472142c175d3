#include "cmrf/infer/lbp.hpp"

#include "cmrf/core/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cmrf {

DiscretizedField
discretize(const PairwiseEnergy& model, int G)
{
  if (G < 8)
    throw std::invalid_argument("discretization needs G >= 8");
  DiscretizedField field;
  field.graph = model.graph();
  field.interval = model.interval();
  field.cell_width = field.interval.width() / G;
  field.centers.resize(G);
  for (int g = 0; g < G; ++g)
    field.centers[g] = field.interval.lower + (g + 0.5) * field.cell_width;

  const Graph& graph = field.graph;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    Eigen::VectorXd logs(G);
    for (int g = 0; g < G; ++g)
      logs[g] = model.node_term(i, field.centers[g]);
    if (!logs.allFinite())
      throw NumericError("non-finite node term at node " + std::to_string(i));
    const double shift = logs.maxCoeff();
    field.log_shift += shift;
    field.node_factors.push_back((logs.array() - shift).exp().matrix());
  }
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    Eigen::MatrixXd logs(G, G);
    for (int g = 0; g < G; ++g)
      for (int h = 0; h < G; ++h)
        logs(g, h) = model.edge_term(e, field.centers[g], field.centers[h]);
    if (!logs.allFinite())
      throw NumericError("non-finite edge term on edge " + std::to_string(e));
    const double shift = logs.maxCoeff();
    field.log_shift += shift;
    field.edge_factors.push_back((logs.array() - shift).exp().matrix());
  }
  for (const auto& f : field.node_factors)
    if (!(f.minCoeff() > 0.0))
      throw NumericError("node factor underflows to zero");
  for (const auto& f : field.edge_factors)
    if (!(f.minCoeff() > 0.0))
      throw NumericError("edge factor underflows to zero");
  return field;
}

namespace {

void
normalize(Eigen::VectorXd& v, double dx)
{
  const double z = v.sum() * dx;
  if (!(z > 0.0) || !std::isfinite(z))
    throw NumericError("message normalization failed");
  v /= z;
}

// e^theta_i times all incoming messages except the one from `skip` (a node label,
// or graph.size() to keep all of them).
Eigen::VectorXd
cavity(const DiscretizedField& field, const std::vector<Eigen::VectorXd>& messages, std::size_t i,
       std::size_t skip)
{
  const Graph& graph = field.graph;
  Eigen::VectorXd p = field.node_factors[i];
  const auto& nb = graph.neighbors(i);
  const auto& inc = graph.incident(i);
  for (std::size_t k = 0; k < nb.size(); ++k) {
    if (nb[k] == skip)
      continue;
    const std::size_t e = inc[k];
    // message into i along e
    const std::size_t idx = graph.edge(e).v == i ? 2 * e : 2 * e + 1;
    p.array() *= messages[idx].array();
  }
  return p;
}

} // namespace

LbpState
lbp_solve(const DiscretizedField& field, const LbpOptions& options)
{
  if (!(options.tol > 0.0))
    throw std::invalid_argument("LBP tolerance must be positive");
  if (options.damping < 0.0 || options.damping >= 1.0)
    throw std::invalid_argument("damping must lie in [0, 1)");
  const Graph& graph = field.graph;
  const std::size_t G = field.grid_size();
  const double dx = field.cell_width;

  LbpState state;
  state.messages.assign(2 * graph.edge_count(), Eigen::VectorXd::Constant(G, 1.0 / field.interval.width()));
  std::vector<Eigen::VectorXd> next(state.messages.size());
  state.residual = std::numeric_limits<double>::infinity();
  while (state.iterations < options.max_iter) {
    for (std::size_t e = 0; e < graph.edge_count(); ++e) {
      const auto& edge = graph.edge(e);
      Eigen::VectorXd pi_u = cavity(field, state.messages, edge.u, edge.v);
      Eigen::VectorXd pi_v = cavity(field, state.messages, edge.v, edge.u);
      normalize(pi_u, dx);
      normalize(pi_v, dx);
      const Eigen::MatrixXd& W = field.edge_factors[e];
      Eigen::VectorXd to_v = W.transpose() * pi_u * dx;
      Eigen::VectorXd to_u = W * pi_v * dx;
      normalize(to_v, dx);
      normalize(to_u, dx);
      next[2 * e] = std::move(to_v);
      next[2 * e + 1] = std::move(to_u);
    }
    double residual = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      Eigen::VectorXd updated = (1.0 - options.damping) * next[k] + options.damping * state.messages[k];
      normalize(updated, dx);
      residual = std::max(residual, (updated - state.messages[k]).cwiseAbs().maxCoeff());
      state.messages[k] = std::move(updated);
    }
    ++state.iterations;
    state.residual = residual;
    if (residual < options.tol) {
      state.converged = true;
      break;
    }
  }
  if (graph.edge_count() == 0) {
    state.residual = 0.0;
    state.converged = true;
  }
  return state;
}

Beliefs
lbp_beliefs(const DiscretizedField& field, const LbpState& state)
{
  const Graph& graph = field.graph;
  const double dx = field.cell_width;
  Beliefs out;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    Eigen::VectorXd b = cavity(field, state.messages, i, graph.size());
    normalize(b, dx);
    out.nodes.push_back(std::move(b));
  }
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edge(e);
    const Eigen::VectorXd pi_u = cavity(field, state.messages, edge.u, edge.v);
    const Eigen::VectorXd pi_v = cavity(field, state.messages, edge.v, edge.u);
    Eigen::MatrixXd xi = pi_u.asDiagonal() * field.edge_factors[e] * pi_v.asDiagonal();
    const double z = xi.sum() * dx * dx;
    if (!(z > 0.0) || !std::isfinite(z))
      throw NumericError("edge belief normalization failed");
    out.edges.push_back(xi / z);
  }
  return out;
}

ChainSolution
chain_marginals_exact(const DiscretizedField& field)
{
  const Graph& graph = field.graph;
  const auto order = graph.chain_order();
  if (order.empty())
    throw std::invalid_argument("chain_marginals_exact needs a chain graph");
  const std::size_t n = order.size();
  const double dx = field.cell_width;

  // Transfer matrix from order[k] to order[k+1], oriented (from, to).
  auto transfer = [&](std::size_t k) -> Eigen::MatrixXd {
    const std::size_t a = order[k], b = order[k + 1];
    const std::size_t e = *graph.edge_index(a, b);
    return a < b ? field.edge_factors[e] : field.edge_factors[e].transpose();
  };
  std::vector<Eigen::MatrixXd> T(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k)
    T[k] = transfer(k);

  // Scaled forward pass; log_z accumulates the scale factors.
  std::vector<Eigen::VectorXd> fwd(n), bwd(n);
  double log_z = 0.0;
  fwd[0] = field.node_factors[order[0]];
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double s = fwd[k].sum() * dx;
    log_z += std::log(s);
    fwd[k] /= s;
    fwd[k + 1] = (T[k].transpose() * fwd[k] * dx).cwiseProduct(field.node_factors[order[k + 1]]);
  }
  const double last = fwd[n - 1].sum() * dx;
  log_z += std::log(last);
  fwd[n - 1] /= last;

  bwd[n - 1] = Eigen::VectorXd::Ones(field.grid_size());
  for (std::size_t k = n - 1; k-- > 0;) {
    bwd[k] = T[k] * bwd[k + 1].cwiseProduct(field.node_factors[order[k + 1]]) * dx;
    bwd[k] /= bwd[k].maxCoeff();
  }

  ChainSolution out;
  out.marginals.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::VectorXd p = fwd[k].cwiseProduct(bwd[k]);
    p /= p.sum() * dx;
    out.marginals[order[k]] = std::move(p);
  }
  out.log_partition = log_z + field.log_shift;
  if (!std::isfinite(out.log_partition))
    throw NumericError("chain log-partition is not finite");
  return out;
}

double
l1_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double cell_width)
{
  return (p - q).cwiseAbs().sum() * cell_width;
}

} // namespace cmrf

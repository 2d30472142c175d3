#pragma once

#include "cmrf/core/graph.hpp"
#include "cmrf/core/interval.hpp"
#include "cmrf/sample/energy.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cmrf {

//! Pairwise field tabulated at G cell centers (midpoint rule).
//!
//! node_factors[i][g] = exp(theta_i(x_g) - shift) and
//! edge_factors[e](g, h) = exp(w_e(x_g, x_h) - shift) with rows belonging to
//! the lower node of the edge; log_shift is the sum of the removed shifts.
struct DiscretizedField
{
  Graph graph;
  Interval interval;
  std::vector<double> centers;
  double cell_width{ 0.0 };
  std::vector<Eigen::VectorXd> node_factors;
  std::vector<Eigen::MatrixXd> edge_factors;
  double log_shift{ 0.0 };

  std::size_t grid_size() const { return centers.size(); }
};

DiscretizedField discretize(const PairwiseEnergy& model, int G);

struct LbpOptions
{
  double damping{ 0.5 };
  double tol{ 1e-10 };
  int max_iter{ 10000 };
};

//! Messages m_{u->v} at index 2e and m_{v->u} at index 2e+1 for edge e = {u, v}.
struct LbpState
{
  std::vector<Eigen::VectorXd> messages;
  double residual{ 0.0 };
  int iterations{ 0 };
  bool converged{ false };
};

//! Synchronous damped loopy BP from flat messages. Every message is kept
//! normalized to sum(m) * cell_width = 1. Non-convergence is reported through
//! the state, not thrown.
LbpState lbp_solve(const DiscretizedField& field, const LbpOptions& options = {});

//! Grid densities (sum * cell_width = 1 per node, sum * cell_width^2 = 1 per edge).
struct Beliefs
{
  std::vector<Eigen::VectorXd> nodes;
  std::vector<Eigen::MatrixXd> edges;
};

Beliefs lbp_beliefs(const DiscretizedField& field, const LbpState& state);

struct ChainSolution
{
  std::vector<Eigen::VectorXd> marginals; //!< indexed by node label
  double log_partition{ 0.0 };            //!< of the discretized model
};

//! Exact marginals and log-partition on a chain by transfer-matrix
//! elimination. Throws std::invalid_argument when the graph is not a chain.
ChainSolution chain_marginals_exact(const DiscretizedField& field);

//! sum_g |p_g - q_g| * cell_width
double l1_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double cell_width);

} // namespace cmrf

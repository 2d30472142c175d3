#pragma once

#include "cmrf/basis/basis.hpp"
#include "cmrf/core/dataset.hpp"
#include "cmrf/core/graph.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace cmrf {

//! Expansion coefficients of the truncated beliefs up to order K.
//!
//! Node i holds c_i^(s), s = 1..K, at index s-1. Edge e = {u, v} (u < v)
//! holds the K x K matrix d_e^(s,t) with the row index s belonging to u.
//! The fixed components c^(0) = 1/sqrt(chi), d^(0,0) = 1/chi and
//! d^(s,0) = c_u^(s)/sqrt(chi) are implied and not stored. K = 0 describes
//! the uniform density.
class MomentSet
{
public:
  MomentSet(Graph graph, BasisSystem basis, int order);

  int order() const { return order_; }
  const Graph& graph() const { return graph_; }
  const BasisSystem& basis() const { return basis_; }
  double chi() const { return basis_.chi(); }

  const Eigen::VectorXd& node(std::size_t i) const { return c_.at(i); }
  Eigen::VectorXd& node(std::size_t i) { return c_.at(i); }
  const Eigen::MatrixXd& edge(std::size_t e) const { return d_.at(e); }
  Eigen::MatrixXd& edge(std::size_t e) { return d_.at(e); }

  //! phi_0(x) .. phi_{out.size()-1}(x), no range check.
  void basis_values(double x, std::span<double> out) const;

  //! Truncated node belief from precomputed basis values phi_1..phi_K.
  double node_belief(std::size_t i, std::span<const double> phi) const
  {
    double b = inv_chi_;
    const auto& c = c_[i];
    for (int s = 0; s < order_; ++s)
      b += c[s] * phi[s];
    return b;
  }
  //! Truncated edge belief from the node beliefs and basis values at both ends.
  double edge_belief(std::size_t e, double bu, double bv, std::span<const double> phi_u,
                     std::span<const double> phi_v) const
  {
    double xi = (bu + bv) * inv_chi_ - inv_chi_ * inv_chi_;
    const auto& d = d_[e];
    for (int s = 0; s < order_; ++s) {
      double row = 0.0;
      for (int t = 0; t < order_; ++t)
        row += d(s, t) * phi_v[t];
      xi += phi_u[s] * row;
    }
    return xi;
  }

private:
  Graph graph_;
  BasisSystem basis_;
  int order_;
  double inv_chi_;
  std::vector<Eigen::VectorXd> c_;
  std::vector<Eigen::MatrixXd> d_;
};

//! Sample averages c_i^(s) = <phi_s(x_i)> and d_ij^(s,t) = <phi_s(x_i) phi_t(x_j)>.
MomentSet compute_moments(const Dataset& data, const Graph& graph, const BasisSystem& basis, int order);

//! b_i^(K)(x) = 1/chi + sum_s c_i^(s) phi_s(x); may be negative.
double belief_node(const MomentSet& m, std::size_t i, double x);

//! xi_ij^(K)(x_i, x_j) for the edge {i, j}; i and j may be given in either order.
double belief_edge(const MomentSet& m, std::size_t i, std::size_t j, double xi, double xj);

} // namespace cmrf

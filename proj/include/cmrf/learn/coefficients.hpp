#pragma once

#include "cmrf/learn/learned_model.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace cmrf {

//! Energy coefficients recovered from a learned model.
//!
//! A_i^(s) = int phi_s ln b~_i and B_e^(s,t) = int int phi_s phi_t ln xi~_e
//! (B includes the s = 0 / t = 0 boundary row and column). The parametric
//! form follows as
//!   H_i^(s) = (1 - |d_i|) A_i^(s) + chi^{-1/2} sum_{j in d_i} B_ij^(s,0),
//!   J_e^(s,t) = B_e^(s,t)   (s, t >= 1).
struct CoefficientSet
{
  Graph graph;
  BasisSystem basis;
  int order{ 0 };
  double epsilon{ 0.0 };
  std::vector<Eigen::VectorXd> H; //!< index s-1
  std::vector<Eigen::VectorXd> A; //!< index s-1
  std::vector<Eigen::MatrixXd> J; //!< (s-1, t-1), row s belongs to the lower node
  std::vector<Eigen::MatrixXd> B; //!< (s, t) for s, t = 0..order

  //! J_ij^(s,t) with node i carrying s; equals J_ji^(t,s).
  double coupling(std::size_t i, std::size_t j, int s, int t) const;

  //! Psi_dagger(x) = -sum_i sum_s H_i^(s) phi_s(x_i) - sum_ij sum_st J^(s,t) phi_s(x_i) phi_t(x_j)
  double energy(std::span<const double> x) const;
};

//! Projects ln b~ and ln xi~ onto the basis up to `order` (defaults to the
//! model's K) and assembles H and J.
CoefficientSet recover_coefficients(const LearnedModel& model, int order = -1);

//! F(c, d) = -sum H c - sum J d + sum_i (1 - |d_i|) int b~ ln b~ + sum_ij int int xi~ ln xi~,
//! with the cutoff beliefs built from `m` at the coefficients' epsilon.
double bethe_free_energy(const MomentSet& m, const CoefficientSet& coeffs);

} // namespace cmrf

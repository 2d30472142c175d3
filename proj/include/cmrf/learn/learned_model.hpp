#pragma once

#include "cmrf/basis/quadrature.hpp"
#include "cmrf/learn/moments.hpp"
#include "cmrf/sample/energy.hpp"

#include <filesystem>
#include <string>

namespace cmrf {

//! Tensor-product style point set on [alpha, beta]^2 for one edge: outer
//! Gauss nodes in x_u, kink-adapted inner rules in x_v.
struct EdgeQuadrature
{
  std::vector<double> xu;
  std::vector<double> xv;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

//! Learned CMRF: truncated beliefs with the epsilon cutoff.
//!
//! Energy (additive constant dropped):
//!   Psi(x) = -sum_i (1 - |d_i|) ln max(eps, b_i(x_i)) - sum_ij ln max(eps, xi_ij(x_i, x_j)).
//! Cutoff normalizers and the kink-adapted quadrature rules are computed at
//! construction; the object is immutable afterwards.
class LearnedModel final : public PairwiseEnergy
{
public:
  LearnedModel(MomentSet moments, double epsilon);

  const MomentSet& moments() const { return moments_; }
  int order() const { return moments_.order(); }
  double epsilon() const { return epsilon_; }
  const BasisSystem& basis() const { return moments_.basis(); }

  //! int max(eps, b_i) over the interval.
  double node_normalizer(std::size_t i) const { return node_norm_.at(i); }
  //! int int max(eps, xi_e) over the square.
  double edge_normalizer(std::size_t e) const { return edge_norm_.at(e); }
  bool node_cutoff_active(std::size_t i) const { return node_active_.at(i); }
  bool edge_cutoff_active(std::size_t e) const { return edge_active_.at(e); }
  bool cutoff_active() const;

  const QuadratureRule& node_rule(std::size_t i) const { return node_rules_.at(i); }
  const EdgeQuadrature& edge_rule(std::size_t e) const { return edge_rules_.at(e); }

  //! Normalized cutoff beliefs b~ and xi~.
  double cutoff_node_belief(std::size_t i, double x) const;
  double cutoff_edge_belief(std::size_t e, double xu, double xv) const;

  //! theta_i = (1 - |d_i|) ln max(eps, b_i)
  double node_term(std::size_t i, double xi) const override;
  //! w_e = ln max(eps, xi_e)
  double edge_term(std::size_t e, double xu, double xv) const override;
  double energy(std::span<const double> x) const override;

  //! Density of exp(-energy); K = 0 gives a constant.
  double unnorm_density(std::span<const double> x) const;

private:
  MomentSet moments_;
  double epsilon_;
  std::vector<double> node_norm_;
  std::vector<double> edge_norm_;
  std::vector<bool> node_active_;
  std::vector<bool> edge_active_;
  std::vector<QuadratureRule> node_rules_;
  std::vector<EdgeQuadrature> edge_rules_;
};

//! compute_moments followed by the cutoff construction.
LearnedModel fit(const Dataset& data, const Graph& graph, const BasisSystem& basis, int order, double epsilon);

std::string to_text(const LearnedModel& model);
LearnedModel model_from_text(const std::string& text);
void save_model(const LearnedModel& model, const std::filesystem::path& path);
LearnedModel load_model(const std::filesystem::path& path);

} // namespace cmrf

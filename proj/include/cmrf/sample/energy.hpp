#pragma once

#include "cmrf/core/graph.hpp"
#include "cmrf/core/interval.hpp"

#include <cstddef>
#include <functional>
#include <span>

namespace cmrf {

//! Energy Psi(x) on [alpha, beta]^n; the density is proportional to exp(-Psi).
class EnergyModel
{
public:
  virtual ~EnergyModel() = default;

  virtual std::size_t size() const = 0;
  virtual Interval interval() const = 0;
  virtual double energy(std::span<const double> x) const = 0;

  //! Psi(x with x_i = value) - Psi(x). The default evaluates Psi twice.
  virtual double delta_energy(std::span<const double> x, std::size_t i, double value) const;
};

//! Pairwise energy Psi(x) = -sum_i theta_i(x_i) - sum_{u<v} w_uv(x_u, x_v).
//!
//! Exposes the local terms so that grid discretization and single-site
//! updates can work on them directly.
class PairwiseEnergy : public EnergyModel
{
public:
  PairwiseEnergy(Graph graph, Interval interval);

  const Graph& graph() const { return graph_; }
  std::size_t size() const override { return graph_.size(); }
  Interval interval() const override { return interval_; }

  //! theta_i(x_i)
  virtual double node_term(std::size_t i, double xi) const = 0;
  //! w_e(x_u, x_v) for edge e = {u, v}, u < v.
  virtual double edge_term(std::size_t e, double xu, double xv) const = 0;

  double energy(std::span<const double> x) const override;
  double delta_energy(std::span<const double> x, std::size_t i, double value) const override;

protected:
  void check_point(std::span<const double> x) const;

private:
  Graph graph_;
  Interval interval_;
};

//! Psi_gen(x) = -sum_i (x_i - mu)^2 - sum_{ij} |x_i - x_j| with
//! mu = (beta - alpha) / 2, or its negation when `negate` is set.
class GenerativeEnergy final : public PairwiseEnergy
{
public:
  GenerativeEnergy(Graph graph, Interval interval, bool negate = false);

  double node_term(std::size_t i, double xi) const override;
  double edge_term(std::size_t e, double xu, double xv) const override;

  double center() const { return mu_; }

private:
  double mu_;
  double sign_;
};

//! Arbitrary energy given as a callable.
class FunctionEnergy final : public EnergyModel
{
public:
  using Function = std::function<double(std::span<const double>)>;

  FunctionEnergy(std::size_t n, Interval interval, Function psi);

  std::size_t size() const override { return n_; }
  Interval interval() const override { return interval_; }
  double energy(std::span<const double> x) const override { return psi_(x); }

private:
  std::size_t n_;
  Interval interval_;
  Function psi_;
};

GenerativeEnergy generative_energy(const Graph& graph, Interval interval, bool negate = false);

} // namespace cmrf

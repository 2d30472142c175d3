#include "cmrf/sample/energy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmrf {

double
EnergyModel::delta_energy(std::span<const double> x, std::size_t i, double value) const
{
  std::vector<double> y(x.begin(), x.end());
  y.at(i) = value;
  return energy(y) - energy(x);
}

PairwiseEnergy::PairwiseEnergy(Graph graph, Interval interval)
  : graph_(std::move(graph))
  , interval_(checked_interval(interval.lower, interval.upper))
{}

void
PairwiseEnergy::check_point(std::span<const double> x) const
{
  if (x.size() != graph_.size())
    throw std::invalid_argument("point has " + std::to_string(x.size()) + " coordinates, model has " +
                                std::to_string(graph_.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!interval_.contains(x[i]))
      throw std::domain_error("coordinate " + std::to_string(i) + " = " + std::to_string(x[i]) +
                              " outside the model interval");
}

double
PairwiseEnergy::energy(std::span<const double> x) const
{
  check_point(x);
  double psi = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    psi -= node_term(i, x[i]);
  const auto& edges = graph_.edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    psi -= edge_term(e, x[edges[e].u], x[edges[e].v]);
  return psi;
}

double
PairwiseEnergy::delta_energy(std::span<const double> x, std::size_t i, double value) const
{
  const double old = x[i];
  double delta = -(node_term(i, value) - node_term(i, old));
  const auto& nb = graph_.neighbors(i);
  const auto& inc = graph_.incident(i);
  for (std::size_t k = 0; k < nb.size(); ++k) {
    const std::size_t e = inc[k];
    const double xj = x[nb[k]];
    if (i < nb[k])
      delta -= edge_term(e, value, xj) - edge_term(e, old, xj);
    else
      delta -= edge_term(e, xj, value) - edge_term(e, xj, old);
  }
  return delta;
}

GenerativeEnergy::GenerativeEnergy(Graph graph, Interval interval, bool negate)
  : PairwiseEnergy(std::move(graph), interval)
  , mu_(0.5 * (interval.upper - interval.lower))
  , sign_(negate ? -1.0 : 1.0)
{}

double
GenerativeEnergy::node_term(std::size_t, double xi) const
{
  const double d = xi - mu_;
  return sign_ * d * d;
}

double
GenerativeEnergy::edge_term(std::size_t, double xu, double xv) const
{
  return sign_ * std::abs(xu - xv);
}

FunctionEnergy::FunctionEnergy(std::size_t n, Interval interval, Function psi)
  : n_(n)
  , interval_(checked_interval(interval.lower, interval.upper))
  , psi_(std::move(psi))
{
  if (n_ == 0)
    throw std::invalid_argument("energy model needs n >= 1");
}

GenerativeEnergy
generative_energy(const Graph& graph, Interval interval, bool negate)
{
  return GenerativeEnergy(graph, interval, negate);
}

} // namespace cmrf

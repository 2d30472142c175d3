#include "cmrf/basis/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace cmrf {

namespace {

struct TableDeleter
{
  void operator()(gsl_integration_glfixed_table* t) const { gsl_integration_glfixed_table_free(t); }
};

// GSL builds the orders it does not tabulate to about 1e-12; two Newton
// steps on P_n bring node and weight to rounding level.
void
polish(int n, double& x, double& w)
{
  double dp = 0.0;
  for (int iter = 0; iter < 2; ++iter) {
    double p0 = 1.0, p1 = x;
    for (int k = 1; k < n; ++k) {
      double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    x -= p1 / dp;
  }
  w = 2.0 / ((1.0 - x * x) * dp * dp);
}

// Reference Gauss-Legendre rule on [-1, 1], cached per order.
const QuadratureRule&
reference_rule(int order)
{
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end())
    return it->second;
  std::unique_ptr<gsl_integration_glfixed_table, TableDeleter> table(
    gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order)));
  if (!table)
    throw std::runtime_error("failed to build Gauss-Legendre table");
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int k = 0; k < order; ++k) {
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(k), &rule.nodes[k], &rule.weights[k],
                                  table.get());
    polish(order, rule.nodes[k], rule.weights[k]);
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

void
append_mapped(QuadratureRule& out, const QuadratureRule& ref, double a, double b)
{
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t k = 0; k < ref.size(); ++k) {
    out.nodes.push_back(mid + half * ref.nodes[k]);
    out.weights.push_back(half * ref.weights[k]);
  }
}

} // namespace

QuadratureRule
make_quadrature(Interval interval, int order)
{
  if (order < 2)
    throw std::invalid_argument("quadrature order must be >= 2");
  QuadratureRule rule;
  rule.nodes.reserve(order);
  rule.weights.reserve(order);
  append_mapped(rule, reference_rule(order), interval.lower, interval.upper);
  return rule;
}

std::vector<double>
threshold_crossings(const std::function<double(double)>& f, double threshold, Interval interval, int cells)
{
  if (cells < 1)
    throw std::invalid_argument("pre-scan needs at least one cell");
  std::vector<double> prescan(static_cast<std::size_t>(cells) + 1);
  for (int k = 0; k <= cells; ++k)
    prescan[k] = f(k == cells ? interval.upper : interval.lower + k * interval.width() / cells);
  return threshold_crossings(f, threshold, interval, prescan);
}

std::vector<double>
threshold_crossings(const std::function<double(double)>& f, double threshold, Interval interval,
                    std::span<const double> prescan)
{
  if (prescan.size() < 2)
    throw std::invalid_argument("pre-scan needs at least two points");
  const std::size_t cells = prescan.size() - 1;
  const double h = interval.width() / static_cast<double>(cells);
  std::vector<double> roots;
  for (std::size_t k = 0; k < cells; ++k) {
    const double g0 = prescan[k] - threshold;
    const double g1 = prescan[k + 1] - threshold;
    if ((g0 < 0.0) == (g1 < 0.0))
      continue;
    double lo = interval.lower + k * h;
    double hi = k + 1 == cells ? interval.upper : interval.lower + (k + 1) * h;
    const bool lo_below = g0 < 0.0;
    for (int it = 0; it < 60 && hi - lo > 1e-15 * interval.width(); ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((f(mid) - threshold < 0.0) == lo_below)
        lo = mid;
      else
        hi = mid;
    }
    roots.push_back(0.5 * (lo + hi));
  }
  return roots;
}

QuadratureRule
piecewise_quadrature(Interval interval, const std::vector<double>& breaks, int order)
{
  if (order < 2)
    throw std::invalid_argument("quadrature order must be >= 2");
  std::vector<double> cuts{ interval.lower };
  for (double b : breaks)
    if (b > interval.lower && b < interval.upper)
      cuts.push_back(b);
  cuts.push_back(interval.upper);
  std::sort(cuts.begin(), cuts.end());
  const auto& ref = reference_rule(order);
  QuadratureRule rule;
  rule.nodes.reserve(ref.size() * (cuts.size() - 1));
  rule.weights.reserve(ref.size() * (cuts.size() - 1));
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    if (cuts[k + 1] > cuts[k])
      append_mapped(rule, ref, cuts[k], cuts[k + 1]);
  return rule;
}

} // namespace cmrf

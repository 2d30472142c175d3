#pragma once

#include "cmrf/core/interval.hpp"

#include <functional>
#include <span>
#include <vector>

namespace cmrf {

//! Nodes and positive weights of an interpolatory rule on an interval.
struct QuadratureRule
{
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template<class F>
  double integrate(F&& f) const
  {
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      sum += weights[k] * f(nodes[k]);
    return sum;
  }
};

//! Gauss-Legendre rule with `order` nodes mapped onto the interval; exact for
//! polynomials of degree 2*order - 1.
QuadratureRule make_quadrature(Interval interval, int order);

inline constexpr int default_quadrature_order_1d = 64;
inline constexpr int default_quadrature_order_2d = 48;
inline constexpr int default_prescan_cells = 256;

//! Roots of f - threshold on the interval, located by a uniform pre-scan of
//! `cells` cells followed by bisection inside every cell whose end values
//! straddle the threshold.
std::vector<double> threshold_crossings(const std::function<double(double)>& f, double threshold,
                                        Interval interval, int cells = default_prescan_cells);

//! Same, with f already tabulated at the cells + 1 uniform points
//! lower + k * width / cells.
std::vector<double> threshold_crossings(const std::function<double(double)>& f, double threshold,
                                        Interval interval, std::span<const double> prescan);

//! Composite Gauss rule split at the given breakpoints (each piece gets
//! `order` nodes). Breakpoints outside the open interval are ignored.
QuadratureRule piecewise_quadrature(Interval interval, const std::vector<double>& breaks, int order);

} // namespace cmrf

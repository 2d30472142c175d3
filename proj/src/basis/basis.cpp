#include "cmrf/basis/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmrf {

std::string_view
to_string(BasisKind kind)
{
  return kind == BasisKind::cosine ? "cosine" : "legendre";
}

BasisKind
basis_kind_from_string(std::string_view name)
{
  if (name == "cosine")
    return BasisKind::cosine;
  if (name == "legendre")
    return BasisKind::legendre;
  throw std::invalid_argument("unknown basis kind '" + std::string(name) + "'");
}

Interval
BasisSystem::native_interval(BasisKind kind)
{
  return kind == BasisKind::cosine ? Interval{ 0.0, std::numbers::pi } : Interval{ -1.0, 1.0 };
}

BasisSystem::BasisSystem(BasisKind kind, int max_order)
  : BasisSystem(kind, native_interval(kind), max_order)
{}

BasisSystem::BasisSystem(BasisKind kind, Interval interval, int max_order)
  : kind_(kind)
  , interval_(checked_interval(interval.lower, interval.upper))
  , max_order_(max_order)
{
  if (max_order < 0)
    throw std::invalid_argument("max_order must be non-negative");
  const Interval native = native_interval(kind);
  const double ratio = native.width() / interval_.width();
  scale_ = std::sqrt(ratio);
  // x in [gamma, delta] -> alpha + (x - gamma) * chi / chi_target
  slope_ = ratio;
  offset_ = (native.lower * interval_.upper - native.upper * interval_.lower) / interval_.width();
  phi0_ = 1.0 / std::sqrt(interval_.width());
}

BasisSystem
BasisSystem::transform_interval(Interval target) const
{
  if (!(target.lower < target.upper))
    throw std::invalid_argument("transform target requires gamma < delta");
  return BasisSystem(kind_, target, max_order_);
}

double
BasisSystem::phi(int s, double x) const
{
  if (s < 0 || s > max_order_)
    throw std::invalid_argument("basis order " + std::to_string(s) + " outside [0, " +
                                std::to_string(max_order_) + "]");
  if (!interval_.contains(x))
    throw std::domain_error("x = " + std::to_string(x) + " outside the basis interval");
  if (s == 0)
    return phi0_;
  std::vector<double> values(static_cast<std::size_t>(s) + 1);
  eval_all(x, values);
  return values.back();
}

void
BasisSystem::eval_all(double x, std::span<double> out) const
{
  if (out.empty())
    return;
  out[0] = phi0_;
  if (out.size() == 1)
    return;
  const Interval native = native_interval(kind_);
  const double u = std::clamp(slope_ * x + offset_, native.lower, native.upper);
  const std::size_t count = out.size();
  if (kind_ == BasisKind::cosine) {
    // cos((s+1)u) = 2 cos(u) cos(s u) - cos((s-1)u)
    const double amp = std::sqrt(2.0 / std::numbers::pi) * scale_;
    const double c1 = std::cos(u);
    double prev = 1.0, cur = c1;
    out[1] = amp * cur;
    for (std::size_t s = 2; s < count; ++s) {
      const double next = 2.0 * c1 * cur - prev;
      prev = cur;
      cur = next;
      out[s] = amp * cur;
    }
    return;
  }
  double prev = 1.0 / std::sqrt(2.0);
  double cur = std::sqrt(1.5) * u;
  out[1] = scale_ * cur;
  for (std::size_t s = 1; s + 1 < count; ++s) {
    const double sd = static_cast<double>(s);
    const double next = (2.0 * sd + 1.0) / (sd + 1.0) * std::sqrt((2.0 * sd + 3.0) / (2.0 * sd + 1.0)) * u * cur -
                        sd / (sd + 1.0) * std::sqrt((2.0 * sd + 3.0) / (2.0 * sd - 1.0)) * prev;
    prev = cur;
    cur = next;
    out[s + 1] = scale_ * cur;
  }
}

double
legendre_explicit(int s, double x)
{
  if (s < 0)
    throw std::invalid_argument("legendre order must be non-negative");
  double sum = 0.0;
  double binom = 1.0; // C(s, k)
  for (int k = 0; k <= s; ++k) {
    sum += binom * binom * std::pow(x - 1.0, s - k) * std::pow(x + 1.0, k);
    binom = binom * (s - k) / (k + 1);
  }
  return std::ldexp(1.0, -s) * std::sqrt((2.0 * s + 1.0) / 2.0) * sum;
}

} // namespace cmrf

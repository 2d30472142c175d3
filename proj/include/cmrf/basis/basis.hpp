#pragma once

#include "cmrf/core/interval.hpp"

#include <span>
#include <string>
#include <string_view>

namespace cmrf {

enum class BasisKind
{
  cosine,   //!< sqrt(2/pi) cos(s x) on [0, pi]
  legendre, //!< normalized Legendre polynomials on [-1, 1]
};

std::string_view to_string(BasisKind kind);
BasisKind basis_kind_from_string(std::string_view name);

//! Orthonormal function family {phi_s} on a finite interval with a constant
//! phi_0 = 1/sqrt(chi).
//!
//! A system is defined on its kind's native interval and carried to any other
//! interval by the affine change of variables that preserves orthonormality.
class BasisSystem
{
public:
  static constexpr int default_max_order = 16;

  explicit BasisSystem(BasisKind kind, int max_order = default_max_order);
  //! Native system transformed onto `interval`.
  BasisSystem(BasisKind kind, Interval interval, int max_order = default_max_order);

  BasisKind kind() const { return kind_; }
  Interval interval() const { return interval_; }
  double chi() const { return interval_.width(); }
  int max_order() const { return max_order_; }

  //! phi_s(x). Throws std::domain_error for x outside the interval and
  //! std::invalid_argument for s outside [0, max_order].
  double phi(int s, double x) const;

  //! out[s] = phi_s(x) for s = 0..out.size()-1; no argument checks.
  void eval_all(double x, std::span<double> out) const;

  //! Same family on [gamma, delta].
  BasisSystem transform_interval(Interval target) const;

  static Interval native_interval(BasisKind kind);

  friend bool operator==(const BasisSystem& a, const BasisSystem& b)
  {
    return a.kind_ == b.kind_ && a.interval_ == b.interval_ && a.max_order_ == b.max_order_;
  }

private:
  BasisKind kind_;
  Interval interval_;
  int max_order_;
  double scale_;  // sqrt(native width / width)
  double slope_;  // x -> native coordinate
  double offset_;
  double phi0_;
};

//! Closed-form normalized Legendre polynomial (binomial sum). Test oracle for
//! the recursion used by BasisSystem.
double legendre_explicit(int s, double x);

} // namespace cmrf

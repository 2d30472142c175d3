#pragma once

#include <stdexcept>

namespace cmrf {

//! Closed interval [lower, upper] with lower < upper.
struct Interval
{
  double lower{ 0.0 };
  double upper{ 1.0 };

  constexpr double width() const { return upper - lower; }
  constexpr bool contains(double x) const { return x >= lower && x <= upper; }
  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

inline Interval
checked_interval(double lower, double upper)
{
  if (!(lower < upper))
    throw std::invalid_argument("interval requires lower < upper");
  return { lower, upper };
}

} // namespace cmrf

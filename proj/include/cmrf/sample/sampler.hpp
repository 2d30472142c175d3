#pragma once

#include "cmrf/core/dataset.hpp"
#include "cmrf/sample/energy.hpp"

#include <cstddef>
#include <cstdint>

namespace cmrf {

struct SamplerConfig
{
  std::size_t burn_in{ 10000 }; //!< sweeps discarded before the first kept sample
  std::size_t thinning{ 10 };   //!< sweeps between kept samples
  std::uint64_t seed{ 1 };
};

//! Single-site Metropolis-Hastings with uniform proposals on the interval.
//! One sweep is n single-site updates at uniformly chosen sites. The result
//! is a deterministic function of (model, N, cfg).
Dataset mh_sample(const EnergyModel& model, std::size_t N, const SamplerConfig& cfg);

//! min(1, exp(-(Psi(x with x_i = value) - Psi(x)))).
double mh_acceptance(const EnergyModel& model, std::span<const double> x, std::size_t i, double value);

} // namespace cmrf

#include "cmrf/sample/sampler.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace cmrf {

double
mh_acceptance(const EnergyModel& model, std::span<const double> x, std::size_t i, double value)
{
  const double delta = model.delta_energy(x, i, value);
  return delta <= 0.0 ? 1.0 : std::exp(-delta);
}

Dataset
mh_sample(const EnergyModel& model, std::size_t N, const SamplerConfig& cfg)
{
  if (N == 0)
    throw std::invalid_argument("mh_sample needs N >= 1");
  if (cfg.thinning == 0)
    throw std::invalid_argument("thinning must be >= 1");
  const std::size_t n = model.size();
  const Interval box = model.interval();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> proposal(box.lower, box.upper);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> site(0, n - 1);

  std::vector<double> x(n);
  for (auto& xi : x)
    xi = proposal(rng);

  auto sweep = [&] {
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t i = site(rng);
      const double value = proposal(rng);
      const double delta = model.delta_energy(x, i, value);
      if (delta <= 0.0 || unit(rng) < std::exp(-delta))
        x[i] = value;
    }
  };

  for (std::size_t s = 0; s < cfg.burn_in; ++s)
    sweep();
  std::vector<double> values;
  values.reserve(N * n);
  for (std::size_t k = 0; k < N; ++k) {
    for (std::size_t s = 0; s < cfg.thinning; ++s)
      sweep();
    values.insert(values.end(), x.begin(), x.end());
  }
  return Dataset(n, std::move(values), box);
}

} // namespace cmrf

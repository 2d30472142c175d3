#pragma once

#include "cmrf/core/dataset.hpp"
#include "cmrf/learn/moments.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

namespace testing {

//! Fresh scratch directory under the system temp dir.
inline std::filesystem::path
scratch_dir(const std::string& name)
{
  auto dir = std::filesystem::temp_directory_path() / ("cmrf_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline cmrf::Dataset
uniform_dataset(std::size_t n, std::size_t N, cmrf::Interval iv, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(iv.lower, iv.upper);
  std::vector<double> v(n * N);
  for (auto& x : v)
    x = u(rng);
  return { n, std::move(v), iv };
}

//! Moments whose coefficients decay like scale / s^2, small enough that the
//! truncated beliefs stay well above any small cutoff.
inline cmrf::MomentSet
smooth_moments(const cmrf::Graph& graph, const cmrf::BasisSystem& basis, int K, double scale, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  cmrf::MomentSet m(graph, basis, K);
  for (std::size_t i = 0; i < graph.size(); ++i)
    for (int s = 0; s < K; ++s)
      m.node(i)[s] = scale * u(rng) / ((s + 1.0) * (s + 1.0));
  for (std::size_t e = 0; e < graph.edge_count(); ++e)
    for (int s = 0; s < K; ++s)
      for (int t = 0; t < K; ++t)
        m.edge(e)(s, t) = scale * u(rng) / ((s + 1.0) * (s + 1.0) * (t + 1.0) * (t + 1.0));
  return m;
}

//! Arbitrary moments: coefficients drawn without regard to positivity.
inline cmrf::MomentSet
random_moments(const cmrf::Graph& graph, const cmrf::BasisSystem& basis, int K, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  cmrf::MomentSet m(graph, basis, K);
  for (std::size_t i = 0; i < graph.size(); ++i)
    for (int s = 0; s < K; ++s)
      m.node(i)[s] = u(rng);
  for (std::size_t e = 0; e < graph.edge_count(); ++e)
    for (int s = 0; s < K; ++s)
      for (int t = 0; t < K; ++t)
        m.edge(e)(s, t) = u(rng);
  return m;
}

} // namespace testing
